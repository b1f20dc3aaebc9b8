// times the OpenMP subsample kernel against the serial reference and checks
// that both produce identical support tables
#include <chrono>
#include <iostream>
#include <string>

#include "gstars/rng.hpp"
#include "gstars/stars.hpp"
#include "gstars/synth.hpp"

using namespace gstars;

namespace {
double run_seconds(bool parallel, int workers, const Eigen::MatrixXd& X,
                   const SubsamplePlan& plan, const RegularizationGrid& grid,
                   const GlassoConfig& solver, SupportTable& table) {
    const auto t0 = std::chrono::steady_clock::now();
    if (parallel)
        compute_cells(table, X, plan, grid, solver, workers, 0, plan.N, 0, grid.size() - 1);
    else
        compute_cells_serial(table, X, plan, grid, solver, 0, plan.N, 0, grid.size() - 1);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool tables_equal(const SupportTable& a, const SupportTable& b) {
    for (int r = 0; r < a.N(); ++r)
        for (int k = 0; k < a.K(); ++k) {
            if (a.computed(r, k) != b.computed(r, k) || a.failed(r, k) != b.failed(r, k))
                return false;
            if (a.computed(r, k) && !a.failed(r, k) && !(a.graph(r, k) == b.graph(r, k)))
                return false;
        }
    return true;
}
} // namespace

int main(int argc, char** argv) {
    int p = 60, n = 200, N = 20, K = 20, workers = 0;
    std::uint64_t seed = 7;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const int v = std::stoi(argv[i + 1]);
        if (flag == "--p")
            p = v;
        else if (flag == "--n")
            n = v;
        else if (flag == "--N")
            N = v;
        else if (flag == "--K")
            K = v;
        else if (flag == "--workers")
            workers = v;
        else if (flag == "--seed")
            seed = static_cast<std::uint64_t>(v);
        else {
            std::cerr << "unknown flag " << flag << '\n';
            return 2;
        }
    }

    GeneratorConfig gen;
    gen.family = GraphFamily::erdos_renyi;
    gen.p = p;
    gen.sparsity = 3.0 / p;
    const PrecisionModel model = generate(gen, derive_seed(seed, 1));
    const Eigen::MatrixXd X = sample_mvn(model, n, derive_seed(seed, 2));

    StarsConfig cfg;
    cfg.N = N;
    cfg.K = K;
    cfg.seed = derive_seed(seed, 3);
    const RegularizationGrid grid = default_grid(X, cfg);
    const SubsamplePlan plan = make_plan(n, N, cfg.seed);

    SupportTable serial_table(p, K, N), parallel_table(p, K, N);
    const double t_serial =
        run_seconds(false, workers, X, plan, grid, cfg.solver, serial_table);
    const double t_parallel =
        run_seconds(true, workers, X, plan, grid, cfg.solver, parallel_table);
    const bool equal = tables_equal(serial_table, parallel_table);

    std::cout << "p=" << p << " n=" << n << " N=" << N << " K=" << K << '\n'
              << "serial_seconds   " << t_serial << '\n'
              << "parallel_seconds " << t_parallel << " (workers=" << workers << ")\n"
              << "speedup          " << (t_parallel > 0 ? t_serial / t_parallel : 0.0) << '\n'
              << "tables_identical " << (equal ? "yes" : "NO") << '\n';
    return equal ? 0 : 1;
}
