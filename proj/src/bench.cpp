#include "gstars/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gstars/graphlets.hpp"
#include "gstars/io.hpp"
#include "gstars/rng.hpp"

namespace gstars {

namespace {

double ratio_or(long long num, long long den, double when_empty) {
    return den == 0 ? when_empty : static_cast<double>(num) / static_cast<double>(den);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GeneratorConfig generator_for(const ExperimentSetting& s) {
    GeneratorConfig gen;
    gen.family = s.family;
    gen.p = s.p;
    switch (s.family) {
        case GraphFamily::erdos_renyi:
            gen.sparsity = 3.0 / s.p;
            break;
        case GraphFamily::hub: {
            int h = std::max(1, s.p / 20);
            while (h > 1 && s.p % h != 0) --h;
            gen.n_hubs = h;
            break;
        }
        case GraphFamily::neighborhood:
            break;
    }
    return gen;
}

struct Accumulator {
    std::vector<double> f1, precision, recall;
    void add(const RecoveryMetrics& m) {
        f1.push_back(m.f1);
        precision.push_back(m.precision);
        recall.push_back(m.recall);
    }
    MethodStats stats(const std::string& name) const {
        MethodStats s;
        s.method = name;
        s.n_ok = static_cast<int>(f1.size());
        if (s.n_ok == 0) return s;
        auto mean = [](const std::vector<double>& v) {
            double acc = 0;
            for (double x : v) acc += x;
            return acc / static_cast<double>(v.size());
        };
        s.f1_mean = mean(f1);
        s.precision_mean = mean(precision);
        s.recall_mean = mean(recall);
        if (s.n_ok >= 2) {
            double ss = 0;
            for (double x : f1) ss += (x - s.f1_mean) * (x - s.f1_mean);
            s.f1_std = std::sqrt(ss / (s.n_ok - 1));
        }
        return s;
    }
};

// rows [2, N) of a table returned by the bounded procedure hold supports on
// the restricted window only; complete the missing column runs
void complete_table(SupportTable& table, const Eigen::MatrixXd& X, const SubsamplePlan& plan,
                    const RegularizationGrid& grid, const GlassoConfig& solver, int workers) {
    if (table.N() <= 2) return;
    const int K = table.K();
    int k = 0;
    while (k < K) {
        if (table.computed(2, k)) {
            ++k;
            continue;
        }
        int hi = k;
        while (hi + 1 < K && !table.computed(2, hi + 1)) ++hi;
        compute_cells(table, X, plan, grid, solver, workers, 2, table.N(), k, hi);
        k = hi + 1;
    }
}

} // namespace

RecoveryMetrics recovery_metrics(const UndirectedGraph& estimate,
                                 const UndirectedGraph& truth) {
    if (estimate.p() != truth.p())
        throw std::invalid_argument("recovery_metrics: dimension mismatch");
    RecoveryMetrics m;
    const std::size_t L = pair_count(estimate.p());
    for (std::size_t l = 0; l < L; ++l) {
        const bool e = estimate.has_pair(l), t = truth.has_pair(l);
        if (e && t)
            ++m.tp;
        else if (e)
            ++m.fp;
        else if (t)
            ++m.fn;
        else
            ++m.tn;
    }
    if (m.tp + m.fp + m.fn == 0) {
        // both graphs empty: perfect agreement
        m.precision = m.recall = m.f1 = m.tpr = 1.0;
    } else {
        m.precision = ratio_or(m.tp, m.tp + m.fp, 0.0);
        m.recall = ratio_or(m.tp, m.tp + m.fn, 0.0);
        m.tpr = m.recall;
        m.f1 = (m.precision + m.recall) > 0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
    }
    m.fpr = ratio_or(m.fp, m.fp + m.tn, 0.0);
    return m;
}

OracleSelection oracle_select(const PathEstimate& path, const UndirectedGraph& truth) {
    if (path.supports.empty()) throw std::invalid_argument("oracle_select: empty path");
    OracleSelection best;
    for (int k = 0; k < static_cast<int>(path.supports.size()); ++k) {
        const double f1 = recovery_metrics(path.supports[static_cast<std::size_t>(k)], truth).f1;
        if (best.k < 0 || f1 >= best.f1) { // >= : ties go to larger lambda
            best.k = k;
            best.lambda = path.grid[k];
            best.f1 = f1;
        }
    }
    return best;
}

void ExperimentConfig::validate() const {
    if (settings.empty()) throw std::invalid_argument("benchmark: settings must not be empty");
    if (repetitions < 1) throw std::invalid_argument("benchmark: repetitions must be >= 1");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("benchmark: beta must lie in (0,1]");
    if (N < 2) throw std::invalid_argument("benchmark: N must be >= 2");
    if (K < 2) throw std::invalid_argument("benchmark: K must be >= 2");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("benchmark: ratio must lie in (0,1)");
    for (const auto& s : settings) {
        if (s.n < 4) throw std::invalid_argument("benchmark: n must be >= 4");
        if (s.p < 2) throw std::invalid_argument("benchmark: p must be >= 2");
    }
}

BenchmarkReport run_benchmark(const ExperimentConfig& config) {
    config.validate();
    BenchmarkReport report;
    report.config = config;
    for (std::size_t ci = 0; ci < config.settings.size(); ++ci) {
        const ExperimentSetting& setting = config.settings[ci];
        const auto cell_start = std::chrono::steady_clock::now();
        CellReport cell;
        cell.setting = setting;
        Accumulator acc_stars, acc_bstars, acc_gstars, acc_oracle;
        const std::uint64_t cell_seed = derive_seed(config.seed, 0xBE00ULL + ci);

        for (int rep = 0; rep < config.repetitions; ++rep) {
            const std::uint64_t rep_seed =
                derive_seed(cell_seed, static_cast<std::uint64_t>(rep));
            try {
                const GeneratorConfig gen = generator_for(setting);
                const PrecisionModel model = generate(gen, derive_seed(rep_seed, 1));
                const Eigen::MatrixXd X = sample_mvn(model, setting.n, derive_seed(rep_seed, 2));

                StarsConfig scfg;
                scfg.beta = config.beta;
                scfg.N = config.N;
                scfg.K = config.K;
                scfg.ratio = config.ratio;
                scfg.seed = derive_seed(rep_seed, 3);
                scfg.workers = config.workers;
                scfg.solver = config.solver;
                const RegularizationGrid grid = default_grid(X, scfg);

                // one support table per repetition: bounded pass first, then
                // the remaining cells, from which every selection is derived
                BStarsOutcome out = bstars_with_table(X, grid, scfg, /*refit=*/false);
                if (std::isfinite(out.report.gap_b)) cell.gap_b.push_back(out.report.gap_b);
                if (std::isfinite(out.report.gap_beta))
                    cell.gap_beta.push_back(out.report.gap_beta);

                complete_table(out.table, X, out.plan, grid, scfg.solver, scfg.workers);
                const VariabilityCurve full = curves_from_table(out.table, 0, grid.size() - 1);
                const std::optional<int> k_stars = select_lambda(full.d_bar, config.beta);
                const std::optional<int> k_bstars = out.report.k_beta;

                std::optional<int> k_gstars;
                if (out.report.k_lb) {
                    const std::vector<double> gvar = graphlet_variability_curve(
                        out.table, out.report.window_lo, out.report.window_hi, config.workers);
                    for (int k = out.report.window_hi; k >= out.report.window_lo; --k) {
                        const double v = gvar[static_cast<std::size_t>(k)];
                        if (std::isnan(v)) continue;
                        if (!k_gstars || v < gvar[static_cast<std::size_t>(*k_gstars)])
                            k_gstars = k;
                    }
                }
                if (!k_gstars) k_gstars = k_bstars;

                const Eigen::MatrixXd sigma = sample_covariance(X).sigma_hat;
                auto refit_metrics = [&](int k) {
                    return recovery_metrics(refit_at(sigma, grid, k, scfg.solver).support(),
                                            model.graph);
                };
                if (k_stars) acc_stars.add(refit_metrics(*k_stars));
                if (k_bstars) acc_bstars.add(refit_metrics(*k_bstars));
                if (k_gstars) acc_gstars.add(refit_metrics(*k_gstars));

                const PathEstimate path = fit_path(sigma, grid, scfg.solver, false);
                const OracleSelection orc = oracle_select(path, model.graph);
                RecoveryMetrics om = recovery_metrics(
                    path.supports[static_cast<std::size_t>(orc.k)], model.graph);
                acc_oracle.add(om);
            } catch (const std::exception& e) {
                ++cell.failures;
                cell.failure_messages.push_back("rep " + std::to_string(rep) + ": " + e.what());
            }
        }
        cell.methods.push_back(acc_stars.stats("stars"));
        cell.methods.push_back(acc_bstars.stats("bstars"));
        cell.methods.push_back(acc_gstars.stats("gstars"));
        cell.methods.push_back(acc_oracle.stats("oracle"));
        cell.seconds = seconds_since(cell_start);
        report.cells.push_back(std::move(cell));
    }
    return report;
}

void write_benchmark_csv(const BenchmarkReport& report, const std::string& summary_path,
                         const std::string& gaps_path) {
    {
        std::ofstream out(summary_path);
        if (!out) throw std::runtime_error("cannot open " + summary_path);
        out << "family,n,p,method,n_ok,f1_mean,f1_std,precision_mean,recall_mean\n";
        for (const auto& cell : report.cells)
            for (const auto& m : cell.methods)
                out << family_name(cell.setting.family) << ',' << cell.setting.n << ','
                    << cell.setting.p << ',' << m.method << ',' << m.n_ok << ','
                    << format_double(m.f1_mean) << ',' << format_double(m.f1_std) << ','
                    << format_double(m.precision_mean) << ',' << format_double(m.recall_mean)
                    << '\n';
    }
    {
        std::ofstream out(gaps_path);
        if (!out) throw std::runtime_error("cannot open " + gaps_path);
        out << "family,n,p,rep,gap_b,gap_beta\n";
        for (const auto& cell : report.cells) {
            const std::size_t rows = std::max(cell.gap_b.size(), cell.gap_beta.size());
            for (std::size_t r = 0; r < rows; ++r) {
                out << family_name(cell.setting.family) << ',' << cell.setting.n << ','
                    << cell.setting.p << ',' << r << ',';
                out << (r < cell.gap_b.size() ? format_double(cell.gap_b[r]) : "") << ',';
                out << (r < cell.gap_beta.size() ? format_double(cell.gap_beta[r]) : "");
                out << '\n';
            }
        }
    }
}

SpeedupReport speedup_report(const ExperimentSetting& setting, const StarsConfig& cfg,
                             const GeneratorConfig& gen, std::uint64_t seed) {
    const PrecisionModel model = generate(gen, derive_seed(seed, 1));
    const Eigen::MatrixXd X = sample_mvn(model, setting.n, derive_seed(seed, 2));
    StarsConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(seed, 3);
    const RegularizationGrid grid = default_grid(X, run_cfg);

    SpeedupReport r;
    auto t0 = std::chrono::steady_clock::now();
    const SelectionReport full = stars(X, grid, run_cfg);
    r.stars_seconds = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const SelectionReport bounded = bstars(X, grid, run_cfg);
    r.bstars_seconds = seconds_since(t0);
    r.ratio = r.bstars_seconds > 0 ? r.stars_seconds / r.bstars_seconds : 0.0;
    r.lambda_beta_stars = full.lambda_beta;
    r.lambda_beta_bstars = bounded.lambda_beta;
    r.gap_beta = bounded.gap_beta;
    r.selections_match = full.k_beta && bounded.k_beta && *full.k_beta == *bounded.k_beta;
    return r;
}

} // namespace gstars
