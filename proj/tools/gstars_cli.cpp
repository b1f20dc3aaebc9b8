// command-line front end: generate | select | graphlets | maxent | bench |
// pbd-curves. Exit codes: 0 success, 2 config/validation, 3 data/parse,
// 4 numerical failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "gstars/bench.hpp"
#include "gstars/glasso.hpp"
#include "gstars/graphlets.hpp"
#include "gstars/io.hpp"
#include "gstars/maxent.hpp"
#include "gstars/pbd.hpp"
#include "gstars/rng.hpp"
#include "gstars/stars.hpp"
#include "gstars/synth.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("GSTARS_OUT_DIR"); env && *env) return env;
    return ".";
}

void write_manifest(const std::string& dir, const std::string& prefix, const json& j) {
    std::ofstream out(dir + "/" + prefix + "_manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << j.dump(2) << '\n';
}

json grid_json(const gstars::RegularizationGrid& grid) {
    json a = json::array();
    for (double l : grid.lambdas) a.push_back(l);
    return a;
}

// ---------------------------------------------------------------------- //

struct GenerateOpts {
    std::string family = "er";
    int p = 40;
    int n = 200;
    std::uint64_t seed = 0;
    double sparsity = -1.0; // <0: family default (3/p for ER)
    int n_hubs = 2;
    double hub_weight = -0.117;
    double weight_min = -1.0, weight_max = 1.0;
    double edge_factor = 1.65;
    double diag_slack = 0.1;
    std::string out_dir, prefix = "model";
};

int cmd_generate(const GenerateOpts& o) {
    gstars::GeneratorConfig gen;
    gen.family = gstars::parse_family(o.family);
    gen.p = o.p;
    gen.sparsity = o.sparsity > 0 ? o.sparsity : 3.0 / o.p;
    gen.n_hubs = o.n_hubs;
    gen.hub_weight = o.hub_weight;
    gen.weight_min = o.weight_min;
    gen.weight_max = o.weight_max;
    gen.edge_factor = o.edge_factor;
    gen.diag_slack = o.diag_slack;
    gen.validate();
    if (o.n < 2) throw std::invalid_argument("generate: n must be >= 2");

    const gstars::PrecisionModel model = gstars::generate(gen, o.seed);
    const Eigen::MatrixXd X = gstars::sample_mvn(model, o.n, gstars::derive_seed(o.seed, 2));

    const std::string dir = resolve_out_dir(o.out_dir);
    fs::create_directories(dir);
    gstars::write_edge_list(dir + "/" + o.prefix + "_truth_edges.txt", model.graph,
                            &model.theta);
    gstars::write_matrix_csv(dir + "/" + o.prefix + "_theta.csv", model.theta);
    gstars::write_matrix_csv(dir + "/" + o.prefix + "_data.csv", X);

    json manifest{{"subcommand", "generate"},
                  {"family", gstars::family_name(gen.family)},
                  {"p", o.p},
                  {"n", o.n},
                  {"seed", o.seed},
                  {"sparsity", gen.sparsity},
                  {"n_hubs", gen.n_hubs},
                  {"hub_weight", gen.hub_weight},
                  {"weight_min", gen.weight_min},
                  {"weight_max", gen.weight_max},
                  {"edge_factor", gen.edge_factor},
                  {"diag_slack", gen.diag_slack},
                  {"edges", static_cast<long long>(model.graph.edge_count())}};
    write_manifest(dir, o.prefix, manifest);
    std::cout << "generated " << gstars::family_name(gen.family) << " p=" << o.p
              << " n=" << o.n << " edges=" << model.graph.edge_count() << " -> " << dir
              << "/" << o.prefix << "_*\n";
    return kExitOk;
}

// ---------------------------------------------------------------------- //

struct SelectOpts {
    std::string data_path;
    std::string method = "bstars";
    double beta = 0.1;
    int N = 20, K = 20;
    double ratio = 0.01;
    int b = 0;
    std::uint64_t seed = 0;
    int workers = 0;
    double tol = 1e-4;
    int max_iter = 200;
    std::string out_dir, prefix = "select";
};

void write_curve_csv(const std::string& path, const gstars::SelectionReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "k,lambda,n_used,d_hat,d_bar,d_ub,d_ub_bar,delta,graphlet_var\n";
    const int K = rep.grid.size();
    auto cell = [&](const std::vector<double>& v, int k) {
        return (k < static_cast<int>(v.size()) && std::isfinite(v[static_cast<std::size_t>(k)]))
                   ? gstars::format_double(v[static_cast<std::size_t>(k)])
                   : std::string();
    };
    for (int k = 0; k < K; ++k) {
        out << k << ',' << gstars::format_double(rep.grid[k]) << ',';
        if (k < static_cast<int>(rep.curve.n_used.size()))
            out << rep.curve.n_used[static_cast<std::size_t>(k)];
        out << ',' << cell(rep.curve.d_hat, k) << ',' << cell(rep.curve.d_bar, k) << ','
            << cell(rep.curve.d_ub, k) << ',' << cell(rep.curve.d_ub_bar, k) << ','
            << cell(rep.curve.delta, k) << ',' << cell(rep.graphlet_var, k) << '\n';
    }
}

json report_json(const gstars::SelectionReport& rep) {
    json j{{"method", rep.method}, {"beta", rep.beta},   {"N", rep.N},
           {"b", rep.b},           {"seed", rep.seed},   {"grid", grid_json(rep.grid)},
           {"warnings", rep.warnings}};
    auto put_idx = [&](const char* name, const std::optional<int>& k) {
        if (k) j[name] = *k;
    };
    put_idx("k_lb", rep.k_lb);
    put_idx("k_ub", rep.k_ub);
    put_idx("k_beta", rep.k_beta);
    put_idx("k_gamma", rep.k_gamma);
    auto put_val = [&](const char* name, double v) {
        if (std::isfinite(v)) j[name] = v;
    };
    put_val("lambda_lb", rep.lambda_lb);
    put_val("lambda_ub", rep.lambda_ub);
    put_val("lambda_beta", rep.lambda_beta);
    put_val("lambda_gamma", rep.lambda_gamma);
    put_val("gap_b", rep.gap_b);
    put_val("gap_beta", rep.gap_beta);
    j["window_lo"] = rep.window_lo;
    j["window_hi"] = rep.window_hi;
    j["selected_edges"] = static_cast<long long>(rep.selected_graph.edge_count());
    return j;
}

int cmd_select(const SelectOpts& o) {
    const Eigen::MatrixXd X = gstars::read_data_csv(o.data_path);
    gstars::StarsConfig cfg;
    cfg.beta = o.beta;
    cfg.N = o.N;
    cfg.K = o.K;
    cfg.ratio = o.ratio;
    cfg.b = o.b;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.solver.tol = o.tol;
    cfg.solver.max_iter = o.max_iter;
    if (!(o.beta > 0.0 && o.beta <= 1.0))
        throw std::invalid_argument("select: beta must lie in (0,1]");

    const auto t0 = std::chrono::steady_clock::now();
    const gstars::RegularizationGrid grid = gstars::default_grid(X, cfg);
    gstars::SelectionReport rep;
    if (o.method == "stars")
        rep = gstars::stars(X, grid, cfg);
    else if (o.method == "bstars")
        rep = gstars::bstars(X, grid, cfg);
    else if (o.method == "gstars")
        rep = gstars::gstars(X, grid, cfg);
    else
        throw std::invalid_argument("select: unknown method '" + o.method + "'");
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string dir = resolve_out_dir(o.out_dir);
    fs::create_directories(dir);
    write_curve_csv(dir + "/" + o.prefix + "_curve.csv", rep);
    gstars::write_edge_list(dir + "/" + o.prefix + "_graph.txt", rep.selected_graph,
                            rep.selected_theta.size() > 0 ? &rep.selected_theta : nullptr);
    {
        std::ofstream out(dir + "/" + o.prefix + "_report.json");
        out << report_json(rep).dump(2) << '\n';
    }
    {
        // wall-clock kept out of the deterministic outputs
        std::ofstream out(dir + "/" + o.prefix + "_timings.txt");
        out << "select_seconds " << seconds << '\n';
    }
    // workers is omitted: results are independent of the worker count
    json manifest{{"subcommand", "select"}, {"data", o.data_path}, {"method", o.method},
                  {"beta", o.beta},         {"N", o.N},            {"K", o.K},
                  {"ratio", o.ratio},       {"b", o.b},            {"seed", o.seed},
                  {"tol", o.tol},           {"max_iter", o.max_iter}};
    write_manifest(dir, o.prefix, manifest);
    std::cout << "method=" << rep.method;
    if (rep.k_beta) std::cout << " lambda_beta=" << gstars::format_double(rep.lambda_beta);
    if (rep.k_gamma) std::cout << " lambda_gamma=" << gstars::format_double(rep.lambda_gamma);
    std::cout << " edges=" << rep.selected_graph.edge_count() << '\n';
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------- //

struct GraphletOpts {
    std::string graph_path;
    int p = 0;
    std::string out_dir, prefix = "graphlets";
};

int cmd_graphlets(const GraphletOpts& o) {
    const gstars::UndirectedGraph g = gstars::read_edge_list(o.graph_path, o.p);
    const gstars::GraphletDegreeMatrix M = gstars::count_orbits(g);
    const Eigen::MatrixXd R = gstars::gcm(M);
    const Eigen::VectorXd rho = gstars::gcv(R);

    const std::string dir = resolve_out_dir(o.out_dir);
    fs::create_directories(dir);
    {
        std::ofstream out(dir + "/" + o.prefix + "_orbits.csv");
        if (!out) throw std::runtime_error("cannot write orbit counts");
        out << "node";
        for (int c = 0; c < 15; ++c) out << ",orbit" << c;
        out << '\n';
        for (Eigen::Index v = 0; v < M.rows(); ++v) {
            out << (v + 1);
            for (int c = 0; c < 15; ++c) out << ',' << M(v, c);
            out << '\n';
        }
    }
    gstars::write_matrix_csv(dir + "/" + o.prefix + "_gcm.csv", R);
    gstars::write_matrix_csv(dir + "/" + o.prefix + "_gcv.csv", rho);
    json manifest{{"subcommand", "graphlets"},
                  {"graph", o.graph_path},
                  {"p", g.p()},
                  {"edges", static_cast<long long>(g.edge_count())}};
    write_manifest(dir, o.prefix, manifest);
    std::cout << "p=" << g.p() << " edges=" << g.edge_count() << " -> " << dir << "/"
              << o.prefix << "_*\n";
    return kExitOk;
}

// ---------------------------------------------------------------------- //

struct MaxEntOpts {
    double q_bar = 0.5;
    double eps = 3.0 / 780.0;
    double cap0 = 1.0, capN = 1.0;
    double c = 0.0;
    bool use_c_max = false;
    bool find_c_max_only = false;
    int n_min = 2, n_max = 50;
    std::string out_dir, prefix = "maxent";
};

int cmd_maxent(const MaxEntOpts& o) {
    gstars::MaxEntInput in;
    in.N = std::max(2, o.n_min);
    in.q_bar = o.q_bar;
    in.eps = o.eps;
    in.cap0 = o.cap0;
    in.capN = o.capN;
    in.validate();
    if (o.n_min < 1 || o.n_max < o.n_min)
        throw std::invalid_argument("maxent: need 1 <= N-min <= N-max");

    std::optional<double> c_max;
    if (o.use_c_max || o.find_c_max_only) c_max = gstars::find_c_max(in);
    const double c = o.use_c_max ? *c_max : o.c;

    const std::string dir = resolve_out_dir(o.out_dir);
    fs::create_directories(dir);
    json manifest{{"subcommand", "maxent"}, {"q_bar", o.q_bar},   {"eps", o.eps},
                  {"cap0", o.cap0},         {"capN", o.capN},     {"c", c},
                  {"n_min", o.n_min},       {"n_max", o.n_max}};
    if (c_max) manifest["c_max"] = *c_max;

    if (!o.find_c_max_only) {
        std::vector<int> range;
        for (int n = o.n_min; n <= o.n_max; ++n) range.push_back(n);
        const auto seq = gstars::variance_sequence(in, c, range);
        std::ofstream out(dir + "/" + o.prefix + "_models.csv");
        if (!out) throw std::runtime_error("cannot write model sequence");
        out << "N,c,mean,variance,entropy,feasible\n";
        for (const auto& e : seq)
            out << e.N << ',' << gstars::format_double(e.c) << ','
                << gstars::format_double(e.mean) << ',' << gstars::format_double(e.variance)
                << ',' << gstars::format_double(e.entropy) << ',' << (e.feasible ? 1 : 0)
                << '\n';
    }
    write_manifest(dir, o.prefix, manifest);
    if (c_max) std::cout << "c_max=" << gstars::format_double(*c_max) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------- //

struct BenchOpts {
    std::string config_path;
    std::string out_dir, prefix = "bench";
};

int cmd_bench(const BenchOpts& o) {
    std::ifstream in(o.config_path);
    if (!in) throw gstars::ParseError("cannot open config file " + o.config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw gstars::ParseError(std::string("config parse error: ") + e.what());
    }
    auto require = [&](const char* field) {
        if (!j.contains(field))
            throw std::invalid_argument(std::string("bench config: missing field '") + field +
                                        "'");
    };
    for (const char* f : {"settings", "repetitions", "seed"}) require(f);

    gstars::ExperimentConfig cfg;
    for (const auto& s : j.at("settings")) {
        for (const char* f : {"family", "n", "p"})
            if (!s.contains(f))
                throw std::invalid_argument(
                    std::string("bench config: setting missing field '") + f + "'");
        gstars::ExperimentSetting es;
        es.family = gstars::parse_family(s.at("family").get<std::string>());
        es.n = s.at("n").get<int>();
        es.p = s.at("p").get<int>();
        cfg.settings.push_back(es);
    }
    cfg.repetitions = j.at("repetitions").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.beta = j.value("beta", 0.1);
    cfg.N = j.value("N", 20);
    cfg.K = j.value("K", 20);
    cfg.ratio = j.value("ratio", 0.01);
    cfg.workers = j.value("workers", 0);
    cfg.solver.tol = j.value("tol", 1e-4);
    cfg.solver.max_iter = j.value("max_iter", 200);

    const gstars::BenchmarkReport rep = gstars::run_benchmark(cfg);

    const std::string dir = resolve_out_dir(o.out_dir);
    fs::create_directories(dir);
    gstars::write_benchmark_csv(rep, dir + "/" + o.prefix + "_summary.csv",
                                dir + "/" + o.prefix + "_gaps.csv");
    {
        std::ofstream out(dir + "/" + o.prefix + "_timings.txt");
        for (const auto& cell : rep.cells)
            out << gstars::family_name(cell.setting.family) << ' ' << cell.setting.n << ' '
                << cell.setting.p << ' ' << cell.seconds << '\n';
    }
    json manifest = j;
    manifest["subcommand"] = "bench";
    write_manifest(dir, o.prefix, manifest);
    int failures = 0;
    for (const auto& cell : rep.cells) {
        failures += cell.failures;
        for (const auto& msg : cell.failure_messages) std::cerr << "excluded: " << msg << '\n';
    }
    std::cout << "cells=" << rep.cells.size() << " repetitions=" << cfg.repetitions
              << " excluded=" << failures << " -> " << dir << "/" << o.prefix << "_*\n";
    return kExitOk;
}

// ---------------------------------------------------------------------- //

struct PbdCurveOpts {
    std::string data_path;
    int N = 20, K = 20;
    double ratio = 0.01;
    int b = 0;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_dir, prefix = "pbd";
};

int cmd_pbd_curves(const PbdCurveOpts& o) {
    const Eigen::MatrixXd X = gstars::read_data_csv(o.data_path);
    gstars::StarsConfig cfg;
    cfg.N = o.N;
    cfg.K = o.K;
    cfg.ratio = o.ratio;
    cfg.b = o.b;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    const gstars::RegularizationGrid grid = gstars::default_grid(X, cfg);
    const gstars::SubsamplePlan plan =
        gstars::make_plan(static_cast<int>(X.rows()), cfg.N, cfg.seed, cfg.b);
    gstars::SupportTable table(static_cast<int>(X.cols()), grid.size(), cfg.N);
    gstars::compute_cells(table, X, plan, grid, cfg.solver, cfg.workers, 0, cfg.N, 0,
                          grid.size() - 1);
    const gstars::VariabilityCurve curve = gstars::curves_from_table(table, 0, grid.size() - 1);

    const std::string dir = resolve_out_dir(o.out_dir);
    fs::create_directories(dir);
    std::ofstream out(dir + "/" + o.prefix + "_curves.csv");
    if (!out) throw std::runtime_error("cannot write curves");
    out << "k,lambda,n_used,d_hat,d_ub,delta,d_bar,d_ub_bar\n";
    for (int k = 0; k < grid.size(); ++k) {
        const auto u = static_cast<std::size_t>(k);
        out << k << ',' << gstars::format_double(grid[k]) << ',' << curve.n_used[u] << ','
            << gstars::format_double(curve.d_hat[u]) << ','
            << gstars::format_double(curve.d_ub[u]) << ','
            << gstars::format_double(curve.delta[u]) << ','
            << gstars::format_double(curve.d_bar[u]) << ','
            << gstars::format_double(curve.d_ub_bar[u]) << '\n';
    }
    json manifest{{"subcommand", "pbd-curves"}, {"data", o.data_path}, {"N", o.N},
                  {"K", o.K},                   {"ratio", o.ratio},    {"b", o.b},
                  {"seed", o.seed}};
    write_manifest(dir, o.prefix, manifest);
    std::cout << "wrote " << dir << "/" << o.prefix << "_curves.csv\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability-based model selection for sparse Gaussian graphical models"};
    app.require_subcommand(1);

    GenerateOpts g;
    auto* gen = app.add_subcommand("generate", "generate a ground-truth model and data");
    gen->add_option("family", g.family, "er | hub | neighborhood")->required();
    gen->add_option("--p", g.p, "node count");
    gen->add_option("--n", g.n, "sample count");
    gen->add_option("--seed", g.seed, "RNG seed");
    gen->add_option("--sparsity", g.sparsity, "ER edge probability (default 3/p)");
    gen->add_option("--hubs", g.n_hubs, "hub group count");
    gen->add_option("--hub-weight", g.hub_weight, "hub edge weight");
    gen->add_option("--weight-min", g.weight_min, "uniform weight lower bound");
    gen->add_option("--weight-max", g.weight_max, "uniform weight upper bound");
    gen->add_option("--edge-factor", g.edge_factor, "neighborhood edges ~ factor * p");
    gen->add_option("--diag-slack", g.diag_slack, "diagonal dominance slack");
    gen->add_option("--out", g.out_dir, "output directory");
    gen->add_option("--prefix", g.prefix, "output file prefix");

    SelectOpts s;
    auto* sel = app.add_subcommand("select", "run stability selection on a data CSV");
    sel->add_option("--data", s.data_path, "n x p data CSV")->required();
    sel->add_option("--method", s.method, "stars | bstars | gstars");
    sel->add_option("--beta", s.beta, "instability threshold");
    sel->add_option("--N", s.N, "subsample count");
    sel->add_option("--K", s.K, "grid size");
    sel->add_option("--ratio", s.ratio, "lambda_min / lambda_max");
    sel->add_option("--b", s.b, "subsample size (0 = rule)");
    sel->add_option("--seed", s.seed, "RNG seed");
    sel->add_option("--workers", s.workers, "worker threads (0 = all cores)");
    sel->add_option("--tol", s.tol, "solver tolerance");
    sel->add_option("--max-iter", s.max_iter, "solver sweep limit");
    sel->add_option("--out", s.out_dir, "output directory");
    sel->add_option("--prefix", s.prefix, "output file prefix");

    GraphletOpts gl;
    auto* grl = app.add_subcommand("graphlets", "orbit counts and correlation outputs");
    grl->add_option("--graph", gl.graph_path, "edge-list file")->required();
    grl->add_option("--p", gl.p, "node count (0 = infer)");
    grl->add_option("--out", gl.out_dir, "output directory");
    grl->add_option("--prefix", gl.prefix, "output file prefix");

    MaxEntOpts m;
    auto* mx = app.add_subcommand("maxent", "constrained maximum-entropy model sequences");
    mx->add_option("--qbar", m.q_bar, "target mean");
    mx->add_option("--eps", m.eps, "mean tolerance");
    mx->add_option("--cap0", m.cap0, "cap on mass at 0");
    mx->add_option("--capN", m.capN, "cap on mass at 1");
    mx->add_option("--c", m.c, "bimodality parameter");
    mx->add_flag("--use-c-max", m.use_c_max, "solve at c = c_max");
    mx->add_flag("--find-c-max", m.find_c_max_only, "only report c_max");
    mx->add_option("--N-min", m.n_min, "smallest N");
    mx->add_option("--N-max", m.n_max, "largest N");
    mx->add_option("--out", m.out_dir, "output directory");
    mx->add_option("--prefix", m.prefix, "output file prefix");

    BenchOpts b;
    auto* bn = app.add_subcommand("bench", "synthetic benchmark protocol");
    bn->add_option("--config", b.config_path, "JSON experiment config")->required();
    bn->add_option("--out", b.out_dir, "output directory");
    bn->add_option("--prefix", b.prefix, "output file prefix");

    PbdCurveOpts pc;
    auto* pbd = app.add_subcommand("pbd-curves", "variability decomposition curves");
    pbd->add_option("--data", pc.data_path, "n x p data CSV")->required();
    pbd->add_option("--N", pc.N, "subsample count");
    pbd->add_option("--K", pc.K, "grid size");
    pbd->add_option("--ratio", pc.ratio, "lambda_min / lambda_max");
    pbd->add_option("--b", pc.b, "subsample size (0 = rule)");
    pbd->add_option("--seed", pc.seed, "RNG seed");
    pbd->add_option("--workers", pc.workers, "worker threads");
    pbd->add_option("--out", pc.out_dir, "output directory");
    pbd->add_option("--prefix", pc.prefix, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(g);
        if (sel->parsed()) return cmd_select(s);
        if (grl->parsed()) return cmd_graphlets(gl);
        if (mx->parsed()) return cmd_maxent(m);
        if (bn->parsed()) return cmd_bench(b);
        if (pbd->parsed()) return cmd_pbd_curves(pc);
    } catch (const gstars::ParseError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gstars::NonConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitConfig;
}
