#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gstars/glasso.hpp"
#include "gstars/graph.hpp"
#include "gstars/stars.hpp"
#include "gstars/synth.hpp"

namespace gstars {

/// Edge-set confusion counts over the L node pairs; diagonal entries never
/// count as edges.
struct RecoveryMetrics {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0;
    double recall = 0.0; // = TPR
    double f1 = 0.0;     // 2PR/(P+R), 0/0 -> 0
    double tpr = 0.0;
    double fpr = 0.0;
};

RecoveryMetrics recovery_metrics(const UndirectedGraph& estimate,
                                 const UndirectedGraph& truth);

struct OracleSelection {
    int k = -1;
    double lambda = 0.0;
    double f1 = 0.0;
};

/// Best F1 over the path; ties break toward larger lambda.
OracleSelection oracle_select(const PathEstimate& path, const UndirectedGraph& truth);

struct ExperimentSetting {
    GraphFamily family = GraphFamily::erdos_renyi;
    int n = 200;
    int p = 40;
};

struct ExperimentConfig {
    std::vector<ExperimentSetting> settings;
    int repetitions = 50;
    double beta = 0.1;
    int N = 20;
    int K = 20;
    double ratio = 0.01;
    std::uint64_t seed = 0;
    int workers = 0;
    GlassoConfig solver{};

    void validate() const; // throws std::invalid_argument
};

/// Per-cell per-method aggregates plus the raw gap samples.
struct MethodStats {
    std::string method;
    int n_ok = 0; // repetitions contributing
    double f1_mean = 0.0, f1_std = 0.0;
    double precision_mean = 0.0, recall_mean = 0.0;
};

struct CellReport {
    ExperimentSetting setting;
    std::vector<MethodStats> methods; // stars, bstars, gstars, oracle
    std::vector<double> gap_b;        // per repetition, lambda_ub - lambda_lb
    std::vector<double> gap_beta;     // per repetition, lambda_beta - lambda_lb
    int failures = 0;                 // repetitions excluded entirely
    std::vector<std::string> failure_messages;
    double seconds = 0.0;
};

struct BenchmarkReport {
    ExperimentConfig config;
    std::vector<CellReport> cells;
};

/// The synthetic experiment protocol: per repetition, generate a model and
/// data, compute one support table (pilot + full grid), and derive the
/// edge-stability, bounded, graphlet and oracle selections from it.
/// Per-repetition seeds are derived deterministically from config.seed.
BenchmarkReport run_benchmark(const ExperimentConfig& config);

/// mean/std F1 per (setting, method) plus per-repetition gap rows
void write_benchmark_csv(const BenchmarkReport& report, const std::string& summary_path,
                         const std::string& gaps_path);

struct SpeedupReport {
    double stars_seconds = 0.0;
    double bstars_seconds = 0.0;
    double ratio = 0.0; // stars / bstars
    double lambda_beta_stars = 0.0;
    double lambda_beta_bstars = 0.0;
    double gap_beta = 0.0;
    bool selections_match = false; // asserted whenever gap_beta > 0
};

/// Timed single-threaded comparison on shared seeds.
SpeedupReport speedup_report(const ExperimentSetting& setting, const StarsConfig& cfg,
                             const GeneratorConfig& gen, std::uint64_t seed);

} // namespace gstars
