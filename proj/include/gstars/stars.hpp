#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gstars/glasso.hpp"
#include "gstars/graph.hpp"

namespace gstars {

/// Row index sets for N subsamples of size b drawn without replacement.
/// Deterministic given seed; per-subsample streams are derived from the
/// subsample index, so any subset of subsamples can be (re)computed in any
/// order or in parallel with identical results.
struct SubsamplePlan {
    int n = 0;
    int b = 0;
    int N = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<int>> sets;
};

/// b defaults to min(floor(10*sqrt(n)), floor(0.8*n)).
SubsamplePlan make_plan(int n, int N, std::uint64_t seed, int b = 0);

/// Per-(subsample, lambda) estimated edge supports, stored as bitsets over
/// the L node pairs. The U-statistic table of edge frequencies is derived
/// from it. Cells are written once; reads see completed cells only.
class SupportTable {
public:
    SupportTable() = default;
    SupportTable(int p, int K, int N);

    int p() const { return p_; }
    int K() const { return K_; }
    int N() const { return N_; }
    std::size_t L() const { return L_; }

    bool computed(int r, int k) const { return computed_[idx(r, k)]; }
    bool failed(int r, int k) const { return failed_[idx(r, k)]; }
    void store(int r, int k, const UndirectedGraph& g);
    void mark_failed(int r, int k);

    UndirectedGraph graph(int r, int k) const;

    /// Number of usable subsamples contributing to column k.
    int n_used(int k) const;
    /// Edge frequencies theta_hat for column k (exact multiples of 1/n_used).
    /// Throws std::runtime_error when no subsample contributed.
    std::vector<double> frequencies(int k) const;
    std::vector<int> counts(int k) const;

private:
    std::size_t idx(int r, int k) const {
        return static_cast<std::size_t>(r) * K_ + k;
    }
    int p_ = 0, K_ = 0, N_ = 0;
    std::size_t L_ = 0, words_ = 0;
    std::vector<std::vector<std::uint64_t>> cells_;
    std::vector<char> computed_, failed_;
};

/// Fits the penalized estimator on subsamples r in [r0, r1) over grid
/// columns [k_lo, k_hi] (warm-started, sparse to dense) and stores the edge
/// supports. Subsamples are the parallel unit; results are independent of
/// the worker count. Solver failures mark the cell failed.
void compute_cells(SupportTable& table, const Eigen::MatrixXd& X,
                   const SubsamplePlan& plan, const RegularizationGrid& grid,
                   const GlassoConfig& solver, int workers, int r0, int r1,
                   int k_lo, int k_hi);

/// Serial reference for compute_cells (no thread pool); produces identical
/// tables cell for cell. Kept for equivalence testing and timing baselines.
void compute_cells_serial(SupportTable& table, const Eigen::MatrixXd& X,
                          const SubsamplePlan& plan, const RegularizationGrid& grid,
                          const GlassoConfig& solver, int r0, int r1, int k_lo, int k_hi);

/// Total edge instability (4/L) sum theta(1-theta), upper bound 4 tbar(1-tbar)
/// and within-probability variability, per grid column. Columns with no data
/// are NaN.
struct VariabilityCurve {
    std::vector<double> d_hat;   // D^_N
    std::vector<double> d_bar;   // monotonized D^_N
    std::vector<double> d_ub;    // 4 tbar (1-tbar)
    std::vector<double> d_ub_bar;
    std::vector<double> delta;   // within-probability variability
    std::vector<int> n_used;
};

VariabilityCurve curves_from_table(const SupportTable& table, int k_lo, int k_hi);

/// Running maximum over sparser models (lambda' >= lambda); NaN entries are
/// skipped. Result is non-increasing in lambda.
std::vector<double> monotonize(const std::vector<double>& curve);

/// Smallest grid index with monotonized instability <= beta; nullopt when no
/// grid point qualifies.
std::optional<int> select_lambda(const std::vector<double>& d_bar, double beta);

struct StarsConfig {
    double beta = 0.1;
    int N = 20;
    int K = 20;
    double ratio = 0.01;
    int b = 0; // 0 = default rule
    std::uint64_t seed = 0;
    int workers = 0; // 0 = all available cores
    GlassoConfig solver{};
};

struct SelectionReport {
    std::string method;
    RegularizationGrid grid;
    double beta = 0.1;
    int N = 0;
    int b = 0;
    std::uint64_t seed = 0;

    std::optional<int> k_lb, k_ub, k_beta, k_gamma;
    double lambda_lb = std::numeric_limits<double>::quiet_NaN();
    double lambda_ub = std::numeric_limits<double>::quiet_NaN();
    double lambda_beta = std::numeric_limits<double>::quiet_NaN();
    double lambda_gamma = std::numeric_limits<double>::quiet_NaN();
    double gap_b = std::numeric_limits<double>::quiet_NaN();
    double gap_beta = std::numeric_limits<double>::quiet_NaN();

    VariabilityCurve pilot; // N=2 pilot over the full grid (bstars/gstars)
    VariabilityCurve curve; // all-N curve; restricted window for bstars
    int window_lo = -1, window_hi = -1; // grid window of `curve` (bstars)
    std::vector<double> graphlet_var;   // d^_N per grid index (gstars), NaN outside

    UndirectedGraph selected_graph; // full-data refit at the selected lambda
    Eigen::MatrixXd selected_theta;
    std::vector<std::string> warnings;
};

/// Full StARS: all N subsamples over the whole grid.
SelectionReport stars(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                      const StarsConfig& cfg);

/// Bounded StARS: 2-subsample pilot bounds [lambda_lb, lambda_ub], then the
/// remaining N-2 subsamples on the restricted window only.
SelectionReport bstars(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                       const StarsConfig& cfg);

/// bstars + the support table and plan, for procedures layered on top
/// (graphlet selection, benchmarks).
struct BStarsOutcome {
    SelectionReport report;
    SupportTable table;
    SubsamplePlan plan;
};
BStarsOutcome bstars_with_table(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                                const StarsConfig& cfg, bool refit = true);

/// Grid from the full-data sample covariance (K, ratio from cfg).
RegularizationGrid default_grid(const Eigen::MatrixXd& X, const StarsConfig& cfg);

/// Warm-started refit of the full-data problem at grid index k.
GlassoResult refit_at(const Eigen::MatrixXd& sigma_hat, const RegularizationGrid& grid,
                      int k, const GlassoConfig& cfg);

} // namespace gstars
