#include "gstars/stars.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gstars/pbd.hpp"
#include "gstars/rng.hpp"

namespace gstars {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_workers(int workers) {
#ifdef _OPENMP
    return workers > 0 ? workers : omp_get_max_threads();
#else
    (void)workers;
    return 1;
#endif
}

// one subsample over a contiguous sub-grid; shared by the parallel and the
// serial reference kernels (identical per-cell results by construction)
void compute_row(SupportTable& table, const Eigen::MatrixXd& X, const SubsamplePlan& plan,
                 const RegularizationGrid& sub, const GlassoConfig& solver, int r,
                 int k_lo, int k_hi) {
    try {
        const auto& rows = plan.sets[static_cast<std::size_t>(r)];
        Eigen::MatrixXd Xs(static_cast<Eigen::Index>(rows.size()), X.cols());
        for (std::size_t t = 0; t < rows.size(); ++t)
            Xs.row(static_cast<Eigen::Index>(t)) = X.row(rows[t]);
        const CovarianceEstimate cov = sample_covariance(Xs);
        PathEstimate path = fit_path(cov.sigma_hat, sub, solver, /*store_thetas=*/false);
        for (int k = k_lo; k <= k_hi; ++k) {
            if (path.converged[static_cast<std::size_t>(k - k_lo)])
                table.store(r, k, path.supports[static_cast<std::size_t>(k - k_lo)]);
            else
                table.mark_failed(r, k);
        }
    } catch (const std::exception&) {
        for (int k = k_lo; k <= k_hi; ++k) table.mark_failed(r, k);
    }
}
} // namespace

SubsamplePlan make_plan(int n, int N, std::uint64_t seed, int b) {
    if (n < 4) throw std::invalid_argument("make_plan: n >= 4 required");
    if (N < 2) throw std::invalid_argument("make_plan: N >= 2 required");
    if (b == 0)
        b = std::min(static_cast<int>(std::floor(10.0 * std::sqrt(static_cast<double>(n)))),
                     static_cast<int>(std::floor(0.8 * n)));
    if (b <= 1 || b >= n)
        throw std::invalid_argument("make_plan: subsample size must satisfy 1 < b < n");
    SubsamplePlan plan{n, b, N, seed, {}};
    plan.sets.resize(static_cast<std::size_t>(N));
    for (int r = 0; r < N; ++r) {
        auto rng = make_rng(seed, 0x5342ULL + static_cast<std::uint64_t>(r)); // "SB"
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int t = 0; t < b; ++t) {
            std::uniform_int_distribution<int> pick(t, n - 1);
            std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick(rng))]);
        }
        idx.resize(static_cast<std::size_t>(b));
        std::sort(idx.begin(), idx.end());
        plan.sets[static_cast<std::size_t>(r)] = std::move(idx);
    }
    return plan;
}

SupportTable::SupportTable(int p, int K, int N)
    : p_(p), K_(K), N_(N), L_(pair_count(p)), words_((pair_count(p) + 63) / 64) {
    const std::size_t cells = static_cast<std::size_t>(N) * K;
    cells_.resize(cells);
    computed_.assign(cells, 0);
    failed_.assign(cells, 0);
}

void SupportTable::store(int r, int k, const UndirectedGraph& g) {
    cells_[idx(r, k)] = g.words();
    computed_[idx(r, k)] = 1;
    failed_[idx(r, k)] = 0;
}

void SupportTable::mark_failed(int r, int k) {
    computed_[idx(r, k)] = 1;
    failed_[idx(r, k)] = 1;
}

UndirectedGraph SupportTable::graph(int r, int k) const {
    if (!computed_[idx(r, k)] || failed_[idx(r, k)])
        throw std::runtime_error("SupportTable::graph: cell missing or failed");
    UndirectedGraph g(p_);
    const auto& words = cells_[idx(r, k)];
    for (std::size_t l = 0; l < L_; ++l)
        if ((words[l >> 6] >> (l & 63)) & 1ULL) g.set_pair(l);
    return g;
}

int SupportTable::n_used(int k) const {
    int used = 0;
    for (int r = 0; r < N_; ++r)
        if (computed_[idx(r, k)] && !failed_[idx(r, k)]) ++used;
    return used;
}

std::vector<int> SupportTable::counts(int k) const {
    std::vector<int> c(L_, 0);
    for (int r = 0; r < N_; ++r) {
        if (!computed_[idx(r, k)] || failed_[idx(r, k)]) continue;
        const auto& words = cells_[idx(r, k)];
        for (std::size_t l = 0; l < L_; ++l)
            c[l] += static_cast<int>((words[l >> 6] >> (l & 63)) & 1ULL);
    }
    return c;
}

std::vector<double> SupportTable::frequencies(int k) const {
    const int used = n_used(k);
    if (used == 0)
        throw std::runtime_error("SupportTable::frequencies: no usable subsample for column " +
                                 std::to_string(k));
    std::vector<int> c = counts(k);
    std::vector<double> f(L_);
    for (std::size_t l = 0; l < L_; ++l) f[l] = static_cast<double>(c[l]) / used;
    return f;
}

void compute_cells(SupportTable& table, const Eigen::MatrixXd& X,
                   const SubsamplePlan& plan, const RegularizationGrid& grid,
                   const GlassoConfig& solver, int workers, int r0, int r1,
                   int k_lo, int k_hi) {
    if (k_lo < 0 || k_hi >= grid.size() || k_lo > k_hi)
        throw std::invalid_argument("compute_cells: bad lambda window");
    RegularizationGrid sub;
    sub.lambdas.assign(grid.lambdas.begin() + k_lo, grid.lambdas.begin() + k_hi + 1);
    const int nthreads = resolve_workers(workers);
    (void)nthreads;

#ifdef _OPENMP
#pragma omp parallel for num_threads(nthreads) schedule(dynamic)
#endif
    for (int r = r0; r < r1; ++r) compute_row(table, X, plan, sub, solver, r, k_lo, k_hi);
}

void compute_cells_serial(SupportTable& table, const Eigen::MatrixXd& X,
                          const SubsamplePlan& plan, const RegularizationGrid& grid,
                          const GlassoConfig& solver, int r0, int r1, int k_lo, int k_hi) {
    if (k_lo < 0 || k_hi >= grid.size() || k_lo > k_hi)
        throw std::invalid_argument("compute_cells_serial: bad lambda window");
    RegularizationGrid sub;
    sub.lambdas.assign(grid.lambdas.begin() + k_lo, grid.lambdas.begin() + k_hi + 1);
    for (int r = r0; r < r1; ++r) compute_row(table, X, plan, sub, solver, r, k_lo, k_hi);
}

std::vector<double> monotonize(const std::vector<double>& curve) {
    std::vector<double> out(curve.size(), kNaN);
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t i = curve.size(); i-- > 0;) {
        if (!std::isnan(curve[i])) {
            running = std::max(running, curve[i]);
            out[i] = running;
        } else if (running != -std::numeric_limits<double>::infinity()) {
            out[i] = kNaN;
        }
    }
    return out;
}

std::optional<int> select_lambda(const std::vector<double>& d_bar, double beta) {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("select_lambda: beta must lie in (0,1]");
    for (std::size_t k = 0; k < d_bar.size(); ++k)
        if (!std::isnan(d_bar[k]) && d_bar[k] <= beta) return static_cast<int>(k);
    return std::nullopt;
}

VariabilityCurve curves_from_table(const SupportTable& table, int k_lo, int k_hi) {
    const int K = table.K();
    VariabilityCurve c;
    c.d_hat.assign(static_cast<std::size_t>(K), kNaN);
    c.d_ub.assign(static_cast<std::size_t>(K), kNaN);
    c.delta.assign(static_cast<std::size_t>(K), kNaN);
    c.n_used.assign(static_cast<std::size_t>(K), 0);
    for (int k = k_lo; k <= k_hi; ++k) {
        const int used = table.n_used(k);
        c.n_used[static_cast<std::size_t>(k)] = used;
        if (used == 0) continue;
        const std::vector<double> theta = table.frequencies(k);
        c.d_hat[static_cast<std::size_t>(k)] = total_variability(theta);
        c.d_ub[static_cast<std::size_t>(k)] = upper_bound_variability(theta);
        c.delta[static_cast<std::size_t>(k)] = within_variability(theta);
    }
    c.d_bar = monotonize(c.d_hat);
    c.d_ub_bar = monotonize(c.d_ub);
    return c;
}

RegularizationGrid default_grid(const Eigen::MatrixXd& X, const StarsConfig& cfg) {
    return lambda_grid(sample_covariance(X).sigma_hat, cfg.K, cfg.ratio);
}

GlassoResult refit_at(const Eigen::MatrixXd& sigma_hat, const RegularizationGrid& grid,
                      int k, const GlassoConfig& cfg) {
    GlassoResult warm;
    bool have_warm = false;
    for (int kk = grid.size() - 1; kk >= k; --kk) {
        try {
            warm = fit(sigma_hat, grid[kk], cfg, have_warm ? &warm : nullptr);
        } catch (const NonConvergenceError& e) {
            warm = e.partial;
        }
        have_warm = true;
    }
    return warm;
}

namespace {

void finalize_selection(SelectionReport& rep, const Eigen::MatrixXd& X,
                        const RegularizationGrid& grid, const StarsConfig& cfg) {
    const std::optional<int> k = rep.k_gamma ? rep.k_gamma : rep.k_beta;
    if (!k) return;
    const CovarianceEstimate cov = sample_covariance(X);
    GlassoResult res = refit_at(cov.sigma_hat, grid, *k, cfg.solver);
    rep.selected_graph = res.support();
    rep.selected_theta = std::move(res.theta);
}

void fill_lambdas(SelectionReport& rep, const RegularizationGrid& grid) {
    if (rep.k_lb) rep.lambda_lb = grid[*rep.k_lb];
    if (rep.k_ub) rep.lambda_ub = grid[*rep.k_ub];
    if (rep.k_beta) rep.lambda_beta = grid[*rep.k_beta];
    if (rep.k_gamma) rep.lambda_gamma = grid[*rep.k_gamma];
    if (rep.k_lb && rep.k_ub) rep.gap_b = rep.lambda_ub - rep.lambda_lb;
    if (rep.k_lb && rep.k_beta) rep.gap_beta = rep.lambda_beta - rep.lambda_lb;
}

} // namespace

SelectionReport stars(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                      const StarsConfig& cfg) {
    const int p = static_cast<int>(X.cols());
    const SubsamplePlan plan = make_plan(static_cast<int>(X.rows()), cfg.N, cfg.seed, cfg.b);
    SupportTable table(p, grid.size(), cfg.N);
    compute_cells(table, X, plan, grid, cfg.solver, cfg.workers, 0, cfg.N, 0, grid.size() - 1);

    SelectionReport rep;
    rep.method = "stars";
    rep.grid = grid;
    rep.beta = cfg.beta;
    rep.N = cfg.N;
    rep.b = plan.b;
    rep.seed = cfg.seed;
    rep.curve = curves_from_table(table, 0, grid.size() - 1);
    rep.window_lo = 0;
    rep.window_hi = grid.size() - 1;
    rep.k_beta = select_lambda(rep.curve.d_bar, cfg.beta);
    if (!rep.k_beta)
        rep.warnings.push_back("no grid point with monotonized instability <= beta");
    fill_lambdas(rep, grid);
    finalize_selection(rep, X, grid, cfg);
    return rep;
}

BStarsOutcome bstars_with_table(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                                const StarsConfig& cfg, bool refit) {
    const int p = static_cast<int>(X.cols());
    const int K = grid.size();
    BStarsOutcome out;
    out.plan = make_plan(static_cast<int>(X.rows()), cfg.N, cfg.seed, cfg.b);
    out.table = SupportTable(p, K, cfg.N);
    SupportTable& table = out.table;
    SelectionReport& rep = out.report;
    rep.method = "bstars";
    rep.grid = grid;
    rep.beta = cfg.beta;
    rep.N = cfg.N;
    rep.b = out.plan.b;
    rep.seed = cfg.seed;

    // step 1: two pilot subsamples over the entire path
    compute_cells(table, X, out.plan, grid, cfg.solver, cfg.workers, 0, 2, 0, K - 1);
    rep.pilot = curves_from_table(table, 0, K - 1);

    // step 2: lower bound from D-bar_2, upper bound from the mean-probability
    // upper bound curve
    rep.k_lb = select_lambda(rep.pilot.d_bar, cfg.beta);
    rep.k_ub = select_lambda(rep.pilot.d_ub_bar, cfg.beta);
    if (!rep.k_lb) {
        rep.warnings.push_back("pilot lower bound undefined; falling back to full-path StARS");
        compute_cells(table, X, out.plan, grid, cfg.solver, cfg.workers, 2, cfg.N, 0, K - 1);
        rep.curve = curves_from_table(table, 0, K - 1);
        rep.window_lo = 0;
        rep.window_hi = K - 1;
        rep.k_beta = select_lambda(rep.curve.d_bar, cfg.beta);
        fill_lambdas(rep, grid);
        if (refit) finalize_selection(rep, X, grid, cfg);
        return out;
    }
    if (!rep.k_ub) {
        rep.warnings.push_back("pilot upper bound undefined; using the sparse end of the grid");
        rep.k_ub = K - 1;
    }
    if (*rep.k_ub < *rep.k_lb) {
        // cannot happen (d_ub >= d_hat pointwise) but kept as a logged outcome
        rep.warnings.push_back("bound violation: lambda_ub < lambda_lb");
        rep.k_ub = rep.k_lb;
    }

    // step 3: restricted window
    const int lo = *rep.k_lb, hi = *rep.k_ub;
    rep.window_lo = lo;
    rep.window_hi = hi;
    if (cfg.N > 2 && hi > lo) {
        compute_cells(table, X, out.plan, grid, cfg.solver, cfg.workers, 2, cfg.N, lo, hi);
        rep.curve = curves_from_table(table, lo, hi);
        rep.k_beta = select_lambda(rep.curve.d_bar, cfg.beta);
        if (!rep.k_beta) {
            rep.warnings.push_back("no restricted grid point below beta; selecting lambda_ub");
            rep.k_beta = hi;
        }
    } else {
        // gap_b == 0 or no additional subsamples: lambda_beta = lambda_lb
        rep.curve = rep.pilot;
        rep.k_beta = lo;
    }
    fill_lambdas(rep, grid);
    if (refit) finalize_selection(rep, X, grid, cfg);
    return out;
}

SelectionReport bstars(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                       const StarsConfig& cfg) {
    return bstars_with_table(X, grid, cfg).report;
}

} // namespace gstars
