#include "gstars/glasso.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace gstars {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

double logdet_pd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return -kInf;
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& s, const char* who) {
    if (s.rows() != s.cols())
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
    return 0.5 * (s + s.transpose());
}

double max_offdiag_abs(const Eigen::MatrixXd& s) {
    const int p = static_cast<int>(s.rows());
    double m = 0.0;
    for (int j = 0; j < p; ++j)
        for (int i = j + 1; i < p; ++i) m = std::max(m, std::abs(s(i, j)));
    return m;
}

struct BlockResult {
    Eigen::MatrixXd theta, w, beta;
    int iterations = 0;
    double gap = kInf;
    bool converged = false;
};

Eigen::MatrixXd assemble_theta(const Eigen::MatrixXd& w, const Eigen::MatrixXd& beta) {
    const int p = static_cast<int>(w.rows());
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        const double denom = w(j, j) - w.col(j).dot(beta.col(j));
        const double tjj = 1.0 / denom;
        theta(j, j) = tjj;
        for (int k = 0; k < p; ++k)
            if (k != j && beta(k, j) != 0.0) theta(k, j) = -beta(k, j) * tjj;
    }
    // exact zeros survive: 0.5*(0+0) == 0
    return 0.5 * (theta + theta.transpose());
}

double dual_value(const Eigen::MatrixXd& s, Eigen::MatrixXd w, double lambda, double d) {
    const int p = static_cast<int>(s.rows());
    for (int j = 0; j < p; ++j) {
        w(j, j) = s(j, j) + d;
        for (int i = 0; i < p; ++i)
            if (i != j) w(i, j) = std::clamp(w(i, j), s(i, j) - lambda, s(i, j) + lambda);
    }
    const double ld = logdet_pd(w);
    return ld == -kInf ? -kInf : ld + p;
}

/// One glasso block: dual coordinate sweeps over columns, inner lasso by
/// coordinate descent with an active-set schedule.
BlockResult solve_block(const Eigen::MatrixXd& s, double lambda, const GlassoConfig& cfg,
                        const Eigen::MatrixXd* warm_w, const Eigen::MatrixXd* warm_beta) {
    const int p = static_cast<int>(s.rows());
    const double d = cfg.penalize_diagonal ? lambda : 0.0;
    BlockResult res;
    if (p == 1) {
        res.theta = res.w = Eigen::MatrixXd::Constant(1, 1, 0.0);
        res.w(0, 0) = s(0, 0) + d;
        res.theta(0, 0) = 1.0 / res.w(0, 0);
        res.beta = Eigen::MatrixXd::Zero(1, 1);
        res.gap = 0.0;
        res.converged = true;
        return res;
    }

    Eigen::MatrixXd w = warm_w ? *warm_w : s;
    Eigen::MatrixXd beta = warm_beta ? *warm_beta : Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        w(j, j) = s(j, j) + d;
        for (int i = 0; i < p; ++i)
            if (i != j) w(i, j) = std::clamp(w(i, j), s(i, j) - lambda, s(i, j) + lambda);
    }

    const double offdiag_mean = [&] {
        double acc = 0.0;
        for (int j = 0; j < p; ++j)
            for (int i = j + 1; i < p; ++i) acc += std::abs(s(i, j));
        return acc / (static_cast<double>(p) * (p - 1) / 2.0);
    }();
    double thr = cfg.tol * std::max(offdiag_mean, 1e-12);

    Eigen::VectorXd q(p), b(p);
    const int inner_max = 500;

    for (int sweep = 1; sweep <= cfg.max_iter; ++sweep) {
        double dw = 0.0;
        for (int j = 0; j < p; ++j) {
            b = beta.col(j);
            b(j) = 0.0;
            q.setZero();
            for (int k = 0; k < p; ++k)
                if (b(k) != 0.0) q += w.col(k) * b(k);
            const double inner_thr = std::max(1e-3 * thr, 1e-14);
            bool full_pass = true;
            for (int inner = 0; inner < inner_max; ++inner) {
                double maxd = 0.0;
                for (int k = 0; k < p; ++k) {
                    if (k == j || (!full_pass && b(k) == 0.0)) continue;
                    const double r = s(k, j) - (q(k) - w(k, k) * b(k));
                    const double nb = soft_threshold(r, lambda) / w(k, k);
                    const double delta = nb - b(k);
                    if (delta != 0.0) {
                        q += w.col(k) * delta;
                        b(k) = nb;
                        maxd = std::max(maxd, std::abs(delta));
                    }
                }
                if (full_pass) {
                    if (maxd <= inner_thr) break;
                    full_pass = false;
                } else if (maxd <= inner_thr) {
                    full_pass = true;
                }
            }
            for (int k = 0; k < p; ++k) {
                if (k == j) continue;
                dw = std::max(dw, std::abs(w(k, j) - q(k)));
                w(k, j) = w(j, k) = q(k);
            }
            beta.col(j) = b;
        }
        res.iterations = sweep;
        if (dw <= thr) {
            res.theta = assemble_theta(w, beta);
            const double f = objective(s, res.theta, lambda, cfg.penalize_diagonal);
            const double g = dual_value(s, w, lambda, d);
            res.gap = (f == kInf || g == -kInf) ? kInf : (f - g) / (1.0 + std::abs(f));
            if (res.gap <= cfg.tol) {
                res.converged = true;
                break;
            }
            thr *= 0.1; // gap not yet certified: keep sweeping at tighter thr
        }
    }
    if (res.theta.size() == 0) res.theta = assemble_theta(w, beta);
    if (!res.converged && res.gap == kInf) {
        const double f = objective(s, res.theta, lambda, cfg.penalize_diagonal);
        const double g = dual_value(s, w, lambda, d);
        if (f != kInf && g != -kInf) res.gap = (f - g) / (1.0 + std::abs(f));
    }
    res.w = std::move(w);
    res.beta = std::move(beta);
    return res;
}

} // namespace

CovarianceEstimate sample_covariance(const Eigen::MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    if (n < 2) throw std::invalid_argument("sample_covariance: need n >= 2 samples");
    Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
    CovarianceEstimate est;
    est.n = n;
    est.sigma_hat = (Xc.transpose() * Xc) / static_cast<double>(n);
    est.sigma_hat = 0.5 * (est.sigma_hat + est.sigma_hat.transpose());
    return est;
}

RegularizationGrid lambda_grid(const Eigen::MatrixXd& sigma_hat, int K, double ratio) {
    if (K < 2) throw std::invalid_argument("lambda_grid: K >= 2 required");
    if (ratio <= 0.0 || ratio >= 1.0)
        throw std::invalid_argument("lambda_grid: ratio must lie in (0,1)");
    const double lmax = max_offdiag_abs(symmetrized(sigma_hat, "lambda_grid"));
    if (lmax <= 0.0)
        throw std::invalid_argument("lambda_grid: all off-diagonal entries are zero (degenerate grid)");
    RegularizationGrid grid;
    grid.lambdas.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        grid.lambdas[static_cast<std::size_t>(k)] =
            lmax * std::pow(ratio, static_cast<double>(K - 1 - k) / (K - 1));
    grid.lambdas.back() = lmax;
    return grid;
}

std::vector<std::vector<int>> screen_components(const Eigen::MatrixXd& sigma_hat,
                                                double lambda) {
    const Eigen::MatrixXd s = symmetrized(sigma_hat, "screen_components");
    if (lambda < 0.0) throw std::invalid_argument("screen_components: lambda >= 0 required");
    const int p = static_cast<int>(s.rows());
    std::vector<int> parent(static_cast<std::size_t>(p));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (int j = 0; j < p; ++j)
        for (int i = j + 1; i < p; ++i)
            if (std::abs(s(i, j)) > lambda) {
                int a = find(i), bb = find(j);
                if (a != bb) parent[static_cast<std::size_t>(a)] = bb;
            }
    std::vector<std::vector<int>> comps;
    std::vector<int> slot(static_cast<std::size_t>(p), -1);
    for (int v = 0; v < p; ++v) {
        int r = find(v);
        if (slot[static_cast<std::size_t>(r)] < 0) {
            slot[static_cast<std::size_t>(r)] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(v);
    }
    return comps;
}

double objective(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& theta,
                 double lambda, bool penalize_diagonal) {
    const double ld = logdet_pd(theta);
    if (ld == -kInf) return kInf;
    const int p = static_cast<int>(theta.rows());
    double pen = 0.0;
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i)
            if (i != j || penalize_diagonal) pen += std::abs(theta(i, j));
    return -ld + (sigma_hat * theta).trace() + lambda * pen;
}

double kkt_residual(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& theta,
                    double lambda, bool penalize_diagonal) {
    const int p = static_cast<int>(theta.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(theta);
    if (llt.info() != Eigen::Success) return kInf;
    const Eigen::MatrixXd winv = llt.solve(Eigen::MatrixXd::Identity(p, p));
    double res = 0.0;
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < p; ++i) {
            const double r = sigma_hat(i, j) - winv(i, j);
            if (i == j) {
                res = std::max(res, std::abs(r + (penalize_diagonal ? lambda : 0.0)));
            } else if (theta(i, j) != 0.0) {
                res = std::max(res, std::abs(r + lambda * (theta(i, j) > 0 ? 1.0 : -1.0)));
            } else {
                res = std::max(res, std::max(0.0, std::abs(r) - lambda));
            }
        }
    }
    return res;
}

GlassoResult fit(const Eigen::MatrixXd& sigma_hat, double lambda,
                 const GlassoConfig& cfg, const GlassoResult* warm) {
    if (lambda <= 0.0)
        throw std::invalid_argument("fit: lambda > 0 required (lambda = 0 is unbounded for rank-deficient covariances)");
    const Eigen::MatrixXd s = symmetrized(sigma_hat, "fit");
    const int p = static_cast<int>(s.rows());

    std::vector<std::vector<int>> comps =
        cfg.screen ? screen_components(s, lambda)
                   : std::vector<std::vector<int>>{[&] {
                         std::vector<int> all(static_cast<std::size_t>(p));
                         std::iota(all.begin(), all.end(), 0);
                         return all;
                     }()};

    GlassoResult out;
    out.theta = Eigen::MatrixXd::Zero(p, p);
    out.w = Eigen::MatrixXd::Zero(p, p);
    out.beta = Eigen::MatrixXd::Zero(p, p);
    out.converged = true;
    out.gap = 0.0;

    for (const auto& comp : comps) {
        const int m = static_cast<int>(comp.size());
        Eigen::MatrixXd sc(m, m), wc, bc;
        for (int a = 0; a < m; ++a)
            for (int c = 0; c < m; ++c)
                sc(a, c) = s(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(c)]);
        const Eigen::MatrixXd* warm_w = nullptr;
        const Eigen::MatrixXd* warm_b = nullptr;
        if (warm && warm->w.rows() == p) {
            wc.resize(m, m);
            bc.resize(m, m);
            for (int a = 0; a < m; ++a)
                for (int c = 0; c < m; ++c) {
                    wc(a, c) = warm->w(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(c)]);
                    bc(a, c) = warm->beta(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(c)]);
                }
            warm_w = &wc;
            warm_b = &bc;
        }
        BlockResult br = solve_block(sc, lambda, cfg, warm_w, warm_b);
        for (int a = 0; a < m; ++a)
            for (int c = 0; c < m; ++c) {
                out.theta(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(c)]) = br.theta(a, c);
                out.w(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(c)]) = br.w(a, c);
                out.beta(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(c)]) = br.beta(a, c);
            }
        out.iterations = std::max(out.iterations, br.iterations);
        out.gap = std::max(out.gap, br.gap);
        out.converged = out.converged && br.converged;
    }
    if (!out.converged)
        throw NonConvergenceError(
            "fit: no convergence in " + std::to_string(cfg.max_iter) +
                " sweeps (last normalized gap " + std::to_string(out.gap) + ")",
            out);
    return out;
}

PathEstimate fit_path(const Eigen::MatrixXd& sigma_hat, const RegularizationGrid& grid,
                      const GlassoConfig& cfg, bool store_thetas) {
    if (grid.size() < 1) throw std::invalid_argument("fit_path: empty grid");
    const int K = grid.size();
    PathEstimate path;
    path.grid = grid;
    path.supports.resize(static_cast<std::size_t>(K));
    path.nnz_offdiag.assign(static_cast<std::size_t>(K), 0);
    path.iterations.assign(static_cast<std::size_t>(K), 0);
    path.gaps.assign(static_cast<std::size_t>(K), 0.0);
    path.converged.assign(static_cast<std::size_t>(K), 1);
    if (store_thetas) path.thetas.resize(static_cast<std::size_t>(K));

    GlassoResult warm;
    bool have_warm = false;
    for (int k = K - 1; k >= 0; --k) {
        GlassoResult res;
        try {
            res = fit(sigma_hat, grid[k], cfg, have_warm ? &warm : nullptr);
        } catch (const NonConvergenceError& e) {
            res = e.partial;
            path.converged[static_cast<std::size_t>(k)] = 0;
        }
        path.supports[static_cast<std::size_t>(k)] = res.support();
        path.nnz_offdiag[static_cast<std::size_t>(k)] =
            2 * path.supports[static_cast<std::size_t>(k)].edge_count();
        path.iterations[static_cast<std::size_t>(k)] = res.iterations;
        path.gaps[static_cast<std::size_t>(k)] = res.gap;
        if (store_thetas) path.thetas[static_cast<std::size_t>(k)] = res.theta;
        warm = std::move(res);
        have_warm = true;
    }
    return path;
}

} // namespace gstars
