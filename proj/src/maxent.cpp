#include "gstars/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gstars {

namespace {

// ---------------------------------------------------------------------------
// dense two-phase primal simplex: max c'x  s.t.  A x = b, x >= 0
// Bland's rule; the feasible sets used here are subsets of a probability
// simplex, so phase 2 is always bounded.
// ---------------------------------------------------------------------------
struct LpResult {
    bool feasible = false;
    double value = std::numeric_limits<double>::quiet_NaN();
};

class SimplexTableau {
public:
    SimplexTableau(Eigen::MatrixXd A, Eigen::VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
        for (Eigen::Index r = 0; r < A_.rows(); ++r)
            if (b_(r) < 0) {
                b_(r) = -b_(r);
                A_.row(r) = -A_.row(r);
            }
    }

    LpResult solve(const Eigen::VectorXd& cobj) {
        const Eigen::Index m = A_.rows(), n = A_.cols();
        // tableau columns: n structural + m artificial + RHS
        T_.resize(m + 1, n + m + 1);
        T_.setZero();
        T_.block(0, 0, m, n) = A_;
        T_.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
        T_.col(n + m).head(m) = b_;
        basis_.resize(static_cast<std::size_t>(m));
        for (Eigen::Index r = 0; r < m; ++r) basis_[static_cast<std::size_t>(r)] = n + r;

        // phase 1: minimize sum of artificials -> objective row = -sum of rows
        for (Eigen::Index r = 0; r < m; ++r) T_.row(m) -= T_.row(r);
        for (Eigen::Index j = n; j < n + m; ++j) T_(m, j) = 0.0;
        if (!iterate(n + m)) return {};
        if (T_(m, n + m) < -kTol) return {}; // positive artificial residual

        // drive remaining artificial variables out of the basis
        for (Eigen::Index r = 0; r < m; ++r)
            if (basis_[static_cast<std::size_t>(r)] >= n) {
                Eigen::Index piv = -1;
                for (Eigen::Index j = 0; j < n; ++j)
                    if (std::abs(T_(r, j)) > kTol) {
                        piv = j;
                        break;
                    }
                if (piv >= 0) pivot(r, piv);
                // a redundant row keeps its artificial at value 0; harmless
            }

        // phase 2
        T_.row(m).setZero();
        T_.row(m).head(n) = -cobj.transpose();
        for (Eigen::Index r = 0; r < m; ++r) {
            const Eigen::Index bj = basis_[static_cast<std::size_t>(r)];
            if (bj < n && std::abs(cobj(bj)) > 0)
                T_.row(m) += cobj(bj) * T_.row(r);
        }
        if (!iterate(n)) return {}; // unbounded: cannot happen on our sets
        return {true, T_(m, n + m)};
    }

private:
    static constexpr double kTol = 1e-9;

    void pivot(Eigen::Index r, Eigen::Index c) {
        T_.row(r) /= T_(r, c);
        for (Eigen::Index i = 0; i < T_.rows(); ++i)
            if (i != r && std::abs(T_(i, c)) > 0) T_.row(i) -= T_(i, c) * T_.row(r);
        basis_[static_cast<std::size_t>(r)] = c;
    }

    // Bland's rule over columns [0, ncols); returns false on unboundedness
    bool iterate(Eigen::Index ncols) {
        const Eigen::Index m = T_.rows() - 1;
        const Eigen::Index rhs = T_.cols() - 1;
        for (long iter = 0; iter < 100000; ++iter) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < ncols; ++j)
                if (T_(m, j) < -kTol) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index r = 0; r < m; ++r)
                if (T_(r, enter) > kTol) {
                    const double ratio = T_(r, rhs) / T_(r, enter);
                    if (leave < 0 || ratio < best - kTol) {
                        best = ratio;
                        leave = r;
                    } else if (ratio < best + kTol &&
                               basis_[static_cast<std::size_t>(r)] <
                                   basis_[static_cast<std::size_t>(leave)]) {
                        leave = r; // Bland tie-break on the leaving index
                    }
                }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        return false;
    }

    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    Eigen::MatrixXd T_;
    std::vector<Eigen::Index> basis_;
};

Eigen::VectorXd support_points(int N) {
    Eigen::VectorXd alpha(N + 1);
    for (int i = 0; i <= N; ++i) alpha(i) = static_cast<double>(i) / N;
    return alpha;
}

// max over the mean-band/cap polytope of sum (alpha^3 - c alpha) q;
// the full constraint set is nonempty iff the polytope is and the max >= 0
LpResult bimodality_lp(const MaxEntInput& in) {
    const int N = in.N;
    const Eigen::VectorXd alpha = support_points(N);
    const Eigen::Index nq = N + 1;
    const Eigen::Index nvar = nq + 4; // + slacks for mean band and both caps
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, nvar);
    Eigen::VectorXd b(5);
    A.row(0).head(nq).setOnes();
    b(0) = 1.0; // simplex
    A.row(1).head(nq) = alpha.transpose();
    A(1, nq) = 1.0;
    b(1) = in.q_bar + in.eps; // mean upper
    A.row(2).head(nq) = alpha.transpose();
    A(2, nq + 1) = -1.0;
    b(2) = in.q_bar - in.eps; // mean lower
    A(3, 0) = 1.0;
    A(3, nq + 2) = 1.0;
    b(3) = in.cap0;
    A(4, nq - 1) = 1.0;
    A(4, nq + 3) = 1.0;
    b(4) = in.capN;
    Eigen::VectorXd cobj = Eigen::VectorXd::Zero(nvar);
    for (Eigen::Index i = 0; i < nq; ++i)
        cobj(i) = std::pow(alpha(i), 3) - in.c * alpha(i);
    SimplexTableau lp(std::move(A), std::move(b));
    return lp.solve(cobj);
}

// ---------------------------------------------------------------------------
// projection onto { q >= 0, q_0 <= cap0, q_N <= capN, sum q = 1 }
// ---------------------------------------------------------------------------
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double cap0, double capN) {
    const Eigen::Index n = v.size();
    Eigen::VectorXd ub = Eigen::VectorXd::Constant(n, 1.0);
    ub(0) = std::min(1.0, cap0);
    ub(n - 1) = std::min(1.0, capN);
    if (ub.sum() < 1.0) throw std::runtime_error("capped simplex is empty");
    auto mass = [&](double tau) {
        double s = 0;
        for (Eigen::Index i = 0; i < n; ++i) s += std::clamp(v(i) - tau, 0.0, ub(i));
        return s;
    };
    double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    const double tau = 0.5 * (lo + hi);
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q(i) = std::clamp(v(i) - tau, 0.0, ub(i));
    q /= q.sum(); // remove the bisection residual
    for (Eigen::Index i = 0; i < n; ++i) q(i) = std::min(q(i), ub(i));
    return q;
}

double entropy_of(const Eigen::VectorXd& q) {
    double h = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i)
        if (q(i) > 0) h -= q(i) * std::log(q(i));
    return h;
}

} // namespace

void MaxEntInput::validate() const {
    if (N < 1) throw std::invalid_argument("maxent: N must be >= 1");
    if (!(q_bar >= 0.0 && q_bar <= 1.0))
        throw std::invalid_argument("maxent: q_bar must lie in [0,1]");
    if (!(eps >= 0.0)) throw std::invalid_argument("maxent: eps must be >= 0");
    if (!(cap0 >= 0.0 && cap0 <= 1.0 && capN >= 0.0 && capN <= 1.0))
        throw std::invalid_argument("maxent: caps must lie in [0,1]");
    if (!(c >= 0.0)) throw std::invalid_argument("maxent: c must be >= 0");
}

bool maxent_feasible(const MaxEntInput& input) {
    input.validate();
    const LpResult lp = bimodality_lp(input);
    return lp.feasible && lp.value >= -1e-9;
}

MaxEntModel solve_maxent(const MaxEntInput& input) {
    input.validate();
    const int N = input.N;
    MaxEntModel model;
    model.N = N;
    model.alpha = support_points(N);
    if (!maxent_feasible(input)) return model; // feasible stays false

    const Eigen::VectorXd& alpha = model.alpha;
    Eigen::VectorXd d(N + 1);
    for (int i = 0; i <= N; ++i) d(i) = std::pow(alpha(i), 3) - input.c * alpha(i);

    // three linear inequalities g_j(q) >= 0 handled by augmented Lagrangian;
    // caps and the simplex handled by projection
    const Eigen::VectorXd g_grad[3] = {-alpha, alpha, d};
    auto g_val = [&](int j, const Eigen::VectorXd& q) {
        switch (j) {
            case 0: return input.q_bar + input.eps - alpha.dot(q);
            case 1: return alpha.dot(q) - (input.q_bar - input.eps);
            default: return d.dot(q);
        }
    };

    Eigen::VectorXd q =
        project_capped_simplex(Eigen::VectorXd::Constant(N + 1, 1.0 / (N + 1)),
                               input.cap0, input.capN);
    double mu[3] = {0, 0, 0};
    double rho = 10.0;
    double prev_viol = std::numeric_limits<double>::infinity();

    auto al_value = [&](const Eigen::VectorXd& x) {
        double val = entropy_of(x);
        for (int j = 0; j < 3; ++j) {
            const double t = std::max(0.0, mu[j] - rho * g_val(j, x));
            val -= (t * t - mu[j] * mu[j]) / (2.0 * rho);
        }
        return val;
    };
    auto al_grad = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(N + 1);
        for (int i = 0; i <= N; ++i) {
            const double ub = (i == 0) ? input.cap0 : (i == N ? input.capN : 1.0);
            g(i) = (ub == 0.0) ? 0.0 : -std::log(std::max(x(i), 1e-16)) - 1.0;
        }
        for (int j = 0; j < 3; ++j) {
            const double t = std::max(0.0, mu[j] - rho * g_val(j, x));
            if (t > 0) g += t * g_grad[j];
        }
        return g;
    };

    for (int outer = 0; outer < 80; ++outer) {
        // inner: projected gradient ascent with backtracking; the accepted
        // step carries over between iterations so large-rho phases do not
        // re-run the full backtracking ladder every time
        double fq = al_value(q);
        double step = 1.0;
        for (int it = 0; it < 20000; ++it) {
            const Eigen::VectorXd g = al_grad(q);
            Eigen::VectorXd qn;
            double fn = -std::numeric_limits<double>::infinity();
            bool accepted = false;
            for (int bt = 0; bt < 80; ++bt) {
                qn = project_capped_simplex(q + step * g, input.cap0, input.capN);
                fn = al_value(qn);
                if (fn >= fq - 1e-15) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break; // no ascent direction left at this scale
            const double move = (qn - q).lpNorm<Eigen::Infinity>();
            q = qn;
            fq = fn;
            step = std::min(step * 2.0, 1.0);
            if (move < 1e-13) break;
        }
        double viol = 0.0;
        for (int j = 0; j < 3; ++j) {
            viol = std::max(viol, std::max(0.0, -g_val(j, q)));
            mu[j] = std::max(0.0, mu[j] - rho * g_val(j, q));
        }
        if (viol <= 1e-10 && outer >= 2) break;
        if (viol > 0.5 * prev_viol) rho = std::min(rho * 5.0, 1e12);
        prev_viol = viol;
    }

    model.q = q;
    model.feasible = true;
    model.entropy = entropy_of(q);
    model.mean = alpha.dot(q);
    model.variance = alpha.cwiseProduct(alpha).dot(q) - model.mean * model.mean;
    double viol = std::abs(q.sum() - 1.0);
    for (int j = 0; j < 3; ++j) viol = std::max(viol, std::max(0.0, -g_val(j, q)));
    viol = std::max(viol, std::max(0.0, q(0) - input.cap0));
    viol = std::max(viol, std::max(0.0, q(N) - input.capN));
    model.max_violation = viol;

    // stationarity: grad H + sum mu_j grad g_j must equal a constant on the
    // free coordinates and respect the sign pattern on the bound-active ones
    Eigen::VectorXd r(N + 1);
    for (int i = 0; i <= N; ++i) r(i) = -std::log(std::max(q(i), 1e-300)) - 1.0;
    for (int j = 0; j < 3; ++j) r += mu[j] * g_grad[j];
    double tau = 0.0;
    int nfree = 0;
    for (int i = 0; i <= N; ++i) {
        const double ub = (i == 0) ? input.cap0 : (i == N ? input.capN : 1.0);
        if (q(i) > 1e-12 && q(i) < ub - 1e-12) {
            tau += r(i);
            ++nfree;
        }
    }
    if (nfree > 0) tau /= nfree;
    double stat = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double ub = (i == 0) ? input.cap0 : (i == N ? input.capN : 1.0);
        if (q(i) <= 1e-12)
            stat = std::max(stat, std::max(0.0, r(i) - tau)); // should not want more mass
        else if (q(i) >= ub - 1e-12)
            stat = std::max(stat, std::max(0.0, tau - r(i))); // should not want less mass
        else
            stat = std::max(stat, std::abs(r(i) - tau));
    }
    model.stationarity = stat;
    return model;
}

double find_c_max(const MaxEntInput& input) {
    MaxEntInput in = input;
    in.c = 0.0;
    if (!maxent_feasible(in)) throw std::runtime_error("maxent: infeasible at c = 0");
    double hi = 1.0;
    int doublings = 0;
    for (;;) {
        in.c = hi;
        if (!maxent_feasible(in)) break;
        hi *= 2.0;
        if (++doublings > 60) return hi; // unbounded in practice: q_bar = 0 priors
    }
    double lo = hi / 2.0 >= 1.0 ? hi / 2.0 : 0.0;
    while (hi - lo > 1e-6) {
        in.c = 0.5 * (lo + hi);
        if (maxent_feasible(in))
            lo = in.c;
        else
            hi = in.c;
    }
    return 0.5 * (lo + hi);
}

double predicted_within_variability(const MaxEntModel& model) {
    if (!model.feasible) throw std::invalid_argument("predicted_within_variability: infeasible model");
    return 4.0 * model.variance;
}

std::vector<VarianceEntry> variance_sequence(const MaxEntInput& priors, double c,
                                             const std::vector<int>& n_range) {
    std::vector<VarianceEntry> out;
    out.reserve(n_range.size());
    for (int N : n_range) {
        MaxEntInput in = priors;
        in.N = N;
        in.c = c;
        VarianceEntry e;
        e.N = N;
        e.c = c;
        MaxEntModel m = solve_maxent(in);
        e.feasible = m.feasible;
        if (m.feasible) {
            e.mean = m.mean;
            e.variance = m.variance;
            e.entropy = m.entropy;
        }
        out.push_back(e);
    }
    return out;
}

} // namespace gstars
