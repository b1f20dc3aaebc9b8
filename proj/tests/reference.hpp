// Independent reference implementations used only by tests. Deliberately
// written with different algorithms than the library (proximal gradient,
// Dykstra projections, template isomorphism) so agreement is meaningful.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gstars/graph.hpp"

namespace testref {

// ---------------------------------------------------------------------------
// proximal-gradient (ISTA) minimizer of
//   -logdet(T) + tr(T S) + lambda * ||T||_1   (optionally off-diagonal only)
// ---------------------------------------------------------------------------
inline double penalized_objective(const Eigen::MatrixXd& S, const Eigen::MatrixXd& T,
                                  double lambda, bool penalize_diagonal) {
    Eigen::LLT<Eigen::MatrixXd> llt(T);
    if (llt.info() != Eigen::Success)
        return std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < T.rows(); ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    double pen = T.cwiseAbs().sum();
    if (!penalize_diagonal) pen -= T.diagonal().cwiseAbs().sum();
    return -logdet + (T * S).trace() + lambda * pen;
}

inline Eigen::MatrixXd glasso_reference(const Eigen::MatrixXd& S, double lambda,
                                        bool penalize_diagonal = true,
                                        int max_iter = 200000, double tol = 1e-9) {
    const Eigen::Index p = S.rows();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) T(i, i) = 1.0 / (S(i, i) + lambda);
    double step = 1.0;
    double f = penalized_objective(S, T, lambda, penalize_diagonal);
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXd grad = S - T.inverse();
        Eigen::MatrixXd Tn;
        double fn = std::numeric_limits<double>::infinity();
        for (int bt = 0; bt < 80; ++bt) {
            Eigen::MatrixXd cand = T - step * grad;
            const double thr = step * lambda;
            for (Eigen::Index i = 0; i < p; ++i)
                for (Eigen::Index j = 0; j < p; ++j) {
                    if (!penalize_diagonal && i == j) continue;
                    const double x = cand(i, j);
                    cand(i, j) = x > thr ? x - thr : (x < -thr ? x + thr : 0.0);
                }
            cand = 0.5 * (cand + cand.transpose()).eval();
            fn = penalized_objective(S, cand, lambda, penalize_diagonal);
            if (fn <= f + 1e-15) {
                Tn = std::move(cand);
                break;
            }
            step *= 0.5;
        }
        if (!Tn.size()) break;
        const double move = (Tn - T).cwiseAbs().maxCoeff();
        T = std::move(Tn);
        f = fn;
        step *= 1.1;
        if (move < tol) break;
    }
    return T;
}

// ---------------------------------------------------------------------------
// entropy oracle: projected gradient ascent with Dykstra's alternating
// projections onto {simplex with caps} cap {mean band} cap {bimodality}
// ---------------------------------------------------------------------------
inline Eigen::VectorXd project_box_simplex(const Eigen::VectorXd& v,
                                           const Eigen::VectorXd& ub) {
    // water-filling by bisection on the shift
    double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
    auto mass = [&](double tau) {
        double s = 0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            s += std::clamp(v(i) - tau, 0.0, ub(i));
        return s;
    };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mass(mid) > 1.0 ? lo : hi) = mid;
    }
    Eigen::VectorXd q(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        q(i) = std::clamp(v(i) - 0.5 * (lo + hi), 0.0, ub(i));
    return q;
}

struct MaxEntOracleProblem {
    Eigen::VectorXd alpha; // support points
    Eigen::VectorXd d;     // bimodality coefficients
    double mean_lo = 0.0, mean_hi = 1.0;
    Eigen::VectorXd ub; // per-coordinate caps
};

inline Eigen::VectorXd dykstra_project(const MaxEntOracleProblem& prob,
                                       const Eigen::VectorXd& v, int sweeps = 400) {
    const Eigen::Index n = v.size();
    Eigen::VectorXd x = v;
    std::vector<Eigen::VectorXd> corr(4, Eigen::VectorXd::Zero(n));
    const double a2 = prob.alpha.squaredNorm();
    const double d2 = std::max(prob.d.squaredNorm(), 1e-300);
    for (int s = 0; s < sweeps; ++s) {
        for (int c = 0; c < 4; ++c) {
            const Eigen::VectorXd y = x + corr[static_cast<std::size_t>(c)];
            Eigen::VectorXd z;
            switch (c) {
                case 0: z = project_box_simplex(y, prob.ub); break;
                case 1: { // alpha'q <= mean_hi
                    const double g = prob.alpha.dot(y) - prob.mean_hi;
                    z = g > 0 ? (y - (g / a2) * prob.alpha).eval() : y;
                    break;
                }
                case 2: { // alpha'q >= mean_lo
                    const double g = prob.mean_lo - prob.alpha.dot(y);
                    z = g > 0 ? (y + (g / a2) * prob.alpha).eval() : y;
                    break;
                }
                default: { // d'q >= 0
                    const double g = -prob.d.dot(y);
                    z = g > 0 ? (y + (g / d2) * prob.d).eval() : y;
                    break;
                }
            }
            corr[static_cast<std::size_t>(c)] = y - z;
            x = z;
        }
    }
    return x;
}

inline double entropy_of(const Eigen::VectorXd& q) {
    double h = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i)
        if (q(i) > 0) h -= q(i) * std::log(q(i));
    return h;
}

// returns the best feasible point found; a lower bound on the optimum
inline Eigen::VectorXd maxent_oracle(const MaxEntOracleProblem& prob, int iters = 2000) {
    const Eigen::Index n = prob.alpha.size();
    Eigen::VectorXd q =
        dykstra_project(prob, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
    double best_h = entropy_of(q);
    Eigen::VectorXd best = q;
    double step = 0.5;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd g(n);
        for (Eigen::Index i = 0; i < n; ++i)
            g(i) = -std::log(std::max(q(i), 1e-16)) - 1.0;
        q = dykstra_project(prob, q + step * g, 120);
        const double h = entropy_of(q);
        if (h > best_h) {
            best_h = h;
            best = q;
        } else {
            step = std::max(step * 0.7, 1e-4);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// orbit counts by explicit template isomorphism over all 2-/3-/4-subsets
// ---------------------------------------------------------------------------
struct GraphletTemplate {
    int k;                                  // node count
    std::vector<std::pair<int, int>> edges; // template edges
    std::vector<int> orbits;                // orbit id per template node
};

inline const std::vector<GraphletTemplate>& graphlet_templates() {
    static const std::vector<GraphletTemplate> t = {
        {2, {{0, 1}}, {0, 0}},                                              // edge
        {3, {{0, 1}, {1, 2}}, {1, 2, 1}},                                   // 3-path
        {3, {{0, 1}, {1, 2}, {0, 2}}, {3, 3, 3}},                           // triangle
        {4, {{0, 1}, {1, 2}, {2, 3}}, {4, 5, 5, 4}},                        // 4-path
        {4, {{0, 1}, {0, 2}, {0, 3}}, {7, 6, 6, 6}},                        // 3-star
        {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {8, 8, 8, 8}},                // 4-cycle
        {4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}}, {10, 10, 11, 9}},             // tailed tri
        {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}, {13, 12, 13, 12}},    // diamond
        {4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {14, 14, 14, 14}}, // K4
    };
    return t;
}

inline Eigen::Matrix<long long, Eigen::Dynamic, 15>
orbit_counts_reference(const gstars::UndirectedGraph& g) {
    const int p = g.p();
    Eigen::Matrix<long long, Eigen::Dynamic, 15> M =
        Eigen::Matrix<long long, Eigen::Dynamic, 15>::Zero(p, 15);
    auto adj = [&](int a, int b) { return g.has_edge(a, b); };

    auto try_subset = [&](const std::vector<int>& nodes) {
        const int k = static_cast<int>(nodes.size());
        for (const auto& tpl : graphlet_templates()) {
            if (tpl.k != k) continue;
            std::vector<int> perm(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
            bool matched = false;
            do {
                // perm maps template node t -> subset node nodes[perm[t]]
                bool ok = true;
                for (int a = 0; a < k && ok; ++a)
                    for (int b = a + 1; b < k && ok; ++b) {
                        const bool in_tpl = [&] {
                            for (const auto& e : tpl.edges)
                                if ((e.first == a && e.second == b) ||
                                    (e.first == b && e.second == a))
                                    return true;
                            return false;
                        }();
                        if (in_tpl != adj(nodes[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])],
                                          nodes[static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])]))
                            ok = false;
                    }
                if (ok) {
                    for (int t = 0; t < k; ++t)
                        M(nodes[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])],
                          tpl.orbits[static_cast<std::size_t>(t)]) += 1;
                    matched = true;
                    break; // each subset counts at most once per graphlet
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (matched) break; // templates are pairwise non-isomorphic
        }
    };

    std::vector<int> nodes;
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) {
            nodes = {a, b};
            try_subset(nodes);
            for (int c = b + 1; c < p; ++c) {
                nodes = {a, b, c};
                try_subset(nodes);
                for (int d = c + 1; d < p; ++d) {
                    nodes = {a, b, c, d};
                    try_subset(nodes);
                }
            }
        }
    return M;
}

} // namespace testref
