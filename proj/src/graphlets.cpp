#include "gstars/graphlets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gstars {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// row-major bitset adjacency, nw words per row
struct BitAdjacency {
    int p = 0;
    std::size_t nw = 0;
    std::vector<std::uint64_t> bits;

    explicit BitAdjacency(const UndirectedGraph& g)
        : p(g.p()), nw(static_cast<std::size_t>((g.p() + 63) / 64)), bits(nw * g.p(), 0) {
        for (auto [i, j] : g.edges()) {
            row(i)[static_cast<std::size_t>(j) >> 6] |= 1ULL << (j & 63);
            row(j)[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63);
        }
    }
    std::uint64_t* row(int v) { return bits.data() + nw * static_cast<std::size_t>(v); }
    const std::uint64_t* row(int v) const { return bits.data() + nw * static_cast<std::size_t>(v); }
    bool adj(int a, int b) const {
        return (row(a)[static_cast<std::size_t>(b) >> 6] >> (b & 63)) & 1ULL;
    }
};

inline void set_bit(std::uint64_t* w, int v) { w[v >> 6] |= 1ULL << (v & 63); }

// increments per-node orbit counts for the connected induced subgraph on
// {a,b,c,d}
void classify_quad(const BitAdjacency& A, int a, int b, int c, int d,
                   GraphletDegreeMatrix& M) {
    const int vs[4] = {a, b, c, d};
    const bool e01 = A.adj(a, b), e02 = A.adj(a, c), e03 = A.adj(a, d);
    const bool e12 = A.adj(b, c), e13 = A.adj(b, d), e23 = A.adj(c, d);
    const int deg[4] = {e01 + e02 + e03, e01 + e12 + e13, e02 + e12 + e23, e03 + e13 + e23};
    const int m = (e01 + e02 + e03 + e12 + e13 + e23);
    switch (m) {
        case 3: {
            int maxd = std::max(std::max(deg[0], deg[1]), std::max(deg[2], deg[3]));
            if (maxd == 3) { // 3-star
                for (int t = 0; t < 4; ++t) M(vs[t], deg[t] == 3 ? 7 : 6) += 1;
            } else { // 4-path
                for (int t = 0; t < 4; ++t) M(vs[t], deg[t] == 2 ? 5 : 4) += 1;
            }
            break;
        }
        case 4: {
            int maxd = std::max(std::max(deg[0], deg[1]), std::max(deg[2], deg[3]));
            if (maxd == 2) { // 4-cycle
                for (int t = 0; t < 4; ++t) M(vs[t], 8) += 1;
            } else { // tailed triangle
                for (int t = 0; t < 4; ++t)
                    M(vs[t], deg[t] == 1 ? 9 : (deg[t] == 2 ? 10 : 11)) += 1;
            }
            break;
        }
        case 5: // diamond
            for (int t = 0; t < 4; ++t) M(vs[t], deg[t] == 2 ? 12 : 13) += 1;
            break;
        case 6: // 4-clique
            for (int t = 0; t < 4; ++t) M(vs[t], 14) += 1;
            break;
        default:
            break; // disconnected quads never reach here via ESU
    }
}

void count_triples(const BitAdjacency& A, const std::vector<std::vector<int>>& adj,
                   GraphletDegreeMatrix& M) {
    for (int v = 0; v < A.p; ++v) {
        const auto& nb = adj[static_cast<std::size_t>(v)];
        for (std::size_t x = 0; x < nb.size(); ++x)
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                const int a = nb[x], b = nb[y];
                if (A.adj(a, b)) {
                    M(v, 3) += 1; // triangle, counted once per member node
                } else {
                    M(v, 2) += 1;
                    M(a, 1) += 1;
                    M(b, 1) += 1;
                }
            }
    }
}

} // namespace

GraphletDegreeMatrix count_orbits(const UndirectedGraph& g) {
    const int p = g.p();
    GraphletDegreeMatrix M = GraphletDegreeMatrix::Zero(p, 15);
    if (p < 2) return M;
    const BitAdjacency A(g);
    const auto adj = g.adjacency_lists();
    for (int v = 0; v < p; ++v)
        M(v, 0) = static_cast<long long>(adj[static_cast<std::size_t>(v)].size());
    count_triples(A, adj, M);

    // ESU over connected 4-subsets: each subset enumerated exactly once
    const std::size_t nw = A.nw;
    std::vector<std::uint64_t> buf(6 * nw);
    std::uint64_t* gt_v = buf.data();          // {u : u > v}
    std::uint64_t* nbh1 = buf.data() + nw;     // N(v) | {v}
    std::uint64_t* nbh2 = buf.data() + 2 * nw; // nbh1 | N(w1)
    std::uint64_t* ext2 = buf.data() + 3 * nw;
    std::uint64_t* ext3 = buf.data() + 4 * nw;
    std::uint64_t* rem1 = buf.data() + 5 * nw;

    auto pop_lowest = [nw](std::uint64_t* w) {
        for (std::size_t i = 0; i < nw; ++i)
            if (w[i]) {
                const int bit = std::countr_zero(w[i]);
                w[i] &= w[i] - 1;
                return static_cast<int>(i * 64) + bit;
            }
        return -1;
    };

    for (int v = 0; v < p; ++v) {
        std::fill(gt_v, gt_v + nw, 0);
        for (int u = v + 1; u < p; ++u) set_bit(gt_v, u);
        std::copy(A.row(v), A.row(v) + nw, nbh1);
        set_bit(nbh1, v);
        for (std::size_t i = 0; i < nw; ++i) rem1[i] = A.row(v)[i] & gt_v[i];
        int w1;
        while ((w1 = pop_lowest(rem1)) >= 0) {
            for (std::size_t i = 0; i < nw; ++i) {
                nbh2[i] = nbh1[i] | A.row(w1)[i];
                ext2[i] = rem1[i] | (A.row(w1)[i] & ~nbh1[i] & gt_v[i]);
            }
            std::vector<std::uint64_t> rem2(ext2, ext2 + nw);
            int w2;
            while ((w2 = pop_lowest(rem2.data())) >= 0) {
                for (std::size_t i = 0; i < nw; ++i)
                    ext3[i] = rem2[i] | (A.row(w2)[i] & ~nbh2[i] & gt_v[i]);
                std::vector<std::uint64_t> rem3(ext3, ext3 + nw);
                int w3;
                while ((w3 = pop_lowest(rem3.data())) >= 0)
                    classify_quad(A, v, w1, w2, w3, M);
            }
        }
    }
    return M;
}

GraphletDegreeMatrix count_orbits_exhaustive(const UndirectedGraph& g) {
    const int p = g.p();
    GraphletDegreeMatrix M = GraphletDegreeMatrix::Zero(p, 15);
    if (p < 2) return M;
    const BitAdjacency A(g);
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (A.adj(a, b)) {
                M(a, 0) += 1;
                M(b, 0) += 1;
            }
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            for (int c = b + 1; c < p; ++c) {
                const int m = A.adj(a, b) + A.adj(a, c) + A.adj(b, c);
                if (m == 3) {
                    M(a, 3) += 1;
                    M(b, 3) += 1;
                    M(c, 3) += 1;
                } else if (m == 2) {
                    const int deg[3] = {A.adj(a, b) + A.adj(a, c), A.adj(a, b) + A.adj(b, c),
                                        A.adj(a, c) + A.adj(b, c)};
                    const int vs[3] = {a, b, c};
                    for (int t = 0; t < 3; ++t) M(vs[t], deg[t] == 2 ? 2 : 1) += 1;
                }
            }
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            for (int c = b + 1; c < p; ++c)
                for (int d = c + 1; d < p; ++d) {
                    // connectivity check on <= 4 nodes
                    const bool edges[6] = {A.adj(a, b), A.adj(a, c), A.adj(a, d),
                                           A.adj(b, c), A.adj(b, d), A.adj(c, d)};
                    const int deg[4] = {edges[0] + edges[1] + edges[2],
                                        edges[0] + edges[3] + edges[4],
                                        edges[1] + edges[3] + edges[5],
                                        edges[2] + edges[4] + edges[5]};
                    const int m = edges[0] + edges[1] + edges[2] + edges[3] + edges[4] + edges[5];
                    if (m < 3) continue;
                    // with >= 3 edges the only disconnected cases have an isolated vertex
                    if (deg[0] == 0 || deg[1] == 0 || deg[2] == 0 || deg[3] == 0) continue;
                    classify_quad(A, a, b, c, d, M);
                }
    return M;
}

namespace {

std::vector<double> average_ranks(const std::vector<long long>& col) {
    const std::size_t n = col.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && col[order[j + 1]] == col[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

Eigen::MatrixXd gcm(const GraphletDegreeMatrix& M) {
    const Eigen::Index p = M.rows();
    if (p < 2) throw std::invalid_argument("gcm: at least 2 nodes required");
    const int no = static_cast<int>(kNonRedundantOrbits.size());
    std::vector<std::vector<double>> ranks(static_cast<std::size_t>(no));
    std::vector<bool> constant(static_cast<std::size_t>(no), false);
    for (int c = 0; c < no; ++c) {
        std::vector<long long> col(static_cast<std::size_t>(p));
        for (Eigen::Index v = 0; v < p; ++v) col[static_cast<std::size_t>(v)] = M(v, kNonRedundantOrbits[static_cast<std::size_t>(c)]);
        constant[static_cast<std::size_t>(c)] =
            std::all_of(col.begin(), col.end(), [&](long long x) { return x == col[0]; });
        ranks[static_cast<std::size_t>(c)] = average_ranks(col);
    }
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(no, no);
    for (int a = 0; a < no; ++a)
        for (int b = a + 1; b < no; ++b) {
            double r = 0.0;
            if (!constant[static_cast<std::size_t>(a)] && !constant[static_cast<std::size_t>(b)]) {
                const auto& x = ranks[static_cast<std::size_t>(a)];
                const auto& y = ranks[static_cast<std::size_t>(b)];
                double mx = 0, my = 0;
                for (Eigen::Index v = 0; v < p; ++v) {
                    mx += x[static_cast<std::size_t>(v)];
                    my += y[static_cast<std::size_t>(v)];
                }
                mx /= static_cast<double>(p);
                my /= static_cast<double>(p);
                double sxy = 0, sxx = 0, syy = 0;
                for (Eigen::Index v = 0; v < p; ++v) {
                    const double dx = x[static_cast<std::size_t>(v)] - mx;
                    const double dy = y[static_cast<std::size_t>(v)] - my;
                    sxy += dx * dy;
                    sxx += dx * dx;
                    syy += dy * dy;
                }
                r = sxy / std::sqrt(sxx * syy);
            }
            R(a, b) = R(b, a) = r;
        }
    return R;
}

Eigen::VectorXd gcv(const Eigen::MatrixXd& R) {
    const int no = static_cast<int>(R.rows());
    if (no != 11 || R.cols() != 11) throw std::invalid_argument("gcv: expected an 11x11 matrix");
    Eigen::VectorXd rho(55);
    int t = 0;
    for (int j = 0; j < no; ++j)
        for (int i = j + 1; i < no; ++i) rho(t++) = R(i, j);
    return rho;
}

Eigen::VectorXd gcv_of(const UndirectedGraph& g) { return gcv(gcm(count_orbits(g))); }

double gcd(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() != 55)
        throw std::invalid_argument("gcd: both vectors must have 55 entries");
    return (a - b).norm();
}

double graphlet_variability(const std::vector<Eigen::VectorXd>& gcvs) {
    const std::size_t N = gcvs.size();
    if (N < 2) throw std::invalid_argument("graphlet_variability: N >= 2 graphs required");
    double acc = 0.0;
    for (std::size_t r = 1; r < N; ++r)
        for (std::size_t s = 0; s < r; ++s) acc += gcd(gcvs[r], gcvs[s]);
    return acc / (static_cast<double>(N) * (N - 1) / 2.0);
}

std::vector<double> graphlet_variability_curve(const SupportTable& table, int k_lo,
                                               int k_hi, int workers) {
    const int K = table.K();
    const int N = table.N();
    std::vector<double> curve(static_cast<std::size_t>(K), kNaN);
    struct Task {
        int r, k;
    };
    std::vector<Task> tasks;
    for (int k = k_lo; k <= k_hi; ++k)
        for (int r = 0; r < N; ++r)
            if (table.computed(r, k) && !table.failed(r, k)) tasks.push_back({r, k});
    std::vector<Eigen::VectorXd> gcvs(tasks.size());
#ifdef _OPENMP
    const int nthreads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for num_threads(nthreads) schedule(dynamic)
#endif
    for (std::size_t t = 0; t < tasks.size(); ++t)
        gcvs[t] = gcv_of(table.graph(tasks[t].r, tasks[t].k));
    for (int k = k_lo; k <= k_hi; ++k) {
        std::vector<Eigen::VectorXd> at_k;
        for (std::size_t t = 0; t < tasks.size(); ++t)
            if (tasks[t].k == k) at_k.push_back(gcvs[t]);
        if (at_k.size() >= 2) curve[static_cast<std::size_t>(k)] = graphlet_variability(at_k);
    }
    return curve;
}

SelectionReport gstars(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                       const StarsConfig& cfg) {
    BStarsOutcome out = bstars_with_table(X, grid, cfg, /*refit=*/false);
    SelectionReport rep = std::move(out.report);
    rep.method = "gstars";

    if (!rep.k_lb) {
        // no valid window: fall back to the edge-stability selection
        rep.warnings.push_back("no B-StARS window; lambda_gamma falls back to lambda_beta");
        rep.k_gamma = rep.k_beta;
    } else {
        const int lo = rep.window_lo, hi = rep.window_hi;
        rep.graphlet_var = graphlet_variability_curve(out.table, lo, hi, cfg.workers);
        std::optional<int> best;
        for (int k = hi; k >= lo; --k) {
            const double v = rep.graphlet_var[static_cast<std::size_t>(k)];
            if (std::isnan(v)) continue;
            if (!best || v < rep.graphlet_var[static_cast<std::size_t>(*best)]) best = k;
        }
        if (!best) {
            rep.warnings.push_back(
                "graphlet variability undefined on the window; lambda_gamma falls back to lambda_beta");
            rep.k_gamma = rep.k_beta;
        } else {
            rep.k_gamma = best;
        }
    }
    if (rep.k_gamma) rep.lambda_gamma = grid[*rep.k_gamma];

    const std::optional<int> k_final = rep.k_gamma ? rep.k_gamma : rep.k_beta;
    if (k_final) {
        GlassoResult res = refit_at(sample_covariance(X).sigma_hat, grid, *k_final, cfg.solver);
        rep.selected_graph = res.support();
        rep.selected_theta = std::move(res.theta);
    }
    return rep;
}

} // namespace gstars
