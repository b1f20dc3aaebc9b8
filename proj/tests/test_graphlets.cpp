#include <doctest.h>

#include <random>

#include "gstars/graphlets.hpp"
#include "gstars/synth.hpp"
#include "reference.hpp"

using namespace gstars;

namespace {
UndirectedGraph random_graph(int p, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    UndirectedGraph g(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < i; ++j)
            if (unif(rng) < density) g.set_edge(i, j);
    return g;
}

long long triangle_count(const UndirectedGraph& g) {
    long long t = 0;
    for (int a = 0; a < g.p(); ++a)
        for (int b = a + 1; b < g.p(); ++b)
            for (int c = b + 1; c < g.p(); ++c)
                if (g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c)) ++t;
    return t;
}

long long k4_count(const UndirectedGraph& g) {
    long long t = 0;
    for (int a = 0; a < g.p(); ++a)
        for (int b = a + 1; b < g.p(); ++b)
            for (int c = b + 1; c < g.p(); ++c)
                for (int d = c + 1; d < g.p(); ++d)
                    if (g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(a, d) &&
                        g.has_edge(b, c) && g.has_edge(b, d) && g.has_edge(c, d))
                        ++t;
    return t;
}
} // namespace

TEST_CASE("orbit counts: hand-checked small graphs") {
    // triangle
    UndirectedGraph k3(3);
    k3.set_edge(1, 0);
    k3.set_edge(2, 0);
    k3.set_edge(2, 1);
    const GraphletDegreeMatrix m3 = count_orbits(k3);
    for (int v = 0; v < 3; ++v) {
        CHECK(m3(v, 0) == 2);
        CHECK(m3(v, 3) == 1);
        for (int o : {1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}) CHECK(m3(v, o) == 0);
    }
    // path a-b-c
    UndirectedGraph path(3);
    path.set_edge(1, 0);
    path.set_edge(2, 1);
    const GraphletDegreeMatrix mp = count_orbits(path);
    CHECK(mp(0, 0) == 1);
    CHECK(mp(0, 1) == 1);
    CHECK(mp(1, 0) == 2);
    CHECK(mp(1, 2) == 1);
    CHECK(mp(2, 1) == 1);
    // 3-star on 4 nodes, center 0
    UndirectedGraph star(4);
    star.set_edge(1, 0);
    star.set_edge(2, 0);
    star.set_edge(3, 0);
    const GraphletDegreeMatrix ms = count_orbits(star);
    CHECK(ms(0, 0) == 3);
    CHECK(ms(0, 2) == 3);
    CHECK(ms(0, 7) == 1);
    for (int leaf : {1, 2, 3}) {
        CHECK(ms(leaf, 0) == 1);
        CHECK(ms(leaf, 1) == 2);
        CHECK(ms(leaf, 6) == 1);
    }
}

TEST_CASE("orbit counts agree with the template-isomorphism oracle") {
    std::uint64_t seed = 1000;
    for (double density : {0.1, 0.3, 0.5})
        for (int p : {5, 8, 12}) {
            for (int rep = 0; rep < 3; ++rep) {
                const UndirectedGraph g = random_graph(p, density, seed++);
                const auto fast = count_orbits(g);
                const auto exhaustive = count_orbits_exhaustive(g);
                const auto oracle = testref::orbit_counts_reference(g);
                CHECK((fast - oracle).cwiseAbs().maxCoeff() == 0);
                CHECK((exhaustive - oracle).cwiseAbs().maxCoeff() == 0);
            }
        }
}

TEST_CASE("orbit sum identities") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const UndirectedGraph g = random_graph(14, 0.3, 400 + seed);
        const GraphletDegreeMatrix m = count_orbits(g);
        CHECK(m.col(0).sum() == 2LL * g.edge_count());
        CHECK(m.col(3).sum() == 3LL * triangle_count(g));
        CHECK(m.col(14).sum() == 4LL * k4_count(g));
    }
}

TEST_CASE("gcm: conventions") {
    // empty graph: every column constant -> identity matrix
    const Eigen::MatrixXd R0 = gcm(count_orbits(UndirectedGraph(6)));
    CHECK((R0 - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff() == 0.0);

    GraphletDegreeMatrix M = GraphletDegreeMatrix::Zero(5, 15);
    for (int v = 0; v < 5; ++v) {
        M(v, 0) = v + 1;     // increasing
        M(v, 1) = 2 * v + 2; // proportional: rank correlation 1
        M(v, 2) = 5 - v;     // reversed: rank correlation -1
    }
    const Eigen::MatrixXd R = gcm(M);
    CHECK(R(0, 1) == doctest::Approx(1.0));
    CHECK(R(0, 2) == doctest::Approx(-1.0));
    CHECK(R(0, 3) == 0.0); // constant column
    CHECK(R(3, 3) == 1.0);
    CHECK((R - R.transpose()).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(gcm(GraphletDegreeMatrix::Zero(1, 15)), std::invalid_argument);
}

TEST_CASE("gcm: ties use average ranks") {
    GraphletDegreeMatrix M = GraphletDegreeMatrix::Zero(4, 15);
    // col0: 1,1,2,3 -> ranks 1.5,1.5,3,4 ; col1: 1,2,2,3 -> ranks 1,2.5,2.5,4
    const long long c0[4] = {1, 1, 2, 3}, c1[4] = {1, 2, 2, 3};
    for (int v = 0; v < 4; ++v) {
        M(v, 0) = c0[v];
        M(v, 1) = c1[v];
    }
    const double r0[4] = {1.5, 1.5, 3, 4}, r1[4] = {1, 2.5, 2.5, 4};
    double m0 = 2.5, m1 = 2.5, sxy = 0, sxx = 0, syy = 0;
    for (int v = 0; v < 4; ++v) {
        sxy += (r0[v] - m0) * (r1[v] - m1);
        sxx += (r0[v] - m0) * (r0[v] - m0);
        syy += (r1[v] - m1) * (r1[v] - m1);
    }
    CHECK(gcm(M)(0, 1) == doctest::Approx(sxy / std::sqrt(sxx * syy)));
}

TEST_CASE("gcv: layout and round-trip") {
    CHECK(gcv(Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(gcv(Eigen::MatrixXd::Ones(11, 11)).minCoeff() == 1.0);
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(11, 11);
    double val = 0.01;
    for (int j = 0; j < 11; ++j)
        for (int i = j + 1; i < 11; ++i) {
            R(i, j) = R(j, i) = val;
            val += 0.01;
        }
    const Eigen::VectorXd rho = gcv(R);
    REQUIRE(rho.size() == 55);
    int t = 0;
    for (int j = 0; j < 11; ++j)
        for (int i = j + 1; i < 11; ++i) CHECK(rho(t++) == R(i, j));
    CHECK_THROWS_AS(gcv(Eigen::MatrixXd::Identity(10, 10)), std::invalid_argument);
}

TEST_CASE("gcd: metric properties") {
    CHECK(gcd(Eigen::VectorXd::Zero(55), Eigen::VectorXd::Ones(55)) ==
          doctest::Approx(std::sqrt(55.0)));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd a(55), b(55), c(55);
        for (int i = 0; i < 55; ++i) {
            a(i) = unif(rng);
            b(i) = unif(rng);
            c(i) = unif(rng);
        }
        CHECK(gcd(a, a) == 0.0);
        CHECK(gcd(a, b) == doctest::Approx(gcd(b, a)));
        CHECK(gcd(a, b) <= gcd(a, c) + gcd(c, b) + 1e-12);
    }
    CHECK_THROWS_AS(gcd(Eigen::VectorXd::Zero(54), Eigen::VectorXd::Zero(54)),
                    std::invalid_argument);
}

TEST_CASE("isomorphic relabelings give identical correlation vectors") {
    const UndirectedGraph g = random_graph(10, 0.35, 77);
    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(9);
    std::shuffle(perm.begin(), perm.end(), rng);
    UndirectedGraph h(10);
    for (auto [i, j] : g.edges()) {
        const int pi = perm[static_cast<std::size_t>(i)], pj = perm[static_cast<std::size_t>(j)];
        h.set_edge(std::max(pi, pj), std::min(pi, pj));
    }
    CHECK((gcv_of(g) - gcv_of(h)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("graphlet variability") {
    const UndirectedGraph a = random_graph(8, 0.3, 1);
    const UndirectedGraph b = random_graph(8, 0.5, 2);
    const Eigen::VectorXd va = gcv_of(a), vb = gcv_of(b);
    CHECK(graphlet_variability({va, va, va}) == 0.0);
    CHECK(graphlet_variability({va, vb}) == doctest::Approx(gcd(va, vb)));
    CHECK(graphlet_variability({va, vb, va}) ==
          doctest::Approx(graphlet_variability({vb, va, va})));
    CHECK_THROWS_AS(graphlet_variability({va}), std::invalid_argument);
}

TEST_CASE("gstars: selection lies inside the window, ties prefer sparser") {
    GeneratorConfig gen;
    gen.p = 14;
    gen.sparsity = 3.0 / 14;
    const PrecisionModel model = gen_erdos_renyi(gen, 12);
    const Eigen::MatrixXd X = sample_mvn(model, 180, 13);
    StarsConfig cfg;
    cfg.N = 6;
    cfg.K = 10;
    cfg.seed = 4;
    const RegularizationGrid grid = default_grid(X, cfg);
    const SelectionReport rep = gstars::gstars(X, grid, cfg);
    CHECK(rep.method == "gstars");
    REQUIRE(rep.k_gamma.has_value());
    if (rep.k_lb) {
        CHECK(*rep.k_gamma >= rep.window_lo);
        CHECK(*rep.k_gamma <= rep.window_hi);
        const double best = rep.graphlet_var[static_cast<std::size_t>(*rep.k_gamma)];
        for (int k = rep.window_lo; k <= rep.window_hi; ++k) {
            const double v = rep.graphlet_var[static_cast<std::size_t>(k)];
            if (std::isnan(v)) continue;
            CHECK(best <= v);
            if (v == best) CHECK(k <= *rep.k_gamma); // tie-break toward larger lambda
        }
    }
    CHECK(rep.lambda_gamma == doctest::Approx(grid[*rep.k_gamma]));
    CHECK(rep.selected_graph.p() == 14);
}
