#include <doctest.h>

#include <Eigen/Dense>

#include "gstars/graph.hpp"

using namespace gstars;

TEST_CASE("pair indexing: fixed examples") {
    CHECK(edge_index(2, 1, 3) == 1);
    CHECK(edge_index(3, 1, 3) == 2);
    CHECK(edge_index(3, 2, 3) == 3);
    CHECK(pair_count(40) == 780);
    // closed form l = (j-1)p - j(j-1)/2 + (i-j), 1-based
    for (int p : {2, 3, 7, 40})
        for (int j = 1; j <= p; ++j)
            for (int i = j + 1; i <= p; ++i) {
                const auto expected = static_cast<std::size_t>((j - 1) * p - j * (j - 1) / 2 +
                                                               (i - j));
                CHECK(edge_index(i, j, p) == expected);
            }
}

TEST_CASE("pair indexing: bijection round-trip and monotonicity") {
    for (int p = 2; p <= 50; ++p) {
        std::size_t expect = 0;
        for (int j = 0; j < p; ++j)
            for (int i = j + 1; i < p; ++i) {
                const std::size_t l = pair_index(i, j, p);
                CHECK(l == expect); // strictly increasing in column-major order
                ++expect;
                const auto [ri, rj] = pair_from_index(l, p);
                CHECK(ri == i);
                CHECK(rj == j);
            }
        CHECK(expect == pair_count(p));
    }
}

TEST_CASE("pair indexing: invalid pairs throw") {
    CHECK_THROWS_AS(pair_index(1, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(pair_index(0, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(pair_index(3, 0, 3), std::invalid_argument);
}

TEST_CASE("UndirectedGraph: edges, counts, adjacency") {
    UndirectedGraph g(4);
    CHECK(g.edge_count() == 0);
    g.set_edge(1, 0);
    g.set_edge(3, 2);
    g.set_edge(2, 3); // duplicate, symmetric order
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(3, 2));
    CHECK_FALSE(g.has_edge(0, 2));
    const auto lists = g.adjacency_lists();
    CHECK(lists[0] == std::vector<int>{1});
    CHECK(lists[2] == std::vector<int>{3});
    const auto es = g.edges();
    REQUIRE(es.size() == 2);
    CHECK(es[0] == std::pair<int, int>{1, 0});
    CHECK(es[1] == std::pair<int, int>{3, 2});
    const Eigen::MatrixXd A = g.dense_adjacency();
    CHECK(A(0, 1) == 1.0);
    CHECK(A(1, 0) == 1.0);
    CHECK(A.diagonal().isZero());
}

TEST_CASE("support_graph: examples") {
    CHECK(support_graph(Eigen::MatrixXd::Identity(4, 4)).edge_count() == 0);

    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2);
    t(0, 1) = t(1, 0) = 0.3;
    CHECK(support_graph(t, 0.0).edge_count() == 1);

    // strict inequality: tol = max|entry| leaves the graph empty
    Eigen::MatrixXd d(3, 3);
    d << 1, 0.5, 0.2, 0.5, 1, 0.4, 0.2, 0.4, 1;
    CHECK(support_graph(d, 1.0).edge_count() == 0);

    Eigen::MatrixXd bad(2, 2);
    bad << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(support_graph(bad), std::invalid_argument);
}

TEST_CASE("support_graph counts the off-diagonal nonzeros") {
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(5, 5);
    t(0, 3) = t(3, 0) = -0.2;
    t(1, 2) = t(2, 1) = 0.7;
    t(2, 4) = t(4, 2) = 1e-12;
    const UndirectedGraph g = support_graph(t, 0.0);
    int nnz_offdiag = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j && t(i, j) != 0.0) ++nnz_offdiag;
    CHECK(g.edge_count() == nnz_offdiag / 2);
}

TEST_CASE("PrecisionModel: eigenvalue check") {
    Eigen::MatrixXd t(2, 2);
    t << 2, -1, -1, 2;
    const PrecisionModel m = PrecisionModel::from_matrix(t);
    CHECK(m.min_eigenvalue() == doctest::Approx(1.0));
    CHECK(m.graph.edge_count() == 1);
}
