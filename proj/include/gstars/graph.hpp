#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace gstars {

/// Index of the node pair (i,j), 0 <= j < i < p, in the column-wise order
/// of the strictly lower triangular part: (1,0)->0, (2,0)->1, ...,
/// (p-1,p-2)->L-1 with L = p(p-1)/2.
std::size_t pair_index(int i, int j, int p);

/// Inverse of pair_index.
std::pair<int, int> pair_from_index(std::size_t l, int p);

inline std::size_t pair_count(int p) {
    return static_cast<std::size_t>(p) * (p - 1) / 2;
}

/// 1-based variant used by the text formats: (i,j) with 1 <= j < i <= p maps
/// to l = (j-1)p - j(j-1)/2 + (i-j) in 1..L.
inline std::size_t edge_index(int i, int j, int p) {
    return pair_index(i - 1, j - 1, p) + 1;
}
inline std::pair<int, int> edge_from_index(std::size_t l, int p) {
    auto [i, j] = pair_from_index(l - 1, p);
    return {i + 1, j + 1};
}

/// Undirected graph on p nodes, no self loops. Adjacency is stored as a
/// bitset over the L = p(p-1)/2 node pairs in pair_index order. Immutable
/// in spirit: build once, then share freely across threads.
class UndirectedGraph {
public:
    UndirectedGraph() = default;
    explicit UndirectedGraph(int p);

    int p() const { return p_; }
    int edge_count() const { return edges_; }
    std::size_t pair_count() const { return gstars::pair_count(p_); }

    bool has_edge(int i, int j) const;
    void set_edge(int i, int j);
    bool has_pair(std::size_t l) const {
        return (words_[l >> 6] >> (l & 63)) & 1ULL;
    }
    void set_pair(std::size_t l);

    const std::vector<std::uint64_t>& words() const { return words_; }

    /// Sorted neighbor lists, built on demand.
    std::vector<std::vector<int>> adjacency_lists() const;

    /// (i,j) pairs with i > j, in pair_index order.
    std::vector<std::pair<int, int>> edges() const;

    Eigen::MatrixXd dense_adjacency() const;

    bool operator==(const UndirectedGraph& o) const {
        return p_ == o.p_ && words_ == o.words_;
    }

private:
    int p_ = 0;
    int edges_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Off-diagonal support of a symmetric matrix: edge (i,j) iff |theta_ij| > tol.
/// Throws std::invalid_argument if theta is not square/symmetric.
UndirectedGraph support_graph(const Eigen::MatrixXd& theta, double tol = 0.0);

/// Symmetric positive definite precision matrix together with its support
/// graph (ground truth model or estimate).
struct PrecisionModel {
    Eigen::MatrixXd theta;
    UndirectedGraph graph;

    static PrecisionModel from_matrix(const Eigen::MatrixXd& theta,
                                      double support_tol = 0.0);
    /// Smallest eigenvalue of theta (eigensolve; used by PD checks).
    double min_eigenvalue() const;
};

} // namespace gstars
