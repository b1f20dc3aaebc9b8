#include "gstars/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace gstars {

std::size_t pair_index(int i, int j, int p) {
    if (j < 0 || i <= j || i >= p)
        throw std::invalid_argument("pair_index: need 0 <= j < i < p");
    const std::size_t jj = static_cast<std::size_t>(j);
    return jj * p - jj * (jj + 1) / 2 + (i - j - 1);
}

std::pair<int, int> pair_from_index(std::size_t l, int p) {
    if (l >= pair_count(p))
        throw std::invalid_argument("pair_from_index: index out of range");
    // Column j starts at offset j*p - j(j+1)/2; solve approximately, then fix up.
    double pd = static_cast<double>(p);
    int j = static_cast<int>(std::floor(pd - 0.5 - std::sqrt((pd - 0.5) * (pd - 0.5) - 2.0 * static_cast<double>(l))));
    if (j < 0) j = 0;
    auto col_start = [p](int c) {
        std::size_t cc = static_cast<std::size_t>(c);
        return cc * p - cc * (cc + 1) / 2;
    };
    while (j > 0 && col_start(j) > l) --j;
    while (j + 1 < p - 1 && col_start(j + 1) <= l) ++j;
    int i = static_cast<int>(l - col_start(j)) + j + 1;
    return {i, j};
}

UndirectedGraph::UndirectedGraph(int p) : p_(p) {
    if (p < 1) throw std::invalid_argument("UndirectedGraph: p >= 1 required");
    words_.assign((gstars::pair_count(p) + 63) / 64, 0);
}

bool UndirectedGraph::has_edge(int i, int j) const {
    if (i == j) return false;
    if (i < j) std::swap(i, j);
    return has_pair(pair_index(i, j, p_));
}

void UndirectedGraph::set_pair(std::size_t l) {
    std::uint64_t& w = words_[l >> 6];
    const std::uint64_t bit = 1ULL << (l & 63);
    if (!(w & bit)) {
        w |= bit;
        ++edges_;
    }
}

void UndirectedGraph::set_edge(int i, int j) {
    if (i == j) throw std::invalid_argument("set_edge: self loops not allowed");
    if (i < j) std::swap(i, j);
    set_pair(pair_index(i, j, p_));
}

std::vector<std::vector<int>> UndirectedGraph::adjacency_lists() const {
    std::vector<std::vector<int>> adj(p_);
    for (int j = 0; j < p_; ++j)
        for (int i = j + 1; i < p_; ++i)
            if (has_pair(pair_index(i, j, p_))) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    return adj;
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_);
    for (int j = 0; j < p_; ++j)
        for (int i = j + 1; i < p_; ++i)
            if (has_pair(pair_index(i, j, p_))) out.emplace_back(i, j);
    return out;
}

Eigen::MatrixXd UndirectedGraph::dense_adjacency() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p_, p_);
    for (auto [i, j] : edges()) A(i, j) = A(j, i) = 1.0;
    return A;
}

UndirectedGraph support_graph(const Eigen::MatrixXd& theta, double tol) {
    if (theta.rows() != theta.cols())
        throw std::invalid_argument("support_graph: matrix must be square");
    const double scale = theta.cwiseAbs().maxCoeff();
    if ((theta - theta.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale))
        throw std::invalid_argument("support_graph: matrix must be symmetric");
    const int p = static_cast<int>(theta.rows());
    UndirectedGraph g(p);
    for (int j = 0; j < p; ++j)
        for (int i = j + 1; i < p; ++i)
            if (std::abs(theta(i, j)) > tol) g.set_edge(i, j);
    return g;
}

PrecisionModel PrecisionModel::from_matrix(const Eigen::MatrixXd& theta, double support_tol) {
    return PrecisionModel{theta, support_graph(theta, support_tol)};
}

double PrecisionModel::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace gstars
