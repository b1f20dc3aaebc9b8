#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "gstars/graph.hpp"
#include "gstars/stars.hpp"

namespace gstars {

/// p x 15 matrix of per-node orbit counts over all connected induced
/// subgraphs of 2-4 nodes (graphlets G0-G8, Przulj orbit numbering:
/// G0 edge 0; G1 path 1,2; G2 triangle 3; G3 4-path 4,5; G4 3-star 6,7;
/// G5 4-cycle 8; G6 tailed triangle 9,10,11; G7 diamond 12,13; G8 K4 14).
using GraphletDegreeMatrix = Eigen::Matrix<long long, Eigen::Dynamic, 15>;

/// Exact counts via connected-subgraph enumeration (ESU) with bitset
/// adjacency; column 0 equals node degree.
GraphletDegreeMatrix count_orbits(const UndirectedGraph& g);

/// Exhaustive fallback: enumerates every 2-/3-/4-node subset directly.
/// Quadratically slower; intended for p <= ~30.
GraphletDegreeMatrix count_orbits_exhaustive(const UndirectedGraph& g);

/// The 11 non-redundant orbits entering the correlation matrix.
inline constexpr std::array<int, 11> kNonRedundantOrbits = {0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 11};

/// 11x11 Spearman rank correlation matrix (average-rank ties) over the
/// non-redundant orbit columns. A constant column correlates 0 with
/// everything (diagonal stays 1).
Eigen::MatrixXd gcm(const GraphletDegreeMatrix& M);

/// 55-entry strictly-lower-triangular part of R in column-wise order.
Eigen::VectorXd gcv(const Eigen::MatrixXd& R);
Eigen::VectorXd gcv_of(const UndirectedGraph& g);

/// Graphlet correlation distance: Euclidean distance of two GCVs.
double gcd(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Mean pairwise GCD over N graph estimates.
double graphlet_variability(const std::vector<Eigen::VectorXd>& gcvs);

/// d^_N per grid column over [k_lo, k_hi] from stored subsample supports;
/// NaN outside the window or where fewer than two usable graphs exist.
/// Graphs are the parallel unit; the pairwise reduction is deterministic.
std::vector<double> graphlet_variability_curve(const SupportTable& table, int k_lo,
                                               int k_hi, int workers);

/// G-StARS: B-StARS window, then the grid point minimizing d^_N within it
/// (ties break toward larger lambda).
SelectionReport gstars(const Eigen::MatrixXd& X, const RegularizationGrid& grid,
                       const StarsConfig& cfg);

} // namespace gstars
