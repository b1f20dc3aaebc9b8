#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "gstars/graph.hpp"

namespace gstars {

enum class GraphFamily { erdos_renyi, hub, neighborhood };

GraphFamily parse_family(const std::string& name);
std::string family_name(GraphFamily f);

/// Ground-truth generator settings. All generators are pure functions of
/// (config, seed); positive definiteness is enforced by diagonal dominance
/// (diag = row-wise absolute sum + diag_slack).
struct GeneratorConfig {
    GraphFamily family = GraphFamily::erdos_renyi;
    int p = 40;
    // Erdos-Renyi
    double sparsity = 0.075; // edge probability
    // hub
    int n_hubs = 2;
    double hub_weight = -0.117;
    // shared weight range (uniform draw); a degenerate range pins the weight
    double weight_min = -1.0;
    double weight_max = 1.0;
    // neighborhood: target edge count is round(edge_factor * p)
    double edge_factor = 1.65;
    double diag_slack = 0.1;

    void validate() const; // throws std::invalid_argument
};

PrecisionModel gen_erdos_renyi(const GeneratorConfig& cfg, std::uint64_t seed);
PrecisionModel gen_hub(const GeneratorConfig& cfg, std::uint64_t seed);
PrecisionModel gen_neighborhood(const GeneratorConfig& cfg, std::uint64_t seed);
PrecisionModel generate(const GeneratorConfig& cfg, std::uint64_t seed);

/// n i.i.d. rows from N(0, theta^{-1}) via the Cholesky factor of theta.
/// Deterministic given seed. Throws std::invalid_argument when theta is
/// not positive definite.
Eigen::MatrixXd sample_mvn(const PrecisionModel& model, int n, std::uint64_t seed);

} // namespace gstars
