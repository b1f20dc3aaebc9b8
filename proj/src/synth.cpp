#include "gstars/synth.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gstars/rng.hpp"

namespace gstars {

GraphFamily parse_family(const std::string& name) {
    if (name == "er" || name == "erdos_renyi") return GraphFamily::erdos_renyi;
    if (name == "hub") return GraphFamily::hub;
    if (name == "neighborhood" || name == "geometric") return GraphFamily::neighborhood;
    throw std::invalid_argument("unknown graph family: " + name);
}

std::string family_name(GraphFamily f) {
    switch (f) {
        case GraphFamily::erdos_renyi: return "erdos_renyi";
        case GraphFamily::hub: return "hub";
        case GraphFamily::neighborhood: return "neighborhood";
    }
    return "?";
}

void GeneratorConfig::validate() const {
    if (p < 2) throw std::invalid_argument("generator: p >= 2 required");
    if (family == GraphFamily::erdos_renyi &&
        (sparsity <= 0.0 || sparsity >= 1.0))
        throw std::invalid_argument("generator: sparsity must lie in (0,1)");
    if (weight_min > weight_max || weight_min < -1.0 || weight_max > 1.0)
        throw std::invalid_argument("generator: weight range must be within [-1,1]");
    if (family == GraphFamily::hub) {
        if (n_hubs < 1 || p % n_hubs != 0 || p / n_hubs < 2)
            throw std::invalid_argument("generator: p must split into n_hubs groups of size >= 2");
        if (hub_weight == 0.0)
            throw std::invalid_argument("generator: hub_weight must be nonzero");
    }
    if (family == GraphFamily::neighborhood && edge_factor <= 0.0)
        throw std::invalid_argument("generator: edge_factor must be positive");
    if (diag_slack <= 0.0)
        throw std::invalid_argument("generator: diag_slack must be positive");
}

namespace {

double draw_weight(const GeneratorConfig& cfg, std::mt19937_64& rng) {
    if (cfg.weight_min == cfg.weight_max) return cfg.weight_min;
    return std::uniform_real_distribution<double>(cfg.weight_min, cfg.weight_max)(rng);
}

PrecisionModel finalize(Eigen::MatrixXd theta, const GeneratorConfig& cfg) {
    const int p = static_cast<int>(theta.rows());
    for (int i = 0; i < p; ++i) {
        double s = 0;
        for (int j = 0; j < p; ++j)
            if (j != i) s += std::abs(theta(i, j));
        theta(i, i) = s + cfg.diag_slack; // strict diagonal dominance => PD
    }
    return PrecisionModel::from_matrix(theta);
}

} // namespace

PrecisionModel gen_erdos_renyi(const GeneratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto rng = make_rng(seed, 0x4552ULL); // "ER"
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(cfg.p, cfg.p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int j = 0; j < cfg.p; ++j)
        for (int i = j + 1; i < cfg.p; ++i)
            if (unit(rng) < cfg.sparsity) {
                const double w = draw_weight(cfg, rng);
                theta(i, j) = theta(j, i) = w;
            }
    return finalize(std::move(theta), cfg);
}

PrecisionModel gen_hub(const GeneratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    (void)seed; // topology and weights are deterministic
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(cfg.p, cfg.p);
    const int group = cfg.p / cfg.n_hubs;
    for (int h = 0; h < cfg.n_hubs; ++h) {
        const int hub = h * group;
        for (int v = hub + 1; v < hub + group; ++v)
            theta(v, hub) = theta(hub, v) = cfg.hub_weight;
    }
    return finalize(std::move(theta), cfg);
}

PrecisionModel gen_neighborhood(const GeneratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto rng = make_rng(seed, 0x4e42ULL); // "NB"
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(cfg.p), y(cfg.p);
    for (int v = 0; v < cfg.p; ++v) {
        x[v] = unit(rng);
        y[v] = unit(rng);
    }
    // connect the round(edge_factor*p) geometrically closest pairs
    const std::size_t L = pair_count(cfg.p);
    std::vector<std::size_t> order(L);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> d2(L);
    for (std::size_t l = 0; l < L; ++l) {
        auto [i, j] = pair_from_index(l, cfg.p);
        const double dx = x[i] - x[j], dy = y[i] - y[j];
        d2[l] = dx * dx + dy * dy;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d2[a] != d2[b] ? d2[a] < d2[b] : a < b;
    });
    const std::size_t target =
        std::min<std::size_t>(L, static_cast<std::size_t>(std::llround(cfg.edge_factor * cfg.p)));
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(cfg.p, cfg.p);
    for (std::size_t t = 0; t < target; ++t) {
        auto [i, j] = pair_from_index(order[t], cfg.p);
        const double w = draw_weight(cfg, rng);
        theta(i, j) = theta(j, i) = w;
    }
    return finalize(std::move(theta), cfg);
}

PrecisionModel generate(const GeneratorConfig& cfg, std::uint64_t seed) {
    switch (cfg.family) {
        case GraphFamily::erdos_renyi: return gen_erdos_renyi(cfg, seed);
        case GraphFamily::hub: return gen_hub(cfg, seed);
        case GraphFamily::neighborhood: return gen_neighborhood(cfg, seed);
    }
    throw std::invalid_argument("generate: bad family");
}

Eigen::MatrixXd sample_mvn(const PrecisionModel& model, int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample_mvn: n >= 2 required");
    const int p = static_cast<int>(model.theta.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(model.theta);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("sample_mvn: precision matrix is not positive definite");
    auto rng = make_rng(seed, 0x4d564eULL); // "MVN"
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd z(p);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < p; ++c) z(c) = gauss(rng);
        // x = L^{-T} z has covariance L^{-T} L^{-1} = theta^{-1}
        X.row(r) = llt.matrixU().solve(z).transpose();
    }
    return X;
}

} // namespace gstars
