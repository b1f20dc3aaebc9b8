#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gstars/graph.hpp"

namespace gstars {

struct CovarianceEstimate {
    Eigen::MatrixXd sigma_hat;
    int n = 0;
};

/// Maximum-likelihood sample covariance (1/n) Xc' Xc after column centering.
CovarianceEstimate sample_covariance(const Eigen::MatrixXd& X);

struct RegularizationGrid {
    std::vector<double> lambdas; // strictly increasing, positive
    int size() const { return static_cast<int>(lambdas.size()); }
    double operator[](int k) const { return lambdas[static_cast<std::size_t>(k)]; }
};

/// Log-spaced grid with lambda_K = max off-diagonal |sigma_hat| (the exact
/// empty-graph threshold) and lambda_1 = ratio * lambda_K.
RegularizationGrid lambda_grid(const Eigen::MatrixXd& sigma_hat, int K, double ratio);

/// Connected components of the graph {(i,j): |sigma_ij| > lambda}. The
/// penalized problem decomposes block-diagonally across them.
std::vector<std::vector<int>> screen_components(const Eigen::MatrixXd& sigma_hat,
                                                double lambda);

struct GlassoConfig {
    double tol = 1e-4;    // on the normalized duality gap
    int max_iter = 200;   // outer sweeps
    // Element-wise L1 on the whole matrix (the strict estimator). Disabling
    // penalizes off-diagonal entries only; with subsampled b < p covariances
    // that variant can be ill-posed at small lambda, hence the default.
    bool penalize_diagonal = true;
    bool screen = true;
};

struct GlassoResult {
    Eigen::MatrixXd theta; // symmetric, exact zeros off the support
    Eigen::MatrixXd w;     // dual iterate (approx. theta^{-1})
    Eigen::MatrixXd beta;  // lasso coefficients, kept for warm starts
    int iterations = 0;
    double gap = 0.0; // last normalized duality gap
    bool converged = false;

    UndirectedGraph support() const { return support_graph(theta, 0.0); }
};

struct NonConvergenceError : std::runtime_error {
    NonConvergenceError(std::string msg, GlassoResult partial_)
        : std::runtime_error(std::move(msg)), partial(std::move(partial_)) {}
    GlassoResult partial; // last iterate, reusable as a warm start
};

/// Solves the L1-penalized inverse-covariance problem at a single lambda by
/// block coordinate descent on the dual (classic graphical-lasso sweeps with
/// an inner coordinate-descent lasso), with component screening.
/// Throws NonConvergenceError when max_iter sweeps do not reach tol.
GlassoResult fit(const Eigen::MatrixXd& sigma_hat, double lambda,
                 const GlassoConfig& cfg = {},
                 const GlassoResult* warm = nullptr);

/// Max-norm residual of the stationarity condition; the optimality
/// certificate used by tests and diagnostics.
double kkt_residual(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& theta,
                    double lambda, bool penalize_diagonal = true);

/// Value of the penalized negative log-likelihood objective.
double objective(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& theta,
                 double lambda, bool penalize_diagonal = true);

struct PathEstimate {
    RegularizationGrid grid;
    std::vector<UndirectedGraph> supports;  // per lambda index
    std::vector<Eigen::MatrixXd> thetas;    // empty when not stored
    std::vector<int> nnz_offdiag;           // ||theta||_0 off-diagonal (2E)
    std::vector<int> iterations;
    std::vector<double> gaps;
    std::vector<char> converged; // per lambda; failed fits keep last iterate
};

/// Fits from lambda_K down to lambda_1 with warm starts. Non-convergence at
/// some lambda is recorded (converged[k] = 0, support from the last iterate)
/// rather than aborting the whole path.
PathEstimate fit_path(const Eigen::MatrixXd& sigma_hat, const RegularizationGrid& grid,
                      const GlassoConfig& cfg = {}, bool store_thetas = true);

} // namespace gstars
