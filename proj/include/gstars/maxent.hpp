#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gstars {

/// Inputs to the constrained maximum-entropy program over the discrete
/// support alpha_i = i/N: the mean band [q_bar - eps, q_bar + eps], the caps
/// on the end-point masses, and the bimodality parameter c entering
/// sum (alpha^3 - c alpha) q >= 0.
struct MaxEntInput {
    int N = 2;
    double q_bar = 0.5;
    double eps = 1.0;
    double cap0 = 1.0; // upper bound on q_0
    double capN = 1.0; // upper bound on q_N
    double c = 0.0;

    void validate() const; // throws std::invalid_argument
};

struct MaxEntModel {
    int N = 0;
    Eigen::VectorXd alpha; // i/N, i = 0..N
    Eigen::VectorXd q;     // probability vector (empty when infeasible)
    double entropy = 0.0;  // -sum q log q, with 0 log 0 = 0
    double mean = 0.0;     // sum alpha_i q_i
    double variance = 0.0; // sum alpha_i^2 q_i - mean^2
    bool feasible = false;

    // optimality certificate
    double max_violation = 0.0; // worst constraint residual
    double stationarity = 0.0;  // first-order (dual feasibility) residual
};

/// Exact feasibility of the constraint set (LP oracle; no entropy involved).
bool maxent_feasible(const MaxEntInput& input);

/// Entropy maximizer over the simplex under the mean band, end-point caps
/// and bimodality constraint; projected gradient ascent with an augmented
/// Lagrangian on the linear inequalities, caps handled by projection.
/// An empty constraint set yields feasible = false (not an exception).
MaxEntModel solve_maxent(const MaxEntInput& input);

/// Largest c keeping the constraint set nonempty, to absolute tolerance
/// 1e-6: c_hi starts at 1 and doubles until infeasible, then bisection with
/// the LP oracle. Throws std::runtime_error when already infeasible at c=0.
double find_c_max(const MaxEntInput& input);

/// Scaled model variance 4 sigma_q^2, comparable to the within-probability
/// variability of an observed frequency table.
double predicted_within_variability(const MaxEntModel& model);

struct VarianceEntry {
    int N = 0;
    double c = 0.0;
    bool feasible = false;
    double mean = 0.0;
    double variance = 0.0;
    double entropy = 0.0;
};

/// Model variances across N with fixed priors; infeasible N are flagged
/// per entry rather than aborting the sequence.
std::vector<VarianceEntry> variance_sequence(const MaxEntInput& priors, double c,
                                             const std::vector<int>& n_range);

} // namespace gstars
