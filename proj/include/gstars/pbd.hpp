#pragma once

#include <vector>

namespace gstars {

/// Trial-probability vector of a Poisson-Binomial sum, with its mean and
/// within-vector variance (1/L normalized so the variance decomposition
/// Var = L*pbar*(1-pbar) - L*sigma_p^2 holds exactly).
struct ProbabilityVector {
    std::vector<double> p;

    explicit ProbabilityVector(std::vector<double> probs); // validates [0,1]
    std::size_t L() const { return p.size(); }
    double mean() const;
    double within_variance() const; // (1/L) sum (p_l - pbar)^2
};

/// Exact PMF of the sum of independent Bernoulli(p_l) over {0,...,L} via the
/// O(L^2) convolution recurrence.
std::vector<double> pbd_pmf(const ProbabilityVector& pv);

struct VarianceDecomposition {
    double total;       // sum p(1-p)
    double mean_term;   // L * pbar * (1 - pbar)
    double within_term; // L * sigma_p^2
};
VarianceDecomposition variance_decomposition(const ProbabilityVector& pv);

/// Chebyshev tail bound P(|Ybar_L - pbar| > eps) <= 1/(4 L eps^2).
double chebyshev_bound(std::size_t L, double eps);

/// Curve pieces shared with the stability module; operate on one column of
/// edge frequencies theta_hat.
double total_variability(const std::vector<double>& theta);   // (4/L) sum t(1-t)
double upper_bound_variability(const std::vector<double>& theta); // 4 tbar (1-tbar)
double within_variability(const std::vector<double>& theta);  // (4/L) sum (t-tbar)^2

} // namespace gstars
