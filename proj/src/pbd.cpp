#include "gstars/pbd.hpp"

#include <numeric>
#include <stdexcept>

namespace gstars {

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : p(std::move(probs)) {
    if (p.empty()) throw std::invalid_argument("ProbabilityVector: L >= 1 required");
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("ProbabilityVector: entries must lie in [0,1]");
}

double ProbabilityVector::mean() const {
    return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

double ProbabilityVector::within_variance() const {
    const double m = mean();
    double acc = 0.0;
    for (double v : p) acc += (v - m) * (v - m);
    return acc / static_cast<double>(p.size());
}

std::vector<double> pbd_pmf(const ProbabilityVector& pv) {
    std::vector<double> pmf{1.0};
    pmf.reserve(pv.L() + 1);
    for (double pl : pv.p) {
        pmf.push_back(0.0);
        for (std::size_t y = pmf.size() - 1; y > 0; --y)
            pmf[y] = pmf[y] * (1.0 - pl) + pmf[y - 1] * pl;
        pmf[0] *= 1.0 - pl;
    }
    return pmf;
}

VarianceDecomposition variance_decomposition(const ProbabilityVector& pv) {
    const double L = static_cast<double>(pv.L());
    const double m = pv.mean();
    VarianceDecomposition d;
    d.mean_term = L * m * (1.0 - m);
    d.within_term = L * pv.within_variance();
    d.total = 0.0;
    for (double v : pv.p) d.total += v * (1.0 - v);
    return d;
}

double chebyshev_bound(std::size_t L, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("chebyshev_bound: eps > 0 required");
    if (L == 0) throw std::invalid_argument("chebyshev_bound: L >= 1 required");
    return 1.0 / (4.0 * static_cast<double>(L) * eps * eps);
}

double total_variability(const std::vector<double>& theta) {
    if (theta.empty()) throw std::invalid_argument("total_variability: empty column");
    double acc = 0.0;
    for (double t : theta) acc += t * (1.0 - t);
    return 4.0 * acc / static_cast<double>(theta.size());
}

double upper_bound_variability(const std::vector<double>& theta) {
    if (theta.empty()) throw std::invalid_argument("upper_bound_variability: empty column");
    const double m = std::accumulate(theta.begin(), theta.end(), 0.0) /
                     static_cast<double>(theta.size());
    return 4.0 * m * (1.0 - m);
}

double within_variability(const std::vector<double>& theta) {
    if (theta.empty()) throw std::invalid_argument("within_variability: empty column");
    const double m = std::accumulate(theta.begin(), theta.end(), 0.0) /
                     static_cast<double>(theta.size());
    double acc = 0.0;
    for (double t : theta) acc += (t - m) * (t - m);
    return 4.0 * acc / static_cast<double>(theta.size());
}

} // namespace gstars
