#include <doctest.h>

#include <cmath>

#include "gstars/maxent.hpp"
#include "reference.hpp"

using namespace gstars;

namespace {
testref::MaxEntOracleProblem oracle_problem(const MaxEntInput& in) {
    testref::MaxEntOracleProblem prob;
    prob.alpha.resize(in.N + 1);
    prob.d.resize(in.N + 1);
    for (int i = 0; i <= in.N; ++i) {
        const double a = static_cast<double>(i) / in.N;
        prob.alpha(i) = a;
        prob.d(i) = a * a * a - in.c * a;
    }
    prob.mean_lo = in.q_bar - in.eps;
    prob.mean_hi = in.q_bar + in.eps;
    prob.ub = Eigen::VectorXd::Constant(in.N + 1, 1.0);
    prob.ub(0) = in.cap0;
    prob.ub(in.N) = in.capN;
    return prob;
}
} // namespace

TEST_CASE("input validation") {
    MaxEntInput in;
    in.q_bar = 1.4;
    CHECK_THROWS_AS(in.validate(), std::invalid_argument);
    in = MaxEntInput{};
    in.eps = -0.1;
    CHECK_THROWS_AS(in.validate(), std::invalid_argument);
    in = MaxEntInput{};
    in.cap0 = 2.0;
    CHECK_THROWS_AS(in.validate(), std::invalid_argument);
    in = MaxEntInput{};
    in.c = -1.0;
    CHECK_THROWS_AS(in.validate(), std::invalid_argument);
}

TEST_CASE("all constraints slack: uniform distribution") {
    for (int N : {1, 4, 10, 40}) {
        MaxEntInput in;
        in.N = N;
        in.eps = 1.0;
        in.c = 0.0;
        const MaxEntModel m = solve_maxent(in);
        REQUIRE(m.feasible);
        for (int i = 0; i <= N; ++i)
            CHECK(m.q(i) == doctest::Approx(1.0 / (N + 1)).epsilon(1e-7));
        CHECK(m.entropy == doctest::Approx(std::log(N + 1.0)).epsilon(1e-8));
        CHECK(m.max_violation <= 1e-6);
        CHECK(m.stationarity <= 1e-5);
    }
}

TEST_CASE("mean constraint only: exponential-family shape") {
    MaxEntInput in;
    in.N = 10;
    in.q_bar = 0.3;
    in.eps = 1e-6; // effectively an equality
    const MaxEntModel m = solve_maxent(in);
    REQUIRE(m.feasible);
    CHECK(std::abs(m.mean - 0.3) <= 1e-5);
    // q_i proportional to exp(mu * alpha_i): log q has constant increments
    std::vector<double> diffs;
    for (int i = 0; i + 1 <= in.N; ++i)
        diffs.push_back(std::log(m.q(i + 1)) - std::log(m.q(i)));
    for (std::size_t i = 1; i < diffs.size(); ++i)
        CHECK(std::abs(diffs[i] - diffs[0]) <= 1e-3);
    // oracle cross-check
    const Eigen::VectorXd ref = testref::maxent_oracle(oracle_problem(in));
    CHECK(m.entropy >= testref::entropy_of(ref) - 1e-5);
}

TEST_CASE("forced contradictions are reported infeasible") {
    MaxEntInput in;
    in.N = 4;
    in.q_bar = 0.0;
    in.eps = 0.0;
    in.cap0 = 0.0;
    in.capN = 0.0;
    CHECK_FALSE(maxent_feasible(in));
    CHECK_FALSE(solve_maxent(in).feasible);
}

TEST_CASE("solutions satisfy constraints and beat the oracle") {
    const double qbars[] = {0.1, 0.3, 0.6};
    const double epss[] = {0.004, 0.02};
    const double caps0[] = {1.0, 0.8};
    for (int N : {5, 12, 20})
        for (double qb : qbars)
            for (double ep : epss)
                for (double c0 : caps0) {
                    MaxEntInput in;
                    in.N = N;
                    in.q_bar = qb;
                    in.eps = ep;
                    in.cap0 = c0;
                    in.capN = 0.1;
                    in.c = 0.3;
                    const MaxEntModel m = solve_maxent(in);
                    if (!maxent_feasible(in)) {
                        CHECK_FALSE(m.feasible);
                        continue;
                    }
                    REQUIRE(m.feasible);
                    CHECK(std::abs(m.q.sum() - 1.0) <= 1e-8);
                    CHECK(m.q.minCoeff() >= 0.0);
                    CHECK(m.max_violation <= 1e-6);
                    CHECK(m.stationarity <= 1e-5);
                    const Eigen::VectorXd ref = testref::maxent_oracle(oracle_problem(in));
                    CHECK(m.entropy >= testref::entropy_of(ref) - 1e-5);
                }
}

TEST_CASE("c_max: slack input admits c of at least 1") {
    MaxEntInput in;
    in.N = 6;
    in.eps = 1.0;
    CHECK(find_c_max(in) >= 1.0 - 1e-6);
}

TEST_CASE("c_max: bisection brackets the feasibility frontier") {
    MaxEntInput in;
    in.N = 8;
    in.q_bar = 0.25;
    in.eps = 0.01;
    in.cap0 = 0.6;
    in.capN = 0.05;
    const double cmax = find_c_max(in);
    MaxEntInput lo = in, hi = in;
    lo.c = std::max(0.0, cmax - 1e-4);
    hi.c = cmax + 1e-4;
    CHECK(maxent_feasible(lo));
    CHECK_FALSE(maxent_feasible(hi));

    // monotonicity of the constraint in c over a grid of feasible c values
    for (double c : {0.0, cmax * 0.25, cmax * 0.5, cmax * 0.99}) {
        MaxEntInput t = in;
        t.c = c;
        CHECK(maxent_feasible(t));
    }
}

TEST_CASE("c_max: infeasible priors raise") {
    MaxEntInput in;
    in.N = 4;
    in.q_bar = 0.0;
    in.eps = 0.0;
    in.cap0 = 0.0;
    CHECK_THROWS_AS(find_c_max(in), std::runtime_error);
}

TEST_CASE("predicted within-variability") {
    MaxEntModel point;
    point.N = 4;
    point.feasible = true;
    point.variance = 0.0;
    CHECK(predicted_within_variability(point) == 0.0);

    // N=1, q=(1/2,1/2): variance 1/4, scaled 1
    MaxEntInput in;
    in.N = 1;
    in.q_bar = 0.5;
    in.eps = 1e-9;
    const MaxEntModel m = solve_maxent(in);
    REQUIRE(m.feasible);
    CHECK(predicted_within_variability(m) == doctest::Approx(1.0).epsilon(1e-6));

    MaxEntModel bad;
    CHECK_THROWS_AS(predicted_within_variability(bad), std::invalid_argument);
}

TEST_CASE("variance sequences are non-increasing in N") {
    MaxEntInput in;
    in.q_bar = 0.2;
    in.eps = 3.0 / 780.0;
    in.cap0 = 0.85;
    in.capN = 0.05;
    std::vector<int> range;
    for (int n = 2; n <= 30; ++n) range.push_back(n);
    for (double c : {0.0, 0.3}) {
        const auto seq = variance_sequence(in, c, range);
        REQUIRE(seq.size() == range.size());
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& e : seq) {
            REQUIRE(e.feasible);
            CHECK(e.variance <= prev + 1e-7);
            prev = e.variance;
        }
    }
    // degenerate priors: point mass at q_bar support point
    MaxEntInput pm;
    pm.q_bar = 0.0;
    pm.eps = 0.0;
    pm.capN = 0.0;
    const auto seq = variance_sequence(pm, 0.0, {2, 4, 8});
    for (const auto& e : seq) {
        REQUIRE(e.feasible);
        CHECK(e.variance == doctest::Approx(0.0).epsilon(1e-10));
    }
}
