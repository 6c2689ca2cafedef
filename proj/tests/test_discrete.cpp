#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddsim/discrete.hpp"
#include "ddsim/rng.hpp"

using namespace ddsim;

TEST_CASE("harmonic time change matches its digamma closed form") {
    for (double a : {0.0, 0.5, -0.2}) {
        double s = 0.0;
        for (int l = 1; l <= 1500; ++l) {
            s += 1.0 / (l + a);
            if (l == 10 || l == 1000 || l == 1500)
                CHECK(harmonic_h(a, l) == doctest::Approx(s).epsilon(1e-12));
        }
    }
    CHECK(harmonic_h(0.0, 0) == 0.0);
}

TEST_CASE("quantile coupling lands at the first sub-threshold survival level") {
    const long long m = 17;
    const double a = 0.0, b = 0.7;
    // u -> 0: the very first factor already beats 1-u, so r = m
    QuantileCouple qc = quantile_couple(m, a, b, 1e-12);
    CHECK(qc.r == m);
    CHECK(qc.v == doctest::Approx(1.0 / (m + a + 1.0)).epsilon(1e-12));
    // exact inversion: P[r >= n] = prod_{l=m}^{n-1} (1 - b/(l+a+1))
    auto survival = [&](long long n) {
        double s = 1.0;
        for (long long l = m; l < n; ++l) s *= 1.0 - b / (l + a + 1.0);
        return s;
    };
    for (double u : {0.05, 0.3, 0.6, 0.9, 0.999}) {
        QuantileCouple q = quantile_couple(m, a, b, u);
        long long n = q.r + 1;
        CHECK(survival(n) <= 1.0 - u + 1e-12);
        CHECK(survival(n - 1) > 1.0 - u - 1e-12);
        CHECK(q.v == doctest::Approx(harmonic_h(a, n) - harmonic_h(a, m)).epsilon(1e-12));
        CHECK(q.e_b == doctest::Approx(-std::log(1.0 - u) / b).epsilon(1e-12));
    }
}

TEST_CASE("coupled exponential has the right mean and the sandwich holds") {
    const long long m = 50;
    const double b = 0.6;
    const double phi = b / (m + 1.0);
    const double cphi = (-std::log1p(-phi) - phi) / (phi * phi);
    std::mt19937_64 g = make_stream(123, StreamPurpose::Generic);
    const int N = 200000;
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        QuantileCouple qc = quantile_couple(m, 0.0, b, uniform01(g));
        sum += qc.e_b;
        double d = qc.e_b - qc.v;
        CHECK(d >= -1.0 / (qc.r + 1.0) - 1e-13);
        CHECK(d <= cphi * b * qc.v / (m + 1.0) + 1e-13);
    }
    double mean = sum / N;
    CHECK(std::fabs(mean - 1.0 / b) <= 4.0 / (b * std::sqrt(static_cast<double>(N))));
}

TEST_CASE("quantile coupling survives extreme uniforms at large scales") {
    for (long long m : {10LL, 1000LL, 100000LL}) {
        QuantileCouple qc = quantile_couple(m, 0.0, 0.5, 1.0 - 1e-16);
        CHECK(qc.r >= m);
        CHECK(std::isfinite(qc.v));
        QuantileCouple lo = quantile_couple(m, 0.0, 0.9, 1e-16, 0.999);
        CHECK(lo.r == m);
    }
}

TEST_CASE("discrete tagged chain respects the step grid") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    PathSample p = simulate_discrete_tagged(s, DiscreteVariant::Plain, 3, 10, 5000, 42);
    p.check_invariants();
    REQUIRE(!p.times.empty());
    CHECK(p.times.front() == 10.0);
    for (size_t i = 1; i < p.times.size(); ++i) {
        CHECK(p.times[i] > p.times[i - 1]);
        CHECK(p.times[i] <= 5000.0);
    }
    // degree stays below the vertex count along the whole path
    for (size_t i = 0; i < p.times.size(); ++i) CHECK(p.states[i] < p.times[i]);
    PathSample q = simulate_discrete_tagged(s, DiscreteVariant::Plain, 3, 10, 5000, 42);
    CHECK(p.times == q.times);
    CHECK(p.states == q.states);
}

TEST_CASE("weighted discrete chain never dies") {
    ModelSpec s = ModelSpec::basic(0.3, 0.0);
    for (int i = 0; i < 20; ++i) {
        PathSample p =
            simulate_discrete_tagged(s, DiscreteVariant::Weighted, 1, 2, 20000, 500 + i);
        CHECK(!p.absorbed_at);
        for (double x : p.states) CHECK(x >= 1.0);
    }
}

TEST_CASE("rewiring chains keep a positive drift floor") {
    ModelSpec s = ModelSpec::basic(0.5, 0.0);
    s.rewiring_r = 1.0;
    for (DiscreteVariant v :
         {DiscreteVariant::RewiringLimit, DiscreteVariant::RewiringInhomogeneous}) {
        PathSample p = simulate_discrete_tagged(s, v, 0, 5, 20000, 7);
        CHECK(!p.absorbed_at);  // the extra-link rate keeps state 0 alive
        CHECK(p.state_at(20000.0) >= 0.0);
    }
}

TEST_CASE("coupled pair shares its jump skeleton across both clocks") {
    ModelSpec s = ModelSpec::basic(0.4, 0.55);
    CoupledPair cp = build_coupled_pair(s, 3, 10, 400, 99);
    REQUIRE(cp.states.size() >= 2);
    REQUIRE(cp.s.size() == cp.states.size());
    REQUIRE(cp.s_tilde.size() == cp.states.size());
    for (size_t j = 1; j < cp.s.size(); ++j) {
        CHECK(cp.s[j] > cp.s[j - 1]);
        CHECK(cp.s_tilde[j] > cp.s_tilde[j - 1]);
        CHECK(cp.delta[j] == doctest::Approx(cp.s[j] - cp.s_tilde[j]).epsilon(1e-12));
        CHECK(cp.n_step[j] > cp.n_step[j - 1]);
    }
    // time-change identity: reading Y at a grid point equals reading X at the
    // delta-shifted time
    for (size_t j = 0; j + 1 < cp.s_tilde.size(); ++j) {
        double t = cp.s_tilde[j];
        CHECK(cp.yh_at(t) == cp.states[j]);
        CHECK(cp.delta_at(t) == doctest::Approx(cp.delta[j]).epsilon(1e-12));
        // t + delta can round an ulp below the jump instant; nudge across
        double shifted = t + cp.delta_at(t);
        CHECK(cp.x_at(shifted + 1e-9 * (1.0 + std::fabs(shifted))) == cp.states[j]);
    }
}

TEST_CASE("coupled clocks drift apart by less and less") {
    // the gap between the exponential and harmonic clocks is Cauchy in n
    ModelSpec s = ModelSpec::basic(0.4, 0.55);
    double late_move = 0.0, early_move = 0.0;
    int used = 0;
    for (int i = 0; i < 40; ++i) {
        CoupledPair cp = build_coupled_pair(s, 3, 10, 3000, 2000 + i);
        if (cp.absorbed || cp.delta.size() < 3001) continue;
        ++used;
        auto spread = [&](size_t lo, size_t hi) {
            double mn = cp.delta[lo], mx = cp.delta[lo];
            for (size_t j = lo; j < hi; ++j) {
                mn = std::min(mn, cp.delta[j]);
                mx = std::max(mx, cp.delta[j]);
            }
            return mx - mn;
        };
        early_move += spread(10, 100);
        late_move += spread(1000, 3000);
    }
    REQUIRE(used >= 10);
    CHECK(late_move < early_move);
}
