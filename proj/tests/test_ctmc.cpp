#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ddsim/ctmc.hpp"
#include "ddsim/rng.hpp"
#include "ddsim/solver.hpp"

using namespace ddsim;

TEST_CASE("path samples read off piecewise-constant states") {
    PathSample p;
    p.t_end = 10.0;
    p.record(0.0, 2, 0);
    p.record(1.5, 3, 0);
    p.record(4.0, 1, 1);
    p.check_invariants();
    CHECK(p.state_at(0.0) == 2);
    CHECK(p.state_at(1.4999) == 2);
    CHECK(p.state_at(1.5) == 3);
    CHECK(p.state_at(9.0) == 1);
    CHECK(p.z_at(3.9) == 0);
    CHECK(p.z_at(4.0) == 1);
}

TEST_CASE("absorption at zero is permanent") {
    ModelSpec s = ModelSpec::basic(0.2, 0.0);
    int absorbed = 0;
    for (int i = 0; i < 50; ++i) {
        PathSample p = simulate_ctmc(s, Variant::Base, 1, 30.0, 1000 + i);
        if (p.absorbed_at) {
            ++absorbed;
            CHECK(p.state_at(30.0) == 0.0);
            CHECK(p.state_at(*p.absorbed_at) == 0.0);
        }
    }
    CHECK(absorbed > 0);  // ergodic side: most paths die by t=30
}

TEST_CASE("event-driven marginals match the forward solver") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    const double T = 2.0;
    const int K = 100, N = 20000;
    std::vector<double> hist(K + 1, 0.0);
    for (int i = 0; i < N; ++i) {
        PathSample p = simulate_ctmc(s, Variant::Base, 3, T, 5000 + i);
        int k = std::min(static_cast<int>(p.state_at(T)), K);
        hist[k] += 1.0 / N;
    }
    DistributionVector ref = semigroup(DistributionVector::point(3, K), s, Variant::Base, T, K);
    for (int k = 0; k <= 25; ++k) {
        double sigma = std::sqrt(std::max(ref.mass[k] * (1 - ref.mass[k]) / N, 1e-12));
        CHECK(std::fabs(hist[k] - ref.mass[k]) <= 4.5 * sigma + 1e-4);
    }
}

TEST_CASE("fast skeleton agrees with the event-driven chain in law") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    const double T = 3.0;
    const int N = 100000;
    std::vector<double> a, b;
    for (int i = 0; i < N; ++i) {
        a.push_back(simulate_basic_fast(s, 2, T, 900000 + i).state_at(T));
        if (i < N / 10)
            b.push_back(simulate_ctmc(s, Variant::Base, 2, T, 7700000 + i).state_at(T));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    for (double x = 0; x <= 40; ++x) {
        double fa = (std::upper_bound(a.begin(), a.end(), x) - a.begin()) / double(a.size());
        double fb = (std::upper_bound(b.begin(), b.end(), x) - b.begin()) / double(b.size());
        ks = std::max(ks, std::fabs(fa - fb));
    }
    CHECK(ks <= 0.02);
}

TEST_CASE("catastrophe counter is poisson for the basic model") {
    // the clock rings at constant rate beta regardless of the state
    // the weighted chain never absorbs and its catastrophe clock rings at the
    // constant rate p beta, so its counter is exactly Poisson
    ModelSpec s = ModelSpec::basic(0.5, 0.2);
    const double T = 5.0;
    const int N = 4000;
    double sum = 0.0, sum2 = 0.0;
    long long n = 0;
    for (int i = 0; i < N; ++i) {
        PathSample p = simulate_ctmc(s, Variant::Weighted, 3, T, 31000 + i);
        if (p.absorbed_at) continue;
        double z = static_cast<double>(p.z_at(T));
        sum += z;
        sum2 += z * z;
        ++n;
    }
    REQUIRE(n == N);
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    double lam = s.p() * s.beta * T;
    CHECK(std::fabs(mean - lam) <= 4.0 * std::sqrt(lam / n));
    CHECK(std::fabs(var - lam) <= 6.0 * lam / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fast forward reaches exponential scales") {
    ModelSpec s = ModelSpec::basic(0.4, 0.55);  // transient
    PathSample p = simulate_basic_fast(s, 5, 200.0, 99);
    CHECK(!p.event_capped);
    double x = p.state_at(200.0);
    if (x > 0) CHECK(std::log(x) > 10.0);  // survivors grow like e^{nu t}
}

TEST_CASE("w functional is a martingale-scale quantity on survivors") {
    ModelSpec s = ModelSpec::basic(0.4, 0.55);
    std::vector<PathSample> paths;
    std::vector<double> cps = {20.0, 40.0};
    for (int i = 0; i < 200; ++i) paths.push_back(simulate_basic_fast(s, 5, 40.0, 1234 + i, cps));
    auto ws = w_limit_samples(paths, s, cps);
    REQUIRE(ws.size() == paths.size());
    int surv = 0;
    for (const auto& w : ws)
        if (w.surviving) {
            ++surv;
            CHECK(w.w[0] > 0.0);
            CHECK(w.w[1] > 0.0);
        }
    CHECK(surv > 50);
}

TEST_CASE("same seed gives identical paths") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    PathSample a = simulate_ctmc(s, Variant::Base, 3, 5.0, 77);
    PathSample b = simulate_ctmc(s, Variant::Base, 3, 5.0, 77);
    CHECK(a.times == b.times);
    CHECK(a.states == b.states);
    CHECK(a.z == b.z);
}

TEST_CASE("variant rows drive the event loop consistently") {
    // deaths push the chain down relative to the base variant in mean
    ModelSpec d = ModelSpec::basic(0.5, 0.1);
    d.delta = 0.5;
    double base_sum = 0.0, death_sum = 0.0;
    for (int i = 0; i < 2000; ++i) {
        base_sum += simulate_ctmc(d, Variant::Base, 4, 2.0, 51000 + i).state_at(2.0);
        death_sum += simulate_ctmc(d, Variant::Deaths, 4, 2.0, 51000 + i).state_at(2.0);
    }
    CHECK(death_sum < base_sum);
}
