#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <numeric>

#include "ddsim/model.hpp"
#include "ddsim/thinning.hpp"

using namespace ddsim;

TEST_CASE("basic spec wires the limiting rates") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    CHECK(s.p() == doctest::Approx(0.5));
    CHECK(s.q == doctest::Approx(0.1));
    CHECK(s.alpha == doctest::Approx(0.1 + 0.5 * 0.9));
    CHECK(s.beta == doctest::Approx(0.9));
    CHECK(s.constrained);
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("validate rejects out-of-range parameters") {
    CHECK_THROWS_AS(ModelSpec::basic(1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelSpec::basic(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelSpec::basic(0.5, 1.5).validate(), ValidationError);
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    s.alpha = 0.9;  // breaks q + p(1-q) = alpha
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("json round trip preserves the digest") {
    ModelSpec s = ModelSpec::basic(0.4, 0.55);
    s.rewiring_r = 0.25;
    ModelSpec t = ModelSpec::from_json(s.to_json());
    CHECK(s.digest() == t.digest());
    CHECK(s.digest().size() >= 8);
    ModelSpec u = ModelSpec::basic(0.4, 0.55);
    CHECK(s.digest() != u.digest());
}

TEST_CASE("config loader rejects unknown keys") {
    const char* path = "test_model_config.json";
    {
        std::ofstream f(path);
        f << ModelSpec::basic(0.3, 0.2).to_json().dump();
    }
    CHECK_NOTHROW(load_model_config(path));
    {
        nlohmann::json j = ModelSpec::basic(0.3, 0.2).to_json();
        j["not_a_key"] = 1;
        std::ofstream f(path);
        f << j.dump();
    }
    CHECK_THROWS_AS(load_model_config(path), ValidationError);
    std::remove(path);
}

TEST_CASE("binomial thinning rows are exact pmfs") {
    ThinningFamily th = ThinningFamily::binomial(0.3);
    for (int k : {1, 2, 7, 50, 1000}) {
        std::vector<double> row = th.row(k);
        REQUIRE(static_cast<int>(row.size()) == k + 1);
        double sum = std::accumulate(row.begin(), row.end(), 0.0);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        double mean = 0.0;
        for (int j = 0; j <= k; ++j) mean += j * row[j];
        CHECK(mean == doctest::Approx(0.3 * k).epsilon(1e-10));
        CHECK(th.mean_fraction(k) == doctest::Approx(0.3));
        CHECK(th.variance(k) == doctest::Approx(k * 0.3 * 0.7).epsilon(1e-10));
    }
}

TEST_CASE("size-biased transform of a binomial shifts down by one") {
    // j pi_kj / (k p) with pi = Bi(k,p) equals Bi(k-1,p) shifted up by one
    ThinningFamily th = ThinningFamily::binomial(0.6);
    const int k = 9;
    std::vector<double> sb = size_biased(th, k);
    std::vector<double> ref = binomial_pmf(k - 1, 0.6);
    REQUIRE(sb.size() == static_cast<size_t>(k + 1));
    CHECK(sb[0] == 0.0);
    for (int j = 1; j <= k; ++j) CHECK(sb[j] == doctest::Approx(ref[j - 1]).epsilon(1e-12));
}

TEST_CASE("poisson pmf truncation accounts for the tail") {
    std::vector<double> p = poisson_pmf(2.5);
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    double mean = 0.0;
    for (size_t j = 0; j < p.size(); ++j) mean += j * p[j];
    CHECK(mean == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("multi-birth limits expose alpha_b") {
    MultiBirths mb;
    mb.j_max = 3;
    mb.limits = {0.1, 0.3, 0.2, 0.1};  // a_{-1}, a_1, a_2, a_3
    CHECK(mb.limit_at(-1) == doctest::Approx(0.1));
    CHECK(mb.limit_at(2) == doctest::Approx(0.2));
    CHECK(mb.alpha_b() == doctest::Approx(-0.1 + 0.3 + 2 * 0.2 + 3 * 0.1));
}

TEST_CASE("per-degree perturbations fall back to the limits") {
    ModelSpec s = ModelSpec::basic(0.5, 0.2);
    CHECK(s.alpha_k(7) == doctest::Approx(s.alpha));
    s.alpha_k_fn = [&s](int k) { return s.alpha + 0.1 / (k + 1); };
    s.c1 = 0.1;
    s.gamma1 = 1.0;
    CHECK(s.alpha_k(0) == doctest::Approx(s.alpha + 0.1));
    CHECK(s.gamma() <= 1.0);
}
