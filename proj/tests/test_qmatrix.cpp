#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddsim/qmatrix.hpp"

using namespace ddsim;

namespace {

// Generator entry Q_{kj} including the diagonal.
double entry(const QRow& row, int j) {
    double v = row.rate_to(j);
    if (j == row.k) v += row.diagonal;
    return v;
}

void check_conservative(const QRow& row, double tol = 1e-12) {
    CHECK(std::fabs(row.sum()) <= tol);
    for (const auto& [t, r] : row.entries) {
        CHECK(r >= 0.0);
        CHECK(t >= 0);
    }
    CHECK(row.diagonal <= 0.0);
}

}  // namespace

TEST_CASE("rows are conservative across variants and degrees") {
    ModelSpec s = ModelSpec::basic(0.35, 0.2);
    s.delta = 0.0;
    for (Variant v : {Variant::Base, Variant::Bivariate, Variant::Weighted}) {
        for (int k : {1, 2, 3, 10, 100, 1000, 10000}) {
            QRow row = q_row(s, v, k);
            double tol = 1e-12 * std::max(1.0, -row.diagonal);
            check_conservative(row, tol);
        }
    }
    ModelSpec d = ModelSpec::basic(0.35, 0.2);
    d.delta = 0.3;
    for (int k : {1, 5, 200}) check_conservative(q_row(d, Variant::Deaths, k), 1e-10);

    ModelSpec r = ModelSpec::basic(0.5, 0.0);
    r.rewiring_r = 1.5;
    for (int k : {0, 1, 5, 200}) check_conservative(q_row(r, Variant::RewiringLimit, k), 1e-10);
    for (int m : {10, 100})
        for (int k = 0; k <= m - 1; ++k)
            check_conservative(q_row(r, Variant::RewiringAtM, k, m), 1e-10);
}

TEST_CASE("base row carries yule births and binomial catastrophe landings") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    const int k = 6;
    QRow row = q_row(s, Variant::Base, k);
    CHECK(row.rate_to(k + 1) == doctest::Approx(k * s.alpha).epsilon(1e-12));
    std::vector<double> pmf = binomial_pmf(k, 0.5);
    for (int j = 0; j < k; ++j)
        CHECK(row.rate_to(j) == doctest::Approx(s.beta * pmf[j]).epsilon(1e-12));
}

TEST_CASE("bivariate self-jump carries the silent catastrophe mass") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    const int k = 6;
    QRow base = q_row(s, Variant::Base, k);
    QRow biv = q_row(s, Variant::Bivariate, k);
    // total catastrophe-clock rate beta_k, self landing included
    double cat = 0.0;
    for (const auto& [t, r] : biv.entries)
        if (t != k + 1) cat += r;
    CHECK(cat == doctest::Approx(s.beta_k(k)).epsilon(1e-12));
    CHECK(biv.rate_to(k) > 0.0);
    // both describe the same generator
    for (int j = 0; j <= k + 1; ++j) CHECK(entry(biv, j) == doctest::Approx(entry(base, j)));
}

TEST_CASE("weighted generator is the doob transform of the base one") {
    // Qt_{ij} = (Q_{ij} + (1-2 alpha) delta_ij) j / i
    for (auto [p, q] : {std::pair{0.5, 0.1}, {0.3, 0.0}, {0.4, 0.55}}) {
        ModelSpec s = ModelSpec::basic(p, q);
        double worst = 0.0;
        for (int i = 1; i <= 200; ++i) {
            QRow base = q_row(s, Variant::Base, i);
            QRow wt = q_row(s, Variant::Weighted, i);
            for (int j = 0; j <= i + 1; ++j) {
                double lhs = entry(wt, j);
                double rhs = (entry(base, j) + (j == i ? 1.0 - 2.0 * s.alpha : 0.0)) *
                             static_cast<double>(j) / i;
                worst = std::max(worst, std::fabs(lhs - rhs));
            }
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("deaths variant adds a pure down-jump") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    s.delta = 0.2;
    const int k = 5;
    QRow base = q_row(s, Variant::Base, k);
    QRow dth = q_row(s, Variant::Deaths, k);
    CHECK(dth.rate_to(k - 1) == doctest::Approx(base.rate_to(k - 1) + k * 0.2).epsilon(1e-12));
    CHECK(dth.rate_to(k + 1) == doctest::Approx(base.rate_to(k + 1)).epsilon(1e-12));
}

TEST_CASE("multi-birth variant spreads upward mass over jump sizes") {
    ModelSpec s = ModelSpec::basic(0.5, 0.1);
    MultiBirths mb;
    mb.j_max = 3;
    mb.limits = {0.05, 0.3, 0.1, 0.05};
    s.multi_births = mb;
    s.alpha = mb.alpha_b();  // alpha_b = sum j a_j
    s.constrained = false;
    const int k = 4;
    QRow row = q_row(s, Variant::MultiBirth, k);
    CHECK(row.rate_to(k + 1) == doctest::Approx(k * 0.3).epsilon(1e-12));
    CHECK(row.rate_to(k + 2) == doctest::Approx(k * 0.1).epsilon(1e-12));
    CHECK(row.rate_to(k + 3) == doctest::Approx(k * 0.05).epsilon(1e-12));
    CHECK(row.rate_to(k - 1) >= k * 0.05);  // down-jump plus catastrophe landing
    check_conservative(row);
}

TEST_CASE("finite-m rewiring rows converge to the limit rows") {
    ModelSpec s = ModelSpec::basic(0.5, 0.0);
    s.rewiring_r = 1.0;
    const int k = 3;
    QRow lim = q_row(s, Variant::RewiringLimit, k);
    for (int m : {100, 1000, 10000}) {
        QRow fin = q_row(s, Variant::RewiringAtM, k, m);
        double gap = 0.0;
        for (int j = 0; j <= k + 8; ++j) gap = std::max(gap, std::fabs(entry(fin, j) - entry(lim, j)));
        CHECK(gap <= 10.0 / m);
    }
}
