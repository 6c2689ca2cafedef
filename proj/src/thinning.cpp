#include "ddsim/thinning.hpp"

#include <cmath>
#include <numeric>

namespace ddsim {

std::vector<double> binomial_pmf(int n, double p) {
    std::vector<double> v(n + 1, 0.0);
    if (n == 0) {
        v[0] = 1.0;
        return v;
    }
    if (p <= 0.0) { v[0] = 1.0; return v; }
    if (p >= 1.0) { v[n] = 1.0; return v; }
    // Start at the mode (log-space anchor) and recur outward; direct products
    // (1-p)^n underflow long before n = 1e4.
    int mode = static_cast<int>((n + 1) * p);
    if (mode > n) mode = n;
    double logmode = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) -
                     std::lgamma(n - mode + 1.0) + mode * std::log(p) +
                     (n - mode) * std::log1p(-p);
    v[mode] = std::exp(logmode);
    const double odds = p / (1.0 - p);
    for (int j = mode; j < n; ++j) v[j + 1] = v[j] * odds * (n - j) / (j + 1.0);
    for (int j = mode; j > 0; --j) v[j - 1] = v[j] * (j / odds) / (n - j + 1.0);
    // Normalize away the accumulated recurrence error so rows are stochastic to fp.
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= s;
    return v;
}

std::vector<double> poisson_pmf(double lambda, double tail_tol) {
    std::vector<double> v;
    double term = std::exp(-lambda);
    double cum = term;
    v.push_back(term);
    int j = 0;
    while (1.0 - cum > tail_tol && j < 10000) {
        ++j;
        term *= lambda / j;
        v.push_back(term);
        cum += term;
    }
    v.back() += 1.0 - cum;  // fold the tail so the vector is exactly stochastic
    return v;
}

ThinningFamily ThinningFamily::binomial(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("thinning: p must lie in (0,1)");
    ThinningFamily t;
    t.kind = Kind::Binomial;
    t.limit_p = p;
    return t;
}

ThinningFamily ThinningFamily::custom(double limit_p,
                                      std::function<double(int, int)> mass,
                                      std::function<double(int)> mean_fraction,
                                      std::function<double(int)> variance,
                                      double c2, double gamma2, double c3, double gamma3) {
    if (!(limit_p > 0.0 && limit_p < 1.0))
        throw std::invalid_argument("thinning: p must lie in (0,1)");
    ThinningFamily t;
    t.kind = Kind::Custom;
    t.limit_p = limit_p;
    t.custom_mass = std::move(mass);
    t.custom_mean_fraction = std::move(mean_fraction);
    t.custom_variance = std::move(variance);
    t.c2 = c2; t.gamma2 = gamma2; t.c3 = c3; t.gamma3 = gamma3;
    return t;
}

double ThinningFamily::mass(int k, int j) const {
    if (j < 0 || j > k) return 0.0;
    if (kind == Kind::Binomial) return binomial_pmf(k, limit_p)[j];
    return custom_mass(k, j);
}

std::vector<double> ThinningFamily::row(int k) const {
    if (kind == Kind::Binomial) return binomial_pmf(k, limit_p);
    std::vector<double> v(k + 1);
    for (int j = 0; j <= k; ++j) v[j] = custom_mass(k, j);
    return v;
}

double ThinningFamily::mean_fraction(int k) const {
    if (kind == Kind::Binomial) return limit_p;
    return custom_mean_fraction(k);
}

double ThinningFamily::variance(int k) const {
    if (kind == Kind::Binomial) return k * limit_p * (1.0 - limit_p);
    return custom_variance(k);
}

std::vector<double> size_biased(const ThinningFamily& th, int k) {
    if (k < 1) throw std::invalid_argument("size_biased: k must be >= 1");
    double pk = th.mean_fraction(k);
    if (!(k * pk > 0.0)) throw std::invalid_argument("size_biased: degenerate thinning, k p_k = 0");
    std::vector<double> row = th.row(k);
    std::vector<double> v(k + 1, 0.0);
    for (int j = 1; j <= k; ++j) v[j] = j * row[j] / (k * pk);
    return v;
}

}  // namespace ddsim
