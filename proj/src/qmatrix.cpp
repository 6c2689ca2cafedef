#include "ddsim/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddsim {

double QRow::sum() const {
    double s = diagonal;
    for (const auto& [j, r] : entries) s += r;
    return s;
}

double QRow::rate_to(int j) const {
    for (const auto& [t, r] : entries)
        if (t == j) return r;
    return 0.0;
}

namespace {

// pmf convolution (full support)
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// Drop a pmf's negligible tail, folding it into the last kept entry so the
// vector stays exactly stochastic.
std::vector<double> truncate_pmf(std::vector<double> v, double tol = 1e-18) {
    size_t last = v.size();
    double tail = 0.0;
    while (last > 1 && v[last - 1] < tol) {
        tail += v[last - 1];
        --last;
    }
    v.resize(last);
    v.back() += tail;
    return v;
}

QRow row_base(const ModelSpec& s, int k, bool bivariate) {
    QRow row;
    row.k = k;
    if (k == 0) return row;  // absorbing
    const double bk = s.beta_k(k);
    const std::vector<double> pi = s.thinning.row(k);
    for (int j = 0; j <= k - 1; ++j)
        if (bk * pi[j] > 0.0) row.entries.emplace_back(j, bk * pi[j]);
    if (bivariate && bk * pi[k] > 0.0) row.entries.emplace_back(k, bk * pi[k]);
    row.entries.emplace_back(k + 1, k * s.alpha_k(k));
    row.diagonal = bivariate ? -(k * s.alpha_k(k) + bk)
                             : -(k * s.alpha_k(k) + bk * (1.0 - pi[k]));
    return row;
}

QRow row_weighted(const ModelSpec& s, int k) {
    if (k < 1) throw ValidationError("q_row: weighted variant requires k >= 1");
    if (!s.constrained)
        throw ValidationError("q_row: weighted variant requires the constrained family");
    const double a = s.alpha;
    if (s.alpha_k_fn && std::fabs(s.alpha_k(k) - a) > 1e-12)
        throw ValidationError("q_row: weighted variant requires constant alpha_k");
    QRow row;
    row.k = k;
    const double bk = s.beta_k(k);
    const std::vector<double> pi = s.thinning.row(k);
    for (int j = 1; j <= k - 1; ++j) {
        double rate = bk * j * pi[j] / k;  // p_k beta_k * j pi_kj / (k p_k)
        if (rate > 0.0) row.entries.emplace_back(j, rate);
    }
    row.entries.emplace_back(k + 1, a * (k + 1));
    row.diagonal = -(-1.0 + k * a + bk * (1.0 - pi[k]) + 2.0 * a);
    return row;
}

QRow row_deaths(const ModelSpec& s, int k) {
    QRow row;
    row.k = k;
    if (k == 0) return row;
    const double bk = s.beta_k(k);
    const double dk = s.delta_k(k);
    const std::vector<double> pi = s.thinning.row(k);
    for (int j = 0; j <= k - 1; ++j) {
        double rate = bk * pi[j] + (j == k - 1 ? k * dk : 0.0);
        if (rate > 0.0) row.entries.emplace_back(j, rate);
    }
    row.entries.emplace_back(k + 1, k * s.alpha_k(k));
    row.diagonal = -(k * (s.alpha_k(k) + dk) + bk * (1.0 - pi[k]));
    return row;
}

QRow row_multibirth(const ModelSpec& s, int k) {
    if (!s.multi_births)
        throw ValidationError("q_row: multibirth variant requires multi_births in the spec");
    QRow row;
    row.k = k;
    if (k == 0) return row;
    const MultiBirths& mb = *s.multi_births;
    const double bk = s.beta_k(k);
    const std::vector<double> pi = s.thinning.row(k);
    double total_a = mb.rate_at(k, -1);
    for (int j = 0; j <= k - 2; ++j)
        if (bk * pi[j] > 0.0) row.entries.emplace_back(j, bk * pi[j]);
    {
        double rate = k * mb.rate_at(k, -1) + bk * pi[k - 1];
        if (rate > 0.0) row.entries.emplace_back(k - 1, rate);
    }
    for (int j = 1; j <= mb.j_max; ++j) {
        double a = mb.rate_at(k, j);
        total_a += a;
        if (k * a > 0.0) row.entries.emplace_back(k + j, k * a);
    }
    row.diagonal = -(k * total_a + bk * (1.0 - pi[k]));
    return row;
}

// Shared shape of the rewiring rows: birth-like drift into k+1 plus a rate-1
// catastrophe whose landing law mixes (1-q) x (thinning * extras) with
// q x (k + extras).
QRow row_rewire(const ModelSpec& s, int k, const std::vector<double>& ext, double drift_extra) {
    QRow row;
    row.k = k;
    const double q = s.q_k(k);
    if (k == 0) {
        // Pi_0 is the point mass at 0, so both branches reduce to the extras law.
        for (size_t j = 1; j < ext.size(); ++j) {
            double rate = ext[j] + (j == 1 ? drift_extra : 0.0);
            if (rate > 0.0) row.entries.emplace_back(static_cast<int>(j), rate);
        }
        row.diagonal = -(drift_extra + 1.0 - ext[0]);
        return row;
    }
    const std::vector<double> pconv = convolve(s.thinning.row(k), ext);
    const double drift = k * s.alpha_k(k) + drift_extra;
    auto landing = [&](int j) {
        double v = (1.0 - q) * (j < static_cast<int>(pconv.size()) ? pconv[j] : 0.0);
        if (j >= k && j - k < static_cast<int>(ext.size())) v += q * ext[j - k];
        return v;
    };
    int jmax = static_cast<int>(pconv.size()) - 1;
    for (int j = 0; j <= jmax; ++j) {
        if (j == k) continue;
        double rate = landing(j) + (j == k + 1 ? drift : 0.0);
        if (rate > 0.0) row.entries.emplace_back(j, rate);
    }
    row.diagonal = -(drift + (1.0 - q) * (1.0 - pconv[k]) + q * (1.0 - ext[0]));
    return row;
}

}  // namespace

QRow q_row(const ModelSpec& spec, Variant v, int k, int m) {
    if (k < 0) throw ValidationError("q_row: k must be >= 0");
    switch (v) {
        case Variant::Base:
            return row_base(spec, k, false);
        case Variant::Bivariate:
            return row_base(spec, k, true);
        case Variant::Weighted:
            return row_weighted(spec, k);
        case Variant::Deaths:
            return row_deaths(spec, k);
        case Variant::MultiBirth:
            return row_multibirth(spec, k);
        case Variant::RewiringLimit:
            return row_rewire(spec, k, poisson_pmf(spec.rewiring_r), spec.rewiring_r);
        case Variant::RewiringAtM: {
            if (m < 1 || k > m - 1)
                throw ValidationError("q_row: rewiring_at_m requires 0 <= k <= m-1");
            const double r = spec.rewiring_r;
            std::vector<double> ext = truncate_pmf(binomial_pmf(m, r / m));
            return row_rewire(spec, k, ext, r * (1.0 - (k + 1.0) / m));
        }
    }
    throw std::logic_error("q_row: unknown variant");
}

}  // namespace ddsim
