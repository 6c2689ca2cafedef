#include "ddsim/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ddsim/classify.hpp"

namespace ddsim {

namespace {

struct RowCache {
    std::vector<QRow> rows;       // 0..K
    std::vector<double> overflow; // up-rate escaping past K (absorbing convention)

    static RowCache build(const ModelSpec& spec, Variant v, int K, bool reflect, int m = -1) {
        RowCache rc;
        rc.rows.reserve(K + 1);
        rc.overflow.assign(K + 1, 0.0);
        for (int k = 0; k <= K; ++k) {
            if ((v == Variant::RewiringAtM && k > m - 1) || (v == Variant::Weighted && k == 0)) {
                // outside the variant's state space: inert row
                QRow inert;
                inert.k = k;
                rc.rows.push_back(inert);
                continue;
            }
            QRow row = q_row(spec, v, k, m);
            double esc = 0.0;
            auto it = std::remove_if(row.entries.begin(), row.entries.end(),
                                     [&](const std::pair<int, double>& e) {
                                         if (e.first > K) {
                                             esc += e.second;
                                             return true;
                                         }
                                         return false;
                                     });
            row.entries.erase(it, row.entries.end());
            if (reflect)
                row.diagonal += esc;  // rate removed: generator stays conservative
            else
                rc.overflow[k] = esc;
            rc.rows.push_back(std::move(row));
        }
        return rc;
    }

    double max_exit() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, -r.diagonal);
        return m;
    }
};

// One inhomogeneous step: out = in * {I + kernel/denom}, rows >= trunc inert.
// Returns the mass leaked past K.
double apply_step(const std::vector<double>& in, std::vector<double>& out,
                  const RowCache& rc, double denom, int trunc) {
    const int K = static_cast<int>(in.size()) - 1;
    out = in;
    double leak = 0.0;
    const int kmax = std::min(K, trunc - 1);
    for (int k = 0; k <= kmax; ++k) {
        double mk = in[k];
        if (mk == 0.0) continue;
        const QRow& row = rc.rows[k];
        for (const auto& [t, rate] : row.entries) out[t] += mk * rate / denom;
        out[k] += mk * row.diagonal / denom;
        leak += mk * rc.overflow[k] / denom;
    }
    return leak;
}

}  // namespace

DistributionVector discrete_recursion(DistributionVector p, const ModelSpec& spec, int m0,
                                      int m, int K, Variant variant) {
    if (m < m0) throw ValidationError("discrete_recursion: m must be >= m0");
    if (K < m0) throw ValidationError("discrete_recursion: K must be >= m0");
    if (variant != Variant::Base && variant != Variant::RewiringAtM &&
        variant != Variant::Deaths && variant != Variant::MultiBirth &&
        variant != Variant::RewiringLimit)
        throw ValidationError("discrete_recursion: unsupported kernel variant");
    p.mass.resize(K + 1, 0.0);
    p.check(1e-9);
    RowCache rc;
    const bool inhomogeneous = (variant == Variant::RewiringAtM);
    if (!inhomogeneous) rc = RowCache::build(spec, variant, K, false);
    std::vector<double> next;
    for (int j = m0 + 1; j <= m; ++j) {
        if (inhomogeneous) rc = RowCache::build(spec, Variant::RewiringAtM, K, false, j);
        p.deficit += apply_step(p.mass, next, rc, static_cast<double>(j), j);
        p.mass.swap(next);
        for (double x : p.mass)
            if (x < -1e-12) throw ValidationError("discrete_recursion: negative mass");
    }
    return p;
}

WeightedRecursion weighted_discrete_recursion(DistributionVector v, const ModelSpec& spec,
                                              int m0, int m, int K, bool reflect_at_top) {
    if (m < m0) throw ValidationError("weighted_discrete_recursion: m must be >= m0");
    v.mass.resize(K + 1, 0.0);
    v.check(1e-9);
    const double a2 = 2.0 * spec.alpha;
    RowCache rc = RowCache::build(spec, Variant::Weighted, K, reflect_at_top);
    // State 0 is outside the weighted chain's space; its (absent) row is inert.
    double prefactor = 1.0;
    std::vector<double> next;
    for (int s = m0; s < m; ++s) {
        v.deficit += apply_step(v.mass, next, rc, s + a2, s + 1);
        v.mass.swap(next);
        prefactor *= 1.0 + (a2 - 1.0) / (s + 1.0);
    }
    return {std::move(v), prefactor};
}

DistributionVector semigroup(const DistributionVector& p0, const ModelSpec& spec,
                             Variant variant, double t, int K, const SemigroupOptions& opt) {
    if (t < 0) throw ValidationError("semigroup: t must be >= 0");
    if (variant == Variant::RewiringAtM)
        throw ValidationError("semigroup: rewiring_at_m has no homogeneous semigroup");
    RowCache rc = RowCache::build(spec, variant, K, opt.reflect_at_top);
    std::vector<double> v = p0.mass;
    v.resize(K + 1, 0.0);
    DistributionVector out;
    out.mass.assign(K + 1, 0.0);
    if (t == 0.0) {
        out.mass = v;
        out.deficit = p0.deficit;
        return out;
    }
    const double lambda = std::max(rc.max_exit(), 1e-12);
    const double lt = lambda * t;
    const long n_max = static_cast<long>(lt + 8.0 * std::sqrt(lt + 25.0) + 25.0);
    double vdef = 0.0;      // mass lost past K in v_n
    double wsum = 0.0;
    double out_def = 0.0;
    std::vector<double> next;
    for (long n = 0; n <= n_max; ++n) {
        double lw = -lt + n * std::log(lt) - std::lgamma(n + 1.0);
        double w = std::exp(lw);
        if (w > 0.0) {
            for (int k = 0; k <= K; ++k) out.mass[k] += w * v[k];
            out_def += w * vdef;
            wsum += w;
        }
        if (n == n_max) break;
        // v <- v P with P = I + Q/lambda
        vdef += apply_step(v, next, rc, lambda, K + 1);
        v.swap(next);
    }
    out_def += 1.0 - wsum;  // Poisson tail cutoff
    out.deficit = p0.deficit + out_def;
    return out;
}

double quasi_stationarity_check(const ModelSpec& spec, int i,
                                const std::vector<double>& t_grid, int K, double floor_) {
    if (i < 1) throw ValidationError("quasi_stationarity_check: i must be >= 1");
    if (!spec.constrained)
        throw ValidationError("quasi_stationarity_check: requires the constrained family");
    DistributionVector d0 = DistributionVector::point(i, K);
    double worst = 0.0;
    for (double t : t_grid) {
        DistributionVector a = semigroup(d0, spec, Variant::Base, t, K);
        DistributionVector b = semigroup(d0, spec, Variant::Weighted, t, K);
        const double factor = std::exp(-(1.0 - 2.0 * spec.alpha) * t) * i;
        for (int j = 1; j <= K; ++j) {
            double lhs = j * a.mass[j];
            double rhs = factor * b.mass[j];
            if (std::fabs(lhs) < floor_ && std::fabs(rhs) < floor_) continue;
            double rel = std::fabs(lhs - rhs) / std::max(std::fabs(lhs), floor_);
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

DistributionVector stationary_weighted(const ModelSpec& spec, int K) {
    RowCache rc = RowCache::build(spec, Variant::Weighted, K, /*reflect=*/true);
    const double lambda = std::max(rc.max_exit(), 1e-12);
    std::vector<double> v(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) v[k] = 1.0 / K;
    std::vector<double> next;
    for (int it = 0; it < 2000000; ++it) {
        apply_step(v, next, rc, lambda, K + 1);
        double s = 0.0;
        for (double x : next) s += x;
        for (double& x : next) x /= s;
        double diff = 0.0;
        for (int k = 0; k <= K; ++k) diff = std::max(diff, std::fabs(next[k] - v[k]));
        v.swap(next);
        if (diff <= 1e-12) break;
    }
    DistributionVector out;
    out.mass = std::move(v);
    return out;
}

DistributionVector conditional_limit(const ModelSpec& spec, int K, double tol) {
    RegimeReport rep = classify(spec, Process::X_tilde);
    if (rep.verdict != Verdict::GeometricallyErgodic)
        throw ValidationError("conditional_limit: weighted process is not ergodic");
    DistributionVector st = stationary_weighted(spec, K);
    if (st.mass[K] > tol)
        throw ValidationError("conditional_limit: truncation too small (boundary mass)");
    DistributionVector out;
    out.mass.assign(K + 1, 0.0);
    double norm = 0.0;
    for (int j = 1; j <= K; ++j) norm += st.mass[j] / j;
    for (int j = 1; j <= K; ++j) out.mass[j] = (st.mass[j] / j) / norm;
    return out;
}

}  // namespace ddsim
