#include "ddsim/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <boost/math/special_functions/digamma.hpp>

#include "ddsim/rng.hpp"
#include "ddsim/thinning.hpp"

namespace ddsim {

double harmonic_h(double a, long long j) {
    if (j <= 0) return 0.0;
    if (j <= 1000) {
        double s = 0.0;
        for (long long l = 1; l <= j; ++l) s += 1.0 / (l + a);
        return s;
    }
    return boost::math::digamma(static_cast<double>(j) + a + 1.0) -
           boost::math::digamma(a + 1.0);
}

QuantileCouple quantile_couple(long long m, double a, double b, double u, double phi) {
    if (a <= -1.0) throw ValidationError("quantile_couple: a must be > -1");
    if (b <= 0.0) throw ValidationError("quantile_couple: b must be > 0");
    if (u <= 0.0 || u >= 1.0) throw ValidationError("quantile_couple: u must be in (0,1)");
    if (phi >= 1.0 || b / (m + a + 1.0) > phi)
        throw ValidationError("quantile_couple: b/(m+a+1) exceeds phi");
    const double tau = -std::log1p(-u);  // -log(1-u)
    // S(n) = log P[V > h_a(n) - h_a(m)] = log prod_{l=m}^{n-1} (1 - b/(l+a+1)),
    // telescoped through log-gamma; we need the smallest n >= m+1 with S(n) <= -tau.
    // log Gamma(z-b) - log Gamma(z) loses all precision as a difference of two
    // large lgamma values, so beyond 1e6 it is evaluated from Stirling's series.
    auto lgamma_diff = [b](double z) {
        if (z < 1e6) return std::lgamma(z - b) - std::lgamma(z);
        return -b * std::log(z) + (z - b - 0.5) * std::log1p(-b / z) + b +
               b / (12.0 * z * (z - b));
    };
    const double cm = lgamma_diff(m + a + 1.0);
    auto S = [&](double n) { return lgamma_diff(n + a + 1.0) - cm; };
    double guess = (m + a + 0.5) * std::exp(std::min(tau / b, 700.0)) - a - 0.5;
    long long hi = static_cast<long long>(std::min(std::max(guess, m + 1.0), 4.0e18));
    // Bracket the crossing (S decreases in n; S(m) = 0 > -tau), then bisect to
    // the smallest n with S(n) <= -tau.
    const long long cap = static_cast<long long>(4.5e18);
    while (S(static_cast<double>(hi)) > -tau) {
        if (hi >= cap) break;  // astronomically deep tail: land at the cap
        hi = std::min(hi + (hi - m) + 1, cap);
    }
    long long lo = m;  // strict: S(lo) > -tau
    while (hi - lo > 1) {
        long long mid = lo + (hi - lo) / 2;
        if (S(static_cast<double>(mid)) <= -tau)
            hi = mid;
        else
            lo = mid;
    }
    long long n = hi;
    QuantileCouple out;
    out.e_b = tau / b;
    out.r = n - 1;
    out.v = harmonic_h(a, n) - harmonic_h(a, m);
    return out;
}

namespace {

int sample_pmf(const std::vector<double>& pmf, double u) {
    double cum = 0.0;
    for (size_t j = 0; j < pmf.size(); ++j) {
        cum += pmf[j];
        if (u <= cum) return static_cast<int>(j);
    }
    return static_cast<int>(pmf.size()) - 1;
}

// Homogeneous per-jump description of one state: total event rate b, upward
// rate (jump to up_to), catastrophe landing pmf (self included, z increments).
struct JumpRates {
    double b = 0.0;
    double up = 0.0;
    int up_to = 0;
    std::vector<double> landing;
};

JumpRates jump_rates(const ModelSpec& s, DiscreteVariant v, int k, bool skip_landing = false) {
    JumpRates j;
    switch (v) {
        case DiscreteVariant::Plain:
            if (k >= 1) {
                j.up = k * s.alpha_k(k);
                j.up_to = k + 1;
                if (!skip_landing) j.landing = s.thinning.row(k);
                j.b = j.up + s.beta_k(k);
            }
            break;
        case DiscreteVariant::Weighted:
            if (k < 1) throw ValidationError("simulate_discrete_tagged: weighted needs k >= 1");
            j.up = s.alpha * (k + 1);
            j.up_to = k + 1;
            if (!skip_landing) j.landing = size_biased(s.thinning, k);
            j.b = j.up + s.thinning.mean_fraction(k) * s.beta_k(k);
            break;
        case DiscreteVariant::RewiringLimit: {
            const std::vector<double> ext = poisson_pmf(s.rewiring_r);
            if (k == 0) {
                j.up = s.rewiring_r;
                j.up_to = 1;
                j.landing = ext;
            } else {
                j.up = k * s.alpha_k(k) + s.rewiring_r;
                j.up_to = k + 1;
                const double q = s.q_k(k);
                std::vector<double> pi = s.thinning.row(k);
                std::vector<double> land(k + ext.size(), 0.0);
                for (int i = 0; i <= k; ++i)
                    for (size_t l = 0; l < ext.size(); ++l)
                        land[i + l] += (1.0 - q) * pi[i] * ext[l];
                for (size_t l = 0; l < ext.size(); ++l) land[k + l] += q * ext[l];
                j.landing = std::move(land);
            }
            j.b = j.up + 1.0;
            break;
        }
        case DiscreteVariant::RewiringInhomogeneous:
            throw ValidationError("jump_rates: inhomogeneous kernel handled separately");
    }
    return j;
}

PathSample simulate_rewiring_inhomogeneous(const ModelSpec& spec, long long j0, long long m0,
                                           long long m_max, std::uint64_t seed) {
    std::mt19937_64 clock = make_stream(seed, StreamPurpose::JumpChain);
    std::mt19937_64 thin = make_stream(seed, StreamPurpose::Thinning);
    PathSample path;
    path.t_end = static_cast<double>(m_max);
    long long m = m0, k = j0, zc = 0;
    path.record(static_cast<double>(m), static_cast<double>(k), zc);
    std::unordered_map<long long, std::vector<double>> rows;
    long long events = 0;
    while (m < m_max) {
        // Candidate events at the envelope rate; accepted with the true
        // step-dependent rate of the kernel used for step n-1 -> n.
        const double bbar = k * spec.alpha_k(static_cast<int>(k)) + spec.rewiring_r + 1.0;
        QuantileCouple qc = quantile_couple(m, 0.0, bbar, uniform01(clock));
        long long n = qc.r + 1;
        if (n > m_max) break;
        m = n;
        const double drift =
            k >= 1 ? k * spec.alpha_k(static_cast<int>(k)) + spec.rewiring_r * (1.0 - (k + 1.0) / n)
                   : spec.rewiring_r * (1.0 - 1.0 / n);
        const double u = uniform01(thin) * bbar;
        if (u > drift + 1.0) continue;  // rejected candidate
        if (u <= drift) {
            ++k;
        } else {
            ++zc;
            long long base = k;
            if (k >= 1 && uniform01(thin) > spec.q_k(static_cast<int>(k))) {
                auto it = rows.find(k);
                if (it == rows.end())
                    it = rows.emplace(k, spec.thinning.row(static_cast<int>(k))).first;
                base = sample_pmf(it->second, uniform01(thin));
            }
            double ext = sample_binomial(thin, static_cast<double>(n), spec.rewiring_r / n);
            k = std::min(base + static_cast<long long>(ext), n - 1);
        }
        path.record(static_cast<double>(m), static_cast<double>(k), zc);
        if (++events >= 100000000LL) {
            path.event_capped = true;
            break;
        }
    }
    return path;
}

}  // namespace

PathSample simulate_discrete_tagged(const ModelSpec& spec, DiscreteVariant variant,
                                    long long j0, long long m0, long long m_max,
                                    std::uint64_t seed, bool relaxed_start) {
    if (j0 < 0 || m0 < 1 || m_max < m0)
        throw ValidationError("simulate_discrete_tagged: bad start");
    if (!relaxed_start && j0 > m0 - 1)
        throw ValidationError("simulate_discrete_tagged: need j0 <= m0 - 1");
    if (variant == DiscreteVariant::RewiringInhomogeneous)
        return simulate_rewiring_inhomogeneous(spec, j0, m0, m_max, seed);

    std::mt19937_64 clock = make_stream(seed, StreamPurpose::JumpChain);
    std::mt19937_64 thin = make_stream(seed, StreamPurpose::Thinning);
    const double a = variant == DiscreteVariant::Weighted ? 2.0 * spec.alpha - 1.0 : 0.0;
    // With binomial thinning the catastrophe landing has a closed form, so large
    // states never need (or cache) dense landing rows.
    const bool closed_form =
        (variant == DiscreteVariant::Plain || variant == DiscreteVariant::Weighted) &&
        spec.thinning.kind == ThinningFamily::Kind::Binomial && !spec.q_k_fn &&
        !spec.alpha_k_fn && !spec.beta_k_fn;
    PathSample path;
    path.t_end = static_cast<double>(m_max);
    long long m = m0, zc = 0;
    int k = static_cast<int>(j0);
    path.record(static_cast<double>(m), k, zc);
    std::unordered_map<int, JumpRates> cache;
    long long events = 0;
    while (m < m_max) {
        auto it = cache.find(k);
        if (it == cache.end())
            it = cache.emplace(k, jump_rates(spec, variant, k, closed_form)).first;
        const JumpRates& jr = it->second;
        if (jr.b <= 0.0) {
            path.absorbed_at = static_cast<double>(m);
            break;
        }
        QuantileCouple qc = quantile_couple(m, a, jr.b, uniform01(clock));
        if (qc.r + 1 > m_max) break;
        m = qc.r + 1;
        if (uniform01(thin) * jr.b <= jr.up) {
            k = jr.up_to;
        } else {
            ++zc;
            if (closed_form) {
                k = variant == DiscreteVariant::Plain
                        ? static_cast<int>(sample_binomial(thin, k, spec.p()))
                        : 1 + static_cast<int>(sample_binomial(thin, k - 1.0, spec.p()));
            } else {
                k = sample_pmf(jr.landing, uniform01(thin));
            }
        }
        path.record(static_cast<double>(m), k, zc);
        if (++events >= 100000000LL) {
            path.event_capped = true;
            break;
        }
    }
    return path;
}

namespace {
size_t grid_locate(const std::vector<double>& grid, double t) {
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    if (it == grid.begin()) throw ValidationError("coupled pair: query before start");
    return static_cast<size_t>(it - grid.begin()) - 1;
}
}  // namespace

double CoupledPair::delta_at(double t) const {
    size_t n = grid_locate(s_tilde, t);
    if (n + 1 >= s_tilde.size()) return delta[n];
    const double lo = s_tilde[n], hi = s_tilde[n + 1];
    const double w = (t - lo) / (hi - lo);
    return (1.0 - w) * delta[n] + w * delta[n + 1];
}

double CoupledPair::x_at(double t) const { return states[grid_locate(s, t)]; }
double CoupledPair::yh_at(double t) const { return states[grid_locate(s_tilde, t)]; }

CoupledPair build_coupled_pair(const ModelSpec& spec, int j0, long long m0, int n_jumps,
                               std::uint64_t seed) {
    if (j0 < 1) throw ValidationError("build_coupled_pair: j0 must be >= 1");
    if (m0 < j0 + 1) throw ValidationError("build_coupled_pair: need m0 >= j0 + 1");
    std::mt19937_64 holding = make_stream(seed, StreamPurpose::Coupling);
    std::mt19937_64 jumps = make_stream(seed, StreamPurpose::JumpChain);

    CoupledPair cp;
    cp.states.push_back(j0);
    cp.n_step.push_back(m0);
    cp.s.push_back(0.0);
    cp.s_tilde.push_back(0.0);
    cp.delta.push_back(0.0);
    std::unordered_map<int, QRow> rows;
    for (int j = 1; j <= n_jumps; ++j) {
        int k = cp.states.back();
        if (k == 0) {
            cp.absorbed = true;
            break;
        }
        auto it = rows.find(k);
        if (it == rows.end()) it = rows.emplace(k, q_row(spec, Variant::Base, k)).first;
        const QRow& row = it->second;
        const double qhat = -row.diagonal;  // exit rate of the jump chain
        QuantileCouple qc = quantile_couple(cp.n_step.back(), 0.0, qhat, uniform01(holding));
        cp.n_step.push_back(qc.r + 1);
        cp.s.push_back(cp.s.back() + qc.e_b);
        cp.s_tilde.push_back(cp.s_tilde.back() + qc.v);
        cp.delta.push_back(cp.s.back() - cp.s_tilde.back());
        double u = uniform01(jumps) * qhat;
        double cum = 0.0;
        int target = row.entries.back().first;
        for (const auto& [tg, rate] : row.entries) {
            cum += rate;
            if (u <= cum) { target = tg; break; }
        }
        cp.states.push_back(target);
    }
    return cp;
}

}  // namespace ddsim
