#include "ddsim/statlab.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ddsim/classify.hpp"
#include "ddsim/ctmc.hpp"
#include "ddsim/discrete.hpp"
#include "ddsim/qmatrix.hpp"
#include "ddsim/rng.hpp"
#include "ddsim/solver.hpp"

namespace ddsim {

nlohmann::json ExperimentReport::to_json() const {
    return nlohmann::json{{"schema_version", 1},
                          {"id", id},
                          {"config_digest", config_digest},
                          {"seed", seed},
                          {"sample_size", sample_size},
                          {"statistics", statistics},
                          {"tolerances", tolerances},
                          {"pass", pass}};
}

Estimate wilson_interval(long long successes, long long n) {
    Estimate e;
    e.n = n;
    if (n <= 0) return e;
    const double z = 1.959963984540054;  // 95%
    const double phat = static_cast<double>(successes) / n;
    const double z2n = z * z / n;
    const double center = (phat + z2n / 2.0) / (1.0 + z2n);
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) / (1.0 + z2n);
    e.value = phat;
    e.lo = std::max(0.0, center - half);
    e.hi = std::min(1.0, center + half);
    return e;
}

namespace {

std::uint64_t replica_seed(std::uint64_t seed, long long i) {
    return splitmix64(splitmix64(seed) ^ (0x632be59bd9b4e019ULL +
                                          static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL));
}

bool is_basic(const ModelSpec& s) {
    return s.constrained && s.thinning.kind == ThinningFamily::Kind::Binomial && !s.q_k_fn &&
           !s.alpha_k_fn && !s.beta_k_fn && !s.delta_k_fn && s.delta == 0.0 &&
           !s.multi_births && s.rewiring_r == 0.0;
}

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (hi + v[mid - 1]);
}

std::vector<double> clt_grid(double v) {
    std::vector<double> y(41);
    for (int i = 0; i < 41; ++i) y[i] = -4.0 * v + 8.0 * v * i / 40.0;
    return y;
}

CltResult tail_compare(std::vector<double>& stats, long long n_total, double survival_frac,
                       Estimate survival_ci, double v, bool defect) {
    CltResult res;
    res.y = clt_grid(v);
    res.survival = survival_frac;
    res.survival_ci = survival_ci;
    std::sort(stats.begin(), stats.end());
    for (double y : res.y) {
        auto it = std::lower_bound(stats.begin(), stats.end(), y);
        double emp = static_cast<double>(stats.end() - it) / n_total;
        double tgt = (defect ? survival_frac : 1.0) * normal_upper_tail(y / v);
        res.empirical.push_back(emp);
        res.target.push_back(tgt);
        res.max_dev = std::max(res.max_dev, std::fabs(emp - tgt));
    }
    return res;
}

}  // namespace

Estimate absorption_probability(const ModelSpec& spec, long long x0, double horizon,
                                long long N, std::uint64_t seed) {
    long long absorbed = 0;
    const bool fast = is_basic(spec);
    for (long long i = 0; i < N; ++i) {
        PathSample path = fast ? simulate_basic_fast(spec, x0, horizon, replica_seed(seed, i))
                               : simulate_ctmc(spec, Variant::Base, x0, horizon,
                                               replica_seed(seed, i));
        if (path.absorbed_at) ++absorbed;
    }
    return wilson_interval(absorbed, N);
}

CltResult clt_test(const ModelSpec& spec, long long x0, double T, long long N,
                   std::uint64_t seed, double survival_threshold) {
    RegimeReport rep = classify(spec, Process::X_star);
    if (rep.verdict != Verdict::Transient)
        throw ValidationError("clt_test: requires the transient regime");
    if (!is_basic(spec)) throw ValidationError("clt_test: requires the basic model");
    const double p = spec.p();
    const double nu = spec.alpha - spec.beta * std::log(1.0 / p);
    const double v = std::sqrt(spec.beta) * std::log(1.0 / p);
    std::vector<double> stats;
    long long surviving = 0;
    for (long long i = 0; i < N; ++i) {
        PathSample path = simulate_basic_fast(spec, x0, T, replica_seed(seed, i));
        double x = path.state_at(T);
        if (x >= survival_threshold) ++surviving;
        if (x > 0.0) stats.push_back((std::log(x) - nu * T) / std::sqrt(T));
    }
    double frac = static_cast<double>(surviving) / N;
    return tail_compare(stats, N, frac, wilson_interval(surviving, N), v, true);
}

CltResult clt_test_discrete(const ModelSpec& spec, long long j0, long long m0, long long m,
                            long long N, std::uint64_t seed, double survival_threshold) {
    RegimeReport rep = classify(spec, Process::X_star);
    if (rep.verdict != Verdict::Transient)
        throw ValidationError("clt_test_discrete: requires the transient regime");
    const double p = spec.p();
    const double nu = spec.alpha - spec.beta * std::log(1.0 / p);
    const double v = std::sqrt(spec.beta) * std::log(1.0 / p);
    // the harmonic clock is the horizon under which the step-m chain matches
    // the continuous-time one, so it (not log m) centers the statistic
    const double lm = harmonic_h(0.0, m);
    std::vector<double> stats;
    long long surviving = 0;
    for (long long i = 0; i < N; ++i) {
        PathSample path = simulate_discrete_tagged(spec, DiscreteVariant::Plain, j0, m0, m,
                                                   replica_seed(seed, i));
        double y = path.state_at(static_cast<double>(m));
        if (y >= survival_threshold) ++surviving;
        if (y > 0.0) stats.push_back((std::log(y) - nu * lm) / std::sqrt(lm));
    }
    double frac = static_cast<double>(surviving) / N;
    return tail_compare(stats, N, frac, wilson_interval(surviving, N), v, true);
}

CltResult clt_poisson_surrogate(const ModelSpec& spec, double T, long long N,
                                std::uint64_t seed) {
    const double lp = std::log(1.0 / spec.p());
    const double v = std::sqrt(spec.beta) * lp;
    std::mt19937_64 g = make_stream(seed, StreamPurpose::Generic);
    std::vector<double> stats;
    stats.reserve(N);
    for (long long i = 0; i < N; ++i) {
        double z = sample_poisson(g, spec.beta * T);
        stats.push_back(-(z - spec.beta * T) * lp / std::sqrt(T));
    }
    return tail_compare(stats, N, 1.0, wilson_interval(N, N), v, false);
}

StabilizationResult w_stabilization(const ModelSpec& spec, long long x0,
                                    const std::vector<double>& T_list, long long N,
                                    std::uint64_t seed, double survival_threshold) {
    if (T_list.empty()) throw ValidationError("w_stabilization: empty horizon list");
    if (!is_basic(spec)) throw ValidationError("w_stabilization: requires the basic model");
    std::vector<double> record;
    for (double T : T_list) {
        record.push_back(T / 2.0);
        record.push_back(T);
    }
    std::sort(record.begin(), record.end());
    record.erase(std::unique(record.begin(), record.end()), record.end());
    const double t_max = record.back();

    StabilizationResult res;
    res.horizons = T_list;
    std::vector<std::vector<double>> diffs(T_list.size());
    for (long long i = 0; i < N; ++i) {
        PathSample path = simulate_basic_fast(spec, x0, t_max, replica_seed(seed, i), record);
        if (path.state_at(t_max) < survival_threshold) continue;
        ++res.survivors;
        for (size_t j = 0; j < T_list.size(); ++j) {
            double w1 = path.w_at(T_list[j] / 2.0, spec.alpha, spec.p());
            double w2 = path.w_at(T_list[j], spec.alpha, spec.p());
            diffs[j].push_back(std::fabs(std::log(w2) - std::log(w1)));
        }
    }
    res.conclusive = res.survivors >= 100;
    for (auto& d : diffs) res.medians.push_back(median_of(std::move(d)));
    return res;
}

StabilizationResult w_stabilization_discrete(const ModelSpec& spec, long long j0,
                                             long long m0,
                                             const std::vector<long long>& m_list,
                                             long long N, std::uint64_t seed,
                                             double survival_threshold) {
    if (m_list.empty()) throw ValidationError("w_stabilization_discrete: empty step list");
    const long long m_max = *std::max_element(m_list.begin(), m_list.end());
    const double lp = std::log(spec.p());
    StabilizationResult res;
    for (long long m : m_list) res.horizons.push_back(static_cast<double>(m));
    std::vector<std::vector<double>> diffs(m_list.size());
    auto logw = [&](const PathSample& path, long long m) {
        double y = path.state_at(static_cast<double>(m));
        return -spec.alpha * std::log(static_cast<double>(m)) -
               path.z_at(static_cast<double>(m)) * lp + std::log(y);
    };
    for (long long i = 0; i < N; ++i) {
        PathSample path = simulate_discrete_tagged(spec, DiscreteVariant::Plain, j0, m0, m_max,
                                                   replica_seed(seed, i));
        if (path.state_at(static_cast<double>(m_max)) < survival_threshold) continue;
        ++res.survivors;
        for (size_t j = 0; j < m_list.size(); ++j)
            diffs[j].push_back(std::fabs(logw(path, m_list[j]) - logw(path, m_list[j] / 2)));
    }
    res.conclusive = res.survivors >= 100;
    for (auto& d : diffs) res.medians.push_back(median_of(std::move(d)));
    return res;
}

StationaryAgreement stationary_agreement(const ModelSpec& spec, long long burn_in,
                                         long long run_len, int K, double t_cond,
                                         long long n_mc, std::uint64_t seed) {
    RegimeReport rep = classify(spec, Process::X_tilde);
    if (rep.verdict != Verdict::GeometricallyErgodic)
        throw ValidationError("stationary_agreement: weighted process must be ergodic");
    StationaryAgreement out;
    DistributionVector st = stationary_weighted(spec, K);
    // The weighted stationary law is heavy-tailed; a double-size truncation
    // gives the reference values for the occupation comparison on 0..K.
    DistributionVector st_big = stationary_weighted(spec, 2 * K);

    // (1) occupation law of the weighted jump chain, expected-holding weighted.
    // Upward excursions between (jump-count-rare) catastrophes reach very large
    // states, so jumps are sampled in O(1): for binomial thinning the
    // size-biased landing is exactly 1 + Bi(k-1, p).
    if (!is_basic(spec))
        throw ValidationError("stationary_agreement: occupation sampler needs the basic model");
    {
        const double p = spec.p();
        const double cat = spec.thinning.mean_fraction(1) * spec.beta;  // p_k beta_k, constant
        std::mt19937_64 g = make_stream(seed, StreamPurpose::JumpChain);
        std::vector<double> occ(K + 1, 0.0);
        double total = 0.0;
        long long k = 1;
        for (long long j = 0; j < burn_in + run_len; ++j) {
            const double up = spec.alpha * (k + 1.0);
            const double b = up + cat;
            if (j >= burn_in) {
                if (k <= K) occ[k] += 1.0 / b;
                total += 1.0 / b;
            }
            if (uniform01(g) * b <= up)
                ++k;
            else
                k = 1 + static_cast<long long>(sample_binomial(g, static_cast<double>(k - 1), p));
        }
        for (int j = 0; j <= K; ++j)
            out.occupation_gap = std::max(out.occupation_gap,
                                          std::fabs(occ[j] / total - st_big.mass[j]));
    }

    // (2) conditional law at t_cond, solver vs long-time limit.  Both sides use
    // the j^{-1}-reweighted weighted-process law, which equals the conditional
    // law of the plain process given survival (the exact point-probability
    // identity between the two processes), so no vanishing event is resolved.
    DistributionVector lim = conditional_limit(spec, K, 0.05);
    SemigroupOptions opt;
    opt.reflect_at_top = true;
    DistributionVector wt =
        semigroup(DistributionVector::point(1, K), spec, Variant::Weighted, t_cond, K, opt);
    {
        std::vector<double> cond(K + 1, 0.0);
        double norm = 0.0;
        for (int j = 1; j <= K; ++j) norm += wt.mass[j] / j;
        for (int j = 1; j <= K; ++j) cond[j] = (wt.mass[j] / j) / norm;
        for (int j = 0; j <= K; ++j)
            out.conditional_solver_gap =
                std::max(out.conditional_solver_gap, std::fabs(cond[j] - lim.mass[j]));
    }

    // (3) the same conditional law by Monte Carlo over the weighted process
    {
        std::vector<double> hist(K + 1, 0.0);
        double norm = 0.0;
        for (long long i = 0; i < n_mc; ++i) {
            PathSample path =
                simulate_ctmc(spec, Variant::Weighted, 1, t_cond, replica_seed(seed, i));
            int k = static_cast<int>(path.state_at(t_cond));
            if (k < 1) continue;  // the weighted process never reaches 0
            if (k <= K) hist[k] += 1.0 / k;
            norm += 1.0 / k;
        }
        for (int j = 0; j <= K; ++j)
            out.conditional_mc_gap =
                std::max(out.conditional_mc_gap, std::fabs(hist[j] / norm - lim.mass[j]));
    }

    // (4) the inhomogeneous weighted recursion shares the long-run law: started
    // from the (nearly converged) continuous-time law, the step kernels must
    // hold it at the stationary vector rather than push it away.
    {
        WeightedRecursion wr = weighted_discrete_recursion(wt, spec, 1000, 4000, K,
                                                           /*reflect_at_top=*/true);
        for (int j = 0; j <= K; ++j)
            out.discrete_gap =
                std::max(out.discrete_gap, std::fabs(wr.v.mass[j] - st.mass[j]));
    }
    return out;
}

namespace {

// Dense one-step kernel row (I + Q/denom) from state k.
std::vector<double> dense_kernel(const QRow& row, int k, double denom, int n) {
    std::vector<double> P(n, 0.0);
    for (const auto& [t, r] : row.entries)
        P[std::min(t, n - 1)] += r / denom;
    P[k] += 1.0 + row.diagonal / denom;
    return P;
}

double tv_between(const ModelSpec& spec, int k, long long kernel_m, double denom) {
    QRow a = q_row(spec, Variant::RewiringAtM, k, static_cast<int>(kernel_m));
    QRow b = q_row(spec, Variant::RewiringLimit, k);
    int n = k + 2;
    for (const auto& [t, r] : a.entries) n = std::max(n, t + 1);
    for (const auto& [t, r] : b.entries) n = std::max(n, t + 1);
    std::vector<double> pa = dense_kernel(a, k, denom, n);
    std::vector<double> pb = dense_kernel(b, k, denom, n);
    double tv = 0.0;
    for (int j = 0; j < n; ++j) tv += std::fabs(pa[j] - pb[j]);
    return 0.5 * tv;
}

}  // namespace

double rewiring_kernel_tv(const ModelSpec& spec, int k, long long m) {
    if (m < k + 2) throw ValidationError("rewiring_kernel_tv: need m >= k + 2");
    return tv_between(spec, k, m, static_cast<double>(m + 1));
}

RewiringCoupling rewiring_coupling_experiment(const ModelSpec& spec, long long j1,
                                              const std::vector<long long>& m1_list,
                                              double horizon_mult, long long N,
                                              std::uint64_t seed) {
    if (spec.rewiring_r < 0) throw ValidationError("rewiring_coupling_experiment: r < 0");
    RewiringCoupling out;
    for (size_t idx = 0; idx < m1_list.size(); ++idx) {
        const long long m1 = m1_list[idx];
        const long long m_end = static_cast<long long>(m1 * horizon_mult);
        double sum_div = 0.0;
        for (long long i = 0; i < N; ++i) {
            PathSample path =
                simulate_discrete_tagged(spec, DiscreteVariant::RewiringLimit, j1, m1, m_end,
                                         replica_seed(seed + idx, i));
            // Per-step divergence hazard of the maximal coupling equals the
            // kernel TV gap; it scales as 1/(l(l+1)) along a constant stretch,
            // so each stretch contributes in closed form from one exact value.
            double hazard = 0.0;
            for (size_t j = 0; j < path.times.size(); ++j) {
                const double l0 = path.times[j];
                const double l1 =
                    j + 1 < path.times.size() ? path.times[j + 1] : path.t_end;
                if (l1 <= l0) continue;
                const int k = static_cast<int>(path.states[j]);
                double tv0 = tv_between(spec, k, static_cast<long long>(l0) + 1, l0 + 1.0);
                hazard += tv0 * l0 * (l0 + 1.0) * (1.0 / l0 - 1.0 / l1);
            }
            sum_div += -std::expm1(-hazard);
        }
        out.m1.push_back(m1);
        out.divergence.push_back(sum_div / N);
    }
    // log-log least-squares slope
    if (out.m1.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(out.m1.size());
        for (int i = 0; i < n; ++i) {
            double x = std::log(static_cast<double>(out.m1[i]));
            double y = std::log(std::max(out.divergence[i], 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return out;
}

}  // namespace ddsim
