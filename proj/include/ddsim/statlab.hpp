#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddsim/model.hpp"

namespace ddsim {

/** Versioned, reproducible experiment record: same config + seed => identical JSON. */
struct ExperimentReport {
    std::string id;
    std::string config_digest;
    std::uint64_t seed = 0;
    long long sample_size = 0;
    nlohmann::json statistics;
    nlohmann::json tolerances;
    bool pass = false;

    nlohmann::json to_json() const;
};

struct Estimate {
    double value = 0.0;
    double lo = 0.0, hi = 0.0;  // Wilson 95% interval
    long long n = 0;
};

Estimate wilson_interval(long long successes, long long n);

/** Fraction of paths absorbed by the horizon (complement estimates survival). */
Estimate absorption_probability(const ModelSpec& spec, long long x0, double horizon,
                                long long N, std::uint64_t seed);

struct CltResult {
    std::vector<double> y;          // grid, 41 points over +-4v
    std::vector<double> empirical;  // P^[statistic >= y]
    std::vector<double> target;     // survival * (1 - Phi(y/v))
    double max_dev = 0.0;
    double survival = 0.0;          // plug-in survival fraction
    Estimate survival_ci;
};

/** Tail comparison of T^{-1/2}(log X_T - nu T) with the defect normal limit. */
CltResult clt_test(const ModelSpec& spec, long long x0, double T, long long N,
                   std::uint64_t seed, double survival_threshold = 50.0);

/** Discrete analogue: (log Y_m - nu log m)/sqrt(log m). */
CltResult clt_test_discrete(const ModelSpec& spec, long long j0, long long m0, long long m,
                            long long N, std::uint64_t seed, double survival_threshold = 50.0);

/** Harness anchor: -(Z_T - beta T) log(1/p)/sqrt(T), Z_T ~ Po(beta T), vs N(0, v^2). */
CltResult clt_poisson_surrogate(const ModelSpec& spec, double T, long long N,
                                std::uint64_t seed);

struct StabilizationResult {
    std::vector<double> horizons;
    std::vector<double> medians;   // median |log W_T - log W_{T/2}| among survivors
    long long survivors = 0;
    bool conclusive = true;        // >= 100 survivors
};

/** Stabilization of W_t = e^{-alpha t} p^{-Z_t} X_t; survivors fixed at the last horizon. */
StabilizationResult w_stabilization(const ModelSpec& spec, long long x0,
                                    const std::vector<double>& T_list, long long N,
                                    std::uint64_t seed, double survival_threshold = 50.0);

/** Discrete analogue with W_m = m^{-alpha} p^{-J_m} Y_m over the step list. */
StabilizationResult w_stabilization_discrete(const ModelSpec& spec, long long j0,
                                             long long m0,
                                             const std::vector<long long>& m_list,
                                             long long N, std::uint64_t seed,
                                             double survival_threshold = 50.0);

struct StationaryAgreement {
    double occupation_gap = 0.0;          // weighted-chain occupation vs stationary vector
    double conditional_solver_gap = 0.0;  // semigroup conditional at t vs conditional limit
    double conditional_mc_gap = 0.0;      // Monte Carlo conditional at t vs conditional limit
    double discrete_gap = 0.0;            // weighted discrete recursion vs stationary vector
};

/**
 * Stationary-law agreement in the ergodic regime.  The occupation law uses
 * run_len jump-chain visits (after burn_in) weighted by expected holding times;
 * the conditional laws at t_cond are formed as j^{-1}-reweighted laws of the
 * weighted process, which is how P[X_t = j | X_t >= 1] is reached without
 * resolving the exponentially small survival event directly.
 */
StationaryAgreement stationary_agreement(const ModelSpec& spec, long long burn_in,
                                         long long run_len, int K, double t_cond,
                                         long long n_mc, std::uint64_t seed);

/**
 * Exact total-variation distance between the one-step kernels
 * I + (m+1)^{-1} Q^{(r,m)} and I + (m+1)^{-1} Q^{(r)} from state k.
 */
double rewiring_kernel_tv(const ModelSpec& spec, int k, long long m);

struct RewiringCoupling {
    std::vector<long long> m1;
    std::vector<double> divergence;  // expected fraction of pairs diverging by horizon
    double slope = 0.0;              // log-log regression slope of divergence vs m1
};

/**
 * Maximal per-step coupling of the time-inhomogeneous and limit rewiring
 * chains started identically at (j1, m1): along a limit-chain path the
 * per-step divergence hazard equals the kernel total-variation gap, summed in
 * closed form over constant stretches (the gap scales as 1/(l(l+1))).
 */
RewiringCoupling rewiring_coupling_experiment(const ModelSpec& spec, long long j1,
                                              const std::vector<long long>& m1_list,
                                              double horizon_mult, long long N,
                                              std::uint64_t seed);

}  // namespace ddsim
