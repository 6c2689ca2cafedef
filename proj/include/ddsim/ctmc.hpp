#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddsim/qmatrix.hpp"

namespace ddsim {

/**
 * One realized trajectory.  For continuous-time paths, times are jump (or
 * recording) instants and the path is piecewise constant between records.
 * Discrete chains reuse the container with times holding step indices.
 */
struct PathSample {
    std::vector<double> times;
    std::vector<double> states;     // double: fast-forward states exceed 2^63
    std::vector<long long> z;       // catastrophe-clock count (self-jumps included)
    std::optional<double> absorbed_at;
    bool event_capped = false;
    double t_end = 0.0;

    void record(double t, double x, long long zc);
    void check_invariants() const;
    /** Piecewise-constant read-off; exact at recorded instants. */
    double state_at(double t) const;
    long long z_at(double t) const;
    /** W_t = e^{-alpha t} p^{-Z_t} X_t evaluated from the recorded point at t. */
    double w_at(double t, double alpha, double p) const;
};

/**
 * Exact event-driven realization (Gillespie) of the requested variant.
 * Z increments at every catastrophe-clock ring, including no-change outcomes.
 */
PathSample simulate_ctmc(const ModelSpec& spec, Variant variant, long long x0, double t_max,
                         std::uint64_t seed, long long event_cap = 100000000LL);

/**
 * Catastrophe-skeleton simulation of the basic model: between catastrophes the
 * Yule growth is sampled exactly from its transition law, at catastrophes the
 * state is thinned binomially.  States are additionally recorded at record_at.
 * Distributionally identical to simulate_ctmc at catastrophe times.
 */
PathSample simulate_basic_fast(const ModelSpec& spec, long long x0, double t_max,
                               std::uint64_t seed, const std::vector<double>& record_at = {});

struct WSample {
    std::vector<double> w;  // one value per checkpoint
    bool surviving = false;
};

/** W values at the checkpoints plus a survival flag (final state >= threshold). */
std::vector<WSample> w_limit_samples(const std::vector<PathSample>& paths,
                                     const ModelSpec& spec,
                                     const std::vector<double>& checkpoints,
                                     double survival_threshold = 50.0);

}  // namespace ddsim
