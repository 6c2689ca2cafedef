#pragma once

#include <cstdint>
#include <vector>

#include "ddsim/ctmc.hpp"
#include "ddsim/qmatrix.hpp"

namespace ddsim {

/**
 * Generalized harmonic number h_a(j) = sum_{l=1}^{j} 1/(l+a).  Direct summation
 * below the switchover, digamma difference psi(j+a+1) - psi(a+1) above it; the
 * two agree to 1e-13 at the boundary.
 */
double harmonic_h(double a, long long j);

struct QuantileCouple {
    double e_b;   // -log(1-u)/b, the exponential quantile
    double v;     // h_a(r+1) - h_a(m), the coupled discrete residence time
    long long r;  // landing index: the jump occurs during step r -> r+1
};

/**
 * Quantile coupling of V_a(m,b) with Exp(b) from a single uniform u: r is the
 * smallest index with prod_{l=m}^{r} (1 - b/(l+a+1)) <= 1-u.  Pathwise,
 * -1/(r+1+a) <= e_b - v <= c_phi b v / (m+a+1).  Requires b/(m+a+1) <= phi < 1.
 */
QuantileCouple quantile_couple(long long m, double a, double b, double u, double phi = 0.999);

enum class DiscreteVariant { Plain, Weighted, RewiringInhomogeneous, RewiringLimit };

/**
 * Inhomogeneous discrete chain: step m -> m+1 moves by I + (m+1)^{-1}[Q]_{m+1}
 * (plain), I + (m+2a)^{-1}[Q~]_{m+1} (weighted, a = 2 alpha - 1), or the
 * rewiring kernels.  Simulated per-jump through the quantile coupling, so
 * m_max ~ 1e9 is reachable; times hold step indices, z counts catastrophe
 * events (self-jumps included).
 */
PathSample simulate_discrete_tagged(const ModelSpec& spec, DiscreteVariant variant,
                                    long long j0, long long m0, long long m_max,
                                    std::uint64_t seed, bool relaxed_start = false);

/**
 * One jump-chain realization shared by the homogeneous process X (exponential
 * holding times S_n) and the time-compressed discrete chain Y^(h) (harmonic
 * holding times S~_n), with each pair (V_j, V~_j) driven by the same uniform
 * through the quantile coupling.  By construction Y^(h)_t = X_{t + Delta(t)}.
 */
struct CoupledPair {
    std::vector<int> states;        // jump-chain states, X^_0..X^_n
    std::vector<long long> n_step;  // N_j, step at which the j-th jump of Y occurs
    std::vector<double> s;          // S_n (s[0] = 0)
    std::vector<double> s_tilde;    // S~_n
    std::vector<double> delta;      // Delta_n = S_n - S~_n
    bool absorbed = false;          // hit 0 before n_jumps

    /** Piecewise-linear interpolant of Delta along the S~ grid (constant past the end). */
    double delta_at(double t) const;
    double x_at(double t) const;    // X_t read off the S grid
    double yh_at(double t) const;   // Y^(h)_t read off the S~ grid
};

CoupledPair build_coupled_pair(const ModelSpec& spec, int j0, long long m0, int n_jumps,
                               std::uint64_t seed);

}  // namespace ddsim
