#pragma once

#include <vector>

#include "ddsim/distribution.hpp"
#include "ddsim/qmatrix.hpp"

namespace ddsim {

/**
 * Expected-degree recursion p_j^T {I + j^{-1}[Q]_j} for j = m0+1..m, rows
 * truncated at K ([Q]_j additionally zeroes rows >= j).  Mass leaking past K
 * accumulates in the deficit.  variant selects the kernel: Base (plain),
 * RewiringAtM (inhomogeneous rewiring rows rebuilt each step).
 */
DistributionVector discrete_recursion(DistributionVector p_m0, const ModelSpec& spec, int m0,
                                      int m, int K, Variant variant = Variant::Base);

struct WeightedRecursion {
    DistributionVector v;   // law of the weighted chain at step m
    double prefactor;       // prod_{s=m0}^{m-1} {1 + (2 alpha - 1)/(s+1)}
};

/**
 * Degree-weighted recursion v_{m+1}^T = v_m^T {I + (m+2a)^{-1}[Q~]_{m+1}}.
 * v_m0 must be a probability vector (point mass at j0 for the standard use);
 * the plain law is recovered as p_{m,k} = j0 k^{-1} prefactor v_{m,k}.
 */
WeightedRecursion weighted_discrete_recursion(DistributionVector v_m0, const ModelSpec& spec,
                                              int m0, int m, int K, bool reflect_at_top = false);

struct SemigroupOptions {
    double tol = 1e-12;          // Poisson-tail cutoff for uniformization
    bool reflect_at_top = false; // drop up-rates out of K (conservative truncation)
};

/** p0^T e^{Qt} on 0..K by uniformization; deficit tracked, never renormalized. */
DistributionVector semigroup(const DistributionVector& p0, const ModelSpec& spec,
                             Variant variant, double t, int K,
                             const SemigroupOptions& opt = {});

/**
 * Max relative error, over j <= K and the t grid, of the identity
 * j P_i[X_t=j] = e^{-(1-2 alpha) t} i P_i[X~_t=j], both sides by uniformization.
 * Entries below the floor are skipped.
 */
double quasi_stationarity_check(const ModelSpec& spec, int i,
                                const std::vector<double>& t_grid, int K,
                                double floor_ = 1e-12);

/** Stationary law of the weighted generator truncated (reflected) at K, by power iteration. */
DistributionVector stationary_weighted(const ModelSpec& spec, int K);

/** Limit of P[X_t = j | X_t >= 1]: j^{-1} ptilde_j / sum_l l^{-1} ptilde_l. */
DistributionVector conditional_limit(const ModelSpec& spec, int K, double tol = 1e-3);

}  // namespace ddsim
