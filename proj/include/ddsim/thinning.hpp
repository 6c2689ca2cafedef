#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace ddsim {

/**
 * Law of the number of retained edges when a degree-k vertex is copied.
 * Binomial(k, p) in the basic model; Custom families supply exact mass
 * functions together with a (c, gamma) envelope describing how fast the
 * per-degree retention fraction p_k approaches its limit p.
 */
struct ThinningFamily {
    enum class Kind { Binomial, Custom };

    Kind kind = Kind::Binomial;
    double limit_p = 0.5;  // p, the limiting retention fraction

    // Custom-kind callbacks (exact mass, no interpolation).
    std::function<double(int, int)> custom_mass;          // mass(k, j)
    std::function<double(int)> custom_mean_fraction;      // p_k
    std::function<double(int)> custom_variance;           // sigma_k^2

    // envelope constants: |p_k - p| <= c2 k^-gamma2, k^-2 sigma_k^2 <= c3 k^-gamma3
    double c2 = 0, gamma2 = 1, c3 = 0, gamma3 = 1;

    static ThinningFamily binomial(double p);
    static ThinningFamily custom(double limit_p,
                                 std::function<double(int, int)> mass,
                                 std::function<double(int)> mean_fraction,
                                 std::function<double(int)> variance,
                                 double c2, double gamma2, double c3, double gamma3);

    double mass(int k, int j) const;
    /** Full pmf over subset sizes 0..k (length k+1). */
    std::vector<double> row(int k) const;
    double mean_fraction(int k) const;  // p_k
    double variance(int k) const;       // sigma_k^2
};

/** Binomial(n, p) pmf over 0..n, computed stably for large n (sums to 1 within fp). */
std::vector<double> binomial_pmf(int n, double p);

/** Poisson(lambda) pmf truncated where the tail drops below tail_tol; final entry absorbs the tail. */
std::vector<double> poisson_pmf(double lambda, double tail_tol = 1e-15);

/**
 * Size-biased transform: pi~_{kj} = j pi_{kj} / (k p_k) over j in 1..k.
 * Returned vector is indexed 0..k with entry 0 equal to zero.
 */
std::vector<double> size_biased(const ThinningFamily& th, int k);

}  // namespace ddsim
