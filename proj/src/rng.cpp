#include "ddsim/rng.hpp"

#include <cmath>

namespace ddsim {

double sample_poisson(std::mt19937_64& g, double mean) {
    if (mean <= 0.0) return 0.0;
    if (mean < 1e12) {
        std::poisson_distribution<long long> po(mean);
        return static_cast<double>(po(g));
    }
    // Normal approximation: relative quantile error ~ mean^{-1/2} < 1e-6 here.
    std::normal_distribution<double> n(mean, std::sqrt(mean));
    return std::max(0.0, std::round(n(g)));
}

double sample_binomial(std::mt19937_64& g, double n, double p) {
    if (n <= 0.0 || p <= 0.0) return 0.0;
    if (p >= 1.0) return n;
    // beyond ~1e12 trials the library sampler's internal doubles lose integer
    // precision (its rejection loop can then spin); the normal approximation
    // there has quantile error below 1e-6
    if (n < 1e12) {
        std::binomial_distribution<long long> bin(static_cast<long long>(n), p);
        return static_cast<double>(bin(g));
    }
    std::normal_distribution<double> nd(n * p, std::sqrt(n * p * (1.0 - p)));
    return std::min(n, std::max(0.0, std::round(nd(g))));
}

double sample_yule_transition(std::mt19937_64& g, double x, double alpha, double dt) {
    if (x <= 0.0 || dt <= 0.0) return x;
    const double phat = std::exp(-alpha * dt);  // NB success parameter
    if (phat >= 1.0) return x;
    // X_{t+dt} = x + NB(x, phat) via the gamma-Poisson mixture.
    std::gamma_distribution<double> ga(x, (1.0 - phat) / phat);
    return x + sample_poisson(g, ga(g));
}

}  // namespace ddsim
