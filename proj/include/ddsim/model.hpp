#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddsim/thinning.hpp"

namespace ddsim {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Multi-birth family: upward jumps of size j at rate k a_{k,j} (j >= 1) and an
 * extra down-jump at rate k a_{k,-1}.  Support is finite, j <= j_max.
 * Index convention for the flat vectors: slot 0 holds j = -1, slot j holds j.
 */
struct MultiBirths {
    int j_max = 16;
    std::vector<double> limits;           // a_{*,-1}, a_{*,1}, ..., a_{*,j_max} (slot 0 = j=-1)
    std::vector<double> c_star;           // envelope constants, same layout (optional, zeros)
    std::function<double(int, int)> rate; // a_{k,j} for j in {-1, 1..j_max}; default: limits

    double limit_at(int j) const;         // a_{*,j}
    double rate_at(int k, int j) const;   // a_{k,j}
    double alpha_b() const;               // sum_j j a_{*,j}
};

/**
 * Full parameterization of a model variant.  The "constrained" duplication
 * family keeps q_l + p_l(1 - q_l) = alpha for every l; the basic model has all
 * sequences constant.
 */
struct ModelSpec {
    ThinningFamily thinning = ThinningFamily::binomial(0.5);
    double q = 0.0;        // limiting retention probability
    double alpha = 0.5;    // limiting per-neighbor birth rate, q + p(1-q) for DD
    double beta = 1.0;     // limiting catastrophe rate, 1 - q for DD
    double delta = 0.0;    // limiting death rate (variant d)
    double rewiring_r = 0.0;
    bool constrained = true;
    std::optional<MultiBirths> multi_births;

    // Per-degree perturbation callbacks; null means the constant limit.
    std::function<double(int)> q_k_fn, alpha_k_fn, beta_k_fn, delta_k_fn;
    double c1 = 0, gamma1 = 1, c4 = 0, gamma4 = 1, c5 = 0;

    double p() const { return thinning.limit_p; }
    double q_k(int k) const { return q_k_fn ? q_k_fn(k) : q; }
    double alpha_k(int k) const { return alpha_k_fn ? alpha_k_fn(k) : alpha; }
    double beta_k(int k) const { return beta_k_fn ? beta_k_fn(k) : beta; }
    double delta_k(int k) const { return delta_k_fn ? delta_k_fn(k) : delta; }
    /** gamma = (min over declared envelope exponents) ∧ 1. */
    double gamma() const;

    static ModelSpec basic(double p, double q);
    /** Throws ValidationError when parameters or the constraint are violated. */
    void validate() const;

    static ModelSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /** FNV-1a hash of the canonical serialized form, as a hex string. */
    std::string digest() const;
};

/** Load a config document, rejecting unknown keys at every level. */
ModelSpec load_model_config(const std::string& path);

}  // namespace ddsim
