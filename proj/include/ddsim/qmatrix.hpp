#pragma once

#include <utility>
#include <vector>

#include "ddsim/model.hpp"

namespace ddsim {

enum class Variant {
    Base,            // degree process X
    Bivariate,       // (X, Z): catastrophe self-jumps carried as explicit entries
    Weighted,        // degree-weighted process X~
    Deaths,          // X^(d): extra down-jumps at rate k delta_k
    MultiBirth,      // X^(b): upward jumps of sizes 1..j_max and a -1 jump
    RewiringLimit,   // X^(r): extra links ~ Poisson(r)
    RewiringAtM,     // time-m rewiring rows, extra links ~ Bi(m, r/m)
};

/** Sparse row of a conservative generator. */
struct QRow {
    int k = 0;
    // (target, rate) pairs, ascending targets.  The Bivariate variant carries a
    // (k, rate) self-jump entry for the catastrophe clock's no-change outcomes.
    std::vector<std::pair<int, double>> entries;
    double diagonal = 0.0;
    // Mass unaccounted for by truncating an infinite-support extra-link law
    // (identically zero under the conventions used here; kept as a diagnostic).
    double residual = 0.0;

    double sum() const;
    /** Rate toward a specific target (0 when absent). */
    double rate_to(int j) const;
};

/**
 * Exact generator row of the requested variant from state k.
 * m is required (and only used) by RewiringAtM, where 0 <= k <= m-1.
 */
QRow q_row(const ModelSpec& spec, Variant v, int k, int m = -1);

}  // namespace ddsim
