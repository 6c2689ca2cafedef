#pragma once

#include <vector>

#include "ddsim/model.hpp"

namespace ddsim {

/**
 * Finite probability vector over degrees 0..K with explicit accounting of the
 * mass that escaped past the truncation.  The deficit is tracked, never
 * renormalized away.
 */
struct DistributionVector {
    std::vector<double> mass;  // indexed 0..K
    double deficit = 0.0;

    int K() const { return static_cast<int>(mass.size()) - 1; }
    double total() const;                       // sum(mass) + deficit
    double mean() const;                        // sum j * mass[j]
    static DistributionVector point(int k, int K);
    /** Verify entries >= -1e-12 and total within tol of 1; throws otherwise. */
    void check(double tol = 1e-10) const;
};

}  // namespace ddsim
