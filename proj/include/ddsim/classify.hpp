#pragma once

#include <optional>
#include <string>

#include "ddsim/model.hpp"

namespace ddsim {

enum class Process { X_star, X_tilde, X_star_b };
enum class Verdict { GeometricallyErgodic, NullRecurrent, Transient };
enum class Region { A, B, C };

struct RegimeReport {
    Process process;
    Verdict verdict;
    double margin;                       // signed criterion value; verdict = sign(margin)
    std::optional<double> eta_star;      // critical moment exponent, when defined
    std::optional<Region> region;        // basic (p,q)-plane region
};

const char* to_string(Verdict v);
const char* to_string(Region r);
const char* to_string(Process p);

/**
 * Regime classification.  Margins: alpha - beta log(1/p) for X*, alpha -
 * p beta log(1/p) for X~, alpha^(b) - beta log(1/p) for X^(*,b); deaths shift
 * alpha by -delta.  |margin| <= 1e-12 is reported NullRecurrent.
 */
RegimeReport classify(const ModelSpec& spec, Process process);

/** Unique root in (0,1] of p e^p = e^{-q/(1-q)}; p_star(0) is the root of p e^p = 1. */
double p_star(double q);

/** (q1, q2): region boundaries at fixed p.  Negative values mean an empty region. */
std::pair<double, double> region_boundaries(double p);

/** Unique positive root of x = u(1 - e^{-x}), defined for u > 1; x_star(u) < u. */
double x_star(double u);

/** Critical moment exponent: x*(beta log(1/p)/alpha)/log(1/p) for X*, with p beta for X~. */
double eta_star(const ModelSpec& spec, Process process);

}  // namespace ddsim
