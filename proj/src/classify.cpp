#include "ddsim/classify.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ddsim {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::GeometricallyErgodic: return "geometrically_ergodic";
        case Verdict::NullRecurrent: return "null_recurrent";
        case Verdict::Transient: return "transient";
    }
    return "?";
}

const char* to_string(Region r) {
    switch (r) {
        case Region::A: return "A";
        case Region::B: return "B";
        case Region::C: return "C";
    }
    return "?";
}

const char* to_string(Process p) {
    switch (p) {
        case Process::X_star: return "X_star";
        case Process::X_tilde: return "X_tilde";
        case Process::X_star_b: return "X_star_b";
    }
    return "?";
}

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kRootTol = 1e-10;

// Bracketed bisection refined by Newton; f must be monotone on [lo, hi].
double solve_monotone(const std::function<double(double)>& f,
                      const std::function<double(double)>& df, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > kRootTol * 0.01; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm <= 0) == (flo <= 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        double fx = f(x), d = df(x);
        if (d == 0.0) break;
        double step = fx / d;
        double nx = x - step;
        if (nx < lo || nx > hi) break;
        x = nx;
        if (std::fabs(step) < kRootTol * 1e-3) break;
    }
    return x;
}

}  // namespace

double p_star(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("p_star: q must lie in [0,1)");
    const double target = -q / (1.0 - q);  // log of rhs
    // log(p) + p is increasing on (0,1]; solve log(p) + p = target.
    auto f = [target](double p) { return std::log(p) + p - target; };
    auto df = [](double p) { return 1.0 / p + 1.0; };
    return solve_monotone(f, df, 1e-300, 1.0);
}

std::pair<double, double> region_boundaries(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("region_boundaries: p must lie in (0,1)");
    const double L = std::log(1.0 / p);
    double q1 = (L - p) / (1.0 + L - p);
    double q2 = (p * L - p) / (1.0 + p * L - p);
    return {q1, q2};
}

double x_star(double u) {
    if (!(u > 1.0)) throw ValidationError("x_star: u must exceed 1");
    // g(x) = u(1 - e^-x) - x has g'(0) = u-1 > 0 and g(u) < 0; root in (0, u).
    auto f = [u](double x) { return u * (1.0 - std::exp(-x)) - x; };
    auto df = [u](double x) { return u * std::exp(-x) - 1.0; };
    // bracket away from the root at 0: start where g is positive
    double lo = std::min(1.0, u - 1.0);
    while (f(lo) <= 0.0 && lo > 1e-14) lo *= 0.5;
    return solve_monotone([&](double x) { return -f(x); }, [&](double x) { return -df(x); },
                          lo, u);
}

RegimeReport classify(const ModelSpec& spec, Process process) {
    spec.validate();
    const double p = spec.p();
    const double L = std::log(1.0 / p);
    double growth;
    switch (process) {
        case Process::X_star:
            growth = spec.alpha - spec.delta;
            break;
        case Process::X_tilde:
            growth = spec.alpha - spec.delta;
            break;
        case Process::X_star_b:
            growth = spec.multi_births ? spec.multi_births->alpha_b() : spec.alpha;
            break;
    }
    const double threshold = (process == Process::X_tilde) ? p * spec.beta * L : spec.beta * L;
    RegimeReport rep;
    rep.process = process;
    rep.margin = growth - threshold;
    if (std::fabs(rep.margin) <= kBoundaryTol)
        rep.verdict = Verdict::NullRecurrent;
    else
        rep.verdict = rep.margin < 0 ? Verdict::GeometricallyErgodic : Verdict::Transient;
    if (rep.verdict == Verdict::GeometricallyErgodic && growth > 0.0)
        rep.eta_star = x_star(threshold / growth) / L;
    // Basic (p,q)-plane region for unperturbed DD specs.
    if (spec.constrained && !spec.multi_births && spec.delta == 0.0 && spec.rewiring_r == 0.0) {
        auto [q1, q2] = region_boundaries(p);
        if (spec.q < q2)
            rep.region = Region::A;
        else if (spec.q > q1)
            rep.region = Region::C;
        else
            rep.region = Region::B;
    }
    return rep;
}

double eta_star(const ModelSpec& spec, Process process) {
    RegimeReport rep = classify(spec, process);
    if (!rep.eta_star)
        throw ValidationError("eta_star: ergodicity criterion fails, exponent undefined");
    return *rep.eta_star;
}

}  // namespace ddsim
