#include "ddsim/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "ddsim/rng.hpp"
#include "ddsim/thinning.hpp"

namespace ddsim {

void PathSample::record(double t, double x, long long zc) {
    if (!times.empty() && t <= times.back()) return;
    times.push_back(t);
    states.push_back(x);
    z.push_back(zc);
}

void PathSample::check_invariants() const {
    for (size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1]) throw ValidationError("path: times not increasing");
        if (z[i] < z[i - 1]) throw ValidationError("path: z decreasing");
    }
    for (double s : states)
        if (s < 0) throw ValidationError("path: negative state");
}

namespace {
size_t locate(const std::vector<double>& times, double t) {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) throw ValidationError("path: query before start");
    return static_cast<size_t>(it - times.begin()) - 1;
}
}  // namespace

double PathSample::state_at(double t) const { return states[locate(times, t)]; }
long long PathSample::z_at(double t) const { return z[locate(times, t)]; }

double PathSample::w_at(double t, double alpha, double p) const {
    size_t i = locate(times, t);
    if (states[i] <= 0.0) return 0.0;
    return std::exp(-alpha * t - z[i] * std::log(p) + std::log(states[i]));
}

namespace {

struct EventTable {
    std::vector<std::pair<int, double>> moves;  // non-catastrophe moves
    double move_rate = 0.0;
    double cat_rate = 0.0;
    std::vector<double> landing;  // catastrophe landing pmf over absolute states 0..n-1
};

EventTable build_events(const ModelSpec& s, Variant v, int k) {
    EventTable e;
    switch (v) {
        case Variant::Base:
        case Variant::Bivariate:
            if (k >= 1) {
                e.moves.emplace_back(k + 1, k * s.alpha_k(k));
                e.cat_rate = s.beta_k(k);
                e.landing = s.thinning.row(k);
            }
            break;
        case Variant::Weighted: {
            if (k < 1) throw ValidationError("simulate_ctmc: weighted variant needs k >= 1");
            e.moves.emplace_back(k + 1, s.alpha * (k + 1));
            e.cat_rate = s.thinning.mean_fraction(k) * s.beta_k(k);
            e.landing = size_biased(s.thinning, k);
            break;
        }
        case Variant::Deaths:
            if (k >= 1) {
                e.moves.emplace_back(k + 1, k * s.alpha_k(k));
                if (s.delta_k(k) > 0) e.moves.emplace_back(k - 1, k * s.delta_k(k));
                e.cat_rate = s.beta_k(k);
                e.landing = s.thinning.row(k);
            }
            break;
        case Variant::MultiBirth: {
            if (!s.multi_births)
                throw ValidationError("simulate_ctmc: multibirth variant needs multi_births");
            if (k >= 1) {
                const MultiBirths& mb = *s.multi_births;
                for (int j = 1; j <= mb.j_max; ++j)
                    if (mb.rate_at(k, j) > 0) e.moves.emplace_back(k + j, k * mb.rate_at(k, j));
                if (mb.rate_at(k, -1) > 0) e.moves.emplace_back(k - 1, k * mb.rate_at(k, -1));
                e.cat_rate = s.beta_k(k);
                e.landing = s.thinning.row(k);
            }
            break;
        }
        case Variant::RewiringLimit: {
            const std::vector<double> ext = poisson_pmf(s.rewiring_r);
            if (k == 0) {
                if (s.rewiring_r > 0) e.moves.emplace_back(1, s.rewiring_r);
                e.cat_rate = 1.0;
                e.landing = ext;
            } else {
                e.moves.emplace_back(k + 1, k * s.alpha_k(k) + s.rewiring_r);
                e.cat_rate = 1.0;
                const double q = s.q_k(k);
                std::vector<double> pi = s.thinning.row(k);
                std::vector<double> land(k + ext.size(), 0.0);
                for (int i = 0; i <= k; ++i)
                    for (size_t j = 0; j < ext.size(); ++j)
                        land[i + j] += (1.0 - q) * pi[i] * ext[j];
                for (size_t j = 0; j < ext.size(); ++j) land[k + j] += q * ext[j];
                e.landing = std::move(land);
            }
            break;
        }
        case Variant::RewiringAtM:
            throw ValidationError("simulate_ctmc: rewiring_at_m is not a CTMC");
    }
    for (const auto& [t, r] : e.moves) e.move_rate += r;
    return e;
}

int sample_pmf(const std::vector<double>& pmf, double u) {
    double cum = 0.0;
    for (size_t j = 0; j < pmf.size(); ++j) {
        cum += pmf[j];
        if (u <= cum) return static_cast<int>(j);
    }
    return static_cast<int>(pmf.size()) - 1;
}

}  // namespace

PathSample simulate_ctmc(const ModelSpec& spec, Variant variant, long long x0, double t_max,
                         std::uint64_t seed, long long event_cap) {
    if (x0 < 0) throw ValidationError("simulate_ctmc: x0 must be >= 0");
    std::mt19937_64 cat = make_stream(seed, StreamPurpose::CatastropheClock);
    std::mt19937_64 birth = make_stream(seed, StreamPurpose::BirthClock);
    std::mt19937_64 thin = make_stream(seed, StreamPurpose::Thinning);

    PathSample path;
    path.t_end = t_max;
    double t = 0.0;
    int k = static_cast<int>(x0);
    long long zc = 0;
    path.record(t, k, zc);

    // With binomial thinning the catastrophe landing has a closed form; large
    // states then never materialize (or cache) dense landing rows.
    const bool closed_form =
        (variant == Variant::Base || variant == Variant::Weighted) &&
        spec.thinning.kind == ThinningFamily::Kind::Binomial && !spec.q_k_fn &&
        !spec.alpha_k_fn && !spec.beta_k_fn;

    std::unordered_map<int, EventTable> cache;
    long long events = 0;
    const double inf = std::numeric_limits<double>::infinity();
    while (t < t_max) {
        double move_rate, cat_rate;
        const EventTable* e = nullptr;
        if (closed_form) {
            if (variant == Variant::Base) {
                move_rate = k >= 1 ? k * spec.alpha_k(k) : 0.0;
                cat_rate = k >= 1 ? spec.beta_k(k) : 0.0;
            } else {
                if (k < 1) throw ValidationError("simulate_ctmc: weighted variant needs k >= 1");
                move_rate = spec.alpha * (k + 1);
                cat_rate = spec.thinning.mean_fraction(k) * spec.beta_k(k);
            }
        } else {
            auto it = cache.find(k);
            if (it == cache.end()) it = cache.emplace(k, build_events(spec, variant, k)).first;
            e = &it->second;
            move_rate = e->move_rate;
            cat_rate = e->cat_rate;
        }
        const double total = move_rate + cat_rate;
        if (total <= 0.0) {
            path.absorbed_at = t;
            break;
        }
        double dtm = move_rate > 0 ? exponential(birth, move_rate) : inf;
        double dtc = cat_rate > 0 ? exponential(cat, cat_rate) : inf;
        double dt = std::min(dtm, dtc);
        if (t + dt >= t_max) {
            t = t_max;
            break;
        }
        t += dt;
        if (dtc <= dtm) {
            ++zc;
            if (closed_form) {
                k = variant == Variant::Base
                        ? static_cast<int>(sample_binomial(thin, k, spec.p()))
                        : 1 + static_cast<int>(sample_binomial(thin, k - 1.0, spec.p()));
            } else {
                k = sample_pmf(e->landing, uniform01(thin));
            }
        } else if (closed_form) {
            ++k;
        } else {
            double u = uniform01(birth) * e->move_rate;
            double cum = 0.0;
            int target = e->moves.back().first;
            for (const auto& [tg, r] : e->moves) {
                cum += r;
                if (u <= cum) { target = tg; break; }
            }
            k = target;
        }
        path.record(t, k, zc);
        if (++events >= event_cap) {
            path.event_capped = true;
            break;
        }
    }
    return path;
}

PathSample simulate_basic_fast(const ModelSpec& spec, long long x0, double t_max,
                               std::uint64_t seed, const std::vector<double>& record_at) {
    if (!spec.constrained || spec.thinning.kind != ThinningFamily::Kind::Binomial ||
        spec.q_k_fn || spec.alpha_k_fn || spec.beta_k_fn || spec.delta > 0 ||
        spec.multi_births || spec.rewiring_r > 0)
        throw ValidationError("simulate_basic_fast: requires the basic model");
    const double alpha = spec.alpha, beta = spec.beta, p = spec.p();
    std::mt19937_64 cat = make_stream(seed, StreamPurpose::CatastropheClock);
    std::mt19937_64 birth = make_stream(seed, StreamPurpose::BirthClock);
    std::mt19937_64 thin = make_stream(seed, StreamPurpose::Thinning);

    std::vector<double> recs = record_at;
    std::sort(recs.begin(), recs.end());
    size_t ri = 0;

    PathSample path;
    path.t_end = t_max;
    double t = 0.0, x = static_cast<double>(x0);
    long long zc = 0;
    path.record(t, x, zc);

    while (t < t_max) {
        if (x <= 0.0) {
            path.absorbed_at = t;
            for (; ri < recs.size(); ++ri)
                if (recs[ri] <= t_max) path.record(recs[ri], 0.0, zc);
            break;
        }
        double tc = beta > 0 ? t + exponential(cat, beta) : std::numeric_limits<double>::infinity();
        double stop = std::min(tc, t_max);
        while (ri < recs.size() && recs[ri] <= stop) {
            x = sample_yule_transition(birth, x, alpha, recs[ri] - t);
            t = recs[ri];
            path.record(t, x, zc);
            ++ri;
        }
        x = sample_yule_transition(birth, x, alpha, stop - t);
        t = stop;
        if (tc >= t_max) {
            path.record(t, x, zc);
            break;
        }
        x = sample_binomial(thin, x, p);  // catastrophe thinning
        ++zc;
        path.record(t, x, zc);
    }
    return path;
}

std::vector<WSample> w_limit_samples(const std::vector<PathSample>& paths,
                                     const ModelSpec& spec,
                                     const std::vector<double>& checkpoints,
                                     double survival_threshold) {
    std::vector<WSample> out;
    out.reserve(paths.size());
    for (const PathSample& path : paths) {
        WSample w;
        for (double t : checkpoints) {
            if (t > path.t_end) throw ValidationError("w_limit_samples: checkpoint beyond path");
            w.w.push_back(path.w_at(t, spec.alpha, spec.p()));
        }
        double last = checkpoints.empty() ? path.t_end : checkpoints.back();
        w.surviving = path.event_capped || path.state_at(last) >= survival_threshold;
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace ddsim
