#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ddsim/classify.hpp"
#include "ddsim/ctmc.hpp"
#include "ddsim/discrete.hpp"
#include "ddsim/graph.hpp"
#include "ddsim/model.hpp"
#include "ddsim/rng.hpp"
#include "ddsim/solver.hpp"
#include "ddsim/statlab.hpp"

using namespace ddsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitTolerance = 3;

struct Output {
    std::string path;  // empty: stdout
    std::ostringstream buf;

    template <class T>
    Output& operator<<(const T& v) {
        buf << v;
        return *this;
    }
    void flush() {
        if (path.empty()) {
            std::cout << buf.str();
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw ValidationError("cannot open output file: " + path);
            f << buf.str();
        }
    }
};

std::uint64_t effective_seed(std::uint64_t seed) {
    if (const char* env = std::getenv("DD_SEED")) return std::strtoull(env, nullptr, 10);
    return seed;
}

ModelSpec model_from(const std::string& config, double p, double q, double delta, double r) {
    ModelSpec spec;
    if (!config.empty()) {
        spec = load_model_config(config);
    } else {
        spec = ModelSpec::basic(p, q);
        spec.delta = delta;
        spec.rewiring_r = r;
    }
    spec.validate();
    return spec;
}

int cmd_classify(const ModelSpec& spec, Output& out) {
    out << "# config_digest " << spec.digest() << "\n";
    out << "process,verdict,margin,eta_star,region\n";
    for (Process pr : {Process::X_star, Process::X_tilde}) {
        RegimeReport rep = classify(spec, pr);
        out << to_string(pr) << "," << to_string(rep.verdict) << "," << rep.margin << ",";
        if (rep.eta_star) out << *rep.eta_star;
        out << ",";
        if (rep.region) out << to_string(*rep.region);
        out << "\n";
    }
    if (spec.multi_births) {
        RegimeReport rep = classify(spec, Process::X_star_b);
        out << to_string(Process::X_star_b) << "," << to_string(rep.verdict) << ","
            << rep.margin << ",,\n";
    }
    out.flush();
    return kExitOk;
}

int cmd_phase_diagram(int grid, Output& out) {
    out << "p,q,region\n";
    for (int i = 1; i < grid; ++i) {
        double p = static_cast<double>(i) / grid;
        for (int j = 0; j < grid; ++j) {
            double q = static_cast<double>(j) / grid;
            RegimeReport rep = classify(ModelSpec::basic(p, q), Process::X_star);
            out << p << "," << q << "," << (rep.region ? to_string(*rep.region) : "") << "\n";
        }
    }
    out.flush();
    return kExitOk;
}

int cmd_simulate_graph(const ModelSpec& spec, int m0, int target, long long replicas,
                       const std::vector<int>& checkpoints, std::uint64_t seed,
                       const std::string& rewire, Output& out) {
    GraphOptions opt;
    if (rewire == "none")
        opt.rewire = GraphOptions::RewireMode::None;
    else if (rewire == "per-vertex")
        opt.rewire = GraphOptions::RewireMode::PerVertex;
    else if (rewire == "bebek")
        opt.rewire = GraphOptions::RewireMode::Bebek;
    else if (rewire != "auto")
        throw ValidationError("unknown rewire mode: " + rewire);
    std::vector<int> cps = checkpoints;
    if (cps.empty()) cps.push_back(target);
    out << "# config_digest " << spec.digest() << "\n";
    out << "replica,m,k,count\n";
    for (long long rep = 0; rep < replicas; ++rep) {
        auto censuses = run_graph(DDGraph::complete(m0), spec, target,
                                  splitmix64(seed + 0x9e3779b97f4a7c15ULL * rep), cps, opt);
        for (const auto& c : censuses)
            for (const auto& [k, n] : c.counts)
                out << rep << "," << c.m << "," << k << "," << n << "\n";
    }
    out.flush();
    return kExitOk;
}

int cmd_simulate_tagged(const ModelSpec& spec, const std::string& variant, long long x0,
                        double t_max, long long m_max, long long m0, long long paths,
                        std::vector<double> checkpoints, std::uint64_t seed, Output& out) {
    const bool discrete = variant.rfind("discrete-", 0) == 0;
    if (checkpoints.empty())
        checkpoints.push_back(discrete ? static_cast<double>(m_max) : t_max);
    for (long long i = 0; i < paths; ++i) {
        std::uint64_t si = splitmix64(seed + 0x9e3779b97f4a7c15ULL * (i + 1));
        PathSample path;
        if (variant == "fast") {
            path = simulate_basic_fast(spec, x0, t_max, si, checkpoints);
        } else if (discrete) {
            DiscreteVariant dv;
            if (variant == "discrete-plain")
                dv = DiscreteVariant::Plain;
            else if (variant == "discrete-weighted")
                dv = DiscreteVariant::Weighted;
            else if (variant == "discrete-rewiring")
                dv = DiscreteVariant::RewiringInhomogeneous;
            else if (variant == "discrete-rewiring-limit")
                dv = DiscreteVariant::RewiringLimit;
            else
                throw ValidationError("unknown variant: " + variant);
            path = simulate_discrete_tagged(spec, dv, x0, m0, m_max, si);
        } else {
            Variant v;
            if (variant == "base")
                v = Variant::Base;
            else if (variant == "weighted")
                v = Variant::Weighted;
            else if (variant == "deaths")
                v = Variant::Deaths;
            else if (variant == "multibirth")
                v = Variant::MultiBirth;
            else if (variant == "rewiring-limit")
                v = Variant::RewiringLimit;
            else
                throw ValidationError("unknown variant: " + variant);
            path = simulate_ctmc(spec, v, x0, t_max, si);
        }
        for (double t : checkpoints) {
            if (t > path.t_end) continue;
            nlohmann::json rec{{"path", i},
                               {"t", t},
                               {"x", path.state_at(t)},
                               {"z", path.z_at(t)},
                               {"config_digest", spec.digest()}};
            if (!discrete) rec["w"] = path.w_at(t, spec.alpha, spec.p());
            out << rec.dump() << "\n";
        }
    }
    out.flush();
    return kExitOk;
}

int cmd_expected(const ModelSpec& spec, int m0, int m, int K, const std::string& variant,
                 Output& out) {
    Variant v = Variant::Base;
    if (variant == "rewiring") v = Variant::RewiringAtM;
    else if (variant != "base") throw ValidationError("unknown variant: " + variant);
    if (K <= 0) K = std::max(2 * m, 64);
    DistributionVector p0 = census_to_distribution(DegreeCensus::of(DDGraph::complete(m0)));
    DistributionVector res = discrete_recursion(p0, spec, m0, m, K, v);
    out << "# config_digest " << spec.digest() << "\n";
    out << "# deficit " << res.deficit << "\n";
    out << "k,mass\n";
    for (int k = 0; k <= res.K(); ++k) out << k << "," << res.mass[k] << "\n";
    out.flush();
    return kExitOk;
}

int cmd_quasi_check(const ModelSpec& spec, int i, const std::vector<double>& t_grid, int K,
                    double tol, Output& out) {
    double err = quasi_stationarity_check(spec, i, t_grid, K);
    out << "# config_digest " << spec.digest() << "\n";
    out << "i,K,max_relative_error\n";
    out << i << "," << K << "," << err << "\n";
    out.flush();
    return err <= tol ? kExitOk : kExitTolerance;
}

int cmd_couple(const ModelSpec& spec, int j0, long long m0, int jumps, std::uint64_t seed,
               Output& out) {
    CoupledPair cp = build_coupled_pair(spec, j0, m0, jumps, seed);
    out << "# config_digest " << spec.digest() << "\n";
    out << "n,state,step,s,s_tilde,delta\n";
    for (size_t n = 0; n < cp.states.size(); ++n)
        out << n << "," << cp.states[n] << "," << cp.n_step[n] << "," << cp.s[n] << ","
            << cp.s_tilde[n] << "," << cp.delta[n] << "\n";
    out.flush();
    return kExitOk;
}

int cmd_verify(const ModelSpec& spec, const std::string& suite, std::uint64_t seed,
               long long N, double tol, Output& out) {
    ExperimentReport rep;
    rep.id = suite;
    rep.config_digest = spec.digest();
    rep.seed = seed;
    if (suite == "absorption") {
        if (N <= 0) N = 2000;
        Estimate est = absorption_probability(spec, 1, 40.0, N, seed);
        Estimate far = absorption_probability(spec, 1, 80.0, N, seed + 1);
        rep.sample_size = N;
        rep.statistics = {{"absorbed_t40", est.value},
                          {"absorbed_t80", far.value},
                          {"ci_lo", est.lo},
                          {"ci_hi", est.hi}};
        RegimeReport r = classify(spec, Process::X_star);
        // ergodic regime: absorption grows toward 1 with the horizon
        rep.pass = r.verdict != Verdict::GeometricallyErgodic || far.value >= est.value - 0.02;
        rep.tolerances = {{"monotone_slack", 0.02}};
    } else if (suite == "clt") {
        if (N <= 0) N = 10000;
        if (tol <= 0) tol = 0.05;
        CltResult res = clt_test(spec, 1, 100.0, N, seed);
        rep.sample_size = N;
        rep.statistics = {{"max_dev", res.max_dev}, {"survival", res.survival}};
        rep.tolerances = {{"max_dev", tol}};
        rep.pass = res.max_dev <= tol;
    } else if (suite == "w-limit") {
        if (N <= 0) N = 4000;
        StabilizationResult res = w_stabilization(spec, 5, {20.0, 40.0, 80.0}, N, seed);
        rep.sample_size = N;
        rep.statistics = {{"medians", res.medians}, {"survivors", res.survivors}};
        rep.tolerances = {{"strictly_decreasing", true}};
        rep.pass = res.conclusive;
        for (size_t j = 1; j < res.medians.size(); ++j)
            if (res.medians[j] >= res.medians[j - 1]) rep.pass = false;
    } else if (suite == "stationary") {
        if (N <= 0) N = 20000;
        StationaryAgreement res = stationary_agreement(spec, 100000, 2000000, 400, 40.0, N, seed);
        rep.sample_size = N;
        rep.statistics = {{"occupation_gap", res.occupation_gap},
                          {"conditional_solver_gap", res.conditional_solver_gap},
                          {"conditional_mc_gap", res.conditional_mc_gap},
                          {"discrete_gap", res.discrete_gap}};
        rep.tolerances = {{"occupation_gap", 0.02},
                          {"conditional_solver_gap", 0.005},
                          {"conditional_mc_gap", 0.02},
                          {"discrete_gap", 0.02}};
        rep.pass = res.occupation_gap <= 0.02 && res.conditional_solver_gap <= 0.005 &&
                   res.conditional_mc_gap <= 0.02 && res.discrete_gap <= 0.02;
    } else if (suite == "quasi") {
        double worst = 0.0;
        for (int i : {1, 3})
            worst = std::max(worst, quasi_stationarity_check(spec, i, {0.5, 1.0, 2.0}, 400));
        rep.sample_size = 0;
        if (tol <= 0) tol = 1e-6;
        rep.statistics = {{"max_relative_error", worst}};
        rep.tolerances = {{"max_relative_error", tol}};
        rep.pass = worst <= tol;
    } else if (suite == "coupling") {
        if (N <= 0) N = 200000;
        std::mt19937_64 g = make_stream(seed, StreamPurpose::Coupling);
        bool ok = true;
        nlohmann::json stats = nlohmann::json::array();
        for (auto [m, b] : std::vector<std::pair<long long, double>>{{10, 0.5}, {1000, 0.5}}) {
            double sum = 0.0;
            double phi = b / (m + 1.0);
            double cphi = (-std::log1p(-phi) - phi) / (phi * phi);
            for (long long i = 0; i < N; ++i) {
                QuantileCouple qc = quantile_couple(m, 0.0, b, uniform01(g));
                sum += qc.v;
                double d = qc.e_b - qc.v;
                if (d < -1.0 / (qc.r + 1.0) - 1e-12 ||
                    d > cphi * b * qc.v / (m + 1.0) + 1e-12)
                    ok = false;
            }
            double mean = sum / N;
            stats.push_back({{"m", m}, {"b", b}, {"mean_v", mean}});
            if (std::fabs(mean - 1.0 / b) > 4.0 / (b * std::sqrt(static_cast<double>(N))))
                ok = false;
        }
        rep.sample_size = N;
        rep.statistics = {{"cases", stats}};
        rep.tolerances = {{"mean_sigmas", 4.0}, {"sandwich", "pathwise"}};
        rep.pass = ok;
    } else if (suite == "rewiring") {
        if (N <= 0) N = 200;
        double worst_ratio = 0.0;
        for (int k = 0; k <= 30; ++k)
            for (long long m : {100, 200, 300}) {
                if (m < k + 2) continue;
                double tv = rewiring_kernel_tv(spec, k, m);
                double bound = spec.rewiring_r * (k + 2.0) / (m * (m + 1.0));
                if (bound > 0) worst_ratio = std::max(worst_ratio, tv / bound);
            }
        RewiringCoupling rc = rewiring_coupling_experiment(spec, 3, {100, 1000}, 10.0, N, seed);
        rep.sample_size = N;
        rep.statistics = {{"worst_tv_ratio", worst_ratio},
                          {"divergence", rc.divergence},
                          {"slope", rc.slope}};
        rep.tolerances = {{"worst_tv_ratio", 1.0}, {"slope", -0.8}};
        rep.pass = worst_ratio <= 1.0 + 1e-9 && rc.slope <= -0.8;
    } else {
        throw ValidationError("unknown suite: " + suite);
    }
    out << rep.to_json().dump(2) << "\n";
    out.flush();
    return rep.pass ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"duplication-divergence model toolkit"};
    app.require_subcommand(1);

    std::string config, out_path, variant = "base", suite, rewire = "auto";
    double p = 0.5, q = 0.0, delta = 0.0, r = 0.0, t_max = 10.0, tol = -1.0;
    std::uint64_t seed = 1;
    long long x0 = 1, m_max = 1000, m0_ll = 10, paths = 1, N = -1, replicas = 1;
    int grid = 100, m0 = 5, m = 100, K = 0, i_state = 1, jumps = 100, target = 100;
    std::vector<double> t_grid{0.5, 1.0, 2.0}, checkpoints;
    std::vector<int> cps_int;

    auto add_model = [&](CLI::App* c) {
        c->add_option("--config", config, "model config file (JSON)");
        c->add_option("--p", p, "retention probability p");
        c->add_option("--q", q, "keep-all probability q");
        c->add_option("--delta", delta, "death rate");
        c->add_option("--r", r, "rewiring rate");
    };

    auto* c_classify = app.add_subcommand("classify", "regime classification");
    add_model(c_classify);
    c_classify->add_option("--out", out_path);

    auto* c_phase = app.add_subcommand("phase-diagram", "(p,q) region grid");
    c_phase->add_option("--grid", grid);
    c_phase->add_option("--out", out_path);

    auto* c_graph = app.add_subcommand("simulate-graph", "grow duplication graphs");
    add_model(c_graph);
    c_graph->add_option("--m0", m0);
    c_graph->add_option("--target-m", target);
    c_graph->add_option("--replicas", replicas);
    c_graph->add_option("--checkpoints", cps_int);
    c_graph->add_option("--seed", seed);
    c_graph->add_option("--rewire", rewire, "auto|none|per-vertex|bebek");
    c_graph->add_option("--out", out_path);

    auto* c_tagged = app.add_subcommand("simulate-tagged", "tagged-degree processes");
    add_model(c_tagged);
    c_tagged->add_option("--variant", variant,
                         "base|weighted|deaths|multibirth|rewiring-limit|fast|discrete-*");
    c_tagged->add_option("--x0", x0);
    c_tagged->add_option("--t-max", t_max);
    c_tagged->add_option("--m-max", m_max);
    c_tagged->add_option("--m0", m0_ll);
    c_tagged->add_option("--paths", paths);
    c_tagged->add_option("--checkpoints", checkpoints);
    c_tagged->add_option("--seed", seed);
    c_tagged->add_option("--out", out_path);

    auto* c_expected = app.add_subcommand("expected", "expected degree distribution");
    add_model(c_expected);
    c_expected->add_option("--m0", m0);
    c_expected->add_option("--m", m);
    c_expected->add_option("--trunc", K);
    c_expected->add_option("--variant", variant, "base|rewiring");
    c_expected->add_option("--out", out_path);

    auto* c_quasi = app.add_subcommand("quasi-check", "point-probability identity check");
    add_model(c_quasi);
    c_quasi->add_option("--i", i_state);
    c_quasi->add_option("--t-grid", t_grid);
    c_quasi->add_option("--trunc", K);
    c_quasi->add_option("--tol", tol);
    c_quasi->add_option("--out", out_path);

    auto* c_verify = app.add_subcommand("verify", "statistical verification suites");
    add_model(c_verify);
    c_verify->add_option("--suite", suite)->required();
    c_verify->add_option("--seed", seed);
    c_verify->add_option("--n", N);
    c_verify->add_option("--tol", tol);
    c_verify->add_option("--out", out_path);

    auto* c_couple = app.add_subcommand("couple", "discrete/continuous coupled pair");
    add_model(c_couple);
    c_couple->add_option("--j0", i_state);
    c_couple->add_option("--m0", m0_ll);
    c_couple->add_option("--jumps", jumps);
    c_couple->add_option("--seed", seed);
    c_couple->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        seed = effective_seed(seed);
        Output out;
        out.path = out_path;
        if (c_phase->parsed()) return cmd_phase_diagram(grid, out);
        ModelSpec spec = model_from(config, p, q, delta, r);
        if (c_classify->parsed()) return cmd_classify(spec, out);
        if (c_graph->parsed())
            return cmd_simulate_graph(spec, m0, target, replicas, cps_int, seed, rewire, out);
        if (c_tagged->parsed())
            return cmd_simulate_tagged(spec, variant, x0, t_max, m_max, m0_ll, paths,
                                       checkpoints, seed, out);
        if (c_expected->parsed()) return cmd_expected(spec, m0, m, K, variant, out);
        if (c_quasi->parsed()) {
            if (K <= 0) K = 400;
            if (tol <= 0) tol = 1e-6;
            return cmd_quasi_check(spec, i_state, t_grid, K, tol, out);
        }
        if (c_verify->parsed()) return cmd_verify(spec, suite, seed, N, tol, out);
        if (c_couple->parsed()) return cmd_couple(spec, i_state, m0_ll, jumps, seed, out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
