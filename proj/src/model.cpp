#include "ddsim/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ddsim {

double MultiBirths::limit_at(int j) const {
    if (j == -1) return limits.empty() ? 0.0 : limits[0];
    if (j >= 1 && j < static_cast<int>(limits.size())) return limits[j];
    return 0.0;
}

double MultiBirths::rate_at(int k, int j) const {
    if (rate) return rate(k, j);
    return limit_at(j);
}

double MultiBirths::alpha_b() const {
    double s = -limit_at(-1);
    for (int j = 1; j <= j_max; ++j) s += j * limit_at(j);
    return s;
}

double ModelSpec::gamma() const {
    double g = 1.0;
    if (q_k_fn) g = std::min(g, gamma1);
    if (thinning.kind == ThinningFamily::Kind::Custom)
        g = std::min({g, thinning.gamma2, thinning.gamma3});
    if (alpha_k_fn) g = std::min(g, gamma4);
    return g;
}

ModelSpec ModelSpec::basic(double p, double q) {
    ModelSpec s;
    s.thinning = ThinningFamily::binomial(p);
    s.q = q;
    s.alpha = q + p * (1.0 - q);
    s.beta = 1.0 - q;
    s.constrained = true;
    s.validate();
    return s;
}

void ModelSpec::validate() const {
    double pp = p();
    if (!(pp > 0.0 && pp < 1.0)) throw ValidationError("model: p must lie in (0,1)");
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("model: q must lie in [0,1)");
    if (delta < 0.0) throw ValidationError("model: delta must be >= 0");
    if (rewiring_r < 0.0) throw ValidationError("model: r must be >= 0");
    if (beta < 0.0) throw ValidationError("model: beta must be >= 0");
    if (constrained) {
        // q_l + p_l(1-q_l) must equal alpha for all l; probe a sweep of degrees.
        for (int k : {1, 2, 3, 5, 8, 13, 21, 34, 64, 128, 1000}) {
            double al = q_k(k) + thinning.mean_fraction(k) * (1.0 - q_k(k));
            if (std::fabs(al - alpha) > 1e-9) {
                std::ostringstream os;
                os << "model: constraint q_l + p_l(1-q_l) = alpha violated at l=" << k
                   << " (got " << al << ", alpha=" << alpha << ")";
                throw ValidationError(os.str());
            }
        }
    }
    if (multi_births) {
        const auto& mb = *multi_births;
        if (mb.j_max < 1 || mb.j_max > 64)
            throw ValidationError("model: multi_births j_max out of range");
        double total = 0.0;
        for (int j = 1; j <= mb.j_max; ++j) total += mb.limit_at(j);
        total += mb.limit_at(-1);
        if (!(total > 0.0)) throw ValidationError("model: multi_births rates must not vanish");
        for (int j = -1; j <= mb.j_max; ++j)
            if (j != 0 && mb.limit_at(j) < 0.0)
                throw ValidationError("model: multi_births rates must be >= 0");
    }
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) { ok = true; break; }
        if (!ok) throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    reject_unknown(j, {"p", "q", "r", "delta", "thinning", "multi_births", "perturbations"},
                   "model");
    if (!j.contains("p")) throw ValidationError("config: model requires 'p'");
    double p = j.at("p").get<double>();
    double q = j.value("q", 0.0);

    ModelSpec s;
    s.thinning = ThinningFamily::binomial(p);
    s.q = q;
    s.alpha = q + p * (1.0 - q);
    s.beta = 1.0 - q;
    s.delta = j.value("delta", 0.0);
    s.rewiring_r = j.value("r", 0.0);

    if (j.contains("thinning")) {
        const auto& t = j.at("thinning");
        reject_unknown(t, {"kind"}, "thinning");
        std::string kind = t.value("kind", "binomial");
        if (kind != "binomial")
            throw ValidationError("config: only 'binomial' thinning is configurable; custom "
                                  "families are library-level");
    }
    if (j.contains("multi_births")) {
        MultiBirths mb;
        mb.limits.assign(mb.j_max + 1, 0.0);
        mb.limits[1] = s.alpha;  // base single-birth rate unless overridden
        for (const auto& e : j.at("multi_births")) {
            reject_unknown(e, {"j", "rate"}, "multi_births[]");
            int jj = e.at("j").get<int>();
            double rate = e.at("rate").get<double>();
            if (jj == 0 || jj < -1 || jj > mb.j_max)
                throw ValidationError("config: multi_births j must be -1 or 1..j_max");
            mb.limits[jj == -1 ? 0 : jj] = rate;
        }
        s.multi_births = mb;
    }
    if (j.contains("perturbations")) {
        const auto& pe = j.at("perturbations");
        reject_unknown(pe, {"q"}, "perturbations");
        if (pe.contains("q")) {
            const auto& pq = pe.at("q");
            reject_unknown(pq, {"c", "gamma"}, "perturbations.q");
            double c = pq.at("c").get<double>();
            double g = pq.at("gamma").get<double>();
            double alpha = s.alpha;
            s.c1 = c;
            s.gamma1 = g;
            // q_k -> q + c k^-gamma, clamped; p_k co-varies to keep alpha fixed.
            s.q_k_fn = [q, c, g, alpha](int k) {
                double qk = q + c * std::pow(static_cast<double>(k), -g);
                double hi = std::min(alpha, 1.0 - 1e-9);
                return std::max(0.0, std::min(qk, hi));
            };
            auto qkf = s.q_k_fn;
            auto p_of = [alpha, qkf](int k) { return (alpha - qkf(k)) / (1.0 - qkf(k)); };
            s.thinning = ThinningFamily::custom(
                p,
                [p_of](int k, int jj) { return binomial_pmf(k, p_of(k))[jj]; },
                p_of,
                [p_of](int k) { return k * p_of(k) * (1.0 - p_of(k)); },
                c, g, c, g);
            s.beta_k_fn = [qkf](int k) { return 1.0 - qkf(k); };
        }
    }
    s.validate();
    return s;
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j;
    j["p"] = p();
    j["q"] = q;
    j["r"] = rewiring_r;
    j["delta"] = delta;
    j["thinning"] = {{"kind", thinning.kind == ThinningFamily::Kind::Binomial ? "binomial"
                                                                              : "custom"}};
    if (multi_births) {
        nlohmann::json arr = nlohmann::json::array();
        for (int jj = -1; jj <= multi_births->j_max; ++jj) {
            if (jj == 0) continue;
            double rate = multi_births->limit_at(jj);
            if (rate != 0.0) arr.push_back({{"j", jj}, {"rate", rate}});
        }
        j["multi_births"] = arr;
    }
    if (q_k_fn) j["perturbations"] = {{"q", {{"c", c1}, {"gamma", gamma1}}}};
    return j;
}

std::string ModelSpec::digest() const {
    std::string dump = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

ModelSpec load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config: parse error: ") + e.what());
    }
    // Top-level documents may wrap the model under "model" alongside run keys;
    // callers that need run keys parse them separately.
    if (j.contains("model")) return ModelSpec::from_json(j.at("model"));
    return ModelSpec::from_json(j);
}

}  // namespace ddsim
