#include "ddsim/graph.hpp"

#include <algorithm>
#include <cmath>

#include "ddsim/rng.hpp"

namespace ddsim {

long long DDGraph::edge_count() const {
    long long s = 0;
    for (const auto& row : adj) s += static_cast<long long>(row.size());
    return s / 2;
}

DDGraph DDGraph::complete(int m0) {
    if (m0 < 1) throw ValidationError("graph: m0 must be >= 1");
    DDGraph g;
    g.adj.resize(m0);
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j)
            if (j != i) g.adj[i].push_back(j);
    return g;
}

DDGraph DDGraph::from_edges(int m0, const std::vector<std::pair<int, int>>& edges) {
    DDGraph g;
    g.adj.resize(m0);
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= m0 || b >= m0 || a == b)
            throw ValidationError("graph: invalid edge");
        g.adj[a].push_back(b);
        g.adj[b].push_back(a);
    }
    for (auto& row : g.adj) {
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end())
            throw ValidationError("graph: duplicate edge");
    }
    return g;
}

void DDGraph::check_invariants() const {
    int n = m();
    for (int i = 0; i < n; ++i) {
        const auto& row = adj[i];
        if (!std::is_sorted(row.begin(), row.end()))
            throw ValidationError("graph: adjacency not sorted");
        if (std::adjacent_find(row.begin(), row.end()) != row.end())
            throw ValidationError("graph: multi-edge");
        for (int u : row) {
            if (u < 0 || u >= n || u == i) throw ValidationError("graph: bad neighbor id");
            if (!std::binary_search(adj[u].begin(), adj[u].end(), i))
                throw ValidationError("graph: asymmetric edge");
        }
    }
}

DegreeCensus DegreeCensus::of(const DDGraph& g) {
    DegreeCensus c;
    c.m = g.m();
    for (const auto& row : g.adj) ++c.counts[static_cast<int>(row.size())];
    return c;
}

long long DegreeCensus::total() const {
    long long s = 0;
    for (const auto& [k, n] : counts) s += n;
    return s;
}

long long DegreeCensus::degree_sum() const {
    long long s = 0;
    for (const auto& [k, n] : counts) s += static_cast<long long>(k) * n;
    return s;
}

namespace {

int sample_pmf(const std::vector<double>& pmf, std::mt19937_64& rng) {
    double u = uniform01(rng);
    double cum = 0.0;
    for (size_t j = 0; j < pmf.size(); ++j) {
        cum += pmf[j];
        if (u <= cum) return static_cast<int>(j);
    }
    return static_cast<int>(pmf.size()) - 1;
}

// Uniform j-subset by partial Fisher-Yates over a scratch copy.
std::vector<int> uniform_subset(std::vector<int> pool, int j, std::mt19937_64& rng) {
    int n = static_cast<int>(pool.size());
    for (int i = 0; i < j; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(j);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

void duplicate_step(DDGraph& g, const ModelSpec& spec, std::mt19937_64& rng,
                    const GraphOptions& opt) {
    const int m = g.m();
    if (m < 1) throw ValidationError("graph: empty graph");
    std::uniform_int_distribution<int> pickv(0, m - 1);
    const int v = pickv(rng);
    const std::vector<int>& nbrs = g.adj[v];
    const int k = static_cast<int>(nbrs.size());

    std::vector<int> retained;
    if (uniform01(rng) < spec.q_k(k)) {
        retained = nbrs;  // copy keeps the full neighborhood
    } else if (k > 0) {
        int j;
        if (spec.thinning.kind == ThinningFamily::Kind::Binomial) {
            std::binomial_distribution<int> bin(k, spec.thinning.limit_p);
            j = bin(rng);
        } else {
            j = sample_pmf(spec.thinning.row(k), rng);
        }
        retained = uniform_subset(nbrs, j, rng);
    }

    GraphOptions::RewireMode mode = opt.rewire;
    if (mode == GraphOptions::RewireMode::Auto)
        mode = spec.rewiring_r > 0 ? GraphOptions::RewireMode::PerVertex
                                   : GraphOptions::RewireMode::None;

    if (mode == GraphOptions::RewireMode::PerVertex && spec.rewiring_r > 0) {
        // Every vertex other than the source and its neighbours links to the
        // copy independently with probability r/m.
        const double pr = std::min(1.0, spec.rewiring_r / m);
        std::vector<char> excluded(m, 0);
        excluded[v] = 1;
        for (int u : nbrs) excluded[u] = 1;
        for (int u = 0; u < m; ++u)
            if (!excluded[u] && uniform01(rng) < pr) retained.push_back(u);
        std::sort(retained.begin(), retained.end());
    } else if (mode == GraphOptions::RewireMode::Bebek && spec.rewiring_r > 0) {
        // Extra-link count ~ Po(r) truncated at m-1, targets drawn without
        // replacement from all vertices except the source; duplicates merged.
        std::poisson_distribution<int> po(spec.rewiring_r);
        int c = std::min(po(rng), m - 1);
        std::vector<int> pool;
        pool.reserve(m - 1);
        for (int u = 0; u < m; ++u)
            if (u != v) pool.push_back(u);
        std::vector<int> extra = uniform_subset(std::move(pool), c, rng);
        retained.insert(retained.end(), extra.begin(), extra.end());
        std::sort(retained.begin(), retained.end());
        retained.erase(std::unique(retained.begin(), retained.end()), retained.end());
    }

    if (opt.link_source_copy) {
        retained.push_back(v);
        std::sort(retained.begin(), retained.end());
    }

    g.adj.emplace_back(retained);
    for (int u : retained) g.adj[u].push_back(m);  // m is the largest id: stays sorted
    ++g.step;
}

std::vector<DegreeCensus> run_graph(DDGraph g, const ModelSpec& spec, int target_m,
                                    std::uint64_t seed, const std::vector<int>& checkpoints,
                                    const GraphOptions& opt) {
    if (target_m < g.m()) throw ValidationError("run_graph: target_m below current m");
    for (int c : checkpoints)
        if (c < g.m() || c > target_m)
            throw ValidationError("run_graph: checkpoint outside [m0, target_m]");
    std::mt19937_64 rng = make_stream(seed, StreamPurpose::GraphSteps);
    std::vector<DegreeCensus> out;
    auto maybe_report = [&]() {
        if (std::find(checkpoints.begin(), checkpoints.end(), g.m()) != checkpoints.end())
            out.push_back(DegreeCensus::of(g));
    };
    maybe_report();
    while (g.m() < target_m) {
        duplicate_step(g, spec, rng, opt);
        maybe_report();
    }
    return out;
}

DistributionVector census_to_distribution(const DegreeCensus& c) {
    if (c.m <= 0 || c.counts.empty()) throw ValidationError("census: empty");
    int kmax = c.counts.rbegin()->first;
    DistributionVector d;
    d.mass.assign(kmax + 1, 0.0);
    for (const auto& [k, n] : c.counts) d.mass[k] = static_cast<double>(n) / c.m;
    return d;
}

}  // namespace ddsim
