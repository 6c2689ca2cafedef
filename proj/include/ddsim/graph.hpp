#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "ddsim/distribution.hpp"
#include "ddsim/model.hpp"

namespace ddsim {

/** Simple graph with sorted-array adjacency; grown one duplication at a time. */
struct DDGraph {
    std::vector<std::vector<int>> adj;
    int step = 0;

    int m() const { return static_cast<int>(adj.size()); }
    long long edge_count() const;
    static DDGraph complete(int m0);
    static DDGraph from_edges(int m0, const std::vector<std::pair<int, int>>& edges);
    void check_invariants() const;  // simple graph, sorted rows, degree <= m-1
};

struct DegreeCensus {
    int m = 0;
    std::map<int, long long> counts;  // degree -> N_{m,k}

    static DegreeCensus of(const DDGraph& g);
    long long total() const;
    long long degree_sum() const;
};

struct GraphOptions {
    enum class RewireMode { Auto, None, PerVertex, Bebek };
    RewireMode rewire = RewireMode::Auto;  // Auto: PerVertex when spec.r > 0
    bool link_source_copy = false;         // exploratory flag, off by default
};

/** One duplication step: copy a uniform vertex, thin, optionally rewire. */
void duplicate_step(DDGraph& g, const ModelSpec& spec, std::mt19937_64& rng,
                    const GraphOptions& opt = {});

/** Grow to target_m, reporting censuses at the requested checkpoints (ascending). */
std::vector<DegreeCensus> run_graph(DDGraph g, const ModelSpec& spec, int target_m,
                                    std::uint64_t seed, const std::vector<int>& checkpoints,
                                    const GraphOptions& opt = {});

DistributionVector census_to_distribution(const DegreeCensus& c);

}  // namespace ddsim
