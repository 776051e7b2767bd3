#ifndef HOPKIT_SIM_HPP
#define HOPKIT_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopkit/graph.hpp"
#include "hopkit/hopset.hpp"

namespace hopkit {

enum class Fidelity { costed, faithful };

const char* to_string(Fidelity f);
Fidelity fidelity_from_string(const std::string& s);

struct SimLevelRecord {
    int l = 0;  // hop-scale index
    int i = 0;  // hierarchy level within the scale
    std::uint64_t rounds = 0;
    std::uint64_t max_congestion = 0;  // per-vertex messages in one step
};

// Round, congestion, and memory accounting for one simulated execution.
// Both fidelities run the same synchronous relaxation schedule and produce
// identical outputs; faithful derives rounds from per-step message queues
// (capacity one message per channel per round), costed charges the product
// schedule steps x max-congestion plus broadcast windows.
struct SimTrace {
    std::string mode;  // clique | congest
    Fidelity fidelity = Fidelity::costed;
    std::uint64_t rounds = 0;
    std::vector<SimLevelRecord> per_level;
    std::uint64_t peak_memory_words = 0;
    std::uint64_t max_congestion = 0;

    void add(const SimTrace& other);
    std::string to_json() const;
};

// Knobs shared by the level-by-level constructions. Defaults follow the
// derivations in the construction itself; overrides exist for the recursive
// bootstrap, which reruns the build with a capped scale count and its own
// eps split.
struct DistributedOptions {
    Fidelity fidelity = Fidelity::costed;
    int t_stride = 1;
    int level_cap = 0;          // 0: ceil(log2 of the vertex universe)
    double eps_step = 0.0;      // 0: eps / (2 * level_cap)
    std::vector<Edge> base_extra;  // joined into every working graph
};

// Level-by-level hopset in the all-pairs-channels model. Scales l run over
// stride multiples up to the cap; within a scale, level i explores the
// working graph G_i = G u H^(l-stride) u H_{i-1} (stage 1: rooted at A_{i+1};
// stage 2: per-root limited explorations at half the depth and half the pivot
// estimate). Records beta = (3/delta)^k' with delta = eps_step/(15 k').
std::pair<Hopset, SimTrace> run_clique_hopset(const Graph& g,
                                              const HopsetParams& params, double eps,
                                              std::uint64_t seed,
                                              const DistributedOptions& opt = {});

// Bootstrapped construction (declared in hopset.hpp, implemented here).

// Virtual graph spec: vertices V' of the host, edges = B-bounded host
// distances between them. Never materialized; explorations realize one
// relaxation of E' as a B-round host wave.
struct VirtualGraph {
    std::vector<Vertex> vprime;  // ascending host ids
    std::int64_t B = 0;

    bool contains(Vertex v) const;
};

VirtualGraph make_virtual_graph(const Graph& host, double sample_prob, std::int64_t B,
                                std::uint64_t seed);
VirtualGraph make_virtual_graph(std::vector<Vertex> vprime, std::int64_t B);

// Test-only oracle helper lives in tests; the library never builds E'.

struct SmallMemoryBFResult {
    BoundedDistanceTable table;      // estimates on V' (host-indexed, inf off V')
    std::vector<Weight> host_dist;   // persisted smallest wave value per host vertex
    std::vector<Vertex> host_parent;
    SimTrace trace;
};

// Lemma-style small-memory Bellman-Ford on G'' = (V', E' u H): beta
// iterations, each realized as one B-round host wave plus a BFS-tree
// broadcast of the oriented hopset edges with randomized start rounds.
SmallMemoryBFResult bf_small_memory(const Graph& host, const VirtualGraph& vg,
                                    const Hopset& hopset,
                                    std::span<const SourceInit> sources,
                                    std::int64_t beta, Fidelity fidelity,
                                    std::uint64_t seed);

// Same level-by-level construction as run_clique_hopset, but over the
// implicit G'; every exploration step goes through the host realization and
// host vertices apply the forwarding thresholds too.
std::pair<Hopset, SimTrace> run_congest_hopset(const Graph& host,
                                               const VirtualGraph& vg,
                                               const HopsetParams& params, double eps,
                                               std::uint64_t seed,
                                               const DistributedOptions& opt = {});

struct ReportedPath {
    std::vector<Vertex> hosts;  // host vertices from edge.u to edge.v inclusive
};

struct RegistryEntry {
    std::int32_t edge_id;
    Weight d_to_u;
    Weight d_to_v;
    Vertex prev;  // path neighbor toward edge.u (kNoVertex at the endpoint)
    Vertex next;  // path neighbor toward edge.v
};

struct PathReportingHopset {
    Hopset hopset;
    std::vector<ReportedPath> paths;                   // parallel to hopset.edges()
    std::vector<std::vector<RegistryEntry>> registry;  // per host vertex
    std::size_t max_registry_entries = 0;
};

// Cumulative variant: previous-scale hopsets stay in the working graphs, the
// stage-1 exploration deepens to 8 beta k' log n + 1 steps, and every final
// edge carries the host path that implements it, mirrored into per-vertex
// registries.
std::pair<PathReportingHopset, SimTrace> run_path_reporting(
    const Graph& host, const VirtualGraph& vg, const HopsetParams& params,
    double eps, std::uint64_t seed, const DistributedOptions& opt = {});

}  // namespace hopkit

#endif
