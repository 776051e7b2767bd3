#ifndef HOPKIT_HOPSET_HPP
#define HOPKIT_HOPSET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hopkit/graph.hpp"
#include "hopkit/hierarchy.hpp"

namespace hopkit {

// Oriented hopset edge: u -> v records that v lies in u's bunch. level is the
// hierarchy level of u when the edge was created.
struct HopsetEdge {
    Vertex u;
    Vertex v;
    Weight w;
    std::int16_t level;
};

class Hopset {
public:
    explicit Hopset(Vertex n = 1) : n_(n) {}

    Vertex vertex_count() const { return n_; }
    void add(Vertex u, Vertex v, Weight w, int level);
    void merge(const Hopset& other);
    // Sort by (u, v) and keep the lightest edge per ordered pair.
    void seal();

    const std::vector<HopsetEdge>& edges() const { return edges_; }
    std::size_t size() const { return edges_.size(); }
    std::vector<Edge> edge_list() const;
    int max_out_degree() const;
    std::vector<std::size_t> per_level_counts() const;

    std::string serialize() const;  // lines "u v w level"
    static Hopset parse(std::string_view text, Vertex n);
    void write_file(const std::string& path) const;
    static Hopset read_file(const std::string& path, Vertex n);

    // Guarantee metadata recorded by the construction that produced this set.
    double recorded_beta = 0.0;
    double recorded_eps = 0.0;
    int kprime = 0;

private:
    Vertex n_ = 1;
    std::vector<HopsetEdge> edges_;
    bool sealed_ = true;
};

// Pivot and bunch of one vertex at its own level. members excludes the vertex
// itself; the pivot (nearest next-level vertex, smallest id on ties) is listed
// separately and is also a bunch member by definition.
struct Bunch {
    Vertex pivot = kNoVertex;
    Weight pivot_dist = kInfinite;
    std::vector<std::pair<Vertex, Weight>> members;  // (v, d_G(u,v)), ascending v
};

struct BunchSet {
    std::vector<Bunch> by_vertex;
};

// Exact bunches via truncated Dijkstra explorations halting at the pivot
// radius; radii come from one multi-source pass per level rooted at A_{i+1}.
BunchSet compute_bunches(const Graph& g, const LevelHierarchy& h);

Hopset build_hopset(const Graph& g, const HopsetParams& params, std::uint64_t seed);

// Same construction on an unweighted graph, improved sampling; the result is
// meant to be read as a standalone emulator (distances measured in H alone).
Hopset build_emulator(const Graph& g, int k, std::uint64_t seed);

// Bootstrapped construction: stage 1 is the level-by-level build capped at
// ceil(log2 n) hop scales; stage j+1 reruns it on the graph plus all previous
// stages with cap ceil(log2 beta_j) and a rescaled per-stage eps. Returns the
// union of all stages; recorded_beta is the last stage's hopbound.
Hopset recursive_hopset(const Graph& g, const HopsetParams& params, int iterations,
                        std::uint64_t seed);

std::string hopset_stats_json(const Hopset& h, Vertex n, const HopsetParams& params);

}  // namespace hopkit

#endif
