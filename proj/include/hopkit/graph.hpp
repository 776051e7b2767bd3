#ifndef HOPKIT_GRAPH_HPP
#define HOPKIT_GRAPH_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hopkit {

using Vertex = std::int32_t;
using Weight = double;

constexpr Weight kInfinite = std::numeric_limits<Weight>::infinity();
constexpr Vertex kNoVertex = -1;

struct Edge {
    Vertex u;
    Vertex v;
    Weight w;
};

struct Neighbor {
    Vertex to;
    Weight w;
};

enum class GraphErrorKind {
    malformed_header,
    vertex_out_of_range,
    negative_weight,
    self_loop,
    invalid_params,
    not_unweighted,
    empty_source_set,
    unreachable,
    malformed_tree,
    target_not_in_tree,
};

struct GraphError : std::runtime_error {
    GraphErrorKind kind;
    GraphError(GraphErrorKind k, const std::string& msg)
        : std::runtime_error(msg), kind(k) {}
};

const char* to_string(GraphErrorKind k);

// Immutable undirected graph with nonnegative weights. Parallel edges are
// collapsed to the minimum weight on construction; self-loops are rejected.
class Graph {
public:
    Graph(Vertex n, std::vector<Edge> edges);

    static Graph parse(std::string_view text);
    static Graph read_file(const std::string& path);
    std::string serialize() const;
    void write_file(const std::string& path) const;

    Vertex vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }

    // Canonical edge list: u < v, sorted by (u, v).
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const Neighbor> neighbors(Vertex u) const {
        return {nbrs_.data() + offsets_[u], nbrs_.data() + offsets_[u + 1]};
    }
    int degree(Vertex u) const {
        return static_cast<int>(offsets_[u + 1] - offsets_[u]);
    }
    // Position of v in u's adjacency (its "port"), or -1.
    int port_of(Vertex u, Vertex v) const;

    bool all_unit_weights() const;
    bool has_vertex(Vertex u) const { return u >= 0 && u < n_; }

private:
    Vertex n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> nbrs_;
};

struct GenParams {
    std::string kind;  // path | grid | gnp | tree
    Vertex n = 0;      // total vertices (grid: rows*cols if rows set)
    double p = 0.0;    // gnp only
    Vertex rows = 0;   // grid only; 0 means near-square layout from n
    Vertex cols = 0;
    Weight wmin = 1.0;
    Weight wmax = 100.0;
    bool keep_lcc = false;  // gnp: retain largest connected component
    bool unit_weights = false;
};

Graph gen_graph(const GenParams& params, std::uint64_t seed);

// Multi-source shortest paths (Dijkstra). dist[v] = min over sources, parent
// pointers form shortest-path forests, root[v] = the source attaining the
// minimum (ties broken toward the smaller source id).
struct DistanceVector {
    std::vector<Weight> dist;
    std::vector<Vertex> parent;
    std::vector<Vertex> root;
};

DistanceVector exact_distances(const Graph& g, std::span<const Vertex> sources);

std::string distances_to_tsv(const DistanceVector& dv);

struct SourceInit {
    Vertex v;
    Weight init;
};

// Per-vertex forwarding gate for limited explorations: called as
// gate(vertex, current estimate); returning false bars the vertex from
// relaxing its edges onward (it still keeps the estimate it received).
using ForwardGate = std::function<bool(Vertex, Weight)>;

struct BoundedDistanceTable {
    std::int64_t beta = 0;
    std::vector<Weight> dist;
    std::vector<Vertex> parent;
    // Rounds actually executed before the table stopped changing (<= beta).
    std::int64_t rounds_executed = 0;
    // changed_at[v]: round at which v last improved, -1 for never/source-init.
    std::vector<std::int32_t> changed_at;
};

// One synchronous Bellman-Ford exploration, advanced round by round. Each
// step relaxes from the vertices whose estimate improved in the previous
// round (identical tables to relaxing from everyone, fewer messages). The
// gate is re-evaluated whenever a vertex would send.
class BellmanFordRunner {
public:
    // track_roots: carry source labels and order estimates lexicographically
    // by (dist, root), so equal-distance pivots resolve to the smallest id.
    BellmanFordRunner(const Graph& g, std::span<const Edge> extra,
                      std::span<const SourceInit> sources,
                      const ForwardGate* gate = nullptr, bool track_roots = false);

    // Runs one round; returns false (and changes nothing) once converged.
    bool step();
    std::int64_t rounds() const { return rounds_; }
    const std::vector<Weight>& dist() const { return dist_; }
    const std::vector<Vertex>& parent() const { return parent_; }
    const std::vector<Vertex>& root() const { return root_; }
    const std::vector<std::int32_t>& changed_at() const { return changed_at_; }
    // Vertices that improved in the last executed round, ascending.
    const std::vector<Vertex>& frontier() const { return frontier_; }
    // Vertices that actually sent in the last executed round (gate-filtered).
    const std::vector<Vertex>& senders() const { return senders_; }

private:
    const Graph& g_;
    const ForwardGate* gate_;
    bool track_roots_;
    std::vector<std::vector<Neighbor>> extra_adj_;
    std::vector<Weight> dist_, next_;
    std::vector<Vertex> parent_, next_parent_, root_, next_root_;
    std::vector<std::int32_t> changed_at_;
    std::vector<Vertex> frontier_, touched_, senders_;
    std::int64_t rounds_ = 0;
};

// Synchronous Bellman-Ford over g plus an optional extra edge set (treated
// undirected), for at most beta rounds, from the given initialized sources.
// Stops early once a round makes no change; the table is then exact for every
// beta' >= rounds_executed as well.
BoundedDistanceTable bounded_bf(const Graph& g, std::span<const Edge> extra,
                                std::span<const SourceInit> sources,
                                std::int64_t beta,
                                const ForwardGate* gate = nullptr);

// Convenience: plain graph, zero-init sources.
BoundedDistanceTable bounded_bf(const Graph& g, std::span<const Vertex> sources,
                                std::int64_t beta);

// Hop-diameter of the host graph (max BFS distance over reachable pairs).
int hop_diameter(const Graph& g);

// BFS tree from the smallest-id vertex of each component: parent array plus
// depth array (hop counts).
struct BfsTree {
    std::vector<Vertex> parent;
    std::vector<std::int32_t> depth;
    std::int32_t height = 0;
};
BfsTree bfs_tree(const Graph& g);

std::vector<Vertex> component_of(const Graph& g, Vertex s);

}  // namespace hopkit

#endif
