#include "hopkit/graph.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "hopkit/rand.hpp"

namespace hopkit {

const char* to_string(GraphErrorKind k) {
    switch (k) {
        case GraphErrorKind::malformed_header: return "MalformedHeader";
        case GraphErrorKind::vertex_out_of_range: return "VertexOutOfRange";
        case GraphErrorKind::negative_weight: return "NegativeWeight";
        case GraphErrorKind::self_loop: return "SelfLoop";
        case GraphErrorKind::invalid_params: return "InvalidParams";
        case GraphErrorKind::not_unweighted: return "NotUnweighted";
        case GraphErrorKind::empty_source_set: return "EmptySourceSet";
        case GraphErrorKind::unreachable: return "Unreachable";
        case GraphErrorKind::malformed_tree: return "MalformedTree";
        case GraphErrorKind::target_not_in_tree: return "TargetNotInTree";
    }
    return "Unknown";
}

Graph::Graph(Vertex n, std::vector<Edge> edges) : n_(n) {
    if (n < 1) {
        throw GraphError(GraphErrorKind::invalid_params, "vertex count must be >= 1");
    }
    for (auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
            throw GraphError(GraphErrorKind::vertex_out_of_range,
                             "edge endpoint out of range: " + std::to_string(e.u) +
                                 " " + std::to_string(e.v));
        }
        if (e.u == e.v) {
            throw GraphError(GraphErrorKind::self_loop,
                             "self-loop at vertex " + std::to_string(e.u));
        }
        if (!(e.w >= 0) || std::isnan(e.w) || std::isinf(e.w)) {
            throw GraphError(GraphErrorKind::negative_weight,
                             "edge weight must be finite and nonnegative");
        }
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.u != b.u) return a.u < b.u;
        if (a.v != b.v) return a.v < b.v;
        return a.w < b.w;
    });
    edges_.reserve(edges.size());
    for (const auto& e : edges) {
        if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
            continue;  // parallel edge, keep the minimum weight (list is sorted)
        }
        edges_.push_back(e);
    }

    std::vector<int> deg(n_, 0);
    for (const auto& e : edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (Vertex v = 0; v < n_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
    nbrs_.resize(edges_.size() * 2);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
        nbrs_[cursor[e.u]++] = {e.v, e.w};
        nbrs_[cursor[e.v]++] = {e.u, e.w};
    }
    // Adjacency sorted by neighbor id; ports are positions in this order.
    for (Vertex v = 0; v < n_; ++v) {
        std::sort(nbrs_.begin() + offsets_[v], nbrs_.begin() + offsets_[v + 1],
                  [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
    }
}

int Graph::port_of(Vertex u, Vertex v) const {
    auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v,
                               [](const Neighbor& a, Vertex x) { return a.to < x; });
    if (it == nb.end() || it->to != v) return -1;
    return static_cast<int>(it - nb.begin());
}

bool Graph::all_unit_weights() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [](const Edge& e) { return e.w == 1.0; });
}

namespace {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r' ||
                                  s[pos] == '\n'))
            ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    template <typename T>
    bool next(T& out) {
        skip_ws();
        if (pos >= s.size()) return false;
        auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), out);
        if (ec != std::errc()) return false;
        pos = static_cast<std::size_t>(ptr - s.data());
        return true;
    }
};

}  // namespace

Graph Graph::parse(std::string_view text) {
    Cursor c{text};
    long long n = 0, m = 0;
    if (!c.next(n) || !c.next(m) || n < 1 || m < 0) {
        throw GraphError(GraphErrorKind::malformed_header,
                         "expected header line \"n m\"");
    }
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
        long long u = 0, v = 0;
        double w = 0;
        if (!c.next(u) || !c.next(v) || !c.next(w)) {
            throw GraphError(GraphErrorKind::malformed_header,
                             "truncated edge list at edge " + std::to_string(i));
        }
        if (u < 0 || u >= n || v < 0 || v >= n) {
            throw GraphError(GraphErrorKind::vertex_out_of_range,
                             "edge endpoint out of range at edge " + std::to_string(i));
        }
        if (w < 0) {
            throw GraphError(GraphErrorKind::negative_weight,
                             "negative weight at edge " + std::to_string(i));
        }
        edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v), w});
    }
    if (!c.done()) {
        throw GraphError(GraphErrorKind::malformed_header, "trailing data after edges");
    }
    return Graph(static_cast<Vertex>(n), std::move(edges));
}

Graph Graph::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {

std::string format_weight(Weight w) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), w);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

std::string Graph::serialize() const {
    std::string out = std::to_string(n_) + " " + std::to_string(edges_.size()) + "\n";
    for (const auto& e : edges_) {
        out += std::to_string(e.u) + " " + std::to_string(e.v) + " " +
               format_weight(e.w) + "\n";
    }
    return out;
}

void Graph::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << serialize();
}

namespace {

Weight gen_weight(const GenParams& p, std::uint64_t seed, std::uint64_t a,
                  std::uint64_t b) {
    if (p.unit_weights) return 1.0;
    return p.wmin + (p.wmax - p.wmin) * rnd::unit(seed, rnd::tag::gen_weight, a, b);
}

}  // namespace

Graph gen_graph(const GenParams& params, std::uint64_t seed) {
    const Vertex n = params.n;
    if (n < 1) throw GraphError(GraphErrorKind::invalid_params, "n must be >= 1");
    if (params.wmin < 0 || params.wmax < params.wmin) {
        throw GraphError(GraphErrorKind::invalid_params, "bad weight range");
    }
    std::vector<Edge> edges;
    if (params.kind == "path") {
        for (Vertex v = 0; v + 1 < n; ++v) {
            edges.push_back({v, static_cast<Vertex>(v + 1),
                             gen_weight(params, seed, v, v + 1)});
        }
    } else if (params.kind == "grid") {
        Vertex rows = params.rows, cols = params.cols;
        if (rows <= 0 || cols <= 0) {
            rows = static_cast<Vertex>(std::floor(std::sqrt(double(n))));
            if (rows < 1) rows = 1;
            cols = (n + rows - 1) / rows;
        }
        const Vertex total = rows * cols;
        auto id = [cols](Vertex r, Vertex c) { return r * cols + c; };
        for (Vertex r = 0; r < rows; ++r) {
            for (Vertex c = 0; c < cols; ++c) {
                if (c + 1 < cols)
                    edges.push_back({id(r, c), id(r, c + 1),
                                     gen_weight(params, seed, id(r, c), id(r, c + 1))});
                if (r + 1 < rows)
                    edges.push_back({id(r, c), id(r + 1, c),
                                     gen_weight(params, seed, id(r, c), id(r + 1, c))});
            }
        }
        return Graph(total, std::move(edges));
    } else if (params.kind == "gnp") {
        if (!(params.p > 0.0) || params.p > 1.0) {
            throw GraphError(GraphErrorKind::invalid_params, "gnp needs 0 < p <= 1");
        }
        for (Vertex u = 0; u < n; ++u) {
            for (Vertex v = u + 1; v < n; ++v) {
                if (rnd::unit(seed, rnd::tag::gnp_edge, u, v) < params.p) {
                    edges.push_back({u, v, gen_weight(params, seed, u, v)});
                }
            }
        }
        Graph g(n, std::move(edges));
        if (!params.keep_lcc) return g;
        // Retain the largest connected component, smallest seed vertex on ties,
        // relabeling vertices in increasing order of old id.
        std::vector<char> seen(n, 0);
        std::vector<Vertex> best;
        for (Vertex s = 0; s < n; ++s) {
            if (seen[s]) continue;
            auto comp = component_of(g, s);
            for (Vertex v : comp) seen[v] = 1;
            if (comp.size() > best.size()) best = std::move(comp);
        }
        std::sort(best.begin(), best.end());
        std::vector<Vertex> remap(n, kNoVertex);
        for (std::size_t i = 0; i < best.size(); ++i) remap[best[i]] = Vertex(i);
        std::vector<Edge> kept;
        for (const auto& e : g.edges()) {
            if (remap[e.u] != kNoVertex && remap[e.v] != kNoVertex) {
                kept.push_back({remap[e.u], remap[e.v], e.w});
            }
        }
        return Graph(static_cast<Vertex>(best.size()), std::move(kept));
    } else if (params.kind == "tree") {
        for (Vertex v = 1; v < n; ++v) {
            auto parent = static_cast<Vertex>(
                rnd::below(static_cast<std::uint64_t>(v), seed, rnd::tag::tree_parent, v));
            edges.push_back({parent, v, gen_weight(params, seed, parent, v)});
        }
    } else {
        throw GraphError(GraphErrorKind::invalid_params,
                         "unknown generator kind: " + params.kind);
    }
    return Graph(n, std::move(edges));
}

DistanceVector exact_distances(const Graph& g, std::span<const Vertex> sources) {
    if (sources.empty()) {
        throw GraphError(GraphErrorKind::empty_source_set, "no sources given");
    }
    const Vertex n = g.vertex_count();
    DistanceVector dv;
    dv.dist.assign(n, kInfinite);
    dv.parent.assign(n, kNoVertex);
    dv.root.assign(n, kNoVertex);

    // Keyed by (dist, root, vertex) so pivot ties resolve to the smallest
    // source id regardless of heap internals.
    using Item = std::tuple<Weight, Vertex, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (Vertex s : sources) {
        if (!g.has_vertex(s)) {
            throw GraphError(GraphErrorKind::vertex_out_of_range, "bad source id");
        }
        if (dv.dist[s] == 0 && dv.root[s] != kNoVertex && dv.root[s] <= s) continue;
        dv.dist[s] = 0;
        dv.root[s] = std::min(dv.root[s] == kNoVertex ? s : dv.root[s], s);
        pq.push({0.0, dv.root[s], s});
    }
    while (!pq.empty()) {
        auto [d, r, u] = pq.top();
        pq.pop();
        if (d != dv.dist[u] || r != dv.root[u]) continue;
        for (const auto& nb : g.neighbors(u)) {
            const Weight nd = d + nb.w;
            if (nd < dv.dist[nb.to] ||
                (nd == dv.dist[nb.to] && r < dv.root[nb.to])) {
                dv.dist[nb.to] = nd;
                dv.parent[nb.to] = u;
                dv.root[nb.to] = r;
                pq.push({nd, r, nb.to});
            }
        }
    }
    return dv;
}

std::string distances_to_tsv(const DistanceVector& dv) {
    std::string out = "vertex\tdistance\tparent\n";
    for (std::size_t v = 0; v < dv.dist.size(); ++v) {
        out += std::to_string(v) + "\t";
        out += dv.dist[v] == kInfinite ? "inf" : format_weight(dv.dist[v]);
        out += "\t";
        out += dv.parent[v] == kNoVertex ? "-" : std::to_string(dv.parent[v]);
        out += "\n";
    }
    return out;
}

BellmanFordRunner::BellmanFordRunner(const Graph& g, std::span<const Edge> extra,
                                     std::span<const SourceInit> sources,
                                     const ForwardGate* gate, bool track_roots)
    : g_(g), gate_(gate), track_roots_(track_roots) {
    const Vertex n = g.vertex_count();
    dist_.assign(n, kInfinite);
    parent_.assign(n, kNoVertex);
    changed_at_.assign(n, -1);
    if (track_roots_) root_.assign(n, kNoVertex);
    for (const auto& s : sources) {
        if (!g.has_vertex(s.v) || s.init < 0) {
            throw GraphError(GraphErrorKind::invalid_params, "bad source init");
        }
        if (s.init < dist_[s.v] ||
            (track_roots_ && s.init == dist_[s.v] &&
             (root_[s.v] == kNoVertex || s.v < root_[s.v]))) {
            dist_[s.v] = s.init;
            if (track_roots_) root_[s.v] = s.v;
        }
    }
    for (Vertex v = 0; v < n; ++v) {
        if (dist_[v] < kInfinite) frontier_.push_back(v);
    }
    next_ = dist_;
    next_parent_ = parent_;
    next_root_ = root_;
    if (!extra.empty()) {
        extra_adj_.resize(n);
        for (const auto& e : extra) {
            extra_adj_[e.u].push_back({e.v, e.w});
            extra_adj_[e.v].push_back({e.u, e.w});
        }
        for (auto& lst : extra_adj_) {
            std::sort(lst.begin(), lst.end(), [](const Neighbor& a, const Neighbor& b) {
                return a.to < b.to;
            });
        }
    }
}

bool BellmanFordRunner::step() {
    touched_.clear();
    senders_.clear();
    // Relaxing only from last round's improvers yields the same tables as
    // relaxing from every vertex: an unimproved sender's value was already
    // offered in an earlier round.
    for (Vertex u : frontier_) {
        const Weight du = dist_[u];
        if (gate_ && !(*gate_)(u, du)) continue;
        senders_.push_back(u);
        const Vertex ru = track_roots_ ? root_[u] : kNoVertex;
        auto relax = [&](Vertex v, Weight w) {
            const Weight nd = du + w;
            const bool better =
                nd < next_[v] ||
                (track_roots_ && nd == next_[v] && next_root_[v] != kNoVertex &&
                 ru < next_root_[v]);
            if (better) {
                if (next_[v] == dist_[v] &&
                    (!track_roots_ || next_root_[v] == root_[v])) {
                    touched_.push_back(v);
                }
                next_[v] = nd;
                next_parent_[v] = u;
                if (track_roots_) next_root_[v] = ru;
            }
        };
        for (const auto& nb : g_.neighbors(u)) relax(nb.to, nb.w);
        if (!extra_adj_.empty()) {
            for (const auto& nb : extra_adj_[u]) relax(nb.to, nb.w);
        }
    }
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
    frontier_.clear();
    ++rounds_;
    for (Vertex v : touched_) {
        const bool better =
            next_[v] < dist_[v] ||
            (track_roots_ && next_[v] == dist_[v] && root_[v] != kNoVertex &&
             next_root_[v] < root_[v]);
        if (better) {
            dist_[v] = next_[v];
            parent_[v] = next_parent_[v];
            if (track_roots_) root_[v] = next_root_[v];
            changed_at_[v] = static_cast<std::int32_t>(rounds_);
            frontier_.push_back(v);
        }
    }
    if (frontier_.empty()) {
        --rounds_;
        return false;
    }
    return true;
}

BoundedDistanceTable bounded_bf(const Graph& g, std::span<const Edge> extra,
                                std::span<const SourceInit> sources,
                                std::int64_t beta, const ForwardGate* gate) {
    if (beta < 0) {
        throw GraphError(GraphErrorKind::invalid_params, "beta must be >= 0");
    }
    BellmanFordRunner run(g, extra, sources, gate);
    for (std::int64_t round = 1; round <= beta; ++round) {
        if (!run.step()) break;
    }
    BoundedDistanceTable t;
    t.beta = beta;
    t.dist = run.dist();
    t.parent = run.parent();
    t.changed_at = run.changed_at();
    t.rounds_executed = run.rounds();
    return t;
}

BoundedDistanceTable bounded_bf(const Graph& g, std::span<const Vertex> sources,
                                std::int64_t beta) {
    std::vector<SourceInit> init;
    init.reserve(sources.size());
    for (Vertex s : sources) init.push_back({s, 0.0});
    return bounded_bf(g, {}, init, beta);
}

BfsTree bfs_tree(const Graph& g) {
    const Vertex n = g.vertex_count();
    BfsTree t;
    t.parent.assign(n, kNoVertex);
    t.depth.assign(n, -1);
    std::deque<Vertex> q;
    for (Vertex root = 0; root < n; ++root) {
        if (t.depth[root] >= 0) continue;
        t.depth[root] = 0;
        q.push_back(root);
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop_front();
            t.height = std::max(t.height, t.depth[u]);
            for (const auto& nb : g.neighbors(u)) {
                if (t.depth[nb.to] < 0) {
                    t.depth[nb.to] = t.depth[u] + 1;
                    t.parent[nb.to] = u;
                    q.push_back(nb.to);
                }
            }
        }
    }
    return t;
}

int hop_diameter(const Graph& g) {
    const Vertex n = g.vertex_count();
    int best = 0;
    std::vector<int> depth(n);
    std::deque<Vertex> q;
    for (Vertex s = 0; s < n; ++s) {
        std::fill(depth.begin(), depth.end(), -1);
        depth[s] = 0;
        q.push_back(s);
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop_front();
            best = std::max(best, depth[u]);
            for (const auto& nb : g.neighbors(u)) {
                if (depth[nb.to] < 0) {
                    depth[nb.to] = depth[u] + 1;
                    q.push_back(nb.to);
                }
            }
        }
    }
    return best;
}

std::vector<Vertex> component_of(const Graph& g, Vertex s) {
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<Vertex> out, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
        Vertex u = stack.back();
        stack.pop_back();
        out.push_back(u);
        for (const auto& nb : g.neighbors(u)) {
            if (!seen[nb.to]) {
                seen[nb.to] = 1;
                stack.push_back(nb.to);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace hopkit
