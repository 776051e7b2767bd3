#include "hopkit/hopset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hopkit {

void Hopset::add(Vertex u, Vertex v, Weight w, int level) {
    if (u == v) return;  // self edges carry no information
    edges_.push_back({u, v, w, static_cast<std::int16_t>(level)});
    sealed_ = false;
}

void Hopset::merge(const Hopset& other) {
    edges_.insert(edges_.end(), other.edges_.begin(), other.edges_.end());
    sealed_ = false;
}

void Hopset::seal() {
    if (sealed_) return;
    std::sort(edges_.begin(), edges_.end(),
              [](const HopsetEdge& a, const HopsetEdge& b) {
                  if (a.u != b.u) return a.u < b.u;
                  if (a.v != b.v) return a.v < b.v;
                  if (a.w != b.w) return a.w < b.w;
                  return a.level < b.level;
              });
    std::vector<HopsetEdge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) {
        if (!out.empty() && out.back().u == e.u && out.back().v == e.v) continue;
        out.push_back(e);
    }
    edges_ = std::move(out);
    sealed_ = true;
}

std::vector<Edge> Hopset::edge_list() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({e.u, e.v, e.w});
    return out;
}

int Hopset::max_out_degree() const {
    int best = 0, run = 0;
    Vertex cur = kNoVertex;
    for (const auto& e : edges_) {
        run = (e.u == cur) ? run + 1 : 1;
        cur = e.u;
        best = std::max(best, run);
    }
    return best;
}

std::vector<std::size_t> Hopset::per_level_counts() const {
    std::vector<std::size_t> counts;
    for (const auto& e : edges_) {
        if (static_cast<std::size_t>(e.level) >= counts.size()) {
            counts.resize(e.level + 1, 0);
        }
        ++counts[e.level];
    }
    return counts;
}

namespace {
std::string fmt_w(Weight w) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), w);
    (void)ec;
    return std::string(buf, ptr);
}
}  // namespace

std::string Hopset::serialize() const {
    std::string out;
    for (const auto& e : edges_) {
        out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + fmt_w(e.w) +
               " " + std::to_string(e.level) + "\n";
    }
    return out;
}

Hopset Hopset::parse(std::string_view text, Vertex n) {
    Hopset h(n);
    std::istringstream in{std::string(text)};
    long long u, v;
    double w;
    int level;
    while (in >> u >> v >> w >> level) {
        if (u < 0 || u >= n || v < 0 || v >= n || w < 0) {
            throw GraphError(GraphErrorKind::invalid_params, "bad hopset edge");
        }
        h.add(static_cast<Vertex>(u), static_cast<Vertex>(v), w, level);
    }
    h.seal();
    return h;
}

void Hopset::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << serialize();
}

Hopset Hopset::read_file(const std::string& path, Vertex n) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), n);
}

BunchSet compute_bunches(const Graph& g, const LevelHierarchy& h) {
    const Vertex n = g.vertex_count();
    BunchSet bs;
    bs.by_vertex.resize(n);

    for (int i = 0; i <= h.top_nonempty; ++i) {
        const auto& next = h.at(i + 1);
        // Pivot radii d_G(u, A_{i+1}) for everyone, one multi-source pass.
        DistanceVector to_next;
        if (!next.empty()) to_next = exact_distances(g, next);

        for (Vertex u : h.at(i)) {
            if (h.level_of[u] != i) continue;  // u handled at its own level only
            Bunch& b = bs.by_vertex[u];
            Weight radius = kInfinite;
            if (!next.empty()) {
                radius = to_next.dist[u];
                if (radius < kInfinite) {
                    b.pivot = to_next.root[u];
                    b.pivot_dist = radius;
                }
            }
            // Truncated Dijkstra from u: stop at the pivot radius, keep the
            // strictly closer A_i vertices.
            std::vector<Weight> dist(n, kInfinite);
            using Item = std::pair<Weight, Vertex>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            dist[u] = 0;
            pq.push({0, u});
            while (!pq.empty()) {
                auto [d, x] = pq.top();
                pq.pop();
                if (d != dist[x] || d >= radius) continue;
                if (x != u && h.in_level(x, i)) b.members.emplace_back(x, d);
                for (const auto& nb : g.neighbors(x)) {
                    const Weight nd = d + nb.w;
                    if (nd < radius && nd < dist[nb.to]) {
                        dist[nb.to] = nd;
                        pq.push({nd, nb.to});
                    }
                }
            }
            std::sort(b.members.begin(), b.members.end());
        }
    }
    return bs;
}

Hopset build_hopset(const Graph& g, const HopsetParams& params, std::uint64_t seed) {
    params.validate(g.vertex_count());
    const auto h = sample_hierarchy(g.vertex_count(), params, seed);
    const auto bunches = compute_bunches(g, h);
    Hopset hs(g.vertex_count());
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
        const auto& b = bunches.by_vertex[u];
        const int lvl = h.level_of[u];
        for (const auto& [v, d] : b.members) hs.add(u, v, d, lvl);
        if (b.pivot != kNoVertex) hs.add(u, b.pivot, b.pivot_dist, lvl);
    }
    hs.seal();
    hs.kprime = h.top_nonempty;
    hs.recorded_eps = params.eps;
    // Hopbound of the basic analysis; recorded for the verification default.
    hs.recorded_beta = std::pow(24.0 * params.k / params.eps, params.k - 1);
    return hs;
}

Hopset build_emulator(const Graph& g, int k, std::uint64_t seed) {
    if (!g.all_unit_weights()) {
        throw GraphError(GraphErrorKind::not_unweighted,
                         "emulator construction requires all weights = 1");
    }
    HopsetParams p;
    p.k = k;
    p.variant = Variant::improved;
    return build_hopset(g, p, seed);
}

std::string hopset_stats_json(const Hopset& h, Vertex n, const HopsetParams& params) {
    nlohmann::json j;
    j["size"] = h.size();
    j["max_out_degree"] = h.max_out_degree();
    j["per_level_counts"] = h.per_level_counts();
    j["size_reference"] = std::pow(static_cast<double>(n), 1.0 + params.nu());
    j["nu"] = params.nu();
    j["recorded_beta"] = h.recorded_beta;
    return j.dump(2);
}

}  // namespace hopkit
