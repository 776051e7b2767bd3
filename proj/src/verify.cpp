#include "hopkit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "hopkit/rand.hpp"

namespace hopkit {

std::string StretchReport::to_json() const {
    nlohmann::json j;
    j["epsilon"] = eps;
    j["beta"] = beta;
    j["pairs"] = pairs_checked;
    j["pairs_unreachable"] = pairs_skipped_unreachable;
    j["max_ratio"] = max_ratio;
    auto viol = nlohmann::json::array();
    for (const auto& v : violations) {
        viol.push_back({{"u", v.u}, {"v", v.v}, {"ratio", v.ratio}});
    }
    j["violations"] = viol;
    j["min_beta_histogram"] = min_beta_histogram;
    return j.dump(2);
}

std::vector<VertexPair> sample_pairs(const Graph& g, const PairSampleOptions& opt,
                                     std::uint64_t seed) {
    const Vertex n = g.vertex_count();
    std::vector<VertexPair> pairs;
    if (opt.force_all_pairs || n <= opt.all_pairs_cutoff) {
        for (Vertex u = 0; u < n; ++u) {
            auto dv = exact_distances(g, std::span<const Vertex>{&u, 1});
            for (Vertex v = u + 1; v < n; ++v) {
                if (dv.dist[v] < kInfinite) pairs.push_back({u, v});
            }
        }
        return pairs;
    }
    std::uint64_t counter = 0;
    auto draw = [&]() {
        return static_cast<Vertex>(
            rnd::below(static_cast<std::uint64_t>(n), seed, rnd::tag::pair_sample,
                       counter++));
    };
    std::size_t got = 0;
    std::size_t attempts = 0;
    std::vector<Vertex> sources;
    while (got < opt.random_pairs && attempts < opt.random_pairs * 50) {
        ++attempts;
        Vertex u = draw(), v = draw();
        if (u == v) continue;
        auto dv = exact_distances(g, std::span<const Vertex>{&u, 1});
        if (dv.dist[v] == kInfinite) continue;
        pairs.push_back({u, v});
        if (sources.size() < opt.farthest_sources) sources.push_back(u);
        ++got;
    }
    for (Vertex s : sources) {
        auto dv = exact_distances(g, std::span<const Vertex>{&s, 1});
        std::vector<std::pair<Weight, Vertex>> far;
        for (Vertex v = 0; v < n; ++v) {
            if (v != s && dv.dist[v] < kInfinite) far.push_back({dv.dist[v], v});
        }
        std::sort(far.begin(), far.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                  });
        for (std::size_t i = 0; i < far.size() && i < opt.farthest_per_source; ++i) {
            pairs.push_back({s, far[i].second});
        }
    }
    return pairs;
}

namespace {

// Group pairs by source so each source needs a single exploration.
std::map<Vertex, std::vector<Vertex>> group_by_source(std::span<const VertexPair> pairs) {
    std::map<Vertex, std::vector<Vertex>> by_source;
    for (const auto& p : pairs) by_source[p.u].push_back(p.v);
    return by_source;
}

// Incremental Bellman-Ford from src over g plus extra edges: grows the hop
// budget one round at a time and records, per target, the first round whose
// estimate reaches its goal value. -1 when the goal is never reached (the
// walk space is exhausted once a round changes nothing).
std::vector<std::int64_t> first_round_reaching(const Graph& g,
                                               std::span<const Edge> extra,
                                               Vertex src,
                                               std::span<const Vertex> targets,
                                               std::span<const Weight> goals,
                                               std::int64_t max_rounds) {
    std::vector<std::int64_t> result(targets.size(), -1);
    std::vector<SourceInit> init{{src, 0.0}};
    BellmanFordRunner run(g, extra, init);
    std::size_t unresolved = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (run.dist()[targets[i]] <= goals[i]) {
            result[i] = 0;
        } else {
            ++unresolved;
        }
    }
    for (std::int64_t r = 1; r <= max_rounds && unresolved > 0; ++r) {
        if (!run.step()) break;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (result[i] < 0 && run.dist()[targets[i]] <= goals[i]) {
                result[i] = r;
                --unresolved;
            }
        }
    }
    return result;
}

}  // namespace

StretchReport verify_hopset(const Graph& g, const Hopset& h, double eps, double beta,
                            std::span<const VertexPair> pairs, bool collect_min_beta) {
    if (beta < 1) {
        throw GraphError(GraphErrorKind::invalid_params, "beta must be >= 1");
    }
    StretchReport rep;
    rep.eps = eps;
    rep.beta = beta;
    const auto extra = h.edge_list();
    const double bound = (1.0 + eps) * (1.0 + kRatioTolerance);
    const std::int64_t beta_i =
        beta >= 9e18 ? std::numeric_limits<std::int64_t>::max()
                     : static_cast<std::int64_t>(beta);

    for (const auto& [src, targets] : group_by_source(pairs)) {
        auto exact = exact_distances(g, std::span<const Vertex>{&src, 1});
        std::vector<SourceInit> init{{src, 0.0}};
        auto table = bounded_bf(g, extra, init, beta_i);
        std::vector<Vertex> live;
        std::vector<Weight> goals;
        for (Vertex v : targets) {
            if (exact.dist[v] == kInfinite) {
                ++rep.pairs_skipped_unreachable;
                continue;
            }
            ++rep.pairs_checked;
            double ratio;
            if (exact.dist[v] == 0.0) {
                ratio = table.dist[v] == 0.0 ? 1.0 : kInfinite;
            } else {
                ratio = table.dist[v] / exact.dist[v];
            }
            rep.max_ratio = std::max(rep.max_ratio, ratio);
            if (!(ratio <= bound)) rep.violations.push_back({src, v, ratio});
            live.push_back(v);
            goals.push_back(exact.dist[v] * bound);
        }
        if (collect_min_beta && !live.empty()) {
            auto firsts = first_round_reaching(g, extra, src, live, goals, beta_i);
            for (std::int64_t mb : firsts) {
                if (mb < 0) continue;
                mb = std::max<std::int64_t>(mb, 1);
                if (static_cast<std::size_t>(mb) >= rep.min_beta_histogram.size()) {
                    rep.min_beta_histogram.resize(mb + 1, 0);
                }
                ++rep.min_beta_histogram[mb];
            }
        }
    }
    return rep;
}

StretchReport verify_hopset_sampled(const Graph& g, const Hopset& h, double eps,
                                    double beta, const PairSampleOptions& opt,
                                    std::uint64_t seed, bool collect_min_beta) {
    auto pairs = sample_pairs(g, opt, seed);
    return verify_hopset(g, h, eps, beta, pairs, collect_min_beta);
}

std::int64_t minimal_hopbound(const Graph& g, const Hopset& h, double eps,
                              VertexPair pair) {
    auto exact = exact_distances(g, std::span<const Vertex>{&pair.u, 1});
    if (exact.dist[pair.v] == kInfinite) {
        throw GraphError(GraphErrorKind::unreachable, "pair not connected");
    }
    const Weight goal = exact.dist[pair.v] * (1.0 + eps) * (1.0 + kRatioTolerance);
    const auto extra = h.edge_list();
    // Exact by monotonicity: estimates only improve as the budget grows, so
    // the first qualifying round is the answer.
    auto firsts = first_round_reaching(g, extra, pair.u, {&pair.v, 1}, {&goal, 1},
                                       2 * static_cast<std::int64_t>(g.vertex_count()));
    if (firsts[0] < 0) {
        throw GraphError(GraphErrorKind::unreachable, "no hop budget reaches target");
    }
    return std::max<std::int64_t>(1, firsts[0]);
}

std::string EmulatorReport::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["pairs"] = pairs_checked;
    j["pairs_unreachable"] = pairs_skipped_unreachable;
    j["max_surplus"] = max_surplus;
    j["max_normalized_surplus"] = max_normalized_surplus;
    j["all_finite"] = all_finite;
    j["all_dominating"] = all_dominating;
    return j.dump(2);
}

EmulatorReport verify_emulator(const Graph& g, const Hopset& h, int k,
                               std::span<const VertexPair> pairs) {
    if (!g.all_unit_weights()) {
        throw GraphError(GraphErrorKind::not_unweighted, "emulator verification"
                                                         " requires unit weights");
    }
    EmulatorReport rep;
    rep.k = k;
    // Distances inside H alone: a throwaway graph over the emulator edges.
    std::vector<Edge> hedges = h.edge_list();
    Graph hg(g.vertex_count(), std::move(hedges));

    for (const auto& [src, targets] : group_by_source(pairs)) {
        auto exact = exact_distances(g, std::span<const Vertex>{&src, 1});
        auto in_h = exact_distances(hg, std::span<const Vertex>{&src, 1});
        for (Vertex v : targets) {
            const Weight dg = exact.dist[v];
            if (dg == kInfinite) {
                ++rep.pairs_skipped_unreachable;
                continue;
            }
            ++rep.pairs_checked;
            const Weight dh = in_h.dist[v];
            if (dh == kInfinite) {
                rep.all_finite = false;
                continue;
            }
            if (dh < dg * (1.0 - kRatioTolerance)) rep.all_dominating = false;
            const double surplus = dh - dg;
            rep.max_surplus = std::max(rep.max_surplus, surplus);
            if (dg > 0) {
                const double norm =
                    surplus / (k * std::pow(dg, 1.0 - 1.0 / std::max(1, k)));
                rep.max_normalized_surplus = std::max(rep.max_normalized_surplus, norm);
            }
        }
    }
    return rep;
}

EmulatorReport verify_emulator_sampled(const Graph& g, const Hopset& h, int k,
                                       const PairSampleOptions& opt,
                                       std::uint64_t seed) {
    auto pairs = sample_pairs(g, opt, seed);
    return verify_emulator(g, h, k, pairs);
}

}  // namespace hopkit
