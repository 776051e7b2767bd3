#include "hopkit/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "hopkit/rand.hpp"

namespace hopkit {

const char* to_string(Fidelity f) {
    return f == Fidelity::costed ? "costed" : "faithful";
}

Fidelity fidelity_from_string(const std::string& s) {
    if (s == "costed") return Fidelity::costed;
    if (s == "faithful") return Fidelity::faithful;
    throw GraphError(GraphErrorKind::invalid_params, "unknown fidelity: " + s);
}

void SimTrace::add(const SimTrace& other) {
    rounds += other.rounds;
    per_level.insert(per_level.end(), other.per_level.begin(), other.per_level.end());
    peak_memory_words = std::max(peak_memory_words, other.peak_memory_words);
    max_congestion = std::max(max_congestion, other.max_congestion);
}

std::string SimTrace::to_json() const {
    nlohmann::json j;
    j["mode"] = mode;
    j["fidelity"] = to_string(fidelity);
    j["rounds"] = rounds;
    auto arr = nlohmann::json::array();
    for (const auto& r : per_level) {
        arr.push_back({{"l", r.l},
                       {"i", r.i},
                       {"rounds", r.rounds},
                       {"max_congestion", r.max_congestion}});
    }
    j["per_level"] = arr;
    j["peak_memory_words"] = peak_memory_words;
    j["max_congestion"] = max_congestion;
    return j.dump(2);
}

namespace {

constexpr std::int64_t kIterCap = std::int64_t(4) << 60;

int ceil_log2(std::int64_t x) {
    int l = 0;
    std::int64_t p = 1;
    while (p < x) {
        p <<= 1;
        ++l;
    }
    return l;
}

std::int64_t clamp_iters(double d) {
    if (!(d > 0)) return 1;
    if (d >= static_cast<double>(kIterCap)) return kIterCap;
    return static_cast<std::int64_t>(std::ceil(d));
}

// Per-scale schedule of the level-by-level construction. eps_step keeps the
// accumulated (1+eps_step)^cap below 1+eps; the hopbound formula is
// beta = (3/delta)^k' with delta = eps_step / (15 k').
struct Schedule {
    int cap = 1;
    int stride = 1;
    double eps_step = 0.0;
    int kprime = 1;
    double beta = 1.0;
    std::int64_t stage1_iters = 1;
    std::int64_t stage2_iters = 1;
};

Schedule make_schedule(Vertex universe, const HopsetParams& params, double eps,
                       const DistributedOptions& opt) {
    if (!(eps > 0.0 && eps <= 0.4)) {
        // eps/(2 cap) <= 1/(5 cap) needs eps <= 2/5.
        throw GraphError(GraphErrorKind::invalid_params,
                         "distributed construction needs eps in (0, 0.4]");
    }
    if (opt.t_stride < 1) {
        throw GraphError(GraphErrorKind::invalid_params, "stride must be >= 1");
    }
    Schedule s;
    s.stride = opt.t_stride;
    s.cap = opt.level_cap > 0 ? opt.level_cap
                              : std::max(1, ceil_log2(std::max<Vertex>(2, universe)));
    s.eps_step = opt.eps_step > 0 ? opt.eps_step : eps / (2.0 * s.cap);
    s.kprime = std::max(1, params.structural_top(universe));
    const double delta = s.eps_step / (15.0 * s.kprime);
    s.beta = std::pow(3.0 / delta, s.kprime);
    s.stage1_iters = clamp_iters(8.0 * std::pow(2.0, s.stride - 1) * s.beta);
    s.stage2_iters = std::max<std::int64_t>(1, s.stage1_iters / 2);
    return s;
}

// Send counts per (step, vertex) within one stage; slots are created lazily.
struct StepLoad {
    std::map<std::int64_t, std::vector<std::uint32_t>> slots;
    Vertex n = 0;

    void add(std::int64_t slot, Vertex v, std::uint32_t c = 1) {
        auto& row = slots[slot];
        if (row.empty()) row.assign(n, 0);
        row[v] += c;
    }
    std::uint64_t max_cell() const {
        std::uint64_t best = 0;
        for (const auto& [_, row] : slots) {
            for (auto c : row) best = std::max<std::uint64_t>(best, c);
        }
        return best;
    }
    // Physical rounds when every channel carries one message per round: each
    // step costs its worst per-vertex queue.
    std::uint64_t flush_total() const {
        std::uint64_t total = 0;
        for (const auto& [_, row] : slots) {
            std::uint32_t m = 0;
            for (auto c : row) m = std::max(m, c);
            total += std::max<std::uint32_t>(m, 1);
        }
        return total;
    }
    std::uint64_t steps() const { return slots.size(); }
};

std::vector<Edge> working_edges(const Graph& g, const std::vector<Edge>& base,
                                const Hopset& prev, const Hopset& cur) {
    std::vector<Edge> out = g.edges();
    out.insert(out.end(), base.begin(), base.end());
    for (const auto& e : prev.edges()) out.push_back({e.u, e.v, e.w});
    for (const auto& e : cur.edges()) out.push_back({e.u, e.v, e.w});
    return out;
}

}  // namespace

std::pair<Hopset, SimTrace> run_clique_hopset(const Graph& g,
                                              const HopsetParams& params, double eps,
                                              std::uint64_t seed,
                                              const DistributedOptions& opt) {
    const Vertex n = g.vertex_count();
    params.validate(n);
    const Schedule sc = make_schedule(n, params, eps, opt);
    const auto hier = sample_hierarchy(n, params, seed);

    SimTrace trace;
    trace.mode = "clique";
    trace.fidelity = opt.fidelity;

    Hopset h_prev(n);
    Hopset h_cur(n);
    std::vector<std::uint32_t> participation(n);
    StepLoad load;
    load.n = n;

    for (int l = sc.stride;; l += sc.stride) {
        h_cur = Hopset(n);
        for (int i = 0; i <= hier.top_nonempty; ++i) {
            Graph gi(n, working_edges(g, opt.base_extra, h_prev, h_cur));
            SimLevelRecord rec;
            rec.l = l;
            rec.i = i;

            // Stage 1: exploration rooted at A_{i+1} for 8 * 2^(t-1) * beta
            // rounds; yields the pivot estimates d^(u, A_{i+1}).
            std::vector<Weight> dhat(n, kInfinite);
            std::vector<Vertex> pivot(n, kNoVertex);
            std::uint64_t steps1 = 0;
            {
                std::vector<SourceInit> roots;
                for (Vertex v : hier.at(i + 1)) roots.push_back({v, 0.0});
                if (!roots.empty()) {
                    BellmanFordRunner r1(gi, {}, roots, nullptr, true);
                    for (std::int64_t s = 1; s <= sc.stage1_iters; ++s) {
                        if (!r1.step()) break;
                    }
                    steps1 = static_cast<std::uint64_t>(r1.rounds());
                    dhat = r1.dist();
                    pivot = r1.root();
                }
            }

            // Stage 2: per-root explorations at half depth; a vertex forwards
            // a root's message only below half that root's pivot estimate.
            load.slots.clear();
            std::fill(participation.begin(), participation.end(), 0);
            std::uint64_t steps2 = 0;
            for (Vertex u : hier.at(i)) {
                if (hier.level_of[u] != i) continue;
                const Weight thr = dhat[u] / 2.0;
                ForwardGate gate = [thr](Vertex, Weight est) { return est < thr; };
                const ForwardGate* gp = std::isinf(thr) ? nullptr : &gate;
                std::vector<SourceInit> src{{u, 0.0}};
                BellmanFordRunner r2(gi, {}, src, gp);
                for (std::int64_t s = 1; s <= sc.stage2_iters; ++s) {
                    const bool progressed = r2.step();
                    for (Vertex sv : r2.senders()) load.add(s, sv);
                    if (!progressed) break;
                }
                steps2 = std::max<std::uint64_t>(steps2, r2.rounds());
                const auto& d2 = r2.dist();
                for (Vertex v = 0; v < n; ++v) {
                    if (d2[v] == kInfinite) continue;
                    ++participation[v];
                    if (v != u && hier.in_level(v, i) && d2[v] < thr) {
                        h_cur.add(u, v, d2[v], i);
                    }
                }
                if (pivot[u] != kNoVertex) h_cur.add(u, pivot[u], dhat[u], i);
            }

            rec.max_congestion = std::max<std::uint64_t>(load.max_cell(), 1);
            if (opt.fidelity == Fidelity::faithful) {
                rec.rounds = steps1 + load.flush_total();
            } else {
                rec.rounds = steps1 + steps2 * rec.max_congestion;
            }

            // Memory: stored hopset out-edges plus one estimate per active
            // exploration plus the pivot record.
            std::vector<std::uint32_t> stored(n, 0);
            for (const auto& e : h_prev.edges()) stored[e.u] += 3;
            for (const auto& e : h_cur.edges()) stored[e.u] += 3;
            std::uint64_t peak = 0;
            for (Vertex v = 0; v < n; ++v) {
                peak = std::max<std::uint64_t>(
                    peak, 4 + stored[v] + 3ull * participation[v]);
            }
            trace.peak_memory_words = std::max(trace.peak_memory_words, peak);
            trace.max_congestion = std::max(trace.max_congestion, rec.max_congestion);
            trace.rounds += rec.rounds;
            trace.per_level.push_back(rec);
        }
        h_cur.seal();
        if (l >= sc.cap) break;
        h_prev = h_cur;
    }

    h_cur.recorded_beta = sc.beta;
    h_cur.recorded_eps = eps;
    h_cur.kprime = sc.kprime;
    return {std::move(h_cur), std::move(trace)};
}

Hopset recursive_hopset(const Graph& g, const HopsetParams& params, int iterations,
                        std::uint64_t seed) {
    if (iterations < 1) {
        throw GraphError(GraphErrorKind::invalid_params, "iterations must be >= 1");
    }
    constexpr std::uint64_t kStageTag = 0x0b;
    DistributedOptions opt;
    auto [stage, trace] = run_clique_hopset(g, params, params.eps, seed, opt);
    (void)trace;
    Hopset uni = stage;
    double beta_prev = stage.recorded_beta;
    for (int j = 2; j <= iterations; ++j) {
        const int cap = std::max(1, ceil_log2(clamp_iters(beta_prev)));
        DistributedOptions o;
        o.level_cap = cap;
        o.eps_step = params.eps / (3.0 * cap);
        o.base_extra = uni.edge_list();
        auto [hj, tj] = run_clique_hopset(g, params, params.eps,
                                          rnd::mix(seed, kStageTag, j), o);
        (void)tj;
        beta_prev = hj.recorded_beta;
        uni.merge(hj);
    }
    uni.seal();
    uni.recorded_beta = beta_prev;
    uni.recorded_eps = params.eps;
    uni.kprime = stage.kprime;
    return uni;
}

bool VirtualGraph::contains(Vertex v) const {
    return std::binary_search(vprime.begin(), vprime.end(), v);
}

VirtualGraph make_virtual_graph(const Graph& host, double sample_prob, std::int64_t B,
                                std::uint64_t seed) {
    if (!(sample_prob > 0.0 && sample_prob <= 1.0) || B < 1) {
        throw GraphError(GraphErrorKind::invalid_params, "bad virtual graph spec");
    }
    VirtualGraph vg;
    vg.B = B;
    for (Vertex v = 0; v < host.vertex_count(); ++v) {
        if (rnd::unit(seed, rnd::tag::vprime_sample, v) < sample_prob) {
            vg.vprime.push_back(v);
        }
    }
    if (vg.vprime.empty()) vg.vprime.push_back(0);  // keep the universe nonempty
    return vg;
}

VirtualGraph make_virtual_graph(std::vector<Vertex> vprime, std::int64_t B) {
    if (vprime.empty() || B < 1) {
        throw GraphError(GraphErrorKind::invalid_params, "bad virtual graph spec");
    }
    std::sort(vprime.begin(), vprime.end());
    vprime.erase(std::unique(vprime.begin(), vprime.end()), vprime.end());
    VirtualGraph vg;
    vg.vprime = std::move(vprime);
    vg.B = B;
    return vg;
}

namespace {

// Exploration engine over the implicit G'' = (V', E' u H). One iteration is a
// B-round host wave realizing E' plus a BFS-tree broadcast realizing the
// oriented extra edges; host vertices may gate wave forwarding.
class VirtualNet {
public:
    VirtualNet(const Graph& host, const VirtualGraph& vg, std::uint64_t seed)
        : host_(host), vg_(vg), seed_(seed), tree_(bfs_tree(host)) {
        in_vprime_.assign(host.vertex_count(), 0);
        for (Vertex v : vg.vprime) in_vprime_[v] = 1;
    }

    struct Link {
        Vertex vparent = kNoVertex;
        std::int32_t via_edge = -1;  // -1: host wave segment
    };

    struct Spec {
        std::span<const SourceInit> sources;
        std::int64_t iterations = 1;
        std::span<const HopsetEdge> vedges;
        const std::vector<std::vector<Vertex>>* vedge_paths = nullptr;  // for path mode
        const ForwardGate* vgate = nullptr;
        const ForwardGate* hgate = nullptr;
        bool track_roots = false;
        bool track_paths = false;
        bool track_host_min = false;
        StepLoad* wave_load = nullptr;  // slot = (iteration, wave round)
        std::vector<std::uint32_t>* participation = nullptr;  // host holdings
        std::uint64_t stream = 0;  // broadcast schedule stream id
    };

    struct Result {
        std::vector<Weight> vdist;
        std::vector<Vertex> vroot;
        std::vector<std::vector<Vertex>> vpath;  // full host path per virtual vertex
        std::vector<Weight> host_dist;
        std::vector<char> host_forwarded;
        std::int64_t iterations_run = 0;
        std::uint64_t wave_rounds = 0;
        std::uint64_t bcast_msgs = 0;
        std::uint64_t bcast_rounds = 0;
        std::uint64_t bcast_max_burst = 0;  // messages sharing a start round
    };

    Result explore(const Spec& spec) const;

    int tree_height() const { return tree_.height; }

private:
    const Graph& host_;
    const VirtualGraph& vg_;
    std::uint64_t seed_;
    BfsTree tree_;
    std::vector<char> in_vprime_;
};

VirtualNet::Result VirtualNet::explore(const Spec& spec) const {
    const Vertex n = host_.vertex_count();
    Result res;
    res.vdist.assign(n, kInfinite);
    if (spec.track_roots) res.vroot.assign(n, kNoVertex);
    if (spec.track_paths) res.vpath.assign(n, {});
    if (spec.track_host_min) {
        res.host_dist.assign(n, kInfinite);
        res.host_forwarded.assign(n, 0);
    }

    // Adjacency over the oriented virtual edges; both endpoints relax.
    std::vector<std::vector<std::pair<Vertex, std::int32_t>>> vadj(n);
    for (std::size_t e = 0; e < spec.vedges.size(); ++e) {
        const auto& he = spec.vedges[e];
        vadj[he.u].push_back({he.v, static_cast<std::int32_t>(e)});
        vadj[he.v].push_back({he.u, static_cast<std::int32_t>(e)});
    }
    const std::size_t alpha = [&] {
        std::size_t a = 1;
        std::vector<std::uint32_t> outdeg(n, 0);
        for (const auto& he : spec.vedges) {
            a = std::max<std::size_t>(a, ++outdeg[he.u]);
        }
        return a;
    }();

    std::vector<Vertex> frontier;
    for (const auto& s : spec.sources) {
        if (!in_vprime_[s.v]) {
            throw GraphError(GraphErrorKind::invalid_params,
                             "virtual source outside V'");
        }
        const bool better =
            s.init < res.vdist[s.v] ||
            (spec.track_roots && s.init == res.vdist[s.v] &&
             (res.vroot[s.v] == kNoVertex || s.v < res.vroot[s.v]));
        if (better) {
            if (res.vdist[s.v] == kInfinite) frontier.push_back(s.v);
            res.vdist[s.v] = s.init;
            if (spec.track_roots) res.vroot[s.v] = s.v;
            if (spec.track_paths) res.vpath[s.v] = {s.v};
        }
    }
    std::sort(frontier.begin(), frontier.end());

    // Wave state, reused across iterations.
    std::vector<Weight> wdist(n), wnext(n);
    std::vector<Vertex> wroot(n), wnroot(n), wparent(n), wnparent(n);
    std::vector<std::vector<Vertex>> wpath, wnpath;
    if (spec.track_paths) {
        wpath.assign(n, {});
        wnpath.assign(n, {});
    }
    std::uint64_t bcast_counter = 0;

    for (std::int64_t it = 1; it <= spec.iterations && !frontier.empty(); ++it) {
        std::vector<Vertex> eligible;
        for (Vertex x : frontier) {
            if (!spec.vgate || (*spec.vgate)(x, res.vdist[x])) eligible.push_back(x);
        }
        if (eligible.empty()) break;
        res.iterations_run = it;

        // --- host wave (one E' relaxation) ---
        std::fill(wdist.begin(), wdist.end(), kInfinite);
        std::fill(wparent.begin(), wparent.end(), kNoVertex);
        if (spec.track_roots) std::fill(wroot.begin(), wroot.end(), kNoVertex);
        std::vector<Vertex> wfront;
        for (Vertex x : eligible) {
            wdist[x] = res.vdist[x];
            if (spec.track_roots) wroot[x] = res.vroot[x];
            if (spec.track_paths) wpath[x] = res.vpath[x];
            wfront.push_back(x);
        }
        wnext = wdist;
        wnparent = wparent;
        if (spec.track_roots) wnroot = wroot;

        for (std::int64_t wr = 1; wr <= vg_.B && !wfront.empty(); ++wr) {
            std::vector<Vertex> touched;
            bool any_sender = false;
            for (Vertex h : wfront) {
                if (spec.hgate && !(*spec.hgate)(h, wdist[h])) continue;
                any_sender = true;
                if (spec.wave_load) spec.wave_load->add((it << 20) + wr, h);
                if (spec.track_host_min) res.host_forwarded[h] = 1;
                for (const auto& nb : host_.neighbors(h)) {
                    const Weight nd = wdist[h] + nb.w;
                    const bool better =
                        nd < wnext[nb.to] ||
                        (spec.track_roots && nd == wnext[nb.to] &&
                         wnroot[nb.to] != kNoVertex && wroot[h] < wnroot[nb.to]);
                    if (better) {
                        if (wnext[nb.to] == wdist[nb.to] &&
                            (!spec.track_roots || wnroot[nb.to] == wroot[nb.to])) {
                            touched.push_back(nb.to);
                        }
                        wnext[nb.to] = nd;
                        wnparent[nb.to] = h;
                        if (spec.track_roots) wnroot[nb.to] = wroot[h];
                    }
                }
            }
            if (!any_sender) break;
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            wfront.clear();
            bool changed = false;
            // Paths are rebuilt from the senders' round-start paths before any
            // of them is overwritten.
            if (spec.track_paths) {
                for (Vertex v : touched) {
                    wnpath[v] = wpath[wnparent[v]];
                    wnpath[v].push_back(v);
                }
            }
            for (Vertex v : touched) {
                const bool better =
                    wnext[v] < wdist[v] ||
                    (spec.track_roots && wnext[v] == wdist[v] &&
                     wroot[v] != kNoVertex && wnroot[v] < wroot[v]);
                if (!better) continue;
                wdist[v] = wnext[v];
                if (spec.track_roots) wroot[v] = wnroot[v];
                if (spec.track_paths) wpath[v] = std::move(wnpath[v]);
                wparent[v] = wnparent[v];
                wfront.push_back(v);
                changed = true;
            }
            ++res.wave_rounds;
            if (!changed) break;
        }

        if (spec.track_host_min) {
            for (Vertex h = 0; h < n; ++h) {
                if (wdist[h] < res.host_dist[h]) res.host_dist[h] = wdist[h];
            }
        }
        if (spec.participation) {
            for (Vertex h = 0; h < n; ++h) {
                if (wdist[h] < kInfinite) ++(*spec.participation)[h];
            }
        }

        // --- synchronous commit: every candidate reads iteration-start values
        // (hop relaxations snapshot their sender's estimate and path first) ---
        struct HopCand {
            Vertex y;
            Weight cand;
            Vertex rt;
            Vertex x;
            std::int32_t e;
        };
        std::vector<HopCand> hop_cands;
        std::uint64_t msgs = 0;
        std::map<Vertex, std::vector<Vertex>> start_paths;
        for (Vertex x : eligible) {
            msgs += 1 + vadj[x].size();
            if (spec.track_paths) start_paths[x] = res.vpath[x];
            for (const auto& [y, e] : vadj[x]) {
                hop_cands.push_back({y, res.vdist[x] + spec.vedges[e].w,
                                     spec.track_roots ? res.vroot[x] : kNoVertex, x,
                                     e});
            }
        }
        res.bcast_msgs += msgs;

        std::vector<Vertex> improved;
        auto note_improved = [&](Vertex y) {
            if (std::find(improved.begin(), improved.end(), y) == improved.end()) {
                improved.push_back(y);
            }
        };
        for (Vertex y : vg_.vprime) {
            if (wdist[y] == kInfinite) continue;
            const Vertex rt = spec.track_roots ? wroot[y] : kNoVertex;
            const bool better =
                wdist[y] < res.vdist[y] ||
                (spec.track_roots && wdist[y] == res.vdist[y] &&
                 res.vroot[y] != kNoVertex && rt < res.vroot[y]);
            if (!better) continue;
            note_improved(y);
            res.vdist[y] = wdist[y];
            if (spec.track_roots) res.vroot[y] = rt;
            if (spec.track_paths) res.vpath[y] = wpath[y];
        }
        for (const auto& hc : hop_cands) {
            const bool better =
                hc.cand < res.vdist[hc.y] ||
                (spec.track_roots && hc.cand == res.vdist[hc.y] &&
                 res.vroot[hc.y] != kNoVertex && hc.rt < res.vroot[hc.y]);
            if (!better) continue;
            note_improved(hc.y);
            res.vdist[hc.y] = hc.cand;
            if (spec.track_roots) res.vroot[hc.y] = hc.rt;
            if (spec.track_paths) {
                const auto& he = spec.vedges[hc.e];
                const auto& ep = (*spec.vedge_paths)[hc.e];
                auto path = start_paths[hc.x];
                if (he.u == hc.x) {
                    path.insert(path.end(), ep.begin() + 1, ep.end());
                } else {
                    path.insert(path.end(), ep.rbegin() + 1, ep.rend());
                }
                res.vpath[hc.y] = std::move(path);
            }
        }

        // Broadcast schedule: each message picks a start round uniformly in a
        // window of |V'| * alpha slots, then floods the BFS tree.
        if (msgs > 0) {
            const std::uint64_t window =
                std::max<std::uint64_t>(1, vg_.vprime.size() * alpha);
            std::map<std::uint64_t, std::uint64_t> starts;
            std::uint64_t max_start = 0;
            for (std::uint64_t m = 0; m < msgs; ++m) {
                const std::uint64_t st =
                    1 + rnd::below(window, seed_, rnd::tag::bcast_start, spec.stream,
                                   bcast_counter++);
                max_start = std::max(max_start, st);
                res.bcast_max_burst = std::max(res.bcast_max_burst, ++starts[st]);
            }
            res.bcast_rounds +=
                max_start + static_cast<std::uint64_t>(tree_.height) +
                (res.bcast_max_burst > 0 ? res.bcast_max_burst - 1 : 0);
        }

        std::sort(improved.begin(), improved.end());
        frontier = std::move(improved);
    }
    return res;
}

}  // namespace

SmallMemoryBFResult bf_small_memory(const Graph& host, const VirtualGraph& vg,
                                    const Hopset& hopset,
                                    std::span<const SourceInit> sources,
                                    std::int64_t beta, Fidelity fidelity,
                                    std::uint64_t seed) {
    if (beta < 0) {
        throw GraphError(GraphErrorKind::invalid_params, "beta must be >= 0");
    }
    VirtualNet net(host, vg, seed);
    StepLoad load;
    load.n = host.vertex_count();
    std::vector<std::uint32_t> participation(host.vertex_count(), 0);

    VirtualNet::Spec spec;
    spec.sources = sources;
    spec.iterations = beta;
    spec.vedges = hopset.edges();
    spec.track_host_min = true;
    spec.wave_load = &load;
    spec.participation = &participation;
    auto r = net.explore(spec);

    SmallMemoryBFResult out;
    out.table.beta = beta;
    out.table.dist = std::move(r.vdist);
    out.table.parent.assign(host.vertex_count(), kNoVertex);
    out.table.rounds_executed = r.iterations_run;
    out.host_dist = std::move(r.host_dist);
    out.host_parent.assign(host.vertex_count(), kNoVertex);

    out.trace.mode = "congest";
    out.trace.fidelity = fidelity;
    const std::uint64_t maxcong = std::max<std::uint64_t>(1, load.max_cell());
    if (fidelity == Fidelity::faithful) {
        out.trace.rounds = load.flush_total() + r.bcast_rounds;
    } else {
        out.trace.rounds = r.wave_rounds * maxcong + r.bcast_rounds;
    }
    out.trace.max_congestion = maxcong;

    // Per-vertex memory: stored out-edges, one word triple per exploration
    // value held, and the broadcast receive buffer.
    std::vector<std::uint32_t> stored(host.vertex_count(), 0);
    for (const auto& e : hopset.edges()) stored[e.u] += 3;
    std::uint64_t peak = 0;
    for (Vertex v = 0; v < host.vertex_count(); ++v) {
        peak = std::max<std::uint64_t>(
            peak, 2 + stored[v] + 3ull * participation[v] + 3 * r.bcast_max_burst);
    }
    out.trace.peak_memory_words = peak;
    return out;
}

namespace {

struct CongestEngineOptions {
    bool path_mode = false;
};

std::pair<Hopset, SimTrace> congest_engine(const Graph& host, const VirtualGraph& vg,
                                           const HopsetParams& params, double eps,
                                           std::uint64_t seed,
                                           const DistributedOptions& opt,
                                           const CongestEngineOptions& eng,
                                           PathReportingHopset* pr_out) {
    const Vertex n = host.vertex_count();
    const Vertex m = static_cast<Vertex>(vg.vprime.size());
    if (m < 1 || vg.B < 1) {
        throw GraphError(GraphErrorKind::invalid_params, "empty virtual graph");
    }
    params.validate(std::max<Vertex>(m, 2));
    const Schedule sc = make_schedule(m, params, eps, opt);
    const auto hier = sample_hierarchy_for(vg.vprime, m, n, params, seed);
    VirtualNet net(host, vg, seed);

    SimTrace trace;
    trace.mode = "congest";
    trace.fidelity = opt.fidelity;

    // In path mode every scale keeps all previous hopsets in the working
    // graph, and the rooted exploration runs longer so that vertices lying on
    // paths of older edges are discovered too.
    const std::int64_t s1_iters =
        eng.path_mode
            ? clamp_iters(8.0 * sc.beta * sc.kprime * std::max(1, ceil_log2(m)) + 1)
            : sc.stage1_iters;
    const std::int64_t s2_iters =
        eng.path_mode ? std::max<std::int64_t>(1, s1_iters / 2) : sc.stage2_iters;

    std::vector<HopsetEdge> all_edges;       // cumulative pool (path mode working set)
    std::vector<std::vector<Vertex>> all_paths;
    std::vector<std::size_t> scale_begin;    // first edge index of each scale
    Hopset h_prev(n);
    Hopset h_cur(n);

    StepLoad load;
    load.n = n;
    std::vector<std::uint32_t> participation(n, 0);
    std::vector<std::uint32_t> registrations(n, 0);

    for (int l = sc.stride;; l += sc.stride) {
        scale_begin.push_back(all_edges.size());
        h_cur = Hopset(n);
        const std::size_t scale_first_edge = all_edges.size();
        for (int i = 0; i <= hier.top_nonempty; ++i) {
            // Working virtual edge set for this level.
            std::vector<HopsetEdge> vedges;
            if (eng.path_mode) {
                vedges = all_edges;  // cumulative: previous scales plus H_{i-1}
            } else {
                for (const auto& e : opt.base_extra) {
                    vedges.push_back({e.u, e.v, e.w, 0});
                }
                for (const auto& e : h_prev.edges()) vedges.push_back(e);
                for (const auto& e : h_cur.edges()) vedges.push_back(e);
            }

            SimLevelRecord rec;
            rec.l = l;
            rec.i = i;
            load.slots.clear();
            std::fill(participation.begin(), participation.end(), 0);

            // Stage 1: rooted at A_{i+1}.
            std::vector<SourceInit> roots;
            for (Vertex v : hier.at(i + 1)) roots.push_back({v, 0.0});
            VirtualNet::Spec s1;
            s1.sources = roots;
            s1.iterations = s1_iters;
            s1.vedges = vedges;
            s1.vedge_paths = eng.path_mode ? &all_paths : nullptr;
            s1.track_roots = true;
            s1.track_paths = eng.path_mode;
            s1.wave_load = &load;
            s1.participation = &participation;
            s1.stream = rnd::mix(seed, 0x51, (std::uint64_t(l) << 8) | i, 0);
            VirtualNet::Result r1;
            std::uint64_t rounds1 = 0;
            if (!roots.empty()) {
                r1 = net.explore(s1);
                rounds1 = r1.wave_rounds + r1.bcast_rounds;
            } else {
                r1.vdist.assign(n, kInfinite);
                r1.vroot.assign(n, kNoVertex);
            }

            // Stage 2: per-root limited explorations; the threshold applies to
            // virtual forwarding and to host transport alike.
            std::uint64_t rounds2 = 0;
            for (Vertex u : hier.at(i)) {
                if (hier.level_of[u] != i) continue;
                const Weight thr = r1.vdist[u] / 2.0;
                ForwardGate gate = [thr](Vertex, Weight est) { return est < thr; };
                const bool gated = !std::isinf(thr);
                std::vector<SourceInit> src{{u, 0.0}};
                VirtualNet::Spec s2;
                s2.sources = src;
                s2.iterations = s2_iters;
                s2.vedges = vedges;
                s2.vedge_paths = eng.path_mode ? &all_paths : nullptr;
                s2.vgate = gated ? &gate : nullptr;
                s2.hgate = gated ? &gate : nullptr;
                s2.track_paths = eng.path_mode;
                s2.wave_load = &load;
                s2.participation = &participation;
                s2.stream = rnd::mix(seed, 0x52, (std::uint64_t(l) << 8) | i, u);
                auto r2 = net.explore(s2);
                rounds2 += r2.bcast_rounds;

                for (Vertex v : vg.vprime) {
                    if (v == u || !hier.in_level(v, i)) continue;
                    if (r2.vdist[v] < thr) {
                        h_cur.add(u, v, r2.vdist[v], i);
                        all_edges.push_back(
                            {u, v, r2.vdist[v], static_cast<std::int16_t>(i)});
                        if (eng.path_mode) all_paths.push_back(r2.vpath[v]);
                    }
                }
                if (r1.vroot[u] != kNoVertex) {
                    h_cur.add(u, r1.vroot[u], r1.vdist[u], i);
                    all_edges.push_back(
                        {u, r1.vroot[u], r1.vdist[u], static_cast<std::int16_t>(i)});
                    if (eng.path_mode) {
                        // Stage-1 paths run pivot -> u; the edge is u -> pivot.
                        auto p = r1.vpath[u];
                        std::reverse(p.begin(), p.end());
                        all_paths.push_back(std::move(p));
                    }
                }
            }

            rec.max_congestion = std::max<std::uint64_t>(1, load.max_cell());
            if (opt.fidelity == Fidelity::faithful) {
                rec.rounds = load.flush_total() + rounds1 + rounds2;
            } else {
                rec.rounds =
                    (rounds1 + rounds2) + load.steps() * rec.max_congestion;
            }

            if (eng.path_mode) {
                std::fill(registrations.begin(), registrations.end(), 0);
                for (std::size_t e = 0; e < all_paths.size(); ++e) {
                    for (Vertex v : all_paths[e]) ++registrations[v];
                }
            }
            std::vector<std::uint32_t> stored(n, 0);
            for (const auto& e : eng.path_mode
                                     ? all_edges
                                     : h_cur.edges()) {
                stored[e.u] += 3;
            }
            if (!eng.path_mode) {
                for (const auto& e : h_prev.edges()) stored[e.u] += 3;
            }
            std::uint64_t peak = 0;
            for (Vertex v = 0; v < n; ++v) {
                peak = std::max<std::uint64_t>(peak, 4 + stored[v] +
                                                         3ull * participation[v] +
                                                         4ull * registrations[v]);
            }
            trace.peak_memory_words = std::max(trace.peak_memory_words, peak);
            trace.max_congestion = std::max(trace.max_congestion, rec.max_congestion);
            trace.rounds += rec.rounds;
            trace.per_level.push_back(rec);
        }
        h_cur.seal();
        if (l >= sc.cap) {
            if (pr_out) {
                // Final output: the last scale's fresh edges with their paths.
                pr_out->hopset = Hopset(n);
                pr_out->registry.assign(n, {});
                for (std::size_t e = scale_first_edge; e < all_edges.size(); ++e) {
                    const auto& he = all_edges[e];
                    pr_out->hopset.add(he.u, he.v, he.w, he.level);
                    pr_out->paths.push_back({all_paths[e]});
                }
                // add() in path order keeps edge/path indices aligned; seal()
                // would reorder, so dedup was done by construction instead.
                const auto& edges = pr_out->hopset.edges();
                for (std::size_t e = 0; e < edges.size(); ++e) {
                    const auto& path = pr_out->paths[e].hosts;
                    Weight acc = 0;
                    std::vector<Weight> prefix(path.size(), 0);
                    for (std::size_t ix = 1; ix < path.size(); ++ix) {
                        auto nb = host.neighbors(path[ix - 1]);
                        Weight w = kInfinite;
                        for (const auto& x : nb) {
                            if (x.to == path[ix]) {
                                w = x.w;
                                break;
                            }
                        }
                        acc += w;
                        prefix[ix] = acc;
                    }
                    for (std::size_t ix = 0; ix < path.size(); ++ix) {
                        pr_out->registry[path[ix]].push_back(
                            {static_cast<std::int32_t>(e), prefix[ix],
                             acc - prefix[ix],
                             ix == 0 ? kNoVertex : path[ix - 1],
                             ix + 1 == path.size() ? kNoVertex : path[ix + 1]});
                    }
                }
                for (const auto& r : pr_out->registry) {
                    pr_out->max_registry_entries =
                        std::max(pr_out->max_registry_entries, r.size());
                }
            }
            break;
        }
        h_prev = h_cur;
    }

    h_cur.recorded_beta = sc.beta;
    h_cur.recorded_eps = eps;
    h_cur.kprime = sc.kprime;
    return {std::move(h_cur), std::move(trace)};
}

}  // namespace

std::pair<Hopset, SimTrace> run_congest_hopset(const Graph& host,
                                               const VirtualGraph& vg,
                                               const HopsetParams& params, double eps,
                                               std::uint64_t seed,
                                               const DistributedOptions& opt) {
    return congest_engine(host, vg, params, eps, seed, opt, {}, nullptr);
}

std::pair<PathReportingHopset, SimTrace> run_path_reporting(
    const Graph& host, const VirtualGraph& vg, const HopsetParams& params,
    double eps, std::uint64_t seed, const DistributedOptions& opt) {
    CongestEngineOptions eng;
    eng.path_mode = true;
    PathReportingHopset pr;
    auto [h, trace] = congest_engine(host, vg, params, eps, seed, opt, eng, &pr);
    pr.hopset.recorded_beta = h.recorded_beta;
    pr.hopset.recorded_eps = h.recorded_eps;
    pr.hopset.kprime = h.kprime;
    return {std::move(pr), std::move(trace)};
}

}  // namespace hopkit
