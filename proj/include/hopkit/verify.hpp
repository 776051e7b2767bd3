#ifndef HOPKIT_VERIFY_HPP
#define HOPKIT_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hopkit/graph.hpp"
#include "hopkit/hopset.hpp"

namespace hopkit {

constexpr double kRatioTolerance = 1e-9;  // relative, absorbs summation order

struct VertexPair {
    Vertex u;
    Vertex v;
};

struct Violation {
    Vertex u;
    Vertex v;
    double ratio;
};

struct StretchReport {
    double eps = 0.0;
    double beta = 0.0;
    std::size_t pairs_checked = 0;
    std::size_t pairs_skipped_unreachable = 0;
    double max_ratio = 0.0;
    std::vector<Violation> violations;
    std::vector<std::int64_t> min_beta_histogram;  // index = min beta, optional

    bool passed() const { return violations.empty(); }
    std::string to_json() const;
};

// Default sample: `random_pairs` uniformly random connected pairs plus the
// `farthest_per_source` farthest vertices from a few random sources; every
// connected ordered pair (u < v) when n <= all_pairs_cutoff.
struct PairSampleOptions {
    std::size_t random_pairs = 200;
    std::size_t farthest_per_source = 20;
    std::size_t farthest_sources = 10;
    Vertex all_pairs_cutoff = 512;
    bool force_all_pairs = false;
};

std::vector<VertexPair> sample_pairs(const Graph& g, const PairSampleOptions& opt,
                                     std::uint64_t seed);

// Checks d^{(beta)}_{G u H}(u,v) <= (1+eps) d_G(u,v) over the given pairs.
// Unreachable pairs are skipped and counted. Set collect_min_beta to also
// record, per pair, the smallest hop budget meeting the target ratio.
StretchReport verify_hopset(const Graph& g, const Hopset& h, double eps, double beta,
                            std::span<const VertexPair> pairs,
                            bool collect_min_beta = false);

StretchReport verify_hopset_sampled(const Graph& g, const Hopset& h, double eps,
                                    double beta, const PairSampleOptions& opt,
                                    std::uint64_t seed,
                                    bool collect_min_beta = false);

// Smallest beta with d^{(beta)}_{G u H}(u,v) <= (1+eps) d_G(u,v); exact by
// monotonicity of hop-bounded distances. Throws Unreachable for split pairs.
std::int64_t minimal_hopbound(const Graph& g, const Hopset& h, double eps,
                              VertexPair pair);

struct EmulatorReport {
    int k = 0;
    std::size_t pairs_checked = 0;
    std::size_t pairs_skipped_unreachable = 0;
    double max_surplus = 0.0;             // max d_H - d_G
    double max_normalized_surplus = 0.0;  // max (d_H-d_G)/(k d_G^{1-1/k})
    bool all_finite = true;
    bool all_dominating = true;  // d_H >= d_G everywhere sampled
    std::string to_json() const;
};

// Additive-surplus check for emulators: distances measured in H alone.
EmulatorReport verify_emulator(const Graph& g, const Hopset& h, int k,
                               std::span<const VertexPair> pairs);

EmulatorReport verify_emulator_sampled(const Graph& g, const Hopset& h, int k,
                                       const PairSampleOptions& opt,
                                       std::uint64_t seed);

}  // namespace hopkit

#endif
