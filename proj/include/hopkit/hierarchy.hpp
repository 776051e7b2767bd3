#ifndef HOPKIT_HIERARCHY_HPP
#define HOPKIT_HIERARCHY_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hopkit/graph.hpp"

namespace hopkit {

enum class Variant { basic, improved, efficient };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

// Parameters of the sampled-hierarchy hopsets. nu = 1/(2^k - 1); the efficient
// variant truncates the level schedule with exponent rho (requires rho >= 2nu).
struct HopsetParams {
    int k = 2;
    Variant variant = Variant::improved;
    double rho = 0.5;   // efficient variant only
    double eps = 0.5;   // stretch slack, used by verification defaults

    double nu() const { return 1.0 / (std::pow(2.0, k) - 1.0); }
    // Index of the last structural level (A_{structural_top+1} = empty).
    int structural_top(Vertex n) const;
    void validate(Vertex n) const;
};

// Nested vertex sets A_0 >= A_1 >= ... A_top, A_{top+1} = empty. Membership of
// a vertex in A_{i+1} is an independent coin on (seed, vertex, i), so the sets
// are nested by construction and identical under any evaluation order.
struct LevelHierarchy {
    std::vector<std::int8_t> level_of;        // per vertex: max i with v in A_i
    std::vector<std::vector<Vertex>> levels;  // levels[i] = A_i, ascending ids
    std::vector<double> probs;                // probs[i]: promotion A_i -> A_{i+1}
    int structural_top = 0;                   // schedule length (levels.size()-1)
    int top_nonempty = 0;                     // last i with A_i nonempty

    bool in_level(Vertex v, int i) const { return level_of[v] >= i; }
    const std::vector<Vertex>& at(int i) const {
        static const std::vector<Vertex> empty{};
        return i < static_cast<int>(levels.size()) ? levels[i] : empty;
    }
};

LevelHierarchy sample_hierarchy(Vertex n, const HopsetParams& params,
                                std::uint64_t seed);

// Hierarchy over an arbitrary member set (A_0 = members) inside a universe of
// universe_n vertices; probabilities use prob_base_n as "n". Promotion coins
// are keyed on vertex ids, so a sub-universe run reproduces the decisions of
// a full-universe run with the same seed. Non-members get level -1.
LevelHierarchy sample_hierarchy_for(std::span<const Vertex> members,
                                    Vertex prob_base_n, Vertex universe_n,
                                    const HopsetParams& params, std::uint64_t seed);

// The promotion probability schedule as used by sample_hierarchy; index i is
// the probability a member of A_i enters A_{i+1}.
std::vector<double> level_probabilities(Vertex n, const HopsetParams& params);

}  // namespace hopkit

#endif
