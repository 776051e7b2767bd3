#include "hopkit/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "hopkit/rand.hpp"

namespace hopkit {

const char* to_string(Variant v) {
    switch (v) {
        case Variant::basic: return "basic";
        case Variant::improved: return "improved";
        case Variant::efficient: return "efficient";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "basic") return Variant::basic;
    if (s == "improved") return Variant::improved;
    if (s == "efficient") return Variant::efficient;
    throw GraphError(GraphErrorKind::invalid_params, "unknown variant: " + s);
}

void HopsetParams::validate(Vertex n) const {
    if (k < 1) throw GraphError(GraphErrorKind::invalid_params, "k must be >= 1");
    if (n < 1) throw GraphError(GraphErrorKind::invalid_params, "n must be >= 1");
    if (variant == Variant::efficient) {
        if (!(rho > 0.0 && rho < 1.0)) {
            throw GraphError(GraphErrorKind::invalid_params, "rho must be in (0,1)");
        }
        if (rho < 2.0 * nu()) {
            throw GraphError(GraphErrorKind::invalid_params,
                             "efficient variant requires rho >= 2*nu = " +
                                 std::to_string(2.0 * nu()));
        }
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw GraphError(GraphErrorKind::invalid_params, "eps must be in (0,1)");
    }
}

int HopsetParams::structural_top(Vertex) const {
    switch (variant) {
        case Variant::basic:
            return k - 1;  // A_k is forced empty, so levels 0..k-1 can hold vertices
        case Variant::improved:
            return k;  // one extra sampled set, A_{k+1} forced empty
        case Variant::efficient: {
            const int i0 = static_cast<int>(std::floor(std::log2(rho / nu())));
            const int i1 = i0 + 1 + static_cast<int>(std::ceil(1.0 / rho));
            return i1;
        }
    }
    return 0;
}

std::vector<double> level_probabilities(Vertex n, const HopsetParams& params) {
    const double dn = static_cast<double>(n);
    const double v = params.nu();
    std::vector<double> probs;
    auto basic_p = [&](int i) { return std::pow(dn, -std::pow(2.0, i) * v); };
    // The improved schedule needs k <= loglog n - 1 for p < 1; at desk scale the
    // guard can fail, so the probabilities are clamped to 1/2 instead.
    auto improved_p = [&](int i) {
        const double p = basic_p(i) * std::pow(2.0, std::pow(2.0, i) - 1.0);
        return std::min(p, 0.5);
    };
    switch (params.variant) {
        case Variant::basic:
            for (int i = 0; i + 1 < params.k; ++i) probs.push_back(basic_p(i));
            break;
        case Variant::improved:
            for (int i = 0; i < params.k; ++i) probs.push_back(improved_p(i));
            break;
        case Variant::efficient: {
            const int i0 = static_cast<int>(std::floor(std::log2(params.rho / v)));
            const int i1 = i0 + 1 + static_cast<int>(std::ceil(1.0 / params.rho));
            for (int i = 0; i <= i0 && i < i1; ++i) probs.push_back(improved_p(i));
            if (static_cast<int>(probs.size()) < i1) {
                probs.push_back(std::pow(dn, -params.rho / 2.0));
            }
            while (static_cast<int>(probs.size()) < i1) {
                probs.push_back(std::pow(dn, -params.rho));
            }
            break;
        }
    }
    return probs;
}

LevelHierarchy sample_hierarchy_for(std::span<const Vertex> members,
                                    Vertex prob_base_n, Vertex universe_n,
                                    const HopsetParams& params, std::uint64_t seed) {
    params.validate(prob_base_n);
    LevelHierarchy h;
    h.probs = level_probabilities(prob_base_n, params);
    h.structural_top = static_cast<int>(h.probs.size());
    h.level_of.assign(universe_n, -1);
    h.levels.assign(h.structural_top + 1, {});
    for (Vertex v : members) {
        int lvl = 0;
        // One independent coin per promotion step; stopping at the first failure
        // keeps nesting regardless of which level is queried first.
        while (lvl < h.structural_top &&
               rnd::unit(seed, rnd::tag::level_promote, static_cast<std::uint64_t>(v),
                         static_cast<std::uint64_t>(lvl)) < h.probs[lvl]) {
            ++lvl;
        }
        h.level_of[v] = static_cast<std::int8_t>(lvl);
        for (int i = 0; i <= lvl; ++i) h.levels[i].push_back(v);
    }
    h.top_nonempty = 0;
    for (int i = h.structural_top; i >= 0; --i) {
        if (!h.levels[i].empty()) {
            h.top_nonempty = i;
            break;
        }
    }
    return h;
}

LevelHierarchy sample_hierarchy(Vertex n, const HopsetParams& params,
                                std::uint64_t seed) {
    std::vector<Vertex> all(n);
    for (Vertex v = 0; v < n; ++v) all[v] = v;
    return sample_hierarchy_for(all, n, n, params, seed);
}

}  // namespace hopkit
