#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qkdstar/errors.hpp"

namespace qkdstar {

// ============================================================================
// Optical orthogonal codes: 0/1 chip sequences whose cyclic auto- and
// cross-correlations never exceed 1, so two codes can collide in at most one
// chip per frame regardless of relative delay.
// ============================================================================

/// One code: the set of pulse positions inside an n-chip frame.
struct OocCode {
    int length = 0;              ///< chips per frame N_c
    std::vector<int> positions;  ///< strictly increasing, in [0, length)

    [[nodiscard]] int weight() const { return static_cast<int>(positions.size()); }
};

/// A set of codes sharing length and weight, pairwise cross-correlation <= 1.
struct OocFamily {
    int length = 0;
    int weight = 0;
    std::vector<OocCode> codes;
};

/// Maximum cyclic correlation between a and b over all shifts; for a == b the
/// zero shift (the trivial peak) is excluded, making this the autocorrelation
/// sidelobe level.
[[nodiscard]] inline int max_cross_correlation(const OocCode& a, const OocCode& b) {
    if (a.length != b.length)
        throw model_error("max_cross_correlation: code lengths differ (" +
                          std::to_string(a.length) + " vs " +
                          std::to_string(b.length) + ")");
    const int n = a.length;
    std::vector<char> in_b(static_cast<size_t>(n), 0);
    for (int pos : b.positions) in_b[static_cast<size_t>(pos)] = 1;
    const bool same = a.positions == b.positions;
    int best = 0;
    for (int s = same ? 1 : 0; s < n; ++s) {
        int overlap = 0;
        for (int pos : a.positions)
            overlap += in_b[static_cast<size_t>((pos + s) % n)];
        best = std::max(best, overlap);
    }
    return best;
}

inline void validate_code(const OocCode& c) {
    if (c.length < 1) throw model_error("OocCode: length must be >= 1");
    if (c.positions.empty()) throw model_error("OocCode: weight must be >= 1");
    for (size_t i = 0; i < c.positions.size(); ++i) {
        if (c.positions[i] < 0 || c.positions[i] >= c.length)
            throw model_error("OocCode: position out of range");
        if (i > 0 && c.positions[i] <= c.positions[i - 1])
            throw model_error("OocCode: positions must be strictly increasing");
    }
    if (c.weight() >= 2 && max_cross_correlation(c, c) > 1)
        throw model_error("OocCode: autocorrelation sidelobe exceeds 1");
}

/// Johnson-style cardinality bound floor((N_c - 1) / (w (w - 1))) for w >= 2.
[[nodiscard]] inline long long capacity_bound(int n_chips, int w) {
    if (w < 2)
        throw model_error("capacity_bound: defined for weight >= 2 only (got " +
                          std::to_string(w) + ")");
    if (n_chips < 1) throw model_error("capacity_bound: n_chips must be >= 1");
    return (static_cast<long long>(n_chips) - 1) /
           (static_cast<long long>(w) * (w - 1));
}

/// Family capacity including the weight-1 case, where every chip position is
/// its own code.
[[nodiscard]] inline long long family_capacity(int n_chips, int w) {
    if (w == 1) return n_chips;
    return capacity_bound(n_chips, w);
}

/// Chip-synchronous collision probability of two code users: w^2 overlap
/// cases out of N_c relative shifts.
[[nodiscard]] inline double collision_probability(int n_chips, int w) {
    if (n_chips < 1) throw model_error("collision_probability: n_chips must be >= 1");
    if (w < 1) throw model_error("collision_probability: w must be >= 1");
    const long long cases = static_cast<long long>(w) * w;
    if (cases > n_chips)
        throw model_error("collision_probability: w^2 = " + std::to_string(cases) +
                          " exceeds n_chips = " + std::to_string(n_chips) +
                          "; probability would exceed 1");
    return static_cast<double>(cases) / static_cast<double>(n_chips);
}

namespace detail {

// Depth-first greedy search over candidate position sets in lexicographic
// order. Candidates are normalized to contain chip 0 (any family can be
// shift-normalized that way since correlations are shift-invariant), and
// chosen codes are kept in ascending candidate order.
inline bool extend_family(std::vector<OocCode>& chosen,
                          const std::vector<OocCode>& candidates,
                          size_t first, size_t want) {
    if (chosen.size() == want) return true;
    for (size_t i = first; i < candidates.size(); ++i) {
        const OocCode& cand = candidates[i];
        bool ok = true;
        for (const OocCode& c : chosen) {
            if (max_cross_correlation(c, cand) > 1) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        chosen.push_back(cand);
        if (extend_family(chosen, candidates, i + 1, want)) return true;
        chosen.pop_back();
    }
    return false;
}

} // namespace detail

/// Deterministic construction of `count` codes of weight w over n_chips.
/// Throws capacity_error when the request exceeds the family capacity and
/// internal_error if the search space is exhausted at a feasible count.
[[nodiscard]] inline OocFamily generate_family(int n_chips, int w, int count) {
    if (n_chips < 1) throw model_error("generate_family: n_chips must be >= 1");
    if (w < 1) throw model_error("generate_family: weight must be >= 1");
    if (w > n_chips) throw model_error("generate_family: weight exceeds n_chips");
    if (count < 0) throw model_error("generate_family: count must be >= 0");
    const long long cap = family_capacity(n_chips, w);
    if (count > cap)
        throw capacity_error("generate_family: requested " + std::to_string(count) +
                             " codes of weight " + std::to_string(w) + " over " +
                             std::to_string(n_chips) + " chips; capacity is " +
                             std::to_string(cap));

    OocFamily fam;
    fam.length = n_chips;
    fam.weight = w;
    if (count == 0) return fam;

    if (w == 1) {
        for (int i = 0; i < count; ++i)
            fam.codes.push_back(OocCode{n_chips, {i}});
        return fam;
    }

    // enumerate valid candidates {0} + (w-1)-subsets of [1, n_chips) in
    // lexicographic order, keeping those with autocorrelation sidelobe <= 1
    std::vector<OocCode> candidates;
    std::vector<int> pick(static_cast<size_t>(w - 1));
    for (int i = 0; i < w - 1; ++i) pick[static_cast<size_t>(i)] = i + 1;
    while (true) {
        OocCode cand{n_chips, {0}};
        cand.positions.insert(cand.positions.end(), pick.begin(), pick.end());
        if (max_cross_correlation(cand, cand) <= 1) candidates.push_back(cand);
        // next lexicographic combination of {1, ..., n_chips-1}
        int i = w - 2;
        while (i >= 0 && pick[static_cast<size_t>(i)] == n_chips - (w - 1) + i) --i;
        if (i < 0) break;
        ++pick[static_cast<size_t>(i)];
        for (int j = i + 1; j < w - 1; ++j)
            pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
    }

    std::vector<OocCode> chosen;
    chosen.reserve(static_cast<size_t>(count));
    if (!detail::extend_family(chosen, candidates, 0, static_cast<size_t>(count)))
        throw internal_error("generate_family: search exhausted below the "
                             "cardinality bound; no family of " +
                             std::to_string(count) + " codes found");
    fam.codes = std::move(chosen);
    return fam;
}

} // namespace qkdstar
