#pragma once

#include <algorithm>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/rng.hpp"
#include "arbor/tree.hpp"

namespace arbor {

enum class WalkKind { excursion, bridge, general };

// Integer lattice path (x_0, ..., x_n) with x_0 = 0. An excursion stays >= 0
// before time n, ends at -1 and is downward skip-free; a bridge is any
// partial-sum path of a jump sequence.
struct Walk {
    std::vector<long long> values;
    WalkKind kind = WalkKind::general;

    static Walk from_values(std::vector<long long> values) {
        if (values.empty() || values.front() != 0) {
            throw Error("walk: must start at x_0 = 0");
        }
        Walk w;
        w.values = std::move(values);
        w.kind = classify(w.values);
        return w;
    }

    Index steps() const { return static_cast<Index>(values.size()) - 1; }

    static WalkKind classify(const std::vector<long long>& v) {
        const std::size_t n = v.size() - 1;
        if (n == 0) return WalkKind::general;
        bool skip_free = true, non_negative = true;
        for (std::size_t j = 1; j <= n; ++j) {
            if (v[j] - v[j - 1] < -1) skip_free = false;
            if (j < n && v[j] < 0) non_negative = false;
        }
        if (skip_free && non_negative && v[n] == -1) return WalkKind::excursion;
        return WalkKind::bridge;
    }

    bool operator==(const Walk& other) const { return values == other.values; }
    bool operator<(const Walk& other) const { return values < other.values; }
};

// Lukasiewicz path: increments are (child count - 1) in depth-first order.
inline Walk dfs_walk(const PlaneTree& t) {
    std::vector<long long> v(static_cast<std::size_t>(t.size()) + 1, 0);
    for (Index i = 0; i < t.size(); ++i) {
        v[static_cast<std::size_t>(i) + 1] = v[static_cast<std::size_t>(i)] + t.degree(i) - 1;
    }
    Walk w;
    w.values = std::move(v);
    w.kind = WalkKind::excursion;
    return w;
}

// Depth-first vertex indices listed in breadth-first order.
inline std::vector<Index> breadth_first_order(const PlaneTree& t) {
    const Index n = t.size();
    // Children of a vertex have increasing depth-first indices, so pushing
    // vertices in index order groups each sibling block correctly.
    std::vector<Index> head(static_cast<std::size_t>(n), -1);
    std::vector<Index> next(static_cast<std::size_t>(n), -1);
    std::vector<Index> tail(static_cast<std::size_t>(n), -1);
    for (Index v = 1; v < n; ++v) {
        const Index p = t.parent_raw(v);
        if (head[static_cast<std::size_t>(p)] < 0) {
            head[static_cast<std::size_t>(p)] = v;
        } else {
            next[static_cast<std::size_t>(tail[static_cast<std::size_t>(p)])] = v;
        }
        tail[static_cast<std::size_t>(p)] = v;
    }
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n));
    order.push_back(0);
    for (std::size_t q = 0; q < order.size(); ++q) {
        for (Index c = head[static_cast<std::size_t>(order[q])]; c >= 0;
             c = next[static_cast<std::size_t>(c)]) {
            order.push_back(c);
        }
    }
    return order;
}

inline Walk bfs_walk(const PlaneTree& t) {
    const auto order = breadth_first_order(t);
    std::vector<long long> v(order.size() + 1, 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        v[i + 1] = v[i] + t.degree(order[i]) - 1;
    }
    Walk w;
    w.values = std::move(v);
    w.kind = WalkKind::excursion;
    return w;
}

inline PlaneTree tree_from_dfs_walk(const Walk& w) {
    if (Walk::classify(w.values) != WalkKind::excursion) {
        throw NotAnExcursion("tree_from_dfs_walk: walk is not an excursion");
    }
    std::vector<int> degrees(w.values.size() - 1);
    for (std::size_t i = 0; i + 1 < w.values.size(); ++i) {
        degrees[i] = static_cast<int>(w.values[i + 1] - w.values[i] + 1);
    }
    return PlaneTree::from_degrees(std::move(degrees));
}

// Rebuild level by level: in breadth-first order, vertex i's children are the
// next deg_i unassigned vertices.
inline PlaneTree tree_from_bfs_walk(const Walk& w) {
    if (Walk::classify(w.values) != WalkKind::excursion) {
        throw NotAnExcursion("tree_from_bfs_walk: walk is not an excursion");
    }
    const Index n = static_cast<Index>(w.values.size()) - 1;
    std::vector<int> deg_bf(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        deg_bf[static_cast<std::size_t>(i)] =
            static_cast<int>(w.values[static_cast<std::size_t>(i) + 1] -
                             w.values[static_cast<std::size_t>(i)] + 1);
    }
    std::vector<Index> first_child(static_cast<std::size_t>(n));
    Index unassigned = 1;
    for (Index i = 0; i < n; ++i) {
        first_child[static_cast<std::size_t>(i)] = unassigned;
        unassigned += deg_bf[static_cast<std::size_t>(i)];
    }
    // Depth-first serialisation of the breadth-first-indexed structure.
    std::vector<int> degrees;
    degrees.reserve(static_cast<std::size_t>(n));
    std::vector<std::pair<Index, int>> stack;  // (bfs id, children emitted)
    stack.emplace_back(0, 0);
    while (!stack.empty()) {
        auto& [v, emitted] = stack.back();
        if (emitted == 0) degrees.push_back(deg_bf[static_cast<std::size_t>(v)]);
        if (emitted < deg_bf[static_cast<std::size_t>(v)]) {
            const Index child = first_child[static_cast<std::size_t>(v)] + emitted;
            ++emitted;
            stack.emplace_back(child, 0);
        } else {
            stack.pop_back();
        }
    }
    return PlaneTree::from_degrees(std::move(degrees));
}

// Jump sequence (b_1, ..., b_n); requires sigma^2 = sum b_i^2 > 0.
struct JumpSequence {
    std::vector<long long> jumps;

    static JumpSequence from_jumps(std::vector<long long> jumps) {
        if (jumps.empty()) throw InvalidJumpSequence("jump sequence: empty");
        bool nonzero = false;
        for (long long b : jumps) nonzero = nonzero || (b != 0);
        if (!nonzero) throw InvalidJumpSequence("jump sequence: sigma^2 must be positive");
        JumpSequence s;
        s.jumps = std::move(jumps);
        return s;
    }

    // Jump multiset of a type: value i-1 with multiplicity n_i, ascending.
    static JumpSequence of_type(const TypeSequence& type) {
        std::vector<long long> jumps;
        jumps.reserve(static_cast<std::size_t>(type.size()));
        for (Index i = 0; i <= type.max_degree(); ++i) {
            for (Index c = 0; c < type.count(i); ++c) jumps.push_back(i - 1);
        }
        return from_jumps(std::move(jumps));
    }

    Index length() const { return static_cast<Index>(jumps.size()); }

    long long sum() const {
        long long s = 0;
        for (long long b : jumps) s += b;
        return s;
    }
};

// Partial sums of a uniformly permuted copy of the jump sequence.
inline Walk exchangeable_bridge(const JumpSequence& b, Rng& rng) {
    std::vector<long long> jumps = b.jumps;
    rng.shuffle(jumps);
    std::vector<long long> values(jumps.size() + 1, 0);
    for (std::size_t i = 0; i < jumps.size(); ++i) values[i + 1] = values[i] + jumps[i];
    return Walk::from_values(std::move(values));
}

// Cyclic rotation of the increment sequence by j, re-accumulated; maps
// W_br(n) to itself for any bridge.
inline Walk shift(const Walk& w, Index j) {
    const Index n = w.steps();
    if (j < 0 || j > n) throw Error("shift: index out of range");
    if (n == 0) return w;
    std::vector<long long> values(w.values.size(), 0);
    for (Index i = 1; i <= n; ++i) {
        const Index src = (j + i - 1) % n;  // 0-based increment index
        values[static_cast<std::size_t>(i)] =
            values[static_cast<std::size_t>(i) - 1] +
            (w.values[static_cast<std::size_t>(src) + 1] - w.values[static_cast<std::size_t>(src)]);
    }
    return Walk::from_values(std::move(values));
}

struct VervaatResult {
    Index tau = 0;
    Walk excursion;
};

// Rotation at the first minimum: tau = min{j in [n] : x_j = min x},
// V(x) = shift_tau(x). Bijects bridges onto [n] x excursions.
inline VervaatResult vervaat(const Walk& w) {
    const Index n = w.steps();
    if (n == 0 || w.values.back() != -1) {
        throw NotADownwardSkipFreeBridge("vervaat: walk must end at -1");
    }
    for (std::size_t j = 1; j < w.values.size(); ++j) {
        if (w.values[j] - w.values[j - 1] < -1) {
            throw NotADownwardSkipFreeBridge("vervaat: increments must be >= -1");
        }
    }
    long long min_value = 0;
    for (long long x : w.values) min_value = std::min(min_value, x);
    Index tau = 0;
    for (Index j = 1; j <= n; ++j) {
        if (w.values[static_cast<std::size_t>(j)] == min_value) {
            tau = j;
            break;
        }
    }
    VervaatResult r;
    r.tau = tau;
    r.excursion = shift(w, tau);
    return r;
}

inline Walk vervaat_inverse(Index i, const Walk& excursion) {
    const Index n = excursion.steps();
    if (i < 1 || i > n) throw Error("vervaat_inverse: index must be in [1, n]");
    return shift(excursion, n - i);
}

inline long long walk_range(const Walk& w) {
    const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
    return *hi - *lo;
}

}  // namespace arbor
