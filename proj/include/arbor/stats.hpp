#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/tree.hpp"

namespace arbor {

inline std::vector<Index> depths(const PlaneTree& t) {
    const Index n = t.size();
    std::vector<Index> d(static_cast<std::size_t>(n), 0);
    for (Index v = 1; v < n; ++v) {
        d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(t.parent_raw(v))] + 1;
    }
    return d;
}

// Generation sizes; profile[h] = number of vertices at distance h from the root.
inline std::vector<Index> profile(const PlaneTree& t) {
    const auto dep = depths(t);
    const Index h_max = *std::max_element(dep.begin(), dep.end());
    std::vector<Index> prof(static_cast<std::size_t>(h_max) + 1, 0);
    for (Index d : dep) ++prof[static_cast<std::size_t>(d)];
    return prof;
}

inline Index height(const PlaneTree& t) {
    const auto dep = depths(t);
    return *std::max_element(dep.begin(), dep.end());
}

inline Index width(const PlaneTree& t) {
    const auto prof = profile(t);
    return *std::max_element(prof.begin(), prof.end());
}

// Lexicographically (= depth-first-index) minimal vertex of maximum depth,
// the paper's u(t).
inline Index deepest_vertex(const PlaneTree& t) {
    const auto dep = depths(t);
    Index best = 0;
    for (Index v = 1; v < t.size(); ++v) {
        if (dep[static_cast<std::size_t>(v)] > dep[static_cast<std::size_t>(best)]) best = v;
    }
    return best;
}

struct SpinalWeights {
    Index total = 0;   // S_u: siblings of u and its ancestors
    Index right = 0;   // S_u^d: younger siblings
    Index left = 0;    // S_u^g: older siblings
};

// Sums of (k_v - 1), (k_v - j), (j - 1) over the steps v*(j) on the path to u.
inline SpinalWeights spinal_weights(const PlaneTree& t, Index u) {
    SpinalWeights w;
    for (Index v = u; v != 0; v = t.parent_raw(v)) {
        const Index p = t.parent_raw(v);
        const int k = t.degree(p);
        const int j = t.child_rank(v);
        w.right += k - j;
        w.left += j - 1;
    }
    w.total = w.right + w.left;
    return w;
}

struct SpinalWeightArrays {
    std::vector<Index> right;  // S^d per vertex
    std::vector<Index> left;   // S^g per vertex
};

inline SpinalWeightArrays spinal_weight_arrays(const PlaneTree& t) {
    const Index n = t.size();
    SpinalWeightArrays a;
    a.right.assign(static_cast<std::size_t>(n), 0);
    a.left.assign(static_cast<std::size_t>(n), 0);
    for (Index v = 1; v < n; ++v) {
        const Index p = t.parent_raw(v);
        const int k = t.degree(p);
        const int j = t.child_rank(v);
        a.right[static_cast<std::size_t>(v)] = a.right[static_cast<std::size_t>(p)] + (k - j);
        a.left[static_cast<std::size_t>(v)] = a.left[static_cast<std::size_t>(p)] + (j - 1);
    }
    return a;
}

// Depth of the deepest ancestor of each vertex lying on the root-to-u path.
// Equals |v /\ u| for every v once u's spine is the marked set.
inline std::vector<Index> mrca_depths_with(const PlaneTree& t, Index u) {
    const Index n = t.size();
    const auto dep = depths(t);
    std::vector<char> on_spine(static_cast<std::size_t>(n), 0);
    for (Index v = u;; v = t.parent_raw(v)) {
        on_spine[static_cast<std::size_t>(v)] = 1;
        if (v == 0) break;
    }
    std::vector<Index> m(static_cast<std::size_t>(n), 0);
    for (Index v = 0; v < n; ++v) {
        m[static_cast<std::size_t>(v)] = on_spine[static_cast<std::size_t>(v)]
            ? dep[static_cast<std::size_t>(v)]
            : m[static_cast<std::size_t>(t.parent_raw(v))];
    }
    return m;
}

// Second-order height: max over pairs of min(|u|-|u/\v|, |v|-|u/\v|).
// Computed with any fixed deepest vertex u as max_v (|v| - |u/\v|), which the
// pairwise definition collapses to when |u| = H(t).
inline Index second_order_height(const PlaneTree& t) {
    const Index u = deepest_vertex(t);
    const auto dep = depths(t);
    const auto anc = mrca_depths_with(t, u);
    Index best = 0;
    for (Index v = 0; v < t.size(); ++v) {
        best = std::max(best, dep[static_cast<std::size_t>(v)] - anc[static_cast<std::size_t>(v)]);
    }
    return best;
}

// Maximum of the depth-first walk; equals max_u S_u^d by the spinal identity.
inline Index max_right_spinal_weight(const PlaneTree& t) {
    long long walk = 0, best = 0;
    for (Index i = 0; i < t.size(); ++i) {
        walk += t.degree(i) - 1;
        best = std::max(best, walk);
    }
    return best;
}

inline Index min_lr_spine_stat(const PlaneTree& t) {
    const auto a = spinal_weight_arrays(t);
    Index best = 0;
    for (Index v = 0; v < t.size(); ++v) {
        best = std::max(best, std::min(a.right[static_cast<std::size_t>(v)],
                                       a.left[static_cast<std::size_t>(v)]));
    }
    return best;
}

namespace detail {

// Range-max over the depth array, O(1) per query after O(n log n) build.
class RangeMax {
public:
    explicit RangeMax(const std::vector<Index>& values) {
        const std::size_t n = values.size();
        levels_.push_back(values);
        for (std::size_t len = 1; 2 * len <= n; len *= 2) {
            const auto& prev = levels_.back();
            std::vector<Index> next(n - 2 * len + 1);
            for (std::size_t i = 0; i + 2 * len <= n; ++i) {
                next[i] = std::max(prev[i], prev[i + len]);
            }
            levels_.push_back(std::move(next));
        }
    }

    // Max over [lo, hi); hi > lo required.
    Index query(Index lo, Index hi) const {
        const std::size_t width = static_cast<std::size_t>(hi - lo);
        std::size_t level = 0;
        while ((std::size_t{2} << level) <= width) ++level;
        const std::size_t len = std::size_t{1} << level;
        return std::max(levels_[level][static_cast<std::size_t>(lo)],
                        levels_[level][static_cast<std::size_t>(hi) - len]);
    }

private:
    std::vector<std::vector<Index>> levels_;
};

// v's block is [v, end[v]); it closes once the walk drops below its entry value.
inline std::vector<Index> subtree_ends(const PlaneTree& t) {
    const Index n = t.size();
    std::vector<Index> end(static_cast<std::size_t>(n));
    std::vector<Index> stack;
    std::vector<long long> entry(static_cast<std::size_t>(n));
    long long walk = 0;
    for (Index i = 0; i < n; ++i) {
        entry[static_cast<std::size_t>(i)] = walk;
        stack.push_back(i);
        walk += t.degree(i) - 1;
        while (!stack.empty() && walk < entry[static_cast<std::size_t>(stack.back())]) {
            end[static_cast<std::size_t>(stack.back())] = i + 1;
            stack.pop_back();
        }
    }
    for (Index v : stack) end[static_cast<std::size_t>(v)] = n;
    return end;
}

}  // namespace detail

// max over u <= v (depth-first order) of (|v| - |u/\v|) * S_u^d.
// For each u the inner max decomposes over u's ancestors a: candidates v with
// u/\v = a form the depth-first range between the block of a's child towards u
// and the end of a's block.
inline Index spine_product_stat(const PlaneTree& t) {
    const Index n = t.size();
    const auto dep = depths(t);
    const auto sw = spinal_weight_arrays(t);
    const auto end = detail::subtree_ends(t);
    const detail::RangeMax rmax(dep);

    Index best = 0;
    for (Index u = 0; u < n; ++u) {
        const Index sd = sw.right[static_cast<std::size_t>(u)];
        if (sd == 0) continue;
        Index reach = rmax.query(u, end[static_cast<std::size_t>(u)]) - dep[static_cast<std::size_t>(u)];
        Index child = u;
        for (Index a = t.parent_raw(u); a >= 0; a = t.parent_raw(a)) {
            const Index lo = end[static_cast<std::size_t>(child)];
            const Index hi = end[static_cast<std::size_t>(a)];
            if (lo < hi) {
                reach = std::max(reach, rmax.query(lo, hi) - dep[static_cast<std::size_t>(a)]);
            }
            child = a;
        }
        best = std::max(best, reach * sd);
    }
    return best;
}

// rL_lambda(t): leaves v with |v /\ u(t)| >= (1-lambda)|u(t)|, lambda = num/den.
// The threshold comparison is exact by cross-multiplication.
inline Index deep_leaf_count(const PlaneTree& t, long long lambda_num, long long lambda_den) {
    if (lambda_den <= 0 || lambda_num < 0 || lambda_num > lambda_den) {
        throw Error("deep_leaf_count: lambda must be a rational in [0,1]");
    }
    const Index u = deepest_vertex(t);
    const auto anc = mrca_depths_with(t, u);
    const Index h = depths(t)[static_cast<std::size_t>(u)];
    Index count = 0;
    for (Index v = 0; v < t.size(); ++v) {
        if (t.degree(v) != 0) continue;
        if (lambda_den * anc[static_cast<std::size_t>(v)] >= (lambda_den - lambda_num) * h) ++count;
    }
    return count;
}

// t^(k): the tree whose depth-first walk is (0, X_k, ..., X_n); collects the
// subtrees stemming from the k-th depth-first vertex and from younger siblings
// of it and its ancestors under a fresh root.
inline PlaneTree spinal_forest(const PlaneTree& t, Index k) {
    const Index n = t.size();
    if (k < 0 || k > n) throw Error("spinal_forest: k out of range");
    long long x_k = 0;
    for (Index i = 0; i < k; ++i) x_k += t.degree(i) - 1;
    std::vector<int> degrees;
    degrees.reserve(static_cast<std::size_t>(n - k + 1));
    degrees.push_back(static_cast<int>(x_k + 1));
    degrees.insert(degrees.end(), t.degrees().begin() + k, t.degrees().end());
    return PlaneTree::from_degrees(std::move(degrees));
}

struct TreeStats {
    Index size = 0;
    Index height = 0;
    Index width = 0;
    Index second_order_height = 0;
    Index max_right_spinal_weight = 0;
    Index leaf_count = 0;
};

inline TreeStats tree_stats(const PlaneTree& t) {
    TreeStats s;
    s.size = t.size();
    s.leaf_count = t.leaf_count();
    const auto prof = profile(t);
    s.height = static_cast<Index>(prof.size()) - 1;
    s.width = *std::max_element(prof.begin(), prof.end());
    s.second_order_height = second_order_height(t);
    s.max_right_spinal_weight = max_right_spinal_weight(t);
    return s;
}

}  // namespace arbor
