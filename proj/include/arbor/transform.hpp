#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/rng.hpp"
#include "arbor/tree.hpp"

namespace arbor {

// Bijection between old and new depth-first indices; every transform returns
// one so marked vertices can be tracked through the maps.
struct VertexMap {
    std::vector<Index> forward;

    Index operator()(Index old_index) const {
        return forward[static_cast<std::size_t>(old_index)];
    }

    VertexMap inverse() const {
        VertexMap inv;
        inv.forward.assign(forward.size(), 0);
        for (std::size_t i = 0; i < forward.size(); ++i) {
            inv.forward[static_cast<std::size_t>(forward[i])] = static_cast<Index>(i);
        }
        return inv;
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < forward.size(); ++i) {
            if (forward[i] != static_cast<Index>(i)) return false;
        }
        return true;
    }
};

struct ShuffleResult {
    PlaneTree tree;
    VertexMap map;
};

// A family of sibling-permutations keyed by (vertex position, k). The
// seeded-uniform variant derives each permutation from a hash chained along
// the rebuilt tree, so the infinite family is materialised lazily and
// reproducibly.
class ShuffleRule {
public:
    enum class Kind { identity, mirror, seeded_uniform };

    static ShuffleRule identity() { return ShuffleRule(Kind::identity, 0); }
    static ShuffleRule mirror_rule() { return ShuffleRule(Kind::mirror, 0); }
    static ShuffleRule seeded_uniform(std::uint64_t seed) {
        return ShuffleRule(Kind::seeded_uniform, seed);
    }

    Kind kind() const { return kind_; }

    std::uint64_t root_key() const { return derive_seed(seed_, 0x726f6f74ULL); }
    std::uint64_t child_key(std::uint64_t parent_key, int index) const {
        return derive_seed(parent_key, static_cast<std::uint64_t>(index));
    }

    // gamma[j-1] = new position of the old j-th child, a permutation of [k].
    void permutation(std::uint64_t key, int k, std::vector<int>& gamma) const {
        gamma.resize(static_cast<std::size_t>(k));
        switch (kind_) {
            case Kind::identity:
                for (int j = 1; j <= k; ++j) gamma[static_cast<std::size_t>(j - 1)] = j;
                break;
            case Kind::mirror:
                for (int j = 1; j <= k; ++j) gamma[static_cast<std::size_t>(j - 1)] = k + 1 - j;
                break;
            case Kind::seeded_uniform: {
                for (int j = 1; j <= k; ++j) gamma[static_cast<std::size_t>(j - 1)] = j;
                Rng rng(derive_seed(key, static_cast<std::uint64_t>(k), 0x7065726dULL));
                rng.shuffle(gamma);
                break;
            }
        }
    }

private:
    ShuffleRule(Kind kind, std::uint64_t seed) : kind_(kind), seed_(seed) {}
    Kind kind_;
    std::uint64_t seed_;
};

// Rebuilds the tree top-down with each sibling block reordered by the rule's
// permutation; preserves type, depths, degrees and ancestral relations.
inline ShuffleResult apply_shuffle(const PlaneTree& t, const ShuffleRule& rule) {
    const Index n = t.size();
    // children in CSR layout; sibling order is depth-first index order
    std::vector<Index> offset(static_cast<std::size_t>(n) + 1, 0);
    for (Index v = 1; v < n; ++v) ++offset[static_cast<std::size_t>(t.parent_raw(v)) + 1];
    for (Index v = 0; v < n; ++v) offset[static_cast<std::size_t>(v) + 1] += offset[static_cast<std::size_t>(v)];
    std::vector<Index> child(n > 0 ? static_cast<std::size_t>(n - 1) : 0);
    {
        std::vector<Index> cursor(offset.begin(), offset.end() - 1);
        for (Index v = 1; v < n; ++v) {
            child[static_cast<std::size_t>(cursor[static_cast<std::size_t>(t.parent_raw(v))]++)] = v;
        }
    }

    std::vector<int> new_degrees;
    new_degrees.reserve(static_cast<std::size_t>(n));
    std::vector<Index> forward(static_cast<std::size_t>(n), 0);

    struct Frame {
        Index old_v;
        std::uint64_t key;
        std::vector<int> inv;  // inv[m-1] = old child index at new position m
        int next_m;
    };
    std::vector<Frame> stack;
    std::vector<int> gamma;

    auto open = [&](Index old_v, std::uint64_t key) {
        forward[static_cast<std::size_t>(old_v)] = static_cast<Index>(new_degrees.size());
        const int k = t.degree(old_v);
        new_degrees.push_back(k);
        Frame f{old_v, key, {}, 0};
        if (k > 0) {
            rule.permutation(key, k, gamma);
            f.inv.assign(static_cast<std::size_t>(k), 0);
            for (int j = 1; j <= k; ++j) f.inv[static_cast<std::size_t>(gamma[static_cast<std::size_t>(j - 1)] - 1)] = j;
        }
        stack.push_back(std::move(f));
    };

    open(0, rule.root_key());
    while (!stack.empty()) {
        const std::size_t top = stack.size() - 1;
        if (stack[top].next_m == t.degree(stack[top].old_v)) {
            stack.pop_back();
            continue;
        }
        const int m = ++stack[top].next_m;
        const Index old_child =
            child[static_cast<std::size_t>(offset[static_cast<std::size_t>(stack[top].old_v)] +
                                           stack[top].inv[static_cast<std::size_t>(m - 1)] - 1)];
        const std::uint64_t key = rule.child_key(stack[top].key, m);
        open(old_child, key);
    }
    return ShuffleResult{PlaneTree::from_degrees(std::move(new_degrees)), VertexMap{std::move(forward)}};
}

// Reverses every sibling block; an involution that swaps left and right
// spinal weights.
inline ShuffleResult mirror(const PlaneTree& t) {
    return apply_shuffle(t, ShuffleRule::mirror_rule());
}

namespace detail {

using Word = std::vector<int>;

inline std::vector<Word> tree_words(const PlaneTree& t) {
    const Index n = t.size();
    std::vector<Word> words(static_cast<std::size_t>(n));
    for (Index v = 1; v < n; ++v) {
        words[static_cast<std::size_t>(v)] = words[static_cast<std::size_t>(t.parent_raw(v))];
        words[static_cast<std::size_t>(v)].push_back(t.child_rank(v));
    }
    return words;
}

struct RebuiltTree {
    PlaneTree tree;
    std::map<Word, Index> index_of;  // word -> new depth-first index
};

// Rebuilds a tree from an arbitrary word set, validating the tree conditions.
inline RebuiltTree tree_from_words(std::vector<Word> words) {
    std::sort(words.begin(), words.end());  // lexicographic = depth-first order
    const Index n = static_cast<Index>(words.size());
    if (n == 0 || !words[0].empty()) throw Error("word set: missing root");
    std::map<Word, Index> index_of;
    for (Index i = 0; i < n; ++i) {
        if (!index_of.emplace(words[static_cast<std::size_t>(i)], i).second) {
            throw Error("word set: duplicate vertex");
        }
    }
    std::vector<int> degrees(static_cast<std::size_t>(n), 0);
    std::vector<int> max_child(static_cast<std::size_t>(n), 0);
    for (Index i = 1; i < n; ++i) {
        Word parent = words[static_cast<std::size_t>(i)];
        const int rank = parent.back();
        parent.pop_back();
        const auto it = index_of.find(parent);
        if (it == index_of.end()) throw Error("word set: missing parent");
        ++degrees[static_cast<std::size_t>(it->second)];
        max_child[static_cast<std::size_t>(it->second)] =
            std::max(max_child[static_cast<std::size_t>(it->second)], rank);
    }
    for (Index i = 0; i < n; ++i) {
        if (max_child[static_cast<std::size_t>(i)] != degrees[static_cast<std::size_t>(i)]) {
            throw Error("word set: child indices are not contiguous");
        }
    }
    return RebuiltTree{PlaneTree::from_degrees(std::move(degrees)), std::move(index_of)};
}

inline bool is_prefix(const Word& p, const Word& w) {
    return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

inline Word concat(const Word& a, const Word& b) {
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline ShuffleResult rebuild_with_map(const PlaneTree& t, const std::vector<Word>& images) {
    auto rebuilt = tree_from_words(images);
    VertexMap map;
    map.forward.resize(static_cast<std::size_t>(t.size()));
    for (Index v = 0; v < t.size(); ++v) {
        map.forward[static_cast<std::size_t>(v)] = rebuilt.index_of.at(images[static_cast<std::size_t>(v)]);
    }
    return ShuffleResult{std::move(rebuilt.tree), std::move(map)};
}

}  // namespace detail

// Cyclic shift of the tree along the ancestral line of the leaf v: the
// ancestor v_i at depth i becomes the root, the stretch below it slides to
// the top of the spine. Type-preserving; phi_{-i} inverts phi_i.
inline ShuffleResult cyclic_spine_shift(const PlaneTree& t, Index v, long long i) {
    if (!t.is_leaf(v)) throw NotALeaf("cyclic_spine_shift: v must be a leaf");
    const auto words = detail::tree_words(t);
    const detail::Word& leaf = words[static_cast<std::size_t>(v)];
    const long long len = static_cast<long long>(leaf.size());
    if (len == 0) {
        // singleton: only the trivial shift exists
        VertexMap id;
        id.forward = {0};
        return ShuffleResult{t, std::move(id)};
    }
    const long long i0 = ((i % len) + len) % len;
    if (i0 == 0) {
        VertexMap id;
        id.forward.resize(static_cast<std::size_t>(t.size()));
        for (Index x = 0; x < t.size(); ++x) id.forward[static_cast<std::size_t>(x)] = x;
        return ShuffleResult{t, std::move(id)};
    }
    const detail::Word prefix(leaf.begin(), leaf.begin() + i0);  // v_i
    const detail::Word suffix(leaf.begin() + i0, leaf.end());    // w

    std::vector<detail::Word> images(words.size());
    for (Index x = 0; x < t.size(); ++x) {
        const detail::Word& wx = words[static_cast<std::size_t>(x)];
        if (x == v) {
            images[static_cast<std::size_t>(x)] = detail::concat(suffix, prefix);
        } else if (detail::is_prefix(prefix, wx)) {
            images[static_cast<std::size_t>(x)] =
                detail::Word(wx.begin() + i0, wx.end());
        } else {
            images[static_cast<std::size_t>(x)] = detail::concat(suffix, wx);
        }
    }
    return detail::rebuild_with_map(t, images);
}

// Cuts the subtree rooted at u, leaves u as a leaf, and grafts the subtree at
// the leaf v. Type-preserving involution (re-applying with the marks swapped
// restores the tree).
inline ShuffleResult relocate_subtree(const PlaneTree& t, Index u, Index v) {
    if (!t.is_leaf(v)) throw NotALeaf("relocate_subtree: v must be a leaf");
    if (u == v || t.is_ancestor(u, v)) {
        throw AncestorViolation("relocate_subtree: u must not be an ancestor of v");
    }
    const auto words = detail::tree_words(t);
    const detail::Word& wu = words[static_cast<std::size_t>(u)];
    const detail::Word& wv = words[static_cast<std::size_t>(v)];
    std::vector<detail::Word> images(words.size());
    for (Index x = 0; x < t.size(); ++x) {
        const detail::Word& wx = words[static_cast<std::size_t>(x)];
        if (x != u && detail::is_prefix(wu, wx)) {
            images[static_cast<std::size_t>(x)] =
                detail::concat(wv, detail::Word(wx.begin() + static_cast<long long>(wu.size()), wx.end()));
        } else {
            images[static_cast<std::size_t>(x)] = wx;
        }
    }
    return detail::rebuild_with_map(t, images);
}

struct PsiResult {
    PlaneTree tree;
    VertexMap map;
    Index u_star = 0;
    Index v_star = 0;
};

// The appendix swap map: if the last child of v is ancestral to (or equals) u,
// exchange the pendant subtrees of u and v; otherwise move the subtree at v's
// last child behind u's children and swap the roles of the marks. Involution
// of the marked triples; preserves size and root degree, and shifts the type
// by the covering move (k_u, k_v) -> (k_u + 1, k_v - 1).
inline PsiResult psi_swap(const PlaneTree& t, Index u, Index v) {
    if (u == 0 || v == 0 || u == v || t.degree(v) < 1) {
        throw InvalidMarkedPair("psi_swap: need u, v != root, u != v, k_v >= 1");
    }
    const auto words = detail::tree_words(t);
    const detail::Word& wu = words[static_cast<std::size_t>(u)];
    const detail::Word& wv = words[static_cast<std::size_t>(v)];
    const int ku = t.degree(u);
    const int kv = t.degree(v);

    detail::Word last_child = wv;
    last_child.push_back(kv);

    std::vector<detail::Word> images(words.size());
    const bool case_exchange = detail::is_prefix(last_child, wu);

    if (case_exchange) {
        // u = v*(k_v)*w; all pendant subtrees of u and v swap positions.
        const detail::Word w(wu.begin() + static_cast<long long>(wv.size()) + 1, wu.end());
        detail::Word new_branch = wv;  // v*(k_u+1)
        new_branch.push_back(ku + 1);
        for (Index x = 0; x < t.size(); ++x) {
            const detail::Word& wx = words[static_cast<std::size_t>(x)];
            if (!detail::is_prefix(wv, wx) || wx.size() == wv.size()) {
                images[static_cast<std::size_t>(x)] = wx;  // v not a strict ancestor
                continue;
            }
            const int c = wx[wv.size()];
            if (c < kv) {
                // old subtrees of v slide below u* = v*(k_u+1)*w
                detail::Word img = detail::concat(new_branch, w);
                img.insert(img.end(), wx.begin() + static_cast<long long>(wv.size()), wx.end());
                images[static_cast<std::size_t>(x)] = img;
            } else if (detail::is_prefix(wu, wx) && wx.size() > wu.size()) {
                // old subtrees of u become the first k_u subtrees of v
                detail::Word img = wv;
                img.insert(img.end(), wx.begin() + static_cast<long long>(wu.size()), wx.end());
                images[static_cast<std::size_t>(x)] = img;
            } else {
                // the stretch from v's last child through u, and its side branches
                detail::Word img = new_branch;
                img.insert(img.end(), wx.begin() + static_cast<long long>(last_child.size()), wx.end());
                images[static_cast<std::size_t>(x)] = img;
            }
        }
        auto rebuilt = detail::rebuild_with_map(t, images);
        const Index u_star = rebuilt.map(u);
        const Index v_star = rebuilt.map(v);
        return PsiResult{std::move(rebuilt.tree), std::move(rebuilt.map), u_star, v_star};
    }

    // Move the subtree rooted at v's last child to the slot after u's children.
    detail::Word new_slot = wu;
    new_slot.push_back(ku + 1);
    for (Index x = 0; x < t.size(); ++x) {
        const detail::Word& wx = words[static_cast<std::size_t>(x)];
        if (detail::is_prefix(last_child, wx)) {
            detail::Word img = new_slot;
            img.insert(img.end(), wx.begin() + static_cast<long long>(last_child.size()), wx.end());
            images[static_cast<std::size_t>(x)] = img;
        } else {
            images[static_cast<std::size_t>(x)] = wx;
        }
    }
    auto rebuilt = detail::rebuild_with_map(t, images);
    const Index u_star = rebuilt.map(v);  // roles swap in this case
    const Index v_star = rebuilt.map(u);
    return PsiResult{std::move(rebuilt.tree), std::move(rebuilt.map), u_star, v_star};
}

namespace detail {

inline void serialize_degrees(const PlaneTree& t, std::ostringstream& out) {
    out << '[';
    for (Index i = 0; i < t.size(); ++i) {
        if (i) out << ',';
        out << t.degree(i);
    }
    out << ']';
}

}  // namespace detail

// Canonical key of the appendix equivalence class of (t, {u, v}): the reduced
// tree with the unmarked pendant subtrees removed, the marked positions, and
// the sorted multiset of removed subtrees. Two marked trees are equivalent
// iff their keys are equal.
inline std::string equivalence_key(const PlaneTree& t, Index u, Index v) {
    if (u == v) throw InvalidMarkedPair("equivalence_key: u != v required");
    if (u > v) std::swap(u, v);  // the marks are unordered; normalise to u < v
    const auto words = detail::tree_words(t);
    const detail::Word& wu = words[static_cast<std::size_t>(u)];
    const detail::Word& wv = words[static_cast<std::size_t>(v)];
    const bool ancestral = detail::is_prefix(wu, wv);  // u < v, so u prec v iff prefix

    std::vector<std::string> pendants;
    std::vector<detail::Word> kept;
    detail::Word second_mark;

    if (!ancestral) {
        for (Index c : t.children(u)) {
            std::ostringstream s;
            detail::serialize_degrees(t.subtree(c), s);
            pendants.push_back(s.str());
        }
        for (Index c : t.children(v)) {
            std::ostringstream s;
            detail::serialize_degrees(t.subtree(c), s);
            pendants.push_back(s.str());
        }
        for (Index x = 0; x < t.size(); ++x) {
            const detail::Word& wx = words[static_cast<std::size_t>(x)];
            const bool below_u = detail::is_prefix(wu, wx) && wx.size() > wu.size();
            const bool below_v = detail::is_prefix(wv, wx) && wx.size() > wv.size();
            if (!below_u && !below_v) kept.push_back(wx);
        }
        second_mark = wv;
    } else {
        const int w1 = wv[wu.size()];  // child of u on the path to v
        for (Index c : t.children(u)) {
            if (t.child_rank(c) == w1) continue;
            std::ostringstream s;
            detail::serialize_degrees(t.subtree(c), s);
            pendants.push_back(s.str());
        }
        for (Index c : t.children(v)) {
            std::ostringstream s;
            detail::serialize_degrees(t.subtree(c), s);
            pendants.push_back(s.str());
        }
        detail::Word path_child = wu;
        path_child.push_back(w1);
        for (Index x = 0; x < t.size(); ++x) {
            const detail::Word& wx = words[static_cast<std::size_t>(x)];
            if (!(detail::is_prefix(wu, wx) && wx.size() > wu.size())) {
                kept.push_back(wx);
                continue;
            }
            // keep only the branch through w1 that does not pass v, rebased
            // so the path child becomes child 1
            if (!detail::is_prefix(path_child, wx)) continue;
            if (detail::is_prefix(wv, wx) && wx.size() > wv.size()) continue;
            detail::Word img = wu;
            img.push_back(1);
            img.insert(img.end(), wx.begin() + static_cast<long long>(path_child.size()), wx.end());
            kept.push_back(img);
        }
        second_mark = wu;
        second_mark.push_back(1);
        second_mark.insert(second_mark.end(), wv.begin() + static_cast<long long>(path_child.size()), wv.end());
    }

    auto rebuilt = detail::tree_from_words(kept);
    std::sort(pendants.begin(), pendants.end());
    std::ostringstream key;
    key << "base=";
    detail::serialize_degrees(rebuilt.tree, key);
    Index m1 = rebuilt.index_of.at(wu);
    Index m2 = rebuilt.index_of.at(second_mark);
    if (m1 > m2) std::swap(m1, m2);
    key << ";marks=" << m1 << ',' << m2 << ";f=";
    for (const auto& p : pendants) key << p << ';';
    return key.str();
}

}  // namespace arbor
