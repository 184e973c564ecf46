#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "arbor/common.hpp"

namespace arbor {

// Vertex counts by out-degree: counts[i] = number of vertices with i children.
// A valid type satisfies sum(counts) = 1 + sum(i * counts[i]) and counts[0] >= 1.
class TypeSequence {
public:
    static TypeSequence from_counts(std::vector<Index> counts) {
        while (!counts.empty() && counts.back() == 0) counts.pop_back();
        if (counts.empty()) throw InvalidDegreeSequence("type sequence: empty");
        Index total = 0, weighted = 0;
        for (Index i = 0; i < static_cast<Index>(counts.size()); ++i) {
            if (counts[i] < 0) throw InvalidDegreeSequence("type sequence: negative count");
            total += counts[i];
            weighted += i * counts[i];
        }
        if (total != weighted + 1) {
            throw InvalidDegreeSequence("type sequence: sum(n_i) != 1 + sum(i*n_i)");
        }
        if (counts[0] < 1) throw InvalidDegreeSequence("type sequence: no leaves");
        TypeSequence t;
        t.counts_ = std::move(counts);
        t.size_ = total;
        return t;
    }

    // Type with r leaves, n-r unary vertices and one vertex of degree r;
    // the height-maximising type at fixed root degree.
    static TypeSequence star(Index n, Index r) {
        if (r < 1 || r > n) throw InvalidDegreeSequence("star type: need 1 <= r <= n");
        std::vector<Index> counts(static_cast<std::size_t>(r) + 1, 0);
        counts[0] = r;
        counts[1] += n - r;
        counts[static_cast<std::size_t>(r)] += 1;
        return from_counts(std::move(counts));
    }

    Index size() const { return size_; }
    Index count(Index degree) const {
        return degree < static_cast<Index>(counts_.size()) ? counts_[static_cast<std::size_t>(degree)] : 0;
    }
    Index max_degree() const { return static_cast<Index>(counts_.size()) - 1; }
    const std::vector<Index>& counts() const { return counts_; }

    bool operator==(const TypeSequence& other) const { return counts_ == other.counts_; }
    bool operator<(const TypeSequence& other) const { return counts_ < other.counts_; }

private:
    TypeSequence() = default;
    std::vector<Index> counts_;
    Index size_ = 0;
};

// Rooted ordered tree stored as the depth-first child-count sequence.
// degrees()[i] is the number of children of the i-th vertex in depth-first
// (= lexicographic) order; this sequence is in bijection with the
// Lukasiewicz path. Immutable after construction and safe to share across
// concurrent readers.
class PlaneTree {
public:
    static PlaneTree from_degrees(std::vector<int> degrees) {
        if (degrees.empty()) throw InvalidDegreeSequence("degree sequence: empty");
        const Index n = static_cast<Index>(degrees.size());
        long long walk = 0;
        for (Index i = 0; i < n; ++i) {
            if (degrees[static_cast<std::size_t>(i)] < 0) {
                throw InvalidDegreeSequence("degree sequence: negative child count");
            }
            walk += degrees[static_cast<std::size_t>(i)] - 1;
            if (i < n - 1 && walk < 0) {
                throw InvalidDegreeSequence("degree sequence: depth-first walk leaves the excursion set");
            }
        }
        if (walk != -1) {
            throw InvalidDegreeSequence("degree sequence: child counts do not sum to n-1");
        }
        return PlaneTree(std::move(degrees));
    }

    static PlaneTree singleton() { return from_degrees({0}); }

    Index size() const { return static_cast<Index>(degrees_.size()); }
    int degree(Index v) const { return degrees_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& degrees() const { return degrees_; }

    std::optional<Index> parent(Index v) const {
        check_vertex(v);
        return v == 0 ? std::nullopt : std::optional<Index>(parent_[static_cast<std::size_t>(v)]);
    }

    // Parent index with -1 for the root; avoids optional in hot loops.
    Index parent_raw(Index v) const { return parent_[static_cast<std::size_t>(v)]; }

    // 1-based position among siblings; 0 for the root.
    int child_rank(Index v) const { return child_rank_[static_cast<std::size_t>(v)]; }

    Index depth(Index v) const {
        check_vertex(v);
        Index d = 0;
        while (v != 0) {
            v = parent_[static_cast<std::size_t>(v)];
            ++d;
        }
        return d;
    }

    std::vector<Index> children(Index v) const {
        check_vertex(v);
        std::vector<Index> out;
        out.reserve(static_cast<std::size_t>(degree(v)));
        Index child = v + 1;
        for (int j = 0; j < degree(v); ++j) {
            out.push_back(child);
            child = subtree_end(child);
        }
        return out;
    }

    // Exclusive end of v's contiguous depth-first block.
    Index subtree_end(Index v) const {
        check_vertex(v);
        long long walk = 0;
        Index i = v;
        do {
            walk += degree(i) - 1;
            ++i;
        } while (walk >= 0);
        return i;
    }

    bool is_ancestor(Index u, Index v) const {
        check_vertex(u);
        check_vertex(v);
        while (v > u) v = parent_[static_cast<std::size_t>(v)];
        return v == u;
    }

    // Most recent common ancestor by parent walks with depth equalisation.
    Index mrca(Index u, Index v) const {
        Index du = depth(u), dv = depth(v);
        while (du > dv) { u = parent_[static_cast<std::size_t>(u)]; --du; }
        while (dv > du) { v = parent_[static_cast<std::size_t>(v)]; --dv; }
        while (u != v) {
            u = parent_[static_cast<std::size_t>(u)];
            v = parent_[static_cast<std::size_t>(v)];
        }
        return u;
    }

    Index leaf_count() const {
        Index c = 0;
        for (int d : degrees_) c += (d == 0);
        return c;
    }

    bool is_leaf(Index v) const {
        check_vertex(v);
        return degree(v) == 0;
    }

    TypeSequence type() const {
        int max_deg = 0;
        for (int d : degrees_) max_deg = std::max(max_deg, d);
        std::vector<Index> counts(static_cast<std::size_t>(max_deg) + 1, 0);
        for (int d : degrees_) ++counts[static_cast<std::size_t>(d)];
        return TypeSequence::from_counts(std::move(counts));
    }

    PlaneTree subtree(Index v) const {
        const Index end = subtree_end(v);
        return from_degrees(std::vector<int>(degrees_.begin() + v, degrees_.begin() + end));
    }

    bool operator==(const PlaneTree& other) const { return degrees_ == other.degrees_; }
    bool operator<(const PlaneTree& other) const { return degrees_ < other.degrees_; }

private:
    explicit PlaneTree(std::vector<int> degrees) : degrees_(std::move(degrees)) {
        const std::size_t n = degrees_.size();
        parent_.assign(n, -1);
        child_rank_.assign(n, 0);
        // Stack of (vertex, children still unattached); parents precede
        // children in depth-first order so one forward pass suffices.
        std::vector<std::pair<Index, int>> stack;
        stack.reserve(64);
        if (degrees_[0] > 0) stack.emplace_back(0, degrees_[0]);
        for (std::size_t i = 1; i < n; ++i) {
            auto& [p, remaining] = stack.back();
            parent_[i] = p;
            child_rank_[i] = degrees_[static_cast<std::size_t>(p)] - remaining + 1;
            --remaining;
            const bool exhausted = remaining == 0;
            if (exhausted) stack.pop_back();
            if (degrees_[i] > 0) stack.emplace_back(static_cast<Index>(i), degrees_[i]);
        }
    }

    void check_vertex(Index v) const {
        if (v < 0 || v >= size()) throw Error("vertex index out of range");
    }

    std::vector<int> degrees_;
    std::vector<Index> parent_;
    std::vector<int> child_rank_;
};

}  // namespace arbor
