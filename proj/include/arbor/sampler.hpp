#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/enumerate.hpp"
#include "arbor/offspring.hpp"
#include "arbor/rng.hpp"
#include "arbor/tree.hpp"
#include "arbor/walk.hpp"

namespace arbor {

inline constexpr long long kDefaultMaxAttempts = 10'000'000;

namespace detail {

// Jumps conditioned on summing to -1 are exchangeable, so the Vervaat
// rotation of their bridge decodes to the uniform tree on the induced type.
inline PlaneTree tree_from_conditioned_jumps(std::vector<int>& degrees_buffer) {
    const Index n = static_cast<Index>(degrees_buffer.size());
    long long walk = 0, min_walk = 0;
    Index tau = 0;
    for (Index j = 0; j < n; ++j) {
        walk += degrees_buffer[static_cast<std::size_t>(j)] - 1;
        if (walk < min_walk) {
            min_walk = walk;
            tau = j + 1;
        }
    }
    std::rotate(degrees_buffer.begin(), degrees_buffer.begin() + tau, degrees_buffer.end());
    return PlaneTree::from_degrees(degrees_buffer);
}

}  // namespace detail

// Exactly uniform over trees with the given type, O(n): uniformly permute the
// jump multiset, form the bridge, Vervaat-rotate, decode depth-first.
inline PlaneTree sample_tree_with_type(const TypeSequence& type, Rng& rng) {
    std::vector<int> degrees;
    degrees.reserve(static_cast<std::size_t>(type.size()));
    for (Index i = 0; i <= type.max_degree(); ++i) {
        for (Index c = 0; c < type.count(i); ++c) degrees.push_back(static_cast<int>(i));
    }
    rng.shuffle(degrees);
    return detail::tree_from_conditioned_jumps(degrees);
}

// Plane tree plus a labelling of [n]; vertex at depth-first slot p carries
// labels[p], and the vertex with label j has d_j children.
struct LabelledTree {
    PlaneTree tree;
    std::vector<Index> labels;  // 1-based labels
};

// Uniform plane tree on the induced type, then labels {j : d_j = i} assigned
// uniformly within each degree class. Forgetting labels and order gives the
// uniform rooted labelled tree with degree sequence d.
inline LabelledTree sample_tree_with_degree_sequence(const std::vector<int>& d, Rng& rng) {
    const Index n = static_cast<Index>(d.size());
    long long sum = 0;
    int max_deg = 0;
    for (int x : d) {
        if (x < 0) throw InvalidDegreeSum("degree sequence: negative entry");
        sum += x;
        max_deg = std::max(max_deg, x);
    }
    if (sum != n - 1) throw InvalidDegreeSum("degree sequence: sum d_i != n-1");

    std::vector<Index> counts(static_cast<std::size_t>(max_deg) + 1, 0);
    for (int x : d) ++counts[static_cast<std::size_t>(x)];
    PlaneTree tree = sample_tree_with_type(TypeSequence::from_counts(counts), rng);

    std::vector<std::vector<Index>> labels_by_degree(static_cast<std::size_t>(max_deg) + 1);
    for (Index j = 0; j < n; ++j) {
        labels_by_degree[static_cast<std::size_t>(d[static_cast<std::size_t>(j)])].push_back(j + 1);
    }
    for (auto& group : labels_by_degree) rng.shuffle(group);

    std::vector<Index> cursor(static_cast<std::size_t>(max_deg) + 1, 0);
    std::vector<Index> labels(static_cast<std::size_t>(n));
    for (Index v = 0; v < n; ++v) {
        auto& group = labels_by_degree[static_cast<std::size_t>(tree.degree(v))];
        labels[static_cast<std::size_t>(v)] = group[static_cast<std::size_t>(
            cursor[static_cast<std::size_t>(tree.degree(v))]++)];
    }
    return LabelledTree{std::move(tree), std::move(labels)};
}

namespace detail {

inline void check_reachable(const std::vector<double>& pmf, Index n) {
    // Necessary range/lattice conditions for P(sum of n draws = n-1) > 0.
    Index lo = -1, hi = -1;
    for (Index k = 0; k < static_cast<Index>(pmf.size()); ++k) {
        if (pmf[static_cast<std::size_t>(k)] > 0.0) {
            if (lo < 0) lo = k;
            hi = k;
        }
    }
    if (lo < 0) throw InvalidDistribution("pmf has empty support");
    if (n * lo > n - 1 || n * hi < n - 1) {
        throw UnreachableSize("P(total offspring = n-1) = 0 for this pmf");
    }
    Index g = 0;
    for (Index k = lo; k < static_cast<Index>(pmf.size()); ++k) {
        if (pmf[static_cast<std::size_t>(k)] > 0.0) g = std::gcd(g, k - lo);
    }
    if (g > 0 && (n - 1 - n * lo) % g != 0) {
        throw UnreachableSize("P(total offspring = n-1) = 0 for this pmf (lattice)");
    }
}

}  // namespace detail

// Conditioned Bienaymé tree by rejection on the offspring sum: draw n i.i.d.
// offspring values, accept when they sum to n-1, rotate, decode. Exact; the
// acceptance rate is Theta(n^-1/2) for light tails, and heavy-tailed pmfs hit
// the max_attempts escape hatch instead of spinning forever.
class BienaymeRejectionSampler {
public:
    BienaymeRejectionSampler(const OffspringDistribution& mu, Index n)
        : n_(n), draw_(make_draw(mu, n)) {}

    PlaneTree sample(Rng& rng, long long max_attempts = kDefaultMaxAttempts) const {
        std::vector<int> degrees(static_cast<std::size_t>(n_));
        const long long target = n_ - 1;
        for (long long attempt = 0; attempt < max_attempts; ++attempt) {
            long long sum = 0;
            bool overshoot = false;
            for (Index i = 0; i < n_; ++i) {
                const Index k = draw_.draw(rng);
                degrees[static_cast<std::size_t>(i)] = static_cast<int>(k);
                sum += k;
                if (sum > target) {
                    overshoot = true;
                    break;
                }
            }
            if (!overshoot && sum == target) {
                return detail::tree_from_conditioned_jumps(degrees);
            }
        }
        throw AttemptsExhausted("conditioned Bienaymé rejection budget exhausted "
                                "(heavy-tailed pmf? raise max_attempts or use ConditionedSumTables)");
    }

private:
    static DiscreteSampler make_draw(const OffspringDistribution& mu, Index n) {
        if (n < 1) throw Error("conditioned Bienaymé: n must be >= 1");
        const auto pmf = mu.pmf_table(std::max<Index>(n - 1, 1));
        detail::check_reachable(pmf, n);
        return DiscreteSampler(pmf);
    }

    Index n_;
    DiscreteSampler draw_;
};

inline PlaneTree sample_conditioned_bienayme(const OffspringDistribution& mu, Index n, Rng& rng,
                                             long long max_attempts = kDefaultMaxAttempts) {
    return BienaymeRejectionSampler(mu, n).sample(rng, max_attempts);
}

// Divide-and-conquer sampler for offspring vectors conditioned on their sum.
// Precomputes truncated self-convolutions of the pmf along the binary split
// tree of n, then splits the target sum recursively. O(n log n) per sample
// after an O(n^2 / log-ish) one-time build; exact conditional law up to
// floating-point rounding. This is what makes the subcritical power-law
// preset feasible, where rejection acceptance decays like n^-2.
class ConditionedSumTables {
public:
    ConditionedSumTables(const OffspringDistribution& mu, Index n)
        : n_(n), target_(n - 1) {
        if (n < 1) throw Error("ConditionedSumTables: n must be >= 1");
        pmf_ = mu.pmf_table(std::max<Index>(target_, 1));
        if (n == 1) {
            if (pmf_[0] <= 0.0) throw UnreachableSize("mu(0) = 0 with n = 1");
            return;
        }
        detail::check_reachable(pmf_, n);
        build(n_);
        if (table(n_)[static_cast<std::size_t>(target_)] <= 0.0) {
            throw UnreachableSize("P(total offspring = n-1) = 0 for this pmf");
        }
    }

    PlaneTree sample(Rng& rng) const {
        std::vector<int> degrees(static_cast<std::size_t>(n_));
        Index filled = 0;
        sample_block(n_, target_, degrees, filled, rng);
        return detail::tree_from_conditioned_jumps(degrees);
    }

private:
    const std::vector<double>& table(Index m) const { return tables_.at(m); }

    void build(Index m) {
        if (tables_.count(m)) return;
        if (m == 1) {
            std::vector<double> t(pmf_.begin(), pmf_.end());
            t.resize(static_cast<std::size_t>(target_) + 1, 0.0);
            tables_.emplace(1, std::move(t));
            return;
        }
        const Index left = m / 2, right = m - left;
        build(left);
        build(right);
        const auto& a = table(left);
        const auto& b = table(right);
        std::vector<double> c(static_cast<std::size_t>(target_) + 1, 0.0);
        for (Index s = 0; s <= target_; ++s) {
            double acc = 0.0;
            for (Index x = 0; x <= s; ++x) {
                const double pa = a[static_cast<std::size_t>(x)];
                if (pa != 0.0) acc += pa * b[static_cast<std::size_t>(s - x)];
            }
            c[static_cast<std::size_t>(s)] = acc;
        }
        tables_.emplace(m, std::move(c));
    }

    void sample_block(Index m, Index s, std::vector<int>& out, Index& filled, Rng& rng) const {
        if (m == 1) {
            out[static_cast<std::size_t>(filled++)] = static_cast<int>(s);
            return;
        }
        const Index left = m / 2, right = m - left;
        const auto& a = table(left);
        const auto& b = table(right);
        double total = 0.0;
        for (Index x = 0; x <= s; ++x) {
            const double pa = a[static_cast<std::size_t>(x)];
            if (pa != 0.0) total += pa * b[static_cast<std::size_t>(s - x)];
        }
        double u = rng.uniform01() * total;
        Index chosen = -1;
        for (Index x = 0; x <= s; ++x) {
            const double w = a[static_cast<std::size_t>(x)] * b[static_cast<std::size_t>(s - x)];
            if (w == 0.0) continue;
            chosen = x;  // falls back to the last feasible split under rounding
            u -= w;
            if (u <= 0.0) break;
        }
        if (chosen < 0) throw Error("ConditionedSumTables: infeasible split state");
        sample_block(left, chosen, out, filled, rng);
        sample_block(right, s - chosen, out, filled, rng);
    }

    Index n_;
    Index target_;
    std::vector<double> pmf_;
    std::map<Index, std::vector<double>> tables_;
};

// Simply generated tree of size n: P(t) = w(t) / Z_n. Exact enumeration for
// n <= enum_cap; beyond that a pmf tilt must accompany the weights, and the
// Bienaymé sampler applies because the conditioned laws coincide.
inline PlaneTree sample_simply_generated(const OffspringDistribution& w, Index n, Rng& rng,
                                         Index enum_cap = kDefaultEnumCap) {
    if (w.is_pmf()) {
        // a pmf is its own weight sequence; delegate directly
        return sample_conditioned_bienayme(w, n, rng);
    }
    const auto& weights = w.raw_weights();
    if (n <= enum_cap) {
        std::vector<PlaneTree> trees;
        std::vector<double> mass;
        double total = 0.0;
        for_each_tree_of_size(
            n,
            [&](const PlaneTree& t) {
                double prod = 1.0;
                for (int d : t.degrees()) prod *= weights[static_cast<std::size_t>(d)];
                if (prod > 0.0) {
                    trees.push_back(t);
                    mass.push_back(prod);
                    total += prod;
                }
            },
            enum_cap, static_cast<Index>(weights.size()) - 1);
        if (trees.empty() || total <= 0.0) {
            throw ZeroPartitionFunction("Z_n(w) = 0: no tree of this size has positive weight");
        }
        double u = rng.uniform01() * total;
        for (std::size_t i = 0; i < trees.size(); ++i) {
            u -= mass[i];
            if (u <= 0.0) return trees[i];
        }
        return trees.back();
    }
    if (w.tilt() == nullptr) {
        throw NoTiltProvided("simply generated sampling beyond the enumeration cap "
                             "requires an equivalent pmf tilt");
    }
    return sample_conditioned_bienayme(*w.tilt(), n, rng);
}

// Rejection from the type-uniform sampler until the root degree is r; only
// used at enumeration scale.
inline PlaneTree sample_tree_with_type_and_root_degree(const TypeSequence& type, Index r, Rng& rng,
                                                       long long max_attempts = kDefaultMaxAttempts) {
    if (type.count(r) < 1) throw EmptyConditioning("type has no vertex of the requested degree");
    for (long long attempt = 0; attempt < max_attempts; ++attempt) {
        PlaneTree t = sample_tree_with_type(type, rng);
        if (t.degree(0) == r) return t;
    }
    throw AttemptsExhausted("sample_tree_with_type_and_root_degree: no tree with that root degree found");
}

}  // namespace arbor
