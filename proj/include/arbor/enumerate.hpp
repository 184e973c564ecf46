#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/moments.hpp"
#include "arbor/stats.hpp"
#include "arbor/tree.hpp"

namespace arbor {

inline constexpr Index kDefaultEnumCap = 12;

// Visits every tree of the given type exactly once, in lexicographic order of
// the degree sequence. Iterates distinct multiset orderings with prefix
// pruning on the partial-sum constraint rather than filtering all n!
// arrangements.
template <class F>
void for_each_tree_with_type(const TypeSequence& type, F&& fn, Index cap = kDefaultEnumCap) {
    const Index n = type.size();
    if (n > cap) throw SizeCapExceeded("type size exceeds enumeration cap");
    std::vector<Index> remaining(type.counts());
    std::vector<int> degrees(static_cast<std::size_t>(n));
    auto rec = [&](auto&& self, Index pos, long long walk) -> void {
        if (pos == n) {
            fn(PlaneTree::from_degrees(degrees));
            return;
        }
        for (Index d = 0; d < static_cast<Index>(remaining.size()); ++d) {
            if (remaining[static_cast<std::size_t>(d)] == 0) continue;
            const long long next_walk = walk + d - 1;
            if (pos == n - 1 ? next_walk != -1 : next_walk < 0) continue;
            --remaining[static_cast<std::size_t>(d)];
            degrees[static_cast<std::size_t>(pos)] = static_cast<int>(d);
            self(self, pos + 1, next_walk);
            ++remaining[static_cast<std::size_t>(d)];
        }
    };
    rec(rec, 0, 0);
}

inline std::vector<PlaneTree> enumerate_trees_with_type(const TypeSequence& type,
                                                        Index cap = kDefaultEnumCap) {
    std::vector<PlaneTree> out;
    for_each_tree_with_type(type, [&](const PlaneTree& t) { out.push_back(t); }, cap);
    return out;
}

// Visits every plane tree of size n (optionally with all degrees <= max_degree).
template <class F>
void for_each_tree_of_size(Index n, F&& fn, Index cap = kDefaultEnumCap,
                           Index max_degree = -1) {
    if (n > cap) throw SizeCapExceeded("size exceeds enumeration cap");
    if (n < 1) throw Error("for_each_tree_of_size: n must be >= 1");
    if (max_degree < 0) max_degree = n - 1;
    std::vector<int> degrees(static_cast<std::size_t>(n));
    auto rec = [&](auto&& self, Index pos, long long walk) -> void {
        if (pos == n) {
            fn(PlaneTree::from_degrees(degrees));
            return;
        }
        // remaining budget: total children still assignable
        const long long budget = (n - 1) - (walk + pos);
        const Index hi = std::min<long long>(max_degree, budget);
        for (Index d = 0; d <= hi; ++d) {
            const long long next_walk = walk + d - 1;
            if (pos == n - 1 ? next_walk != -1 : next_walk < 0) continue;
            degrees[static_cast<std::size_t>(pos)] = static_cast<int>(d);
            self(self, pos + 1, next_walk);
        }
    };
    rec(rec, 0, 0);
}

// |T(n)| = |W_br(n)| / n = n! / (prod n_i! * n), the cycle-lemma count.
inline BigInt count_trees_with_type(const TypeSequence& type) {
    const Index n = type.size();
    BigInt numerator = 1;
    for (Index i = 2; i <= n; ++i) numerator *= i;
    BigInt denominator = n;
    for (Index i = 0; i <= type.max_degree(); ++i) {
        for (Index f = 2; f <= type.count(i); ++f) denominator *= f;
    }
    return numerator / denominator;
}

// Types of size n correspond to partitions of n-1 into positive parts
// (the positive degrees); n_0 fills up the rest.
inline std::vector<TypeSequence> all_types_of_size(Index n) {
    if (n < 1) return {};
    std::vector<TypeSequence> out;
    std::vector<Index> counts(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, Index largest, Index left, Index used) -> void {
        if (left == 0) {
            counts[0] = n - used;
            if (counts[0] >= 1) {
                std::vector<Index> copy(counts.begin(), counts.end());
                out.push_back(TypeSequence::from_counts(std::move(copy)));
            }
            return;
        }
        for (Index part = std::min(largest, left); part >= 1; --part) {
            ++counts[static_cast<std::size_t>(part)];
            self(self, part, left - part, used + 1);
            --counts[static_cast<std::size_t>(part)];
        }
    };
    rec(rec, n - 1, n - 1, 0);
    return out;
}

// Z_n(w) = sum over trees of size n of prod w_{k_v}, exactly.
inline BigRat partition_function(const std::vector<BigRat>& w, Index n,
                                 Index cap = kDefaultEnumCap) {
    if (w.empty() || w[0] == 0) {
        throw ZeroPartitionFunction("weight sequence must have w_0 > 0");
    }
    BigRat z = 0;
    for_each_tree_of_size(
        n,
        [&](const PlaneTree& t) {
            BigRat prod = 1;
            for (int d : t.degrees()) {
                prod *= w[static_cast<std::size_t>(d)];
                if (prod == 0) break;
            }
            z += prod;
        },
        cap, static_cast<Index>(w.size()) - 1);
    return z;
}

// Exact finitely-supported law; probabilities are rationals summing to 1.
struct ExactDistribution {
    std::vector<std::pair<long long, BigRat>> atoms;  // sorted by value

    BigRat probability_at_most(long long z) const {
        BigRat acc = 0;
        for (const auto& [value, p] : atoms) {
            if (value <= z) acc += p;
        }
        return acc;
    }

    BigRat probability_at_least(long long z) const {
        BigRat acc = 0;
        for (const auto& [value, p] : atoms) {
            if (value >= z) acc += p;
        }
        return acc;
    }

    BigRat total() const {
        BigRat acc = 0;
        for (const auto& [value, p] : atoms) acc += p;
        return acc;
    }
};

enum class TreeStatistic {
    height,
    width,
    second_order_height,
    max_right_spinal_weight,
    leaf_count,
    size,
    spine_product,
    min_lr_spine,
};

inline long long compute_statistic(const PlaneTree& t, TreeStatistic stat) {
    switch (stat) {
        case TreeStatistic::height: return height(t);
        case TreeStatistic::width: return width(t);
        case TreeStatistic::second_order_height: return second_order_height(t);
        case TreeStatistic::max_right_spinal_weight: return max_right_spinal_weight(t);
        case TreeStatistic::leaf_count: return t.leaf_count();
        case TreeStatistic::size: return t.size();
        case TreeStatistic::spine_product: return spine_product_stat(t);
        case TreeStatistic::min_lr_spine: return min_lr_spine_stat(t);
    }
    throw Error("unknown statistic");
}

// Exact law of a statistic under the uniform measure on T(type), optionally
// conditioned on the root degree.
inline ExactDistribution exact_statistic_distribution(
    const TypeSequence& type, TreeStatistic stat,
    std::optional<Index> root_degree = std::nullopt, Index cap = kDefaultEnumCap) {
    std::vector<std::pair<long long, Index>> counts;
    Index total = 0;
    for_each_tree_with_type(
        type,
        [&](const PlaneTree& t) {
            if (root_degree && t.degree(0) != *root_degree) return;
            ++total;
            const long long value = compute_statistic(t, stat);
            auto it = std::lower_bound(counts.begin(), counts.end(),
                                       std::make_pair(value, Index{0}));
            if (it != counts.end() && it->first == value) {
                ++it->second;
            } else {
                counts.insert(it, {value, 1});
            }
        },
        cap);
    if (total == 0) throw EmptyConditioning("no tree matches the root-degree conditioning");
    ExactDistribution dist;
    dist.atoms.reserve(counts.size());
    for (const auto& [value, c] : counts) {
        dist.atoms.emplace_back(value, BigRat(c, total));
    }
    return dist;
}

// All types covered by nt' under the height ordering of types: either drop a
// unary vertex, or apply the degree-skewing (k, l) move.
inline std::vector<TypeSequence> covered_types(const TypeSequence& nt_prime) {
    std::vector<TypeSequence> out;
    const auto& counts = nt_prime.counts();
    const Index top = nt_prime.max_degree();
    if (nt_prime.count(1) >= 1 && nt_prime.size() >= 2) {
        std::vector<Index> c(counts);
        --c[1];
        out.push_back(TypeSequence::from_counts(std::move(c)));
    }
    for (Index k = 1; k <= top; ++k) {
        for (Index l = k; l <= top; ++l) {
            if (nt_prime.count(k) < 1 || nt_prime.count(l) < 1) continue;
            if (k == l && nt_prime.count(k) < 2) continue;
            std::vector<Index> c(static_cast<std::size_t>(std::max(top, l + 1)) + 1, 0);
            for (Index i = 0; i <= top; ++i) c[static_cast<std::size_t>(i)] = nt_prime.count(i);
            --c[static_cast<std::size_t>(k)];
            ++c[static_cast<std::size_t>(k - 1)];
            --c[static_cast<std::size_t>(l)];
            ++c[static_cast<std::size_t>(l + 1)];
            out.push_back(TypeSequence::from_counts(std::move(c)));
        }
    }
    return out;
}

struct DominationResult {
    bool dominated = false;
    long long witness = 0;  // violating z when dominated is false
};

// True iff height(T_nt | root degree r) is stochastically dominated by
// height(T_nt' | root degree r): F_{T'}(z) <= F_T(z) for all z.
inline DominationResult check_stochastic_domination(const TypeSequence& nt,
                                                    const TypeSequence& nt_prime, Index r,
                                                    Index cap = kDefaultEnumCap) {
    const auto base = exact_statistic_distribution(nt, TreeStatistic::height, r, cap);
    const auto upper = exact_statistic_distribution(nt_prime, TreeStatistic::height, r, cap);
    std::vector<long long> zs;
    for (const auto& [v, p] : base.atoms) zs.push_back(v);
    for (const auto& [v, p] : upper.atoms) zs.push_back(v);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    for (long long z : zs) {
        if (upper.probability_at_most(z) > base.probability_at_most(z)) {
            return {false, z};
        }
    }
    return {true, 0};
}

namespace detail {

inline BigInt binomial(Index n, Index k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (Index i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

// P(max_{i in S} c_i > z) over a uniform subset S drawn from the union of the
// two binomial families of the given sizes; returned as (count, family size).
inline std::pair<BigInt, BigInt> max_tail_count(const std::vector<double>& c, Index m,
                                                Index size_a, Index size_b, double z) {
    Index le = 0;  // elements with value <= z
    for (Index i = 0; i < m; ++i) {
        if (c[static_cast<std::size_t>(i)] <= z) ++le;
    }
    BigInt family = binomial(m, size_a);
    BigInt within = binomial(le, size_a);
    if (size_b != size_a) {
        family += binomial(m, size_b);
        within += binomial(le, size_b);
    }
    // subsets whose max exceeds z = all minus those living in {c_i <= z};
    // the empty set has max 0 and is counted by C(0, 0) at z >= 0.
    return {family - within, family};
}

}  // namespace detail

// Exact check of the eggs-in-one-basket lemma: part 1 when |c| = k + l,
// part 2 when |c| = k + l - 1. Returns true when the stated domination holds
// for every threshold; the lemma is a theorem, so false flags a bug.
inline bool eggs_in_basket_check(Index k, Index l, const std::vector<double>& c) {
    if (!(1 <= k && k <= l)) throw Error("eggs_in_basket_check: need 1 <= k <= l");
    Index m = 0;
    if (static_cast<Index>(c.size()) == k + l) {
        m = k + l;
    } else if (static_cast<Index>(c.size()) == k + l - 1) {
        m = k + l - 1;
    } else {
        throw Error("eggs_in_basket_check: |c| must be k+l (part 1) or k+l-1 (part 2)");
    }
    for (double x : c) {
        if (!(x > 0.0)) throw Error("eggs_in_basket_check: values must be positive");
    }
    std::vector<double> thresholds{0.0};
    thresholds.insert(thresholds.end(), c.begin(), c.end());
    for (double z : thresholds) {
        const auto [cnt_a, fam_a] = detail::max_tail_count(c, m, k - 1, l + 1, z);
        const auto [cnt_b, fam_b] = detail::max_tail_count(c, m, k, l, z);
        // P_A(max > z) <= P_B(max > z), cross-multiplied exactly
        if (cnt_a * fam_b > cnt_b * fam_a) return false;
    }
    return true;
}

}  // namespace arbor
