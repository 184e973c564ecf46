#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/enumerate.hpp"
#include "arbor/moments.hpp"
#include "arbor/sampler.hpp"
#include "arbor/stats.hpp"
#include "arbor/transform.hpp"
#include "arbor/walk.hpp"

namespace arbor {

struct IdentityReport {
    struct Item {
        std::string name;
        bool pass = true;
        std::string detail;  // counterexample description when failing
    };
    std::vector<Item> items;

    bool all_pass() const {
        for (const auto& item : items) {
            if (!item.pass) return false;
        }
        return true;
    }
};

struct IdentitySuiteConfig {
    Index cap = 8;             // exhaustive checks over all trees of size <= cap
    Index random_trials = 100; // random large trees for the walk identities
    Index large_size = 10000;
    Index h2_trials = 1000;    // random trees for the second-order-height check
    Index h2_size = 500;
    Index moment_trials = 1000;
    std::uint64_t seed = 1;
    int parallelism = 1;       // bounds workers for the random-tree corpora
};

namespace detail {

// Pairwise definition of the second-order height, evaluated literally.
inline Index brute_force_h2(const PlaneTree& t) {
    const Index n = t.size();
    const auto dep = depths(t);
    Index best = 0;
    std::vector<char> marked(static_cast<std::size_t>(n));
    std::vector<Index> anc(static_cast<std::size_t>(n));
    for (Index u = 0; u < n; ++u) {
        std::fill(marked.begin(), marked.end(), 0);
        for (Index x = u;; x = t.parent_raw(x)) {
            marked[static_cast<std::size_t>(x)] = 1;
            if (x == 0) break;
        }
        for (Index v = 0; v < n; ++v) {
            anc[static_cast<std::size_t>(v)] = marked[static_cast<std::size_t>(v)]
                ? dep[static_cast<std::size_t>(v)]
                : anc[static_cast<std::size_t>(t.parent_raw(v))];
        }
        for (Index v = 0; v < n; ++v) {
            const Index d = std::min(dep[static_cast<std::size_t>(u)], dep[static_cast<std::size_t>(v)]) -
                            anc[static_cast<std::size_t>(v)];
            best = std::max(best, d);
        }
    }
    return best;
}

inline PlaneTree random_uniform_plane_tree(Index n, Rng& rng) {
    static const OffspringDistribution geo = OffspringDistribution::geometric(0.5);
    return sample_conditioned_bienayme(geo, n, rng);
}

// Per-index seeding keeps the corpus identical for any worker count.
inline std::vector<PlaneTree> random_tree_corpus(Index count, Index size, std::uint64_t seed,
                                                 int parallelism) {
    std::vector<PlaneTree> out(static_cast<std::size_t>(count), PlaneTree::singleton());
    const BienaymeRejectionSampler sampler(OffspringDistribution::geometric(0.5), size);
    const int threads = std::max(1, parallelism);
    auto work = [&](Index lo, Index hi) {
        for (Index i = lo; i < hi; ++i) {
            Rng rng(derive_seed(seed, 0x636f7270ULL, static_cast<std::uint64_t>(i)));
            out[static_cast<std::size_t>(i)] = sampler.sample(rng);
        }
    };
    if (threads == 1 || count < 2) {
        work(0, count);
        return out;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const Index lo = count * t / threads;
        const Index hi = count * (t + 1) / threads;
        if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
    return out;
}

template <class F>
void for_each_distinct_arrangement(const TypeSequence& type, F&& fn) {
    const Index n = type.size();
    std::vector<Index> remaining(type.counts());
    std::vector<long long> jumps(static_cast<std::size_t>(n));
    auto rec = [&](auto&& self, Index pos) -> void {
        if (pos == n) {
            fn(jumps);
            return;
        }
        for (Index d = 0; d < static_cast<Index>(remaining.size()); ++d) {
            if (remaining[static_cast<std::size_t>(d)] == 0) continue;
            --remaining[static_cast<std::size_t>(d)];
            jumps[static_cast<std::size_t>(pos)] = d - 1;
            self(self, pos + 1);
            ++remaining[static_cast<std::size_t>(d)];
        }
    };
    rec(rec, 0);
}

inline std::string describe_tree(const PlaneTree& t) {
    std::ostringstream s;
    s << '[';
    for (Index i = 0; i < t.size(); ++i) {
        if (i) s << ',';
        s << t.degree(i);
    }
    s << ']';
    return s.str();
}

}  // namespace detail

// Batch exact verification of the deterministic identities: walk bijections,
// the spinal identity, the width bracket, the second-order-height formula,
// the mirror weight swap, the moment identities, the exact bridge second
// moment, the Vervaat bijection and the transform involutions.
inline IdentityReport run_identity_suite(const IdentitySuiteConfig& cfg) {
    IdentityReport report;
    auto item = [&](const std::string& name) -> IdentityReport::Item& {
        report.items.push_back({name, true, ""});
        return report.items.back();
    };
    auto fail = [](IdentityReport::Item& it, const std::string& detail) {
        if (it.pass) {
            it.pass = false;
            it.detail = detail;
        }
    };

    // Corpus: every tree of size <= cap, plus random large trees.
    const std::vector<PlaneTree> small = [&] {
        std::vector<PlaneTree> trees;
        for (Index n = 1; n <= cfg.cap; ++n) {
            for_each_tree_of_size(n, [&](const PlaneTree& t) { trees.push_back(t); }, cfg.cap);
        }
        return trees;
    }();
    const std::vector<PlaneTree> large =
        detail::random_tree_corpus(cfg.random_trials, cfg.large_size, cfg.seed, cfg.parallelism);

    {
        auto& it = item("dfs-walk-roundtrip");
        for (const auto* pool : {&small, &large}) {
            for (const auto& t : *pool) {
                if (!(tree_from_dfs_walk(dfs_walk(t)) == t)) {
                    fail(it, detail::describe_tree(t));
                }
            }
        }
    }
    {
        auto& it = item("bfs-walk-roundtrip");
        for (const auto* pool : {&small, &large}) {
            for (const auto& t : *pool) {
                if (!(tree_from_bfs_walk(bfs_walk(t)) == t)) {
                    fail(it, detail::describe_tree(t));
                }
            }
        }
    }
    {
        auto& it = item("spinal-identity");
        for (const auto* pool : {&small, &large}) {
            for (const auto& t : *pool) {
                const auto walk = dfs_walk(t);
                const auto sw = spinal_weight_arrays(t);
                for (Index i = 0; i < t.size(); ++i) {
                    if (walk.values[static_cast<std::size_t>(i)] != sw.right[static_cast<std::size_t>(i)]) {
                        fail(it, detail::describe_tree(t) + " at index " + std::to_string(i));
                        break;
                    }
                }
            }
        }
    }
    {
        auto& it = item("width-bracket");
        for (const auto* pool : {&small, &large}) {
            for (const auto& t : *pool) {
                const auto walk = bfs_walk(t);
                const long long mx = *std::max_element(walk.values.begin(), walk.values.end());
                const long long w = width(t);
                if (!(w - 1 <= mx && mx <= 2 * w - 1)) {
                    fail(it, detail::describe_tree(t));
                }
            }
        }
    }
    {
        auto& it = item("second-order-height");
        for (const auto& t : small) {
            if (second_order_height(t) != detail::brute_force_h2(t)) {
                fail(it, detail::describe_tree(t));
            }
        }
        const auto corpus =
            detail::random_tree_corpus(cfg.h2_trials, cfg.h2_size, cfg.seed ^ 0x2aULL, cfg.parallelism);
        for (Index i = 0; i < static_cast<Index>(corpus.size()) && it.pass; ++i) {
            if (second_order_height(corpus[static_cast<std::size_t>(i)]) !=
                detail::brute_force_h2(corpus[static_cast<std::size_t>(i)])) {
                fail(it, "random tree #" + std::to_string(i));
            }
        }
    }
    {
        // max_v (|v| - |u /\ v|) is the same for every deepest u.
        auto& it = item("second-order-height-any-deepest");
        for (const auto& t : small) {
            const auto dep = depths(t);
            const Index h = *std::max_element(dep.begin(), dep.end());
            std::set<Index> values;
            for (Index u = 0; u < t.size(); ++u) {
                if (dep[static_cast<std::size_t>(u)] != h) continue;
                const auto anc = mrca_depths_with(t, u);
                Index best = 0;
                for (Index v = 0; v < t.size(); ++v) {
                    best = std::max(best, dep[static_cast<std::size_t>(v)] - anc[static_cast<std::size_t>(v)]);
                }
                values.insert(best);
            }
            if (values.size() != 1 || *values.begin() != second_order_height(t)) {
                fail(it, detail::describe_tree(t));
            }
        }
    }
    {
        auto& it = item("mirror-spinal-swap");
        for (const auto* pool : {&small, &large}) {
            for (const auto& t : *pool) {
                const auto m = mirror(t);
                const auto orig = spinal_weight_arrays(t);
                const auto img = spinal_weight_arrays(m.tree);
                for (Index u = 0; u < t.size(); ++u) {
                    const Index mu = m.map(u);
                    if (img.right[static_cast<std::size_t>(mu)] != orig.left[static_cast<std::size_t>(u)] ||
                        img.left[static_cast<std::size_t>(mu)] != orig.right[static_cast<std::size_t>(u)]) {
                        fail(it, detail::describe_tree(t) + " vertex " + std::to_string(u));
                        break;
                    }
                }
                if (!(mirror(m.tree).tree == t)) fail(it, "involution: " + detail::describe_tree(t));
            }
        }
    }
    {
        auto& it = item("moment-identities");
        Rng mrng(derive_seed(cfg.seed, 0x3bULL));
        for (Index trial = 0; trial < cfg.moment_trials && it.pass; ++trial) {
            const Index n = 2 + static_cast<Index>(mrng.below(999));
            std::vector<long long> b(static_cast<std::size_t>(n));
            long long sum = 0;
            for (Index i = 0; i + 1 < n; ++i) {
                b[static_cast<std::size_t>(i)] = static_cast<long long>(mrng.below(2001)) - 1000;
                sum += b[static_cast<std::size_t>(i)];
            }
            b[static_cast<std::size_t>(n - 1)] = -sum;
            if (std::abs(b[static_cast<std::size_t>(n - 1)]) > 1000) {
                --trial;  // keep |b_i| <= 1000 as specified
                continue;
            }
            bool zero = true;
            for (long long x : b) zero = zero && x == 0;
            if (zero) b[0] = 1, b[static_cast<std::size_t>(n - 1)] = -1;
            const JumpSequence js = JumpSequence::from_jumps(b);
            const BigInt mu2 = moment(js, {2});
            const BigInt mu4 = moment(js, {4});
            const bool ok = moment(js, {1, 1}) == -mu2 &&
                            moment(js, {2, 2}) == mu2 * mu2 - mu4 &&
                            moment(js, {3, 1}) == -mu4 &&
                            moment(js, {2, 1, 1}) == 2 * mu4 - mu2 * mu2 &&
                            moment(js, {1, 1, 1, 1}) == 3 * mu2 * mu2 - 6 * mu4 &&
                            BigInt(0) <= mu4 && mu4 <= mu2 * mu2;
            if (!ok) fail(it, "trial " + std::to_string(trial));
        }
    }
    {
        // E[Y_m^2] = m(n-m)/(n(n-1)) sigma^2, exactly, by full enumeration.
        auto& it = item("bridge-second-moment");
        Rng brng(derive_seed(cfg.seed, 0x4cULL));
        for (Index multiset = 0; multiset < 50 && it.pass; ++multiset) {
            const Index n = 2 + static_cast<Index>(brng.below(6));  // lengths 2..7
            std::vector<long long> b(static_cast<std::size_t>(n));
            long long sum = 0;
            for (Index i = 0; i + 1 < n; ++i) {
                b[static_cast<std::size_t>(i)] = static_cast<long long>(brng.below(19)) - 9;
                sum += b[static_cast<std::size_t>(i)];
            }
            b[static_cast<std::size_t>(n - 1)] = -sum;
            bool zero = true;
            for (long long x : b) zero = zero && x == 0;
            if (zero) b[0] = 2, b[static_cast<std::size_t>(n - 1)] = -2;
            std::sort(b.begin(), b.end());
            BigInt sigma2 = 0;
            for (long long x : b) sigma2 += BigInt(x) * x;
            std::vector<BigInt> sum_squares(static_cast<std::size_t>(n) + 1, 0);
            BigInt permutations = 0;
            do {
                ++permutations;
                long long y = 0;
                for (Index m = 1; m <= n; ++m) {
                    y += b[static_cast<std::size_t>(m - 1)];
                    sum_squares[static_cast<std::size_t>(m)] += BigInt(y) * y;
                }
            } while (std::next_permutation(b.begin(), b.end()));
            // distinct orderings suffice: each appears the same number of times
            for (Index m = 1; m <= n && it.pass; ++m) {
                const BigRat average(sum_squares[static_cast<std::size_t>(m)], permutations);
                const BigRat expected = BigRat(m * (n - m), n * (n - 1)) * BigRat(sigma2);
                if (average != expected) {
                    fail(it, "multiset " + std::to_string(multiset) + " m=" + std::to_string(m));
                }
            }
        }
    }
    {
        auto& it = item("vervaat-bijection");
        for (const auto& type : [&] {
                 std::vector<TypeSequence> types;
                 for (Index n = 2; n <= std::min<Index>(cfg.cap, 8); ++n) {
                     auto ts = all_types_of_size(n);
                     types.insert(types.end(), ts.begin(), ts.end());
                 }
                 return types;
             }()) {
            const Index n = type.size();
            std::set<std::pair<Index, std::vector<long long>>> images;
            Index bridges = 0;
            bool ok = true;
            detail::for_each_distinct_arrangement(type, [&](const std::vector<long long>& jumps) {
                ++bridges;
                std::vector<long long> values(jumps.size() + 1, 0);
                for (std::size_t i = 0; i < jumps.size(); ++i) values[i + 1] = values[i] + jumps[i];
                const Walk y = Walk::from_values(values);
                const auto [tau, excursion] = vervaat(y);
                ok = ok && excursion.kind == WalkKind::excursion;
                ok = ok && tree_from_dfs_walk(excursion).type() == type;
                ok = ok && vervaat_inverse(tau, excursion) == y;
                images.emplace(tau, excursion.values);
            });
            const BigInt expected_excursions = count_trees_with_type(type);
            ok = ok && static_cast<Index>(images.size()) == bridges;
            ok = ok && BigInt(bridges) == expected_excursions * n;
            if (!ok) fail(it, "type of size " + std::to_string(n));
        }
    }
    {
        auto& it = item("relocation-involution");
        for (const auto& t : small) {
            for (Index u = 0; u < t.size() && it.pass; ++u) {
                for (Index v = 0; v < t.size(); ++v) {
                    if (u == v || !t.is_leaf(v) || t.is_ancestor(u, v)) continue;
                    const auto moved = relocate_subtree(t, u, v);
                    if (!(moved.tree.type() == t.type())) {
                        fail(it, "type: " + detail::describe_tree(t));
                        break;
                    }
                    const auto back = relocate_subtree(moved.tree, moved.map(v), moved.map(u));
                    if (!(back.tree == t)) {
                        fail(it, detail::describe_tree(t) + " u=" + std::to_string(u) +
                                 " v=" + std::to_string(v));
                        break;
                    }
                }
            }
        }
    }
    {
        auto& it = item("cyclic-shift-involution");
        for (const auto& t : small) {
            const auto dep = depths(t);
            for (Index v = 0; v < t.size() && it.pass; ++v) {
                if (!t.is_leaf(v)) continue;
                const long long len = dep[static_cast<std::size_t>(v)];
                for (long long i = 0; i < std::max<long long>(len, 1); ++i) {
                    const auto shifted = cyclic_spine_shift(t, v, i);
                    if (!(shifted.tree.type() == t.type())) {
                        fail(it, "type: " + detail::describe_tree(t));
                        break;
                    }
                    const auto back = cyclic_spine_shift(shifted.tree, shifted.map(v), -i);
                    if (!(back.tree == t)) {
                        fail(it, detail::describe_tree(t) + " leaf=" + std::to_string(v) +
                                 " i=" + std::to_string(i));
                        break;
                    }
                    bool identity = true;
                    for (Index x = 0; x < t.size(); ++x) {
                        identity = identity && back.map(shifted.map(x)) == x;
                    }
                    if (!identity) {
                        fail(it, "map: " + detail::describe_tree(t));
                        break;
                    }
                }
            }
        }
    }
    {
        auto& it = item("cyclic-shift-mrca-law");
        for (const auto& t : small) {
            const auto dep = depths(t);
            for (Index v = 0; v < t.size() && it.pass; ++v) {
                if (!t.is_leaf(v)) continue;
                const long long len = dep[static_cast<std::size_t>(v)];
                for (long long i = 1; i < len; ++i) {
                    const auto s = cyclic_spine_shift(t, v, i);
                    const auto new_dep = depths(s.tree);
                    for (Index x = 0; x < t.size(); ++x) {
                        // psi(v) /\ psi(x) = psi(v /\ x) with the depth case split
                        const Index m = t.mrca(v, x);
                        if (s.tree.mrca(s.map(v), s.map(x)) != s.map(m)) {
                            fail(it, "mrca image: " + detail::describe_tree(t));
                            break;
                        }
                        const long long dm = dep[static_cast<std::size_t>(m)];
                        long long expected;
                        if (x == v) expected = len;
                        else if (dm >= i) expected = dm - i;
                        else expected = dm - i + len;
                        if (new_dep[static_cast<std::size_t>(s.map(m))] != expected) {
                            fail(it, "mrca depth: " + detail::describe_tree(t));
                            break;
                        }
                    }
                }
            }
        }
    }
    {
        auto& it = item("psi-involution");
        for (const auto& t : small) {
            for (Index u = 1; u < t.size() && it.pass; ++u) {
                for (Index v = 1; v < t.size(); ++v) {
                    if (u == v || t.degree(v) < 1) continue;
                    const auto r1 = psi_swap(t, u, v);
                    bool ok = r1.tree.size() == t.size();
                    ok = ok && r1.tree.degree(0) == t.degree(0);
                    ok = ok && r1.tree.degree(r1.v_star) == t.degree(u) + 1;
                    ok = ok && r1.tree.degree(r1.u_star) == t.degree(v) - 1;
                    if (ok) {
                        const auto r2 = psi_swap(r1.tree, r1.u_star, r1.v_star);
                        ok = r2.tree == t && r2.u_star == u && r2.v_star == v;
                    }
                    if (ok) {
                        ok = equivalence_key(t, u, v) ==
                             equivalence_key(r1.tree, r1.u_star, r1.v_star);
                    }
                    if (!ok) {
                        fail(it, detail::describe_tree(t) + " u=" + std::to_string(u) +
                                 " v=" + std::to_string(v));
                        break;
                    }
                }
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Exact proposition probability checks

enum class PropositionCheck { not_line, width_vs_luka, lr_weights, lr_height, spine_product };

struct Fraction {
    long long num = 1;
    long long den = 2;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct PropositionRow {
    double param = 0.0;
    double lhs = 0.0;
    double bound = 0.0;
    bool hypothesis_met = true;
    bool within_bound = true;
};

struct PropositionReport {
    PropositionCheck which;
    std::vector<PropositionRow> rows;

    bool all_ok() const {
        for (const auto& r : rows) {
            if (r.hypothesis_met && !r.within_bound) return false;
        }
        return true;
    }
};

// Computes the left-hand probabilities of the spine/line propositions exactly
// by enumeration and compares them with the stated bounds. Rows outside a
// proposition's hypotheses are flagged and not compared.
inline PropositionReport run_proposition_probabilities(
    const TypeSequence& type, PropositionCheck which,
    const std::vector<Fraction>& eps_grid = {{1, 2}, {1, 4}, {1, 8}, {1, 16}},
    const std::vector<double>& s_grid = {2, 4, 6, 8}, Index cap = kDefaultEnumCap) {
    PropositionReport report;
    report.which = which;
    const Index n = type.size();
    const Index n0 = type.count(0);

    struct PerTree {
        long long h, h2, w, max_sd, max_s, maxmin, spineprod;
    };
    std::vector<PerTree> stats;
    for_each_tree_with_type(
        type,
        [&](const PlaneTree& t) {
            PerTree row{};
            row.h = height(t);
            row.h2 = second_order_height(t);
            row.w = width(t);
            row.max_sd = max_right_spinal_weight(t);
            const auto sw = spinal_weight_arrays(t);
            long long max_s = 0, maxmin = 0;
            for (Index v = 0; v < t.size(); ++v) {
                const long long sd = sw.right[static_cast<std::size_t>(v)];
                const long long sg = sw.left[static_cast<std::size_t>(v)];
                max_s = std::max(max_s, sd + sg);
                maxmin = std::max(maxmin, std::min(sd, sg));
            }
            row.max_s = max_s;
            row.maxmin = maxmin;
            row.spineprod = spine_product_stat(t);
            stats.push_back(row);
        },
        cap);
    const double total = static_cast<double>(stats.size());

    switch (which) {
        case PropositionCheck::not_line:
            for (const auto& eps : eps_grid) {
                PropositionRow row;
                row.param = eps.value();
                row.hypothesis_met = eps.num * n0 * n0 * n0 >= 8 * eps.den;  // eps^(1/3) n0 >= 2
                Index hits = 0;
                for (const auto& s : stats) {
                    if (eps.num * s.h >= eps.den && eps.num * s.h > eps.den * s.h2) ++hits;
                }
                row.lhs = hits / total;
                row.bound = 64.0 * std::cbrt(eps.value());
                row.within_bound = row.lhs <= row.bound + 1e-12;
                report.rows.push_back(row);
            }
            break;
        case PropositionCheck::width_vs_luka:
            for (const auto& eps : eps_grid) {
                PropositionRow row;
                row.param = eps.value();
                row.hypothesis_met =
                    std::pow(eps.value(), 4.0 / 3.0) * std::sqrt(static_cast<double>(n0 - 1)) >= 64.0;
                Index hits = 0;
                for (const auto& s : stats) {
                    if (eps.num * s.w >= eps.den * s.max_sd) ++hits;
                }
                row.lhs = hits / total;
                row.bound = std::cbrt(std::pow(2.0, 22.0)) * std::pow(eps.value(), 2.0 / 3.0);
                row.within_bound = row.lhs <= row.bound + 1e-12;
                report.rows.push_back(row);
            }
            break;
        case PropositionCheck::lr_weights:
            for (const auto& eps : eps_grid) {
                PropositionRow row;
                row.param = eps.value();
                Index hits = 0;
                for (const auto& s : stats) {
                    if (eps.num * s.max_s >= eps.den && eps.num * s.max_s >= eps.den * s.maxmin) ++hits;
                }
                row.lhs = hits / total;
                row.bound = 2.0 * std::sqrt(8.0 * eps.value());
                row.within_bound = row.lhs <= row.bound + 1e-12;
                report.rows.push_back(row);
            }
            break;
        case PropositionCheck::spine_product:
            for (double s : s_grid) {
                PropositionRow row;
                row.param = s;
                const double threshold = s * static_cast<double>(n) * std::log(static_cast<double>(n));
                Index hits = 0;
                for (const auto& st : stats) {
                    if (static_cast<double>(st.spineprod) >= threshold) ++hits;
                }
                row.lhs = hits / total;
                row.bound = 3.0 * std::pow(static_cast<double>(n), 2.0 - s / 2.0);
                row.within_bound = row.lhs <= row.bound + 1e-12;
                report.rows.push_back(row);
            }
            break;
        case PropositionCheck::lr_height: {
            std::set<long long> thresholds;
            for (const auto& st : stats) {
                if (st.h2 * st.maxmin > 0) thresholds.insert(st.h2 * st.maxmin);
                if (st.spineprod > 0) thresholds.insert(st.spineprod);
            }
            for (long long s : thresholds) {
                PropositionRow row;
                row.param = static_cast<double>(s);
                Index lhs_hits = 0, rhs_hits = 0;
                for (const auto& st : stats) {
                    if (st.h2 * st.maxmin >= s) ++lhs_hits;
                    if (st.spineprod >= s) ++rhs_hits;
                }
                row.lhs = lhs_hits / total;
                row.bound = 2.0 * rhs_hits / total;
                row.within_bound = lhs_hits <= 2 * rhs_hits;  // exact integer comparison
                report.rows.push_back(row);
            }
            break;
        }
    }
    return report;
}

}  // namespace arbor
