#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "arbor/rng.hpp"
#include "arbor/sampler.hpp"
#include "arbor/walk.hpp"
#include "oracles.hpp"

using arbor::Index;
using arbor::PlaneTree;
using arbor::TypeSequence;
using arbor::Walk;

namespace {
const std::vector<int> kExample{1, 2, 3, 0, 2, 0, 0, 0, 1, 0};
}

TEST_CASE("depth-first and breadth-first walks") {
    const auto t = PlaneTree::from_degrees(kExample);
    CHECK(arbor::dfs_walk(t).values ==
          std::vector<long long>{0, 0, 1, 3, 2, 3, 2, 1, 0, 0, -1});
    CHECK(arbor::bfs_walk(t).values ==
          std::vector<long long>{0, 0, 1, 3, 3, 2, 3, 2, 1, 0, -1});
    CHECK(arbor::dfs_walk(PlaneTree::singleton()).values == std::vector<long long>{0, -1});
    CHECK(arbor::dfs_walk(t).kind == arbor::WalkKind::excursion);
    CHECK(arbor::bfs_walk(t).kind == arbor::WalkKind::excursion);
}

TEST_CASE("walk classification") {
    CHECK(Walk::from_values({0, -1}).kind == arbor::WalkKind::excursion);
    CHECK(Walk::from_values({0, 1, 0, -1}).kind == arbor::WalkKind::excursion);
    CHECK(Walk::from_values({0, -1, 0, -1}).kind == arbor::WalkKind::bridge);
    CHECK(Walk::from_values({0, 2, -1}).kind == arbor::WalkKind::bridge);  // ends at -1 but dips via -3
    CHECK_THROWS_AS(Walk::from_values({1, 0}), arbor::Error);
    CHECK_THROWS_AS(Walk::from_values({}), arbor::Error);
}

TEST_CASE("walk decoding") {
    CHECK(arbor::tree_from_dfs_walk(Walk::from_values({0, -1})) == PlaneTree::singleton());
    CHECK(arbor::tree_from_dfs_walk(Walk::from_values({0, 1, 0, -1})) ==
          PlaneTree::from_degrees({2, 0, 0}));
    const auto t = PlaneTree::from_degrees(kExample);
    CHECK(arbor::tree_from_dfs_walk(arbor::dfs_walk(t)) == t);
    CHECK(arbor::tree_from_bfs_walk(arbor::bfs_walk(t)) == t);
    CHECK_THROWS_AS(arbor::tree_from_dfs_walk(Walk::from_values({0, -1, 0, -1})),
                    arbor::NotAnExcursion);
    CHECK_THROWS_AS(arbor::tree_from_bfs_walk(Walk::from_values({0, 1, 0})),
                    arbor::NotAnExcursion);
}

TEST_CASE("walk roundtrips and shared increment multiset") {
    for (Index n = 1; n <= 8; ++n) {
        for (const auto& degrees : oracle::all_trees_of_size(n)) {
            const auto tree = PlaneTree::from_degrees(degrees);
            const auto df = arbor::dfs_walk(tree);
            const auto bf = arbor::bfs_walk(tree);
            REQUIRE(arbor::tree_from_dfs_walk(df) == tree);
            REQUIRE(arbor::tree_from_bfs_walk(bf) == tree);
            std::multiset<long long> df_steps, bf_steps;
            for (std::size_t i = 1; i < df.values.size(); ++i) {
                df_steps.insert(df.values[i] - df.values[i - 1]);
                bf_steps.insert(bf.values[i] - bf.values[i - 1]);
            }
            REQUIRE(df_steps == bf_steps);
        }
    }
}

TEST_CASE("jump sequences") {
    CHECK_THROWS_AS(arbor::JumpSequence::from_jumps({}), arbor::InvalidJumpSequence);
    CHECK_THROWS_AS(arbor::JumpSequence::from_jumps({0, 0}), arbor::InvalidJumpSequence);
    const auto b = arbor::JumpSequence::of_type(TypeSequence::from_counts({3, 1, 0, 1}));
    CHECK(b.jumps == std::vector<long long>{-1, -1, -1, 0, 2});
    CHECK(b.sum() == -1);
}

TEST_CASE("exchangeable bridge endpoints and degeneracy") {
    arbor::Rng rng(99);
    const auto single = arbor::JumpSequence::from_jumps({-1});
    for (int i = 0; i < 5; ++i) {
        CHECK(arbor::exchangeable_bridge(single, rng).values ==
              std::vector<long long>{0, -1});
    }
    const auto pm = arbor::JumpSequence::from_jumps({1, -1});
    std::map<std::vector<long long>, int> counts;
    for (int i = 0; i < 4000; ++i) {
        ++counts[arbor::exchangeable_bridge(pm, rng).values];
    }
    REQUIRE(counts.size() == 2);
    const int up = counts[{0, 1, 0}];
    CHECK(up > 1800);
    CHECK(up < 2200);
}

TEST_CASE("bridge uniform over distinct orderings") {
    // jump multiset of a 5-vertex type with 20 distinct walks
    const auto b = arbor::JumpSequence::of_type(TypeSequence::from_counts({3, 1, 0, 1}));
    arbor::Rng rng(7);
    std::map<std::vector<long long>, long long> counts;
    const long long reps = 40000;
    for (long long i = 0; i < reps; ++i) {
        ++counts[arbor::exchangeable_bridge(b, rng).values];
    }
    REQUIRE(counts.size() == 20);
    const double expected = static_cast<double>(reps) / 20.0;
    double chi2 = 0.0;
    for (const auto& [walk, c] : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 0.999 quantile of chi-square with 19 degrees of freedom
    CHECK(chi2 < 43.82);
}

TEST_CASE("shift rotates increments") {
    const auto w = Walk::from_values({0, -1, 0, -1});
    CHECK(arbor::shift(w, 1).values == std::vector<long long>{0, 1, 0, -1});
    CHECK(arbor::shift(w, 0) == w);
    CHECK(arbor::shift(w, 3) == w);
    arbor::Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<long long> values{0};
        const Index n = 2 + rng.below(9);
        for (Index i = 0; i < n; ++i) {
            values.push_back(values.back() + static_cast<long long>(rng.below(5)) - 2);
        }
        const auto walk = Walk::from_values(values);
        for (Index i = 0; i <= n; ++i) {
            REQUIRE(arbor::shift(arbor::shift(walk, i), n - i) == walk);
        }
    }
}

TEST_CASE("vervaat transform on fixed walks") {
    const auto bridge = Walk::from_values({0, -1, 0, -1});
    const auto r = arbor::vervaat(bridge);
    CHECK(r.tau == 1);
    CHECK(r.excursion.values == std::vector<long long>{0, 1, 0, -1});
    CHECK(arbor::vervaat_inverse(r.tau, r.excursion) == bridge);

    const auto already = Walk::from_values({0, 1, 0, -1});
    const auto r2 = arbor::vervaat(already);
    CHECK(r2.tau == 3);
    CHECK(r2.excursion == already);

    CHECK_THROWS_AS(arbor::vervaat(Walk::from_values({0, 1, 0})),
                    arbor::NotADownwardSkipFreeBridge);
    CHECK_THROWS_AS(arbor::vervaat(Walk::from_values({0, 2, -1})),
                    arbor::NotADownwardSkipFreeBridge);
}

TEST_CASE("vervaat bijection onto rotation-index excursion pairs") {
    // all distinct bridges with the jump multiset {-1,-1,-1,0,2}
    const auto type = TypeSequence::from_counts({3, 1, 0, 1});
    std::vector<std::vector<long long>> jump_orders;
    std::vector<long long> jumps{-1, -1, -1, 0, 2};
    std::sort(jumps.begin(), jumps.end());
    do {
        jump_orders.push_back(jumps);
    } while (std::next_permutation(jumps.begin(), jumps.end()));
    REQUIRE(jump_orders.size() == 20);

    std::set<std::pair<Index, std::vector<long long>>> images;
    std::set<std::vector<long long>> excursions;
    for (const auto& order : jump_orders) {
        std::vector<long long> values{0};
        for (long long b : order) values.push_back(values.back() + b);
        const auto w = Walk::from_values(values);
        const auto r = arbor::vervaat(w);
        CHECK(r.excursion.kind == arbor::WalkKind::excursion);
        CHECK(arbor::tree_from_dfs_walk(r.excursion).type() == type);
        CHECK(arbor::vervaat_inverse(r.tau, r.excursion) == w);
        images.emplace(r.tau, r.excursion.values);
        excursions.insert(r.excursion.values);
    }
    CHECK(images.size() == 20);
    CHECK(excursions.size() == 4);
}

TEST_CASE("walk range") {
    CHECK(arbor::walk_range(Walk::from_values({0, 1, 0, -1})) == 2);
    CHECK(arbor::walk_range(Walk::from_values({0, -1})) == 1);
    CHECK(arbor::walk_range(Walk::from_values({0})) == 0);
}
