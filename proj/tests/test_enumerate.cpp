#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "arbor/enumerate.hpp"
#include "arbor/rng.hpp"
#include "oracles.hpp"

using arbor::BigInt;
using arbor::BigRat;
using arbor::Index;
using arbor::PlaneTree;
using arbor::TypeSequence;

TEST_CASE("counting formula on fixed types") {
    CHECK(arbor::count_trees_with_type(TypeSequence::from_counts({2, 0, 1})) == 1);
    CHECK(arbor::count_trees_with_type(TypeSequence::from_counts({3, 1, 0, 1})) == 4);
    CHECK(arbor::count_trees_with_type(TypeSequence::from_counts({4, 0, 3})) == 5);
    CHECK(arbor::count_trees_with_type(TypeSequence::from_counts({5, 2, 2, 1})) == 756);
    for (Index k = 1; k <= 6; ++k) {
        std::vector<Index> counts{1, k};
        CHECK(arbor::count_trees_with_type(TypeSequence::from_counts(counts)) == 1);
    }
}

TEST_CASE("enumeration agrees with the count and yields distinct valid trees") {
    for (Index n = 1; n <= 8; ++n) {
        for (const auto& type : arbor::all_types_of_size(n)) {
            std::set<PlaneTree> seen;
            arbor::for_each_tree_with_type(type, [&](const PlaneTree& t) {
                REQUIRE(t.type() == type);
                REQUIRE(seen.insert(t).second);  // pairwise distinct
            });
            REQUIRE(BigInt(seen.size()) == arbor::count_trees_with_type(type));
        }
    }
}

TEST_CASE("enumeration matches independent recursive generation") {
    for (Index n = 1; n <= 7; ++n) {
        std::map<TypeSequence, std::set<std::vector<int>>> by_type;
        for (const auto& degrees : oracle::all_trees_of_size(n)) {
            by_type[PlaneTree::from_degrees(degrees).type()].insert(degrees);
        }
        for (const auto& [type, expected] : by_type) {
            std::set<std::vector<int>> got;
            arbor::for_each_tree_with_type(type,
                                           [&](const PlaneTree& t) { got.insert(t.degrees()); });
            REQUIRE(got == expected);
        }
        // and no type is missing from all_types_of_size
        const auto types = arbor::all_types_of_size(n);
        REQUIRE(types.size() == by_type.size());
    }
}

TEST_CASE("enumeration respects the size cap") {
    const auto big = TypeSequence::from_counts({7, 0, 6});  // size 13 > default cap
    CHECK_THROWS_AS(arbor::enumerate_trees_with_type(big), arbor::SizeCapExceeded);
    CHECK(arbor::enumerate_trees_with_type(big, 13).size() == 132);  // Catalan(6)
}

TEST_CASE("partition function") {
    const std::vector<BigRat> ones{1, 1, 1, 1, 1, 1, 1, 1};
    CHECK(arbor::partition_function(ones, 3) == 2);
    CHECK(arbor::partition_function(ones, 4) == 5);  // Catalan(3)

    const std::vector<BigRat> binary{1, 0, 1};
    CHECK(arbor::partition_function(binary, 7) == 5);
    CHECK(arbor::partition_function(binary, 6) == 0);

    const std::vector<BigRat> cherry{2, 0, 1};
    CHECK(arbor::partition_function(cherry, 3) == 4);

    const std::vector<BigRat> no_leaves{0, 1};
    CHECK_THROWS_AS(arbor::partition_function(no_leaves, 2), arbor::ZeroPartitionFunction);

    // rational weights stay exact
    const std::vector<BigRat> halves{BigRat(1, 2), BigRat(1, 4), BigRat(1, 4)};
    // P(path of 3) = (1/4)(1/4)(1/2)... weight = w1*w1*w0; cherry = w2*w0*w0
    CHECK(arbor::partition_function(halves, 3) ==
          BigRat(1, 4) * BigRat(1, 4) * BigRat(1, 2) + BigRat(1, 4) * BigRat(1, 2) * BigRat(1, 2));
}

TEST_CASE("exact statistic distributions") {
    SECTION("height of a star type under root-degree conditioning") {
        const auto star = TypeSequence::star(5, 2);
        const auto dist = arbor::exact_statistic_distribution(
            star, arbor::TreeStatistic::height, 2);
        REQUIRE(dist.atoms.size() == 2);
        CHECK(dist.atoms[0].first == 3);
        CHECK(dist.atoms[0].second == BigRat(1, 2));
        CHECK(dist.atoms[1].first == 4);
        CHECK(dist.atoms[1].second == BigRat(1, 2));
    }
    SECTION("size is a point mass") {
        const auto type = TypeSequence::from_counts({3, 1, 0, 1});
        const auto dist = arbor::exact_statistic_distribution(type, arbor::TreeStatistic::size);
        REQUIRE(dist.atoms.size() == 1);
        CHECK(dist.atoms[0].first == 5);
        CHECK(dist.atoms[0].second == 1);
    }
    SECTION("probabilities sum to exactly one") {
        for (const auto& type : arbor::all_types_of_size(6)) {
            const auto dist =
                arbor::exact_statistic_distribution(type, arbor::TreeStatistic::height);
            CHECK(dist.total() == 1);
        }
    }
    SECTION("empty conditioning is an error") {
        const auto type = TypeSequence::from_counts({3, 1, 0, 1});
        CHECK_THROWS_AS(
            arbor::exact_statistic_distribution(type, arbor::TreeStatistic::height, 2),
            arbor::EmptyConditioning);
    }
}

TEST_CASE("covering moves") {
    const auto from = TypeSequence::from_counts({2, 2, 1});
    const auto covered = arbor::covered_types(from);
    const auto has = [&](std::vector<Index> counts) {
        return std::find(covered.begin(), covered.end(),
                         TypeSequence::from_counts(std::move(counts))) != covered.end();
    };
    CHECK(has({2, 1, 1}));     // drop a unary vertex
    CHECK(has({3, 0, 2}));     // skew (k,l) = (1,1)
    CHECK(has({3, 1, 0, 1}));  // skew (k,l) = (1,2)
}

TEST_CASE("stochastic domination of conditioned heights") {
    SECTION("adding a unary vertex raises the height") {
        const auto lower = TypeSequence::from_counts({3, 0, 0, 1});
        const auto upper = TypeSequence::from_counts({3, 1, 0, 1});
        const auto r = arbor::check_stochastic_domination(lower, upper, 3);
        CHECK(r.dominated);
    }
    SECTION("skewing the degrees lowers the height") {
        const auto lower = TypeSequence::from_counts({3, 0, 2});
        const auto upper = TypeSequence::from_counts({2, 2, 1});
        CHECK(arbor::check_stochastic_domination(lower, upper, 2).dominated);
    }
    SECTION("a type dominates itself") {
        const auto type = TypeSequence::from_counts({3, 1, 0, 1});
        CHECK(arbor::check_stochastic_domination(type, type, 3).dominated);
    }
    SECTION("violations come with a witness") {
        // a taller type is not dominated by a flatter one: reverse a covering pair
        const auto taller = TypeSequence::from_counts({3, 1, 0, 1});
        const auto flatter = TypeSequence::from_counts({3, 0, 0, 1});
        const auto r = arbor::check_stochastic_domination(taller, flatter, 3);
        CHECK_FALSE(r.dominated);
        const auto t_dist = arbor::exact_statistic_distribution(
            taller, arbor::TreeStatistic::height, 3);
        const auto f_dist = arbor::exact_statistic_distribution(
            flatter, arbor::TreeStatistic::height, 3);
        CHECK(f_dist.probability_at_most(r.witness) > t_dist.probability_at_most(r.witness));
    }
}

TEST_CASE("eggs in one basket") {
    CHECK(arbor::eggs_in_basket_check(1, 1, {1.0, 2.0}));
    CHECK(arbor::eggs_in_basket_check(1, 2, {1.0, 2.0, 3.0}));
    CHECK(arbor::eggs_in_basket_check(2, 2, {5.0, 5.0, 5.0, 5.0}));
    CHECK(arbor::eggs_in_basket_check(1, 2, {4.0, 4.0}));  // part 2 on k+l-1 values
    CHECK(arbor::eggs_in_basket_check(2, 3, {1.0, 1.5, 2.25, 7.0}));
    CHECK_THROWS_AS(arbor::eggs_in_basket_check(2, 1, {1.0, 2.0, 3.0}), arbor::Error);
    CHECK_THROWS_AS(arbor::eggs_in_basket_check(1, 1, {1.0, 2.0, 3.0}), arbor::Error);
    CHECK_THROWS_AS(arbor::eggs_in_basket_check(1, 1, {0.0, 2.0}), arbor::Error);

    arbor::Rng rng(555);
    for (Index k = 1; k <= 4; ++k) {
        for (Index l = k; l <= 4; ++l) {
            for (int trial = 0; trial < 10; ++trial) {
                for (Index m : {k + l, k + l - 1}) {
                    std::vector<double> c(static_cast<std::size_t>(m));
                    for (auto& x : c) x = 1.0 + static_cast<double>(rng.below(1000)) / 100.0;
                    std::sort(c.begin(), c.end());
                    REQUIRE(arbor::eggs_in_basket_check(k, l, c));
                }
            }
        }
    }
}

TEST_CASE("partition function of a pmf gives the law of the total progeny") {
    // P(branching process with half-geometric offspring dies at exactly n
    // vertices) equals Z_n of the pmf as a weight sequence; simulate the
    // unconditioned process directly as the oracle.
    std::vector<BigRat> geo;
    for (int k = 0; k <= 8; ++k) geo.emplace_back(BigRat(1, 1LL << (k + 1)));
    // trees of size <= 6 only see degrees <= 5, so the truncation is exact
    const std::vector<Index> sizes{1, 2, 3, 4, 5, 6};
    std::map<Index, double> exact;
    for (Index n : sizes) {
        exact[n] = arbor::partition_function(geo, n).convert_to<double>();
    }
    CHECK(exact[1] == 0.5);            // a lone leaf
    CHECK(exact[2] == 0.125);          // unary root then a leaf
    CHECK(exact[3] == Catch::Approx(2.0 / 32.0));  // path + cherry, 1/32 each

    arbor::Rng rng(246);
    std::map<Index, long long> observed;
    const long long reps = 400000;
    for (long long i = 0; i < reps; ++i) {
        // breadth-first branching process, abandoned beyond 7 vertices
        Index alive = 1, total = 1;
        while (alive > 0 && total <= 7) {
            Index children = 0;
            while (rng.uniform01() < 0.5) ++children;  // geometric(1/2) offspring
            --alive;
            alive += children;
            total += children;
        }
        if (alive == 0 && total <= 6) ++observed[total];
    }
    for (Index n : sizes) {
        const double freq = static_cast<double>(observed[n]) / static_cast<double>(reps);
        const double sigma = std::sqrt(exact[n] * (1 - exact[n]) / static_cast<double>(reps));
        CHECK(std::abs(freq - exact[n]) < 5 * sigma + 1e-9);
    }
}

TEST_CASE("types of a given size are the partitions of n-1") {
    CHECK(arbor::all_types_of_size(1).size() == 1);
    CHECK(arbor::all_types_of_size(2).size() == 1);
    CHECK(arbor::all_types_of_size(5).size() == 5);   // p(4)
    CHECK(arbor::all_types_of_size(8).size() == 15);  // p(7)
    for (const auto& type : arbor::all_types_of_size(7)) {
        Index total = 0, weighted = 0;
        for (Index i = 0; i <= type.max_degree(); ++i) {
            total += type.count(i);
            weighted += i * type.count(i);
        }
        CHECK(total == 7);
        CHECK(weighted == 6);
    }
}
