#include <catch2/catch_amalgamated.hpp>

#include "arbor/stats.hpp"
#include "arbor/tree.hpp"
#include "oracles.hpp"

using arbor::Index;
using arbor::PlaneTree;
using arbor::TypeSequence;

namespace {
// Running example: root 1 child; that child has (3-ary, unary) children, etc.
// Depth-first vertex order: 0..9 for words
// (), 1, 11, 111, 112, 1121, 1122, 113, 12, 121.
const std::vector<int> kExample{1, 2, 3, 0, 2, 0, 0, 0, 1, 0};
}  // namespace

TEST_CASE("build accepts valid degree sequences") {
    CHECK(PlaneTree::from_degrees({0}).size() == 1);
    const auto t = PlaneTree::from_degrees(kExample);
    CHECK(t.size() == 10);
    CHECK(t.leaf_count() == 5);
}

TEST_CASE("build rejects invalid degree sequences") {
    CHECK_THROWS_AS(PlaneTree::from_degrees({}), arbor::InvalidDegreeSequence);
    CHECK_THROWS_AS(PlaneTree::from_degrees({2, 0}), arbor::InvalidDegreeSequence);
    CHECK_THROWS_AS(PlaneTree::from_degrees({1, 1}), arbor::InvalidDegreeSequence);
    CHECK_THROWS_AS(PlaneTree::from_degrees({0, 0}), arbor::InvalidDegreeSequence);
    CHECK_THROWS_AS(PlaneTree::from_degrees({-1}), arbor::InvalidDegreeSequence);
    // prefix dips below zero even though the total works out
    CHECK_THROWS_AS(PlaneTree::from_degrees({1, 0, 2, 0, 0}), arbor::InvalidDegreeSequence);
}

TEST_CASE("parent and child rank") {
    const auto t = PlaneTree::from_degrees(kExample);
    CHECK_FALSE(t.parent(0).has_value());
    CHECK(*t.parent(5) == 4);
    CHECK(*t.parent(9) == 8);
    CHECK(t.child_rank(5) == 1);
    CHECK(t.child_rank(6) == 2);
    CHECK(t.child_rank(7) == 3);
}

TEST_CASE("depth, children and type accessors") {
    const auto t = PlaneTree::from_degrees(kExample);
    CHECK(t.depth(5) == 4);
    CHECK(t.type() == TypeSequence::from_counts({5, 2, 2, 1}));
    CHECK(PlaneTree::singleton().children(0).empty());
    CHECK(t.children(2) == std::vector<Index>{3, 4, 7});
    CHECK(t.children(1) == std::vector<Index>{2, 8});
}

TEST_CASE("mrca matches ancestor-set intersection") {
    const auto t = PlaneTree::from_degrees(kExample);
    CHECK(t.mrca(4, 4) == 4);
    CHECK(t.mrca(5, 9) == 1);
    CHECK(t.mrca(3, 7) == 2);

    for (Index n = 1; n <= 7; ++n) {
        for (const auto& degrees : oracle::all_trees_of_size(n)) {
            const auto tree = PlaneTree::from_degrees(degrees);
            const auto words = oracle::WordTree::of(tree);
            for (Index u = 0; u < n; ++u) {
                for (Index v = 0; v < n; ++v) {
                    const auto m = oracle::mrca_word(words.words[static_cast<std::size_t>(u)],
                                                     words.words[static_cast<std::size_t>(v)]);
                    REQUIRE(tree.mrca(u, v) == words.index_of(m));
                }
            }
        }
    }
}

TEST_CASE("children agree with the word representation") {
    for (Index n = 1; n <= 7; ++n) {
        for (const auto& degrees : oracle::all_trees_of_size(n)) {
            const auto tree = PlaneTree::from_degrees(degrees);
            const auto words = oracle::WordTree::of(tree);
            for (Index v = 0; v < n; ++v) {
                const auto kids = tree.children(v);
                REQUIRE(static_cast<int>(kids.size()) == tree.degree(v));
                for (std::size_t j = 0; j < kids.size(); ++j) {
                    auto w = words.words[static_cast<std::size_t>(v)];
                    w.push_back(static_cast<int>(j) + 1);
                    REQUIRE(words.words[static_cast<std::size_t>(kids[j])] == w);
                }
            }
        }
    }
}

TEST_CASE("subtree extraction") {
    const auto t = PlaneTree::from_degrees(kExample);
    CHECK(t.subtree(4) == PlaneTree::from_degrees({2, 0, 0}));
    CHECK(t.subtree(0) == t);
    CHECK(t.subtree(9) == PlaneTree::singleton());
}

TEST_CASE("type sequence validation") {
    CHECK_THROWS_AS(TypeSequence::from_counts({3, 1, 1}), arbor::InvalidDegreeSequence);
    CHECK_THROWS_AS(TypeSequence::from_counts({0, 1}), arbor::InvalidDegreeSequence);
    CHECK_THROWS_AS(TypeSequence::from_counts({}), arbor::InvalidDegreeSequence);
    const auto t = TypeSequence::from_counts({3, 1, 0, 1});
    CHECK(t.size() == 5);
    CHECK(t.count(3) == 1);
    CHECK(t.count(17) == 0);

    const auto star = TypeSequence::star(5, 2);
    CHECK(star == TypeSequence::from_counts({2, 3, 1}));
    CHECK(star.size() == 6);
}

TEST_CASE("trailing zero counts are normalised away") {
    CHECK(TypeSequence::from_counts({2, 0, 1, 0, 0}) == TypeSequence::from_counts({2, 0, 1}));
}

TEST_CASE("plane tree equality is structural") {
    CHECK(PlaneTree::from_degrees({1, 0}) == PlaneTree::from_degrees({1, 0}));
    CHECK_FALSE(PlaneTree::from_degrees({2, 0, 0}) == PlaneTree::from_degrees({1, 1, 0}));
}
