#include "ucpe/cluster.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace ucpe {
namespace {

std::vector<double> values_of(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    for (auto r : rows) out.push_back(v[r]);
    return out;
}

std::set<std::vector<std::size_t>> leaf_sets(const ClusterTree& tree) {
    std::set<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < tree.leaf_count(); ++i) out.insert(tree.leaf(i).members);
    return out;
}

TEST(ClusterVariance, Examples) {
    EXPECT_EQ(cluster_variance(std::vector<double>{7}, 7), 0.0);
    EXPECT_EQ(cluster_variance(std::vector<double>{1, 3}, 1), 2.0);
    EXPECT_EQ(cluster_variance(std::vector<double>{5, 5, 5}, 5), 0.0);
    EXPECT_THROW(cluster_variance(std::vector<double>{}, 1.0), ValidationError);
}

TEST(KMedoidsSplit, SeparatesTwoPlateaus) {
    const std::vector<double> v{10, 30, 10, 30, 10, 30};
    auto [low, high] = kmedoids_split(v);
    EXPECT_EQ(low.members, (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_EQ(high.members, (std::vector<std::size_t>{1, 3, 5}));
    EXPECT_EQ(low.medoid_value, 10.0);
    EXPECT_EQ(high.medoid_value, 30.0);

    std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
    const auto oracle = oracle::best_splits(v, all);
    ASSERT_EQ(oracle.size(), 1u);
    EXPECT_EQ(oracle::cost(v, oracle[0].a) + oracle::cost(v, oracle[0].b), 0.0);
}

TEST(KMedoidsSplit, TwoPoints) {
    auto [a, b] = kmedoids_split(std::vector<double>{2, 1});
    EXPECT_EQ(a.members, std::vector<std::size_t>{1});
    EXPECT_EQ(b.members, std::vector<std::size_t>{0});
}

TEST(KMedoidsSplit, AllEqualIsDeterministicAndZeroCost) {
    const std::vector<double> v{4, 4, 4, 4};
    auto [a, b] = kmedoids_split(v);
    EXPECT_FALSE(a.members.empty());
    EXPECT_FALSE(b.members.empty());
    EXPECT_EQ(a.medoid_value, 4.0);
    EXPECT_EQ(b.medoid_value, 4.0);
    EXPECT_EQ(a.variance + b.variance, 0.0);
    auto [a2, b2] = kmedoids_split(v);
    EXPECT_EQ(a.members, a2.members);
    EXPECT_EQ(b.members, b2.members);
}

TEST(KMedoidsSplit, RejectsSingleton) {
    EXPECT_THROW(kmedoids_split(std::vector<double>{1.0}), ValidationError);
}

TEST(Bisect, AllEqualIsOneLeaf) {
    const auto tree = bisect(std::vector<double>(9, 3.5));
    EXPECT_EQ(tree.leaf_count(), 1u);
}

TEST(Bisect, SingletonIsOneLeaf) {
    const auto tree = bisect(std::vector<double>{12.0});
    EXPECT_EQ(tree.leaf_count(), 1u);
    EXPECT_EQ(make_labels(tree).front().medoid_productivity, 12.0);
}

TEST(Bisect, TwoPlateausGiveTwoLeaves) {
    std::vector<double> v;
    for (int i = 0; i < 6; ++i) v.push_back(10);
    for (int i = 0; i < 6; ++i) v.push_back(30);
    const auto tree = bisect(v);
    ASSERT_EQ(tree.leaf_count(), 2u);
    EXPECT_EQ(tree.leaf(0).medoid_value, 10.0);
    EXPECT_EQ(tree.leaf(1).medoid_value, 30.0);
    const auto oracle = oracle::bisect_leaves(v, 2, 1.0);
    ASSERT_TRUE(oracle.has_value());
    EXPECT_EQ(leaf_sets(tree), *oracle);
}

TEST(Bisect, EmptyRejected) { EXPECT_THROW(bisect(std::vector<double>{}), ValidationError); }

TEST(Bisect, ThetaBelowOneIsStricter) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> v;
    for (int i = 0; i < 60; ++i) v.push_back(20 + 5 * noise(rng));
    const auto loose = bisect(v, {2, 1.0});
    const auto strict = bisect(v, {2, 0.3});
    EXPECT_LE(strict.leaf_count(), loose.leaf_count());
}

// Structural invariants on random data: partition, medoid optimality, the
// variance acceptance rule, determinism.
TEST(Bisect, TreeInvariants) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> size(1, 80);
        std::gamma_distribution<double> g(4.0, 5.0);
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (auto& x : v) x = std::round(g(rng) * 10) / 10;  // coarse grid to exercise ties
        const ClusterConfig cfg{static_cast<std::size_t>(1 + trial % 3), 1.0};
        const auto tree = bisect(v, cfg);

        std::vector<int> seen(v.size(), 0);
        for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
            for (auto m : tree.leaf(i).members) ++seen[m];
        }
        for (int s : seen) EXPECT_EQ(s, 1);

        for (const auto& node : tree.nodes) {
            const auto& c = node.cluster;
            EXPECT_EQ(c.medoid, oracle::medoid(v, c.members));
            EXPECT_NEAR(c.variance, cluster_variance(values_of(v, c.members), c.medoid_value), 1e-12);
            if (node.children) {
                const auto& l = tree.nodes[(*node.children)[0]].cluster;
                const auto& r = tree.nodes[(*node.children)[1]].cluster;
                EXPECT_LT(std::max(l.variance, r.variance), c.variance);
                EXPECT_EQ(l.members.size() + r.members.size(), c.members.size());
                EXPECT_GE(l.members.size(), cfg.min_leaf);
                EXPECT_GE(r.members.size(), cfg.min_leaf);
            }
        }
        for (std::size_t i = 1; i < tree.leaf_count(); ++i) {
            EXPECT_LE(tree.leaf(i - 1).medoid_value, tree.leaf(i).medoid_value);
        }

        const auto again = bisect(v, cfg);
        EXPECT_EQ(leaf_sets(tree), leaf_sets(again));
    }
}

TEST(Bisect, MatchesExhaustiveOracleOnSmallSets) {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int attempt = 0; attempt < 2000 && checked < 300; ++attempt) {
        std::uniform_int_distribution<int> size(1, 8);
        std::uniform_real_distribution<double> u(5.0, 40.0);
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (auto& x : v) x = u(rng);
        for (std::size_t min_leaf : {1u, 2u}) {
            const auto expected = oracle::bisect_leaves(v, min_leaf, 1.0);
            if (!expected) continue;
            EXPECT_EQ(leaf_sets(bisect(v, {min_leaf, 1.0})), *expected) << "attempt " << attempt;
            ++checked;
        }
    }
    EXPECT_GE(checked, 300);
}

TEST(Labels, OrderingAndNames) {
    const std::vector<double> one(5, 20.0);
    const auto single = make_labels(bisect(one));
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].id, 0u);
    EXPECT_EQ(single[0].name, "fair");

    std::vector<double> v;
    for (int i = 0; i < 5; ++i) v.push_back(30);
    for (int i = 0; i < 5; ++i) v.push_back(18);
    const auto two = make_labels(bisect(v));
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0].medoid_productivity, 18.0);
    EXPECT_EQ(two[1].medoid_productivity, 30.0);
    EXPECT_NE(two[0].name, two[1].name);

    for (int i = 0; i < 5; ++i) v.push_back(50);
    const auto three = make_labels(bisect(v));
    ASSERT_EQ(three.size(), 3u);
    for (std::size_t i = 0; i < three.size(); ++i) EXPECT_EQ(three[i].id, i);
    EXPECT_EQ(three[1].name, "fair");
}

TEST(Labels, RowLabelsFollowLeaves) {
    const std::vector<double> v{10, 30, 10, 30, 10, 30, 10, 30};
    const auto tree = bisect(v);
    const auto rows = row_labels(tree);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(rows[i], v[i] < 20 ? 0u : 1u);
}

TEST(Labels, VocabularyExtendsPastVeryLow) {
    EXPECT_EQ(linguistic_name(0, 7), "very high");
    EXPECT_EQ(linguistic_name(5, 7), "extra-low-1");
    EXPECT_EQ(linguistic_name(6, 7), "extra-low-2");
}

}  // namespace
}  // namespace ucpe
