#include "ucpe/baselines.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ucpe {
namespace {

TEST(Karner, Examples) {
    EXPECT_EQ(karner_estimate(100), 2000.0);
    EXPECT_EQ(karner_estimate(1), 20.0);
    EXPECT_DOUBLE_EQ(karner_estimate(739.3), 14786.0);
    EXPECT_THROW(karner_estimate(0), ValidationError);
    EXPECT_THROW(karner_estimate(-3), ValidationError);
}

TEST(SchneiderWinters, CountExamples) {
    EXPECT_EQ(sw_count({3, 3, 3, 3, 3, 3, 3, 3}), 0);
    EXPECT_EQ(sw_count({0, 0, 0, 0, 0, 0, 5, 5}), 8);
    EXPECT_EQ(sw_count({2, 4, 4, 4, 4, 4, 4, 2}), 2);
    EXPECT_THROW(sw_count({6, 0, 0, 0, 0, 0, 0, 0}), ValidationError);
}

TEST(SchneiderWinters, EstimateBranches) {
    EXPECT_EQ(sw_estimate(100, {3, 3, 3, 3, 3, 3, 3, 3}), 2000.0);
    EXPECT_EQ(sw_estimate(100, {0, 0, 0, 3, 3, 3, 3, 3}), 2800.0);
    EXPECT_EQ(sw_estimate(100, {0, 0, 0, 0, 0, 3, 3, 3}), 3600.0);
    EXPECT_THROW(sw_estimate(0, {3, 3, 3, 3, 3, 3, 3, 3}), ValidationError);
}

TEST(SchneiderWinters, RatioIsAlwaysOneOfThree) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> r(0, 5);
    std::uniform_real_distribution<double> u(1, 5000);
    for (int i = 0; i < 2000; ++i) {
        EnvironmentalRatings env;
        for (auto& e : env) e = r(rng);
        const int c = sw_count(env);
        EXPECT_GE(c, 0);
        EXPECT_LE(c, 8);
        const double ucp = u(rng);
        const double ratio = sw_estimate(ucp, env) / ucp;
        EXPECT_TRUE(std::abs(ratio - 20) < 1e-12 || std::abs(ratio - 28) < 1e-12 || std::abs(ratio - 36) < 1e-12);
    }
    for (int c = 0; c <= 8; ++c) EXPECT_EQ(sw_ratio(c), c <= 2 ? 20.0 : (c <= 4 ? 28.0 : 36.0));
}

std::vector<NassifRow> nassif_rows(std::size_t n, double alpha, double beta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(20, 3000), p(8, 40);
    std::uniform_int_distribution<int> r(0, 5);
    std::vector<NassifRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        NassifRow row;
        row.ucp = u(rng);
        row.productivity = p(rng);
        row.effort = alpha / row.productivity * std::pow(row.ucp, beta);
        for (auto& e : row.env) e = r(rng);
        rows.push_back(row);
    }
    return rows;
}

TEST(NassifFit, RecoversGeneratingConstants) {
    const auto rows = nassif_rows(40, 8.16, 1.17, 1);
    const auto m = nassif_fit(rows);
    EXPECT_NEAR(m.alpha / 8.16, 1.0, 1e-6);
    EXPECT_NEAR(m.beta / 1.17, 1.0, 1e-6);
}

TEST(NassifFit, ThreeCollinearPointsFitExactly) {
    const auto rows = nassif_rows(3, 2.5, 0.9, 2);
    const auto m = nassif_fit(rows);
    for (const auto& r : rows) {
        EXPECT_NEAR(std::log(r.effort * r.productivity), std::log(m.alpha) + m.beta * std::log(r.ucp), 1e-12);
    }
}

TEST(NassifFit, RejectsDegenerateInput) {
    auto rows = nassif_rows(5, 8.16, 1.17, 3);
    for (auto& r : rows) r.ucp = 100;
    EXPECT_THROW(nassif_fit(rows), ValidationError);
    auto bad = nassif_rows(5, 8.16, 1.17, 3);
    bad[2].effort = 0;
    EXPECT_THROW(nassif_fit(bad), ValidationError);
    EXPECT_THROW(nassif_fit(std::vector<NassifRow>(nassif_rows(2, 1, 1, 1))), ValidationError);
}

TEST(NassifMap, IntervalsAreHalfOpen) {
    NassifProductivityMap map{{-2.0, 5.0, 11.0}, {30, 25, 20, 15}};
    EXPECT_EQ(map.level(-100), 30.0);
    EXPECT_EQ(map.level(-2.0), 30.0);
    EXPECT_EQ(map.level(-1.999), 25.0);
    EXPECT_EQ(map.level(5.0), 25.0);
    EXPECT_EQ(map.level(11.0), 20.0);
    EXPECT_EQ(map.level(11.5), 15.0);
    EXPECT_EQ(map.level(1e9), 15.0);
}

TEST(NassifMap, QuartileBreakpointsAndMedianLevels) {
    // Only E6 (weight 2) varies, so prod_sum = 2 * E6.
    std::vector<NassifRow> rows;
    const int e6[] = {0, 1, 2, 3, 4, 5, 5, 1};
    const double prod[] = {30, 28, 24, 22, 18, 14, 16, 26};
    for (int i = 0; i < 8; ++i) {
        NassifRow r;
        r.ucp = 100 + i;
        r.productivity = prod[i];
        r.effort = r.ucp * r.productivity;
        r.env = {0, 0, 0, 0, 0, e6[i], 0, 0};
        rows.push_back(r);
    }
    const auto map = fit_productivity_map(rows, WeightTable::defaults());
    // sorted sums: 0 2 2 4 6 8 10 10 -> quartiles at positions 1.75, 3.5, 5.25
    EXPECT_DOUBLE_EQ(map.breakpoints[0], 2.0);
    EXPECT_DOUBLE_EQ(map.breakpoints[1], 5.0);
    EXPECT_DOUBLE_EQ(map.breakpoints[2], 8.5);
    EXPECT_DOUBLE_EQ(map.levels[0], 28.0);  // sums 0,2,2 -> 30,28,26
    EXPECT_DOUBLE_EQ(map.levels[1], 24.0);  // sum 4
    EXPECT_DOUBLE_EQ(map.levels[2], 20.0);  // sums 6,8 -> 22,18
    EXPECT_DOUBLE_EQ(map.levels[3], 15.0);  // sums 10,10 -> 14,16
}

TEST(NassifMap, EmptyIntervalBorrowsNeighbour) {
    std::vector<NassifRow> rows;
    for (int i = 0; i < 6; ++i) {
        NassifRow r;
        r.ucp = 50;
        r.productivity = i < 5 ? 20 : 10;
        r.effort = 1000;
        r.env = {0, 0, 0, 0, 0, i < 5 ? 1 : 5, 0, 0};
        rows.push_back(r);
    }
    const auto map = fit_productivity_map(rows, WeightTable::defaults());
    for (double l : map.levels) EXPECT_GT(l, 0.0);
    EXPECT_EQ(map.levels[0], 20.0);
    EXPECT_EQ(map.levels[3], 10.0);
}

TEST(NassifEstimate, Examples) {
    NassifModel m;
    m.alpha = 8.16;
    m.beta = 1.17;
    m.productivity_map = {{0, 0, 0}, {20, 20, 20, 20}};
    const EnvironmentalRatings env{3, 3, 3, 3, 3, 3, 3, 3};
    // 8.16 / 20 * 100^1.17 by an independent route: exp(1.17 * ln 100).
    const double expected = 0.408 * std::exp(1.17 * 4.605170185988091);
    EXPECT_NEAR(nassif_estimate(m, 100, env), expected, 1e-9);
    EXPECT_NEAR(nassif_estimate(m, 100, env), 89.26, 0.01);

    m.alpha = 20;
    m.beta = 1;
    EXPECT_NEAR(nassif_estimate(m, 357.5, env), 357.5, 1e-12);

    m.alpha = 8.16;
    m.beta = 1.17;
    const double base = nassif_estimate(m, 250, env);
    m.productivity_map.levels = {40, 40, 40, 40};
    EXPECT_NEAR(nassif_estimate(m, 250, env), base / 2, 1e-9);
    EXPECT_THROW(nassif_estimate(m, 0, env), ValidationError);
}

TEST(NassifEstimate, MonotoneInUcp) {
    const auto rows = nassif_rows(30, 8.16, 1.17, 4);
    const auto m = nassif_fit(rows);
    const EnvironmentalRatings env{1, 2, 3, 4, 5, 0, 1, 2};
    double last = 0;
    for (double u = 1; u < 10000; u *= 1.5) {
        const double e = nassif_estimate(m, u, env);
        EXPECT_GT(e, last);
        last = e;
    }
}

TEST(NassifFit, ConfiguredMapIsUsed) {
    const auto rows = nassif_rows(10, 8.16, 1.17, 5);
    const NassifProductivityMap fixed{{1, 2, 3}, {9, 8, 7, 6}};
    EXPECT_EQ(nassif_fit(rows, WeightTable::defaults(), fixed).productivity_map.levels, fixed.levels);
    const NassifProductivityMap bad{{1, 2, 3}, {9, 8, 0, 6}};
    EXPECT_THROW(nassif_fit(rows, WeightTable::defaults(), bad), ValidationError);
}

}  // namespace
}  // namespace ucpe
