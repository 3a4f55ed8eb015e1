#include "oracles.hpp"
#include "ucpe/baselines.hpp"
#include "ucpe/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

namespace ucpe {
namespace {

std::vector<PredictionRecord> records(std::initializer_list<std::pair<double, double>> pairs) {
    std::vector<PredictionRecord> out;
    for (auto [a, p] : pairs) out.push_back({a, p, "m", out.size()});
    return out;
}

TEST(Metrics, AbsoluteError) {
    EXPECT_EQ(absolute_error(100, 80), 20.0);
    EXPECT_EQ(absolute_error(50, 50), 0.0);
    EXPECT_EQ(absolute_error(80, 100), 20.0);
}

TEST(Metrics, MaeExamples) {
    EXPECT_EQ(mae(records({{10, 10}, {20, 20}})), 0.0);
    EXPECT_EQ(mae(records({{100, 80}})), 20.0);
    EXPECT_EQ(mae(records({{100, 80}, {100, 120}})), 20.0);
    EXPECT_THROW(mae(std::vector<PredictionRecord>{}), ValidationError);
}

TEST(Metrics, BalancedRelativeErrors) {
    EXPECT_DOUBLE_EQ(mbre(records({{100, 50}})), 100.0);
    EXPECT_DOUBLE_EQ(mbre(records({{50, 100}})), 100.0);
    EXPECT_DOUBLE_EQ(mibre(records({{100, 50}})), 50.0);
    EXPECT_EQ(mbre(records({{7, 7}})), 0.0);
    EXPECT_EQ(mibre(records({{7, 7}})), 0.0);
    EXPECT_THROW(mbre(records({{0, 5}})), ValidationError);
    EXPECT_THROW(mibre(records({{5, -1}})), ValidationError);
}

TEST(Metrics, MibreNeverExceedsMbre) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.1, 1000);
    for (int t = 0; t < 200; ++t) {
        std::vector<PredictionRecord> r;
        for (int i = 0; i < 1 + t % 9; ++i) r.push_back({u(rng), u(rng), "m", 0});
        EXPECT_LE(mibre(r), mbre(r));
    }
}

TEST(RandomGuess, ExactMaeExamples) {
    const std::vector<double> a{1, 2, 3};
    EXPECT_NEAR(baseline_mae_p0(a), 4.0 / 3.0, 1e-15);
    EXPECT_EQ(baseline_mae_p0(std::vector<double>{5, 5, 5, 5}), 0.0);
    EXPECT_EQ(baseline_mae_p0(std::vector<double>{0, 10}), 10.0);
    EXPECT_THROW(baseline_mae_p0(std::vector<double>{1}), ValidationError);
}

TEST(RandomGuess, ExactMaeMatchesPairEnumeration) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-50, 500);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> y(2 + t % 9);
        for (auto& v : y) v = std::round(u(rng));  // integer values make ties common
        EXPECT_NEAR(baseline_mae_p0(y), oracle::random_guess_mae(y), 1e-12 * (1 + oracle::random_guess_mae(y)));
    }
}

// Sd of the per-run MAE, enumerating every assignment of guesses.
double exact_guess_sd(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= n - 1;
    double s = 0.0, s2 = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        double err = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            std::size_t r = c % (n - 1);
            c /= n - 1;
            if (r >= t) ++r;
            err += std::abs(y[t] - y[r]);
        }
        err /= static_cast<double>(n);
        s += err;
        s2 += err * err;
    }
    const double mean = s / static_cast<double>(total);
    return std::sqrt(s2 / static_cast<double>(total) - mean * mean);
}

TEST(RandomGuess, MonteCarloSdApproachesExact) {
    const std::vector<double> y{1, 2, 3};
    const double exact = exact_guess_sd(y);
    EXPECT_NEAR(exact, std::sqrt(0.5 / 9.0), 1e-12);
    EXPECT_NEAR(baseline_sd_sp0(y, 10000, 20571), exact, 0.05 * exact);

    const std::vector<double> z{3, 9, 4, 20, 11};
    EXPECT_NEAR(baseline_sd_sp0(z, 10000, 7), exact_guess_sd(z), 0.05 * exact_guess_sd(z));
}

TEST(RandomGuess, SdDeterministicAndDegenerate) {
    const std::vector<double> y{4, 8, 15, 16, 23, 42};
    EXPECT_EQ(baseline_sd_sp0(y), baseline_sd_sp0(y));
    EXPECT_EQ(baseline_sd_sp0(y, 500, 3), baseline_sd_sp0(y, 500, 3));
    EXPECT_EQ(baseline_sd_sp0(std::vector<double>{2, 2, 2}), 0.0);
    EXPECT_THROW(baseline_sd_sp0(std::vector<double>{2}), ValidationError);
    EXPECT_THROW(baseline_sd_sp0(y, 1), ValidationError);
}

TEST(StandardizedAccuracy, Examples) {
    const std::vector<double> y{1, 2, 3};
    EXPECT_EQ(standardized_accuracy(records({{1, 1}, {2, 2}, {3, 3}}), y), 1.0);
    // MAE 4/3 equals the baseline.
    EXPECT_NEAR(standardized_accuracy(records({{1, 2}, {2, 3}, {3, 1}}), y), 0.0, 1e-15);
    EXPECT_NEAR(standardized_accuracy(records({{1, 9}, {2, 2}, {3, 3}}), y), -1.0, 1e-15);
    EXPECT_THROW(standardized_accuracy(records({{2, 2}}), std::vector<double>{2, 2}), ValidationError);
}

TEST(StandardizedAccuracy, ScaleFree) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(1, 300);
    for (int t = 0; t < 50; ++t) {
        std::vector<PredictionRecord> r, scaled;
        const double c = 0.01 + u(rng);
        for (int i = 0; i < 12; ++i) {
            const double a = u(rng), p = u(rng);
            r.push_back({a, p, "m", 0});
            scaled.push_back({a * c, p * c, "m", 0});
        }
        EXPECT_NEAR(standardized_accuracy(r, actuals_of(r)), standardized_accuracy(scaled, actuals_of(scaled)), 1e-12);
    }
}

TEST(EffectSize, SignConvention) {
    const std::vector<double> y{1, 2, 3};
    EXPECT_NEAR(effect_size(records({{1, 2}, {2, 3}, {3, 1}}), y, 0.5), 0.0, 1e-15);
    EXPECT_NEAR(effect_size(records({{1, 1}, {2, 2}, {3, 3}}), y, 0.5), -(4.0 / 3.0) / 0.5, 1e-15);
    EXPECT_THROW(effect_size(records({{1, 1}}), y, 0.0), ValidationError);
}

TEST(MetricReport, HandComputedRun) {
    const auto r = records({{10, 12}, {20, 15}, {40, 44}, {25, 25}});
    const MetricReport m = metric_report(r);
    EXPECT_EQ(m.n, 4u);
    EXPECT_DOUBLE_EQ(m.mae, (2.0 + 5 + 4 + 0) / 4);
    EXPECT_DOUBLE_EQ(m.mbre, 100.0 * (2.0 / 10 + 5.0 / 15 + 4.0 / 40) / 4);
    EXPECT_DOUBLE_EQ(m.mibre, 100.0 * (2.0 / 12 + 5.0 / 20 + 4.0 / 44) / 4);
    // Pairs of {10, 20, 25, 40}: 10+15+30+5+20+15 = 95, over n(n-1)/2 = 6.
    EXPECT_DOUBLE_EQ(m.baseline_mae, 95.0 / 6.0);
    EXPECT_DOUBLE_EQ(m.sa, 1.0 - m.mae / (95.0 / 6.0));
    EXPECT_DOUBLE_EQ(m.effect_size, (m.mae - 95.0 / 6.0) / m.baseline_sd);
    EXPECT_EQ(m.abs_effect_size, std::abs(m.effect_size));
    EXPECT_LT(m.effect_size, 0.0);
    EXPECT_EQ(m.model_name, "m");
}

std::vector<ProjectRecord> small_dataset(std::size_t n) {
    std::vector<ProjectRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        EnvironmentalRatings env{};
        env[i % 8] = static_cast<int>(i % 6);
        out.push_back(make_record("P" + std::to_string(i), env, 50.0 + 10.0 * static_cast<double>(i),
                                  900.0 + 97.0 * static_cast<double>(i * i)));
    }
    return out;
}

TEST(Loocv, ConstantBuilder) {
    const auto data = small_dataset(6);
    const auto out = loocv(data, [](const std::vector<ProjectRecord>&) -> Predictor { return [](const ProjectRecord&) { return 42.0; }; }, "const");
    ASSERT_EQ(out.size(), 6u);
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(out[i].predicted, 42.0);
        EXPECT_EQ(out[i].actual, data[i].effort);
        EXPECT_EQ(out[i].fold_index, i);
        EXPECT_EQ(out[i].model_name, "const");
    }
}

TEST(Loocv, KarnerIgnoresTraining) {
    const auto data = small_dataset(3);
    const auto out = loocv(data, [](const std::vector<ProjectRecord>&) -> Predictor {
        return [](const ProjectRecord& r) { return karner_estimate(r.ucp); };
    }, "karner");
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(out[i].predicted, 20.0 * data[i].ucp);
}

TEST(Loocv, HeldOutRowNeverSeen) {
    const auto data = small_dataset(9);
    std::vector<std::size_t> train_sizes;
    const auto out = loocv(data, [&](const std::vector<ProjectRecord>& train) -> Predictor {
        train_sizes.push_back(train.size());
        std::map<std::string, double> table;
        for (const auto& r : train) table[r.id] = r.effort;
        return [table](const ProjectRecord& r) {
            auto it = table.find(r.id);
            return it == table.end() ? -1.0 : it->second;
        };
    }, "memo");
    for (const auto& r : out) EXPECT_EQ(r.predicted, -1.0);
    for (auto s : train_sizes) EXPECT_EQ(s, 8u);
}

TEST(Loocv, FailingFoldAbortsWithIndex) {
    const auto data = small_dataset(5);
    try {
        loocv(data, [](const std::vector<ProjectRecord>& train) -> Predictor {
            for (const auto& r : train) {
                if (r.id == "P0") return [](const ProjectRecord&) { return 1.0; };
            }
            throw std::runtime_error("no anchor");
        }, "fragile");
        FAIL() << "expected a fold error";
    } catch (const FoldError& e) {
        EXPECT_EQ(e.fold(), 0u);
    }
    EXPECT_THROW(loocv(small_dataset(2), nullptr, "x"), ValidationError);
}

TEST(Loocv, Reproducible) {
    const auto data = small_dataset(7);
    auto builder = [](const std::vector<ProjectRecord>& train) -> Predictor {
        double s = 0;
        for (const auto& r : train) s += r.productivity;
        const double p = s / static_cast<double>(train.size());
        return [p](const ProjectRecord& r) { return p * r.ucp; };
    };
    const auto a = loocv(data, builder, "mean");
    const auto b = loocv(data, builder, "mean");
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].predicted, b[i].predicted);
}

}  // namespace
}  // namespace ucpe
