#pragma once

// Accuracy measures, the random-guessing baseline and leave-one-out
// cross-validation.

#include "ucpe/dataset.hpp"
#include "ucpe/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace ucpe {

struct PredictionRecord {
    double actual = 0.0;
    double predicted = 0.0;
    std::string model_name;
    std::size_t fold_index = 0;
};

inline constexpr std::uint64_t kDefaultGuessSeed = 20571;
inline constexpr std::size_t kDefaultGuessRuns = 1000;

inline double absolute_error(double actual, double predicted) { return std::abs(actual - predicted); }

inline std::vector<double> absolute_errors(std::span<const PredictionRecord> records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(absolute_error(r.actual, r.predicted));
    return out;
}

inline double mae(std::span<const PredictionRecord> records) {
    if (records.empty()) throw ValidationError("MAE of an empty record set");
    double s = 0.0;
    for (const auto& r : records) s += absolute_error(r.actual, r.predicted);
    return s / static_cast<double>(records.size());
}

namespace detail {

template <class Pick>
double balanced_error(std::span<const PredictionRecord> records, Pick pick) {
    if (records.empty()) throw ValidationError("balanced error of an empty record set");
    double s = 0.0;
    for (const auto& r : records) {
        if (!(r.actual > 0.0) || !(r.predicted > 0.0)) {
            throw ValidationError("balanced relative errors need positive actual and predicted values");
        }
        s += absolute_error(r.actual, r.predicted) / pick(r.actual, r.predicted);
    }
    return 100.0 * s / static_cast<double>(records.size());
}

}  // namespace detail

/// Mean of AE / min(actual, predicted), in percent.
inline double mbre(std::span<const PredictionRecord> records) {
    return detail::balanced_error(records, [](double a, double b) { return std::min(a, b); });
}

/// Mean of AE / max(actual, predicted), in percent.
inline double mibre(std::span<const PredictionRecord> records) {
    return detail::balanced_error(records, [](double a, double b) { return std::max(a, b); });
}

/// Expected MAE when every target is guessed by a uniformly drawn other
/// actual value; exact, by summing over all ordered pairs.
inline double baseline_mae_p0(std::span<const double> actuals) {
    const std::size_t n = actuals.size();
    if (n < 2) throw ValidationError("random-guess baseline needs at least 2 actuals");
    // Sum over unordered pairs counts each |y_t - y_r| for both t and r.
    std::vector<double> sorted(actuals.begin(), actuals.end());
    std::sort(sorted.begin(), sorted.end());
    double pair_sum = 0.0, prefix = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pair_sum += static_cast<double>(i) * sorted[i] - prefix;
        prefix += sorted[i];
    }
    return 2.0 * pair_sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Sample sd of per-run MAE over seeded random-guessing runs.
inline double baseline_sd_sp0(std::span<const double> actuals, std::size_t runs = kDefaultGuessRuns,
                              std::uint64_t seed = kDefaultGuessSeed) {
    const std::size_t n = actuals.size();
    if (n < 2) throw ValidationError("random-guess baseline needs at least 2 actuals");
    if (runs < 2) throw ValidationError("random-guess sd needs at least 2 runs");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> other(0, n - 2);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t run = 0; run < runs; ++run) {
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            std::size_t r = other(rng);
            if (r >= t) ++r;
            s += std::abs(actuals[t] - actuals[r]);
        }
        const double run_mae = s / static_cast<double>(n);
        const double delta = run_mae - mean;
        mean += delta / static_cast<double>(run + 1);
        m2 += delta * (run_mae - mean);
    }
    return std::sqrt(m2 / static_cast<double>(runs - 1));
}

inline std::vector<double> actuals_of(std::span<const PredictionRecord> records) {
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.actual);
    return out;
}

inline double standardized_accuracy(std::span<const PredictionRecord> records, std::span<const double> actuals) {
    const double p0 = baseline_mae_p0(actuals);
    if (!(p0 > 0.0)) throw ValidationError("standardized accuracy undefined: random-guess MAE is zero");
    return 1.0 - mae(records) / p0;
}

/// Signed effect size (MAE - MAE_p0) / SP0.
inline double effect_size(std::span<const PredictionRecord> records, std::span<const double> actuals, double sp0) {
    if (!(sp0 > 0.0)) throw ValidationError("effect size undefined: random-guess sd is zero");
    return (mae(records) - baseline_mae_p0(actuals)) / sp0;
}

struct MetricReport {
    std::string model_name;
    std::size_t n = 0;
    double mae = 0.0;
    double mbre = 0.0;
    double mibre = 0.0;
    double sa = 0.0;
    double effect_size = 0.0;      // signed
    double abs_effect_size = 0.0;  // as tabulated
    double baseline_mae = 0.0;
    double baseline_sd = 0.0;
};

inline MetricReport metric_report(std::span<const PredictionRecord> records, std::size_t runs = kDefaultGuessRuns,
                                  std::uint64_t seed = kDefaultGuessSeed) {
    const auto actuals = actuals_of(records);
    MetricReport m;
    m.model_name = records.empty() ? "" : records.front().model_name;
    m.n = records.size();
    m.mae = mae(records);
    m.mbre = mbre(records);
    m.mibre = mibre(records);
    m.baseline_mae = baseline_mae_p0(actuals);
    m.baseline_sd = baseline_sd_sp0(actuals, runs, seed);
    m.sa = standardized_accuracy(records, actuals);
    m.effect_size = effect_size(records, actuals, m.baseline_sd);
    m.abs_effect_size = std::abs(m.effect_size);
    return m;
}

/// A trained model, as seen by the cross-validation loop.
using Predictor = std::function<double(const ProjectRecord&)>;
using ModelBuilder = std::function<Predictor(const std::vector<ProjectRecord>&)>;

/// Fold i trains on every row but i and predicts row i. A failing fold aborts
/// the run with its index (the lowest failing index when folds run in
/// parallel). Output order is fold order regardless of `threads`; the
/// builder must be safe to call concurrently when threads > 1.
inline std::vector<PredictionRecord> loocv(const std::vector<ProjectRecord>& data, const ModelBuilder& builder,
                                           const std::string& model_name, std::size_t threads = 1) {
    if (data.size() < 3) throw ValidationError("leave-one-out needs at least 3 projects");
    if (!builder) throw ValidationError("leave-one-out needs a model builder");
    const std::size_t n = data.size();
    std::vector<PredictionRecord> out(n);
    std::vector<std::string> failure(n);
    std::vector<char> failed(n, 0);

    auto run_fold = [&](std::size_t fold) {
        std::vector<ProjectRecord> train;
        train.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != fold) train.push_back(data[i]);
        }
        try {
            const Predictor predict = builder(train);
            out[fold] = {data[fold].effort, predict(data[fold]), model_name, fold};
        } catch (const std::exception& e) {
            failure[fold] = e.what();
            failed[fold] = 1;
        }
    };

    threads = std::clamp<std::size_t>(threads, 1, n);
    if (threads == 1) {
        for (std::size_t fold = 0; fold < n; ++fold) {
            run_fold(fold);
            if (failed[fold]) break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t fold = next++; fold < n; fold = next++) run_fold(fold);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t fold = 0; fold < n; ++fold) {
        if (failed[fold]) throw FoldError(fold, model_name + ": " + failure[fold]);
    }
    return out;
}

}  // namespace ucpe
