#pragma once

// Comparison models: Karner's fixed ratio, the Schneider-Winters three-ratio
// rule, and a Nassif-style log-linear model with a four-level productivity map.

#include "ucpe/error.hpp"
#include "ucpe/ucp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ucpe {

inline void require_positive_ucp(double ucp) {
    if (!(ucp > 0.0) || !std::isfinite(ucp)) throw ValidationError("ucp must be positive");
}

inline double karner_estimate(double ucp) {
    require_positive_ucp(ucp);
    return 20.0 * ucp;
}

/// E1..E6 rated below 3 plus E7..E8 rated above 3.
inline int sw_count(const EnvironmentalRatings& env) {
    validate_ratings(env, "environmental");
    int count = 0;
    for (std::size_t i = 0; i < 6; ++i) count += env[i] < 3;
    for (std::size_t i = 6; i < 8; ++i) count += env[i] > 3;
    return count;
}

inline double sw_ratio(int count) {
    if (count < 0) throw ValidationError("negative factor count");
    if (count <= 2) return 20.0;
    if (count <= 4) return 28.0;
    return 36.0;
}

inline double sw_estimate(double ucp, const EnvironmentalRatings& env) {
    require_positive_ucp(ucp);
    return sw_ratio(sw_count(env)) * ucp;
}

/// Crisp stand-in for the fuzzy productivity model: prod_sum is placed in one
/// of four intervals (-inf,b1], (b1,b2], (b2,b3], (b3,inf) and mapped to that
/// interval's productivity.
struct NassifProductivityMap {
    std::array<double, 3> breakpoints{};
    std::array<double, 4> levels{};

    std::size_t interval(double prod_sum) const {
        std::size_t k = 0;
        while (k < breakpoints.size() && breakpoints[k] < prod_sum) ++k;
        return k;
    }
    double level(double prod_sum) const { return levels[interval(prod_sum)]; }
};

inline void validate(const NassifProductivityMap& map) {
    for (std::size_t i = 0; i < map.breakpoints.size(); ++i) {
        if (!std::isfinite(map.breakpoints[i])) throw ValidationError("productivity breakpoints must be finite");
        if (i > 0 && map.breakpoints[i] < map.breakpoints[i - 1]) {
            throw ValidationError("productivity breakpoints must be ordered");
        }
    }
    for (double l : map.levels) {
        if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("productivity levels must be positive");
    }
}

struct NassifModel {
    double alpha = 1.0;
    double beta = 1.0;
    NassifProductivityMap productivity_map;
};

struct NassifRow {
    double ucp = 0.0;
    double productivity = 0.0;
    double effort = 0.0;
    EnvironmentalRatings env{};
};

inline double prod_sum(const EnvironmentalRatings& env, const WeightTable& weights) {
    return weighted_sum(env, weights.environmental);
}

/// Sample quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

/// Breakpoints at the quartiles of prod_sum; each level is the median
/// productivity of the training rows in its interval. An empty interval takes
/// the level of its nearest non-empty neighbour (the lower one on a tie).
inline NassifProductivityMap fit_productivity_map(std::span<const NassifRow> rows, const WeightTable& weights) {
    if (rows.empty()) throw ValidationError("productivity map needs training rows");
    std::vector<double> sums;
    for (const auto& r : rows) sums.push_back(prod_sum(r.env, weights));
    NassifProductivityMap map;
    for (std::size_t k = 0; k < 3; ++k) map.breakpoints[k] = quantile(sums, 0.25 * static_cast<double>(k + 1));

    std::array<std::vector<double>, 4> bucket;
    for (std::size_t i = 0; i < rows.size(); ++i) bucket[map.interval(sums[i])].push_back(rows[i].productivity);
    std::array<std::optional<double>, 4> found;
    for (std::size_t k = 0; k < 4; ++k) {
        if (!bucket[k].empty()) found[k] = median(bucket[k]);
    }
    for (std::size_t k = 0; k < 4; ++k) {
        if (found[k]) {
            map.levels[k] = *found[k];
            continue;
        }
        for (std::size_t d = 1; d < 4; ++d) {
            if (k >= d && found[k - d]) {
                map.levels[k] = *found[k - d];
                break;
            }
            if (k + d < 4 && found[k + d]) {
                map.levels[k] = *found[k + d];
                break;
            }
        }
    }
    return map;
}

/// Least squares of ln(effort) + ln(productivity) = ln(alpha) + beta ln(ucp).
/// A configured map replaces the quartile map learned from the rows.
inline NassifModel nassif_fit(std::span<const NassifRow> rows, const WeightTable& weights = WeightTable::defaults(),
                              const std::optional<NassifProductivityMap>& fixed_map = std::nullopt) {
    if (rows.size() < 3) throw ValidationError("Nassif fit needs at least 3 rows");
    double sx = 0, sz = 0;
    std::vector<double> lx, lz;
    for (const auto& r : rows) {
        if (!(r.ucp > 0.0) || !(r.productivity > 0.0) || !(r.effort > 0.0)) {
            throw ValidationError("Nassif fit needs positive ucp, productivity and effort");
        }
        lx.push_back(std::log(r.ucp));
        lz.push_back(std::log(r.effort) + std::log(r.productivity));
        sx += lx.back();
        sz += lz.back();
    }
    const double n = static_cast<double>(rows.size());
    const double mx = sx / n, mz = sz / n;
    double sxx = 0, sxz = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxz += (lx[i] - mx) * (lz[i] - mz);
    }
    if (!(sxx > 1e-12 * std::max(1.0, mx * mx) * n)) throw ValidationError("Nassif fit: ucp is constant, beta is unidentifiable");

    NassifModel model;
    model.beta = sxz / sxx;
    model.alpha = std::exp(mz - model.beta * mx);
    model.productivity_map = fixed_map ? *fixed_map : fit_productivity_map(rows, weights);
    validate(model.productivity_map);
    return model;
}

inline double nassif_productivity(const NassifProductivityMap& map, const EnvironmentalRatings& env,
                                  const WeightTable& weights = WeightTable::defaults()) {
    validate_ratings(env, "environmental");
    return map.level(prod_sum(env, weights));
}

inline double nassif_estimate(const NassifModel& model, double ucp, const EnvironmentalRatings& env,
                              const WeightTable& weights = WeightTable::defaults()) {
    require_positive_ucp(ucp);
    const double p = nassif_productivity(model.productivity_map, env, weights);
    return model.alpha / p * std::pow(ucp, model.beta);
}

}  // namespace ucpe
