#pragma once

// Use Case Points size model: actor and use-case weights, the technical and
// environmental adjustment factors, and their product.

#include "ucpe/error.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace ucpe {

inline constexpr std::size_t kTechnicalFactors = 13;
inline constexpr std::size_t kEnvironmentalFactors = 8;
inline constexpr int kMaxRating = 5;

using TechnicalRatings = std::array<int, kTechnicalFactors>;
using EnvironmentalRatings = std::array<int, kEnvironmentalFactors>;

struct ActorCounts {
    std::uint32_t simple = 0;
    std::uint32_t average = 0;
    std::uint32_t complex = 0;

    std::uint64_t total() const noexcept { return std::uint64_t{simple} + average + complex; }
};

struct UseCaseCounts {
    std::uint32_t simple = 0;
    std::uint32_t average = 0;
    std::uint32_t complex = 0;

    std::uint64_t total() const noexcept { return std::uint64_t{simple} + average + complex; }
};

enum class UseCaseClass { simple, average, complex };

struct FactorRatings {
    TechnicalRatings technical{};
    EnvironmentalRatings environmental{};
};

struct WeightTable {
    std::array<double, kTechnicalFactors> technical;
    std::array<double, kEnvironmentalFactors> environmental;

    /// Karner's published weights. Overridable with `--weights`.
    static WeightTable defaults() noexcept {
        return {{2.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0},
                {1.5, 0.5, 1.0, 0.5, 1.0, 2.0, -1.0, -1.0}};
    }
};

struct UcpBreakdown {
    double uaw = 0.0;
    double uuc = 0.0;
    double uucp = 0.0;
    double tcf = 0.0;
    double ef = 0.0;
    double ucp = 0.0;
};

inline void validate_ratings(std::span<const int> ratings, const char* family) {
    for (std::size_t i = 0; i < ratings.size(); ++i) {
        if (ratings[i] < 0 || ratings[i] > kMaxRating) {
            throw ValidationError(std::string(family) + std::to_string(i + 1) + " rating " +
                                  std::to_string(ratings[i]) + " outside [0,5]");
        }
    }
}

inline void validate(const FactorRatings& ratings) {
    validate_ratings(ratings.technical, "F");
    validate_ratings(ratings.environmental, "E");
}

inline void validate(const WeightTable& weights) {
    for (double w : weights.technical) {
        if (!std::isfinite(w)) throw ValidationError("technical weight is not finite");
    }
    for (double w : weights.environmental) {
        if (!std::isfinite(w)) throw ValidationError("environmental weight is not finite");
    }
}

inline double compute_uaw(const ActorCounts& actors) noexcept {
    return 1.0 * actors.simple + 2.0 * actors.average + 3.0 * actors.complex;
}

inline double compute_uuc(const UseCaseCounts& usecases) noexcept {
    return 5.0 * usecases.simple + 10.0 * usecases.average + 15.0 * usecases.complex;
}

inline double compute_uucp(const ActorCounts& actors, const UseCaseCounts& usecases) noexcept {
    return compute_uaw(actors) + compute_uuc(usecases);
}

inline UseCaseClass classify_use_case(std::uint32_t transactions) noexcept {
    if (transactions <= 3) return UseCaseClass::simple;
    if (transactions <= 7) return UseCaseClass::average;
    return UseCaseClass::complex;
}

inline const char* to_string(UseCaseClass c) noexcept {
    switch (c) {
        case UseCaseClass::simple: return "simple";
        case UseCaseClass::average: return "average";
        case UseCaseClass::complex: return "complex";
    }
    return "?";
}

inline double weighted_sum(std::span<const int> ratings, std::span<const double> weights) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < ratings.size(); ++i) sum += ratings[i] * weights[i];
    return sum;
}

inline double compute_tcf(const FactorRatings& ratings, const WeightTable& weights) noexcept {
    return 0.6 + 0.01 * weighted_sum(ratings.technical, weights.technical);
}

inline double compute_ef(const FactorRatings& ratings, const WeightTable& weights) noexcept {
    return 1.4 - 0.03 * weighted_sum(ratings.environmental, weights.environmental);
}

/// Full size chain, unrounded. Rejects models with no actors or no use cases,
/// and weight tables that drive UCP to zero or below.
inline UcpBreakdown compute_ucp(const ActorCounts& actors, const UseCaseCounts& usecases,
                                const FactorRatings& ratings, const WeightTable& weights) {
    if (actors.total() == 0) throw ValidationError("model has no actors");
    if (usecases.total() == 0) throw ValidationError("model has no use cases");
    validate(ratings);
    validate(weights);

    UcpBreakdown b;
    b.uaw = compute_uaw(actors);
    b.uuc = compute_uuc(usecases);
    b.uucp = b.uaw + b.uuc;
    b.tcf = compute_tcf(ratings, weights);
    b.ef = compute_ef(ratings, weights);
    b.ucp = b.uucp * b.tcf * b.ef;
    if (!(b.ucp > 0.0)) throw ValidationError("UCP is not positive (check weight table)");
    return b;
}

}  // namespace ucpe
