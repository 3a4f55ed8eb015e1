#pragma once

// Seeded synthetic datasets shaped after three reference project collections.
//
// Each row: environmental ratings uniform on 0..5; productivity from a latent
// linear rule on those ratings plus gaussian noise; UCP lognormal with the
// profile's mean and sd; effort = productivity * ucp * (1 + eps).

#include "ucpe/dataset.hpp"
#include "ucpe/error.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ucpe {

struct SynthProfile {
    std::string name = "custom";
    double productivity_mean = 22.0;
    double productivity_sd = 5.0;
    double ucp_mean = 100.0;
    double ucp_sd = 30.0;
    /// Share of productivity variance explained by the environmental ratings.
    double signal_share = 0.72;
    /// Relative sd of the multiplicative effort noise.
    double effort_noise = 0.02;
    double min_productivity = 2.0;
    std::size_t default_n = 50;
};

inline void validate(const SynthProfile& p) {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(p.productivity_mean) || !positive(p.productivity_sd)) {
        throw ValidationError("profile productivity mean and sd must be positive");
    }
    if (!positive(p.ucp_mean) || !positive(p.ucp_sd)) throw ValidationError("profile ucp mean and sd must be positive");
    if (!(p.signal_share >= 0.0 && p.signal_share <= 1.0)) throw ValidationError("signal_share must lie in [0, 1]");
    if (!(p.effort_noise >= 0.0 && p.effort_noise < 0.5)) throw ValidationError("effort_noise must lie in [0, 0.5)");
    if (!(p.min_productivity > 0.0)) throw ValidationError("min_productivity must be positive");
    if (p.productivity_mean * p.effort_noise >= p.productivity_sd) {
        throw ValidationError("effort_noise alone exceeds the productivity sd");
    }
}

inline SynthProfile dataset1_profile() { return {"dataset1", 24.1, 5.1, 739.3, 1563.9, 0.72, 0.02, 2.0, 45}; }
inline SynthProfile dataset2_profile() { return {"dataset2", 20.8, 4.8, 82.6, 20.7, 0.72, 0.02, 2.0, 65}; }

inline bool is_builtin_profile(const std::string& name) {
    return name == "dataset1" || name == "dataset2" || name == "dataset3";
}

inline std::size_t default_size(const std::string& profile) {
    if (profile == "dataset1") return 45;
    if (profile == "dataset2") return 65;
    if (profile == "dataset3") return 110;
    return 50;
}

namespace detail {

// Appends `n` rows drawn from `p` using `rng`.
inline void synth_rows(const SynthProfile& p, std::size_t n, std::mt19937_64& rng, std::vector<ProjectRecord>& out) {
    constexpr double rating_variance = 35.0 / 12.0;  // discrete uniform on 0..5
    const double s = p.effort_noise;
    // Recorded productivity is p * (1 + eps); leave room for the eps variance.
    const double latent_var = (p.productivity_sd * p.productivity_sd - p.productivity_mean * p.productivity_mean * s * s) /
                              (1.0 + s * s);
    const double coef = std::sqrt(p.signal_share * latent_var / (kEnvironmentalFactors * rating_variance));
    const double noise_sd = std::sqrt((1.0 - p.signal_share) * latent_var);
    const double log_var = std::log1p((p.ucp_sd * p.ucp_sd) / (p.ucp_mean * p.ucp_mean));
    const double log_mu = std::log(p.ucp_mean) - 0.5 * log_var;

    std::uniform_int_distribution<int> rating(0, kMaxRating);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        ProjectRecord r;
        double prod = p.productivity_mean;
        for (std::size_t k = 0; k < kEnvironmentalFactors; ++k) {
            r.env[k] = rating(rng);
            // E1..E6 raise capability (fewer hours per UCP); E7, E8 lower it.
            const double sign = k < 6 ? -1.0 : 1.0;
            prod += sign * coef * (r.env[k] - 2.5);
        }
        prod += noise_sd * std_normal(rng);
        prod = std::max(prod, p.min_productivity);
        r.ucp = std::exp(log_mu + std::sqrt(log_var) * std_normal(rng));
        const double eps = s * std_normal(rng);
        r.effort = prod * r.ucp * std::max(1.0 + eps, 0.5);
        r.productivity = r.effort / r.ucp;
        out.push_back(std::move(r));
    }
}

inline void assign_ids(std::vector<ProjectRecord>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string digits = std::to_string(i + 1);
        rows[i].id = "P" + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits;
    }
}

}  // namespace detail

/// Rows from a single profile.
inline std::vector<ProjectRecord> synth_generate(const SynthProfile& profile, std::size_t n, std::uint64_t seed) {
    validate(profile);
    if (n < 10) throw ValidationError("synthetic datasets need at least 10 rows");
    std::mt19937_64 rng(seed);
    std::vector<ProjectRecord> rows;
    detail::synth_rows(profile, n, rng, rows);
    detail::assign_ids(rows);
    return rows;
}

/// Built-in profiles by name. dataset3 concatenates dataset1-style and
/// dataset2-style rows in a 45:65 ratio.
inline std::vector<ProjectRecord> synth_generate(const std::string& profile, std::size_t n, std::uint64_t seed) {
    if (profile == "dataset1") return synth_generate(dataset1_profile(), n, seed);
    if (profile == "dataset2") return synth_generate(dataset2_profile(), n, seed);
    if (profile != "dataset3") throw ValidationError("unknown profile '" + profile + "'");
    if (n < 10) throw ValidationError("synthetic datasets need at least 10 rows");
    const auto first = static_cast<std::size_t>(std::llround(static_cast<double>(n) * 45.0 / 110.0));
    std::mt19937_64 rng(seed);
    std::vector<ProjectRecord> rows;
    detail::synth_rows(dataset1_profile(), first, rng, rows);
    detail::synth_rows(dataset2_profile(), n - first, rng, rows);
    detail::assign_ids(rows);
    return rows;
}

}  // namespace ucpe
