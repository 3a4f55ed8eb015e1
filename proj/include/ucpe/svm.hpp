#pragma once

// Gaussian-kernel C-SVM trained by sequential minimal optimization, with a
// one-vs-one wrapper that maps environmental ratings to productivity labels.
//
// The binary solver follows the usual dual formulation
//
//     min  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K(x_i, x_j)
//
// picking the working pair with second-order information and stopping when
// the maximal KKT violation drops below epsilon.

#include "ucpe/error.hpp"
#include "ucpe/ucp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <list>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ucpe {

using FeatureVector = std::vector<double>;

struct SvmConfig {
    double penalty_c = 1.0;
    std::optional<double> gamma;  // unset: 1 / (features * variance of scaled training data)
    double epsilon = 1e-3;
    std::size_t max_iterations = 1000;
    std::size_t kernel_cache_entries = 5000;
};

inline void validate(const SvmConfig& c) {
    if (!(c.penalty_c > 0.0) || !std::isfinite(c.penalty_c)) throw ValidationError("SVM penalty C must be positive");
    if (c.gamma && (!(*c.gamma > 0.0) || !std::isfinite(*c.gamma))) throw ValidationError("SVM gamma must be positive");
    if (!(c.epsilon > 0.0)) throw ValidationError("SVM epsilon must be positive");
    if (c.max_iterations < 1) throw ValidationError("SVM max_iterations must be at least 1");
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

inline double gaussian_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size()) throw ValidationError("kernel arguments differ in dimension");
    return std::exp(-gamma * squared_distance(a, b));
}

struct BinarySvmModel {
    std::vector<FeatureVector> support_vectors;
    std::vector<double> dual_coefficients;  // alpha_i * y_i
    double bias = 0.0;
    double gamma = 1.0;
    double penalty_c = 1.0;
    bool converged = false;
    std::size_t iterations = 0;

    double decision(std::span<const double> x) const {
        double f = bias;
        for (std::size_t i = 0; i < support_vectors.size(); ++i) {
            f += dual_coefficients[i] * gaussian_kernel(support_vectors[i], x, gamma);
        }
        return f;
    }
};

namespace detail {

/// LRU memo of kernel-matrix rows, bounded by the number of stored entries.
class KernelCache {
public:
    KernelCache(std::span<const FeatureVector> rows, double gamma, std::size_t max_entries)
        : rows_(rows), gamma_(gamma),
          max_rows_(std::max<std::size_t>(2, rows.empty() ? 2 : max_entries / rows.size())) {}

    const std::vector<double>& row(std::size_t i) {
        if (auto it = index_.find(i); it != index_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second);
            return it->second->second;
        }
        if (lru_.size() >= max_rows_) {
            index_.erase(lru_.back().first);
            lru_.pop_back();
        }
        std::vector<double> values(rows_.size());
        for (std::size_t k = 0; k < rows_.size(); ++k) values[k] = gaussian_kernel(rows_[i], rows_[k], gamma_);
        lru_.emplace_front(i, std::move(values));
        index_[i] = lru_.begin();
        return lru_.front().second;
    }

private:
    using Entry = std::pair<std::size_t, std::vector<double>>;

    std::span<const FeatureVector> rows_;
    double gamma_;
    std::size_t max_rows_;
    std::list<Entry> lru_;
    std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

}  // namespace detail

/// Trains one binary classifier. `labels` holds +1 / -1 per row; `gamma` is
/// the kernel width already resolved by the caller.
inline BinarySvmModel train_binary(std::span<const FeatureVector> rows, std::span<const int> labels, double gamma,
                                   const SvmConfig& config = {}) {
    validate(config);
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("SVM gamma must be positive");
    if (rows.size() != labels.size()) throw ValidationError("row and label counts differ");
    if (rows.empty()) throw ValidationError("empty SVM training set");
    const std::size_t dim = rows.front().size();
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) throw ValidationError("inconsistent feature dimension");
        if (labels[i] == 1) {
            has_pos = true;
        } else if (labels[i] == -1) {
            has_neg = true;
        } else {
            throw ValidationError("binary SVM labels must be +1 or -1");
        }
    }
    if (!has_pos || !has_neg) throw ValidationError("binary SVM needs rows of both classes");

    const std::size_t n = rows.size();
    const double c = config.penalty_c;
    constexpr double tau = 1e-12;
    std::vector<double> y(n), alpha(n, 0.0), grad(n, -1.0), diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = labels[i];
        diag[i] = gaussian_kernel(rows[i], rows[i], gamma);
    }
    auto upper = [&](std::size_t t) { return alpha[t] >= c; };
    auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    detail::KernelCache cache(rows, gamma, config.kernel_cache_entries);
    BinarySvmModel model;
    model.gamma = gamma;
    model.penalty_c = c;

    std::size_t iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        // First index: maximal violation among rows that may still move up.
        double gmax = -std::numeric_limits<double>::infinity();
        std::optional<std::size_t> pick_i;
        for (std::size_t t = 0; t < n; ++t) {
            const bool movable = y[t] > 0 ? !upper(t) : !lower(t);
            if (movable && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                pick_i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::optional<std::size_t> pick_j;
        double best_obj = std::numeric_limits<double>::infinity();
        if (pick_i) {
            const auto& ki = cache.row(*pick_i);
            for (std::size_t t = 0; t < n; ++t) {
                const bool movable = y[t] > 0 ? !lower(t) : !upper(t);
                if (!movable) continue;
                gmax2 = std::max(gmax2, y[t] * grad[t]);
                const double diff = gmax + y[t] * grad[t];
                if (diff > 0) {
                    double quad = diag[*pick_i] + diag[t] - 2.0 * ki[t];
                    if (quad <= 0) quad = tau;
                    const double obj = -(diff * diff) / quad;
                    if (obj < best_obj) {
                        best_obj = obj;
                        pick_j = t;
                    }
                }
            }
        }
        if (!pick_i || !pick_j || gmax + gmax2 < config.epsilon) {
            model.converged = true;
            break;
        }

        const std::size_t i = *pick_i, j = *pick_j;
        const auto& ki = cache.row(i);
        const auto& kj = cache.row(j);
        const double old_i = alpha[i], old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = diag[i] + diag[j] + 2.0 * (y[i] * y[j] * ki[j]);
            if (quad <= 0) quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = diag[i] + diag[j] - 2.0 * (y[i] * y[j] * ki[j]);
            if (quad <= 0) quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t k = 0; k < n; ++k) {
            grad[k] += y[k] * (y[i] * ki[k] * di + y[j] * kj[k] * dj);
        }
    }
    model.iterations = iter;

    // Offset from the free vectors, or the middle of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (lower(t)) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
    model.bias = -rho;

    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_vectors.push_back(rows[t]);
            model.dual_coefficients.push_back(alpha[t] * y[t]);
        }
    }
    return model;
}

/// Per-feature affine map applied identically at train and predict time.
struct FeatureScaler {
    std::vector<double> offsets;
    std::vector<double> divisors;

    static FeatureScaler rating_scale(std::size_t features) {
        return {std::vector<double>(features, 0.0), std::vector<double>(features, static_cast<double>(kMaxRating))};
    }

    FeatureVector apply(std::span<const double> raw) const {
        if (raw.size() != offsets.size()) throw ValidationError("feature vector has the wrong dimension");
        FeatureVector out(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - offsets[i]) / divisors[i];
        return out;
    }
};

struct MulticlassSvmModel {
    std::vector<std::size_t> class_labels;     // ascending
    std::vector<BinarySvmModel> binary_models;  // pairs (0,1), (0,2), ..., (1,2), ...
    FeatureScaler scaler;
    double gamma = 1.0;

    bool trained() const noexcept { return !class_labels.empty(); }

    bool converged() const noexcept {
        return std::all_of(binary_models.begin(), binary_models.end(), [](const auto& m) { return m.converged; });
    }

    /// One-vs-one majority vote over the raw feature vector; ties go to the
    /// smallest label id.
    std::size_t predict(std::span<const double> raw) const {
        if (!trained()) throw ValidationError("classifier is not trained");
        if (class_labels.size() == 1) return class_labels.front();
        const FeatureVector x = scaler.apply(raw);
        const std::size_t l = class_labels.size();
        std::vector<std::size_t> votes(l, 0);
        std::size_t pair = 0;
        for (std::size_t a = 0; a < l; ++a) {
            for (std::size_t b = a + 1; b < l; ++b, ++pair) {
                ++votes[binary_models[pair].decision(x) > 0 ? a : b];
            }
        }
        std::size_t winner = 0;
        for (std::size_t k = 1; k < l; ++k) {
            if (votes[k] > votes[winner]) winner = k;
        }
        return class_labels[winner];
    }
};

inline double default_gamma(std::span<const FeatureVector> scaled) {
    if (scaled.empty() || scaled.front().empty()) return 1.0;
    const std::size_t d = scaled.front().size();
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (const auto& r : scaled) {
        for (double v : r) {
            sum += v;
            sq += v * v;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = std::max(0.0, sq / static_cast<double>(count) - mean * mean);
    return var > 1e-12 ? 1.0 / (static_cast<double>(d) * var) : 1.0 / static_cast<double>(d);
}

/// One-vs-one ensemble. `rows` are raw ratings, `labels` the class of each row.
inline MulticlassSvmModel train_multiclass(std::span<const FeatureVector> rows, std::span<const std::size_t> labels,
                                           const SvmConfig& config = {}) {
    validate(config);
    if (rows.empty()) throw ValidationError("empty SVM training set");
    if (rows.size() != labels.size()) throw ValidationError("row and label counts differ");

    MulticlassSvmModel model;
    model.scaler = FeatureScaler::rating_scale(rows.front().size());
    std::vector<FeatureVector> scaled;
    scaled.reserve(rows.size());
    for (const auto& r : rows) scaled.push_back(model.scaler.apply(r));
    model.gamma = config.gamma.value_or(default_gamma(scaled));

    model.class_labels.assign(labels.begin(), labels.end());
    std::sort(model.class_labels.begin(), model.class_labels.end());
    model.class_labels.erase(std::unique(model.class_labels.begin(), model.class_labels.end()),
                             model.class_labels.end());

    const std::size_t l = model.class_labels.size();
    for (std::size_t a = 0; a < l; ++a) {
        for (std::size_t b = a + 1; b < l; ++b) {
            std::vector<FeatureVector> pair_rows;
            std::vector<int> pair_labels;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (labels[i] == model.class_labels[a] || labels[i] == model.class_labels[b]) {
                    pair_rows.push_back(scaled[i]);
                    pair_labels.push_back(labels[i] == model.class_labels[a] ? 1 : -1);
                }
            }
            model.binary_models.push_back(train_binary(pair_rows, pair_labels, model.gamma, config));
        }
    }
    return model;
}

inline std::size_t predict_label(const MulticlassSvmModel& model, const EnvironmentalRatings& env) {
    validate_ratings(env, "E");
    const FeatureVector raw(env.begin(), env.end());
    return model.predict(raw);
}

inline FeatureVector to_features(const EnvironmentalRatings& env) { return FeatureVector(env.begin(), env.end()); }

}  // namespace ucpe
