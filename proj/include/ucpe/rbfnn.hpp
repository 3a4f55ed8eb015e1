#pragma once

// Radial basis function network mapping (UCP, productivity) to effort.
// Gaussian hidden units centred on training inputs, linear output layer with
// a bias. Hidden units are picked one at a time by orthogonal forward
// selection under a leave-one-out error criterion; the final output weights
// are a ridge least-squares refit on the chosen units.

#include "ucpe/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ucpe {

using RbfInput = std::array<double, 2>;

enum class StopRule { loo_no_improvement, fixed_count };

inline const char* to_string(StopRule r) noexcept {
    return r == StopRule::fixed_count ? "fixed_count" : "loo_no_improvement";
}

enum class ValueScale { linear, log };

inline const char* to_string(ValueScale v) noexcept { return v == ValueScale::log ? "log" : "linear"; }

struct RbfNeuron {
    RbfInput center{};  // normalized space
    double spread = 1.0;
};

inline double activation(const RbfNeuron& neuron, const RbfInput& x) {
    const double d0 = x[0] - neuron.center[0];
    const double d1 = x[1] - neuron.center[1];
    return std::exp(-(d0 * d0 + d1 * d1) / (2.0 * neuron.spread * neuron.spread));
}

/// Per-feature z-score captured at train time, optionally of the logarithm.
struct InputNormalizer {
    ValueScale scale = ValueScale::linear;
    RbfInput mean{0.0, 0.0};
    RbfInput deviation{1.0, 1.0};

    RbfInput apply(double ucp, double productivity) const {
        if (scale == ValueScale::log) {
            ucp = std::log(ucp);
            productivity = std::log(productivity);
        }
        return {(ucp - mean[0]) / deviation[0], (productivity - mean[1]) / deviation[1]};
    }
};

struct RbfRow {
    double ucp = 0.0;
    double productivity = 0.0;
    double effort = 0.0;
};

struct RbfTrainConfig {
    std::size_t max_neurons = 30;
    double ridge = 1e-8;
    StopRule stop_rule = StopRule::loo_no_improvement;
    double spread = 1.0;
    double effort_floor = 1.0;
    /// Inputs are z-scored on this scale.
    ValueScale input_scale = ValueScale::linear;
    /// The output layer fits effort on this scale (log: prediction is exp of the sum).
    ValueScale target_scale = ValueScale::linear;
    /// Direct input-to-output weights alongside the hidden units.
    bool linear_terms = false;
};

inline void validate(const RbfTrainConfig& c) {
    if (c.max_neurons < 1) throw ValidationError("max_neurons must be at least 1");
    if (!(c.ridge >= 0.0) || !std::isfinite(c.ridge)) throw ValidationError("ridge must be nonnegative");
    if (!(c.spread > 0.0) || !std::isfinite(c.spread)) throw ValidationError("neuron spread must be positive");
    if (!std::isfinite(c.effort_floor)) throw ValidationError("effort floor must be finite");
}

struct RbfPrediction {
    double effort = 0.0;
    double raw = 0.0;  // before the floor
    bool clamped = false;
};

struct RbfnnModel {
    InputNormalizer normalizer;
    std::vector<RbfNeuron> neurons;
    std::vector<double> output_weights;
    double output_bias = 0.0;
    bool linear_terms = false;
    RbfInput linear_weights{0.0, 0.0};
    ValueScale target_scale = ValueScale::linear;
    double effort_floor = 1.0;
    bool trained = false;
    // LOO mean squared error (on the target scale) with 0, 1, ... neurons.
    std::vector<double> selection_trace;
    std::vector<std::size_t> selected_rows;

    /// Output-layer sum on the target scale.
    double output_sum(double ucp, double productivity) const {
        if (!trained) throw ValidationError("regressor is not trained");
        const RbfInput x = normalizer.apply(ucp, productivity);
        double y = output_bias;
        if (linear_terms) y += linear_weights[0] * x[0] + linear_weights[1] * x[1];
        for (std::size_t i = 0; i < neurons.size(); ++i) y += output_weights[i] * activation(neurons[i], x);
        return y;
    }

    double raw_output(double ucp, double productivity) const {
        const double s = output_sum(ucp, productivity);
        return target_scale == ValueScale::log ? std::exp(s) : s;
    }

    RbfPrediction predict_detailed(double ucp, double productivity) const {
        RbfPrediction p;
        p.raw = raw_output(ucp, productivity);
        p.clamped = !(p.raw >= effort_floor);
        p.effort = p.clamped ? effort_floor : p.raw;
        return p;
    }

    double predict(double ucp, double productivity) const { return predict_detailed(ucp, productivity).effort; }

    double loo_mse() const { return selection_trace.empty() ? 0.0 : selection_trace.back(); }
};

namespace detail {

inline InputNormalizer fit_normalizer(std::span<const RbfRow> rows, ValueScale scale) {
    InputNormalizer n;
    n.scale = scale;
    const double count = static_cast<double>(rows.size());
    for (int f = 0; f < 2; ++f) {
        auto value = [&](const RbfRow& r) {
            const double v = f == 0 ? r.ucp : r.productivity;
            return scale == ValueScale::log ? std::log(v) : v;
        };
        double mean = 0.0;
        for (const auto& r : rows) mean += value(r);
        mean /= count;
        double ss = 0.0;
        for (const auto& r : rows) ss += (value(r) - mean) * (value(r) - mean);
        const double sd = std::sqrt(ss / (count - 1.0));
        n.mean[f] = mean;
        n.deviation[f] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
    }
    return n;
}

/// Ridge least squares min |y - Aw|^2 + ridge |w|^2 via QR of the stacked system.
inline Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double ridge) {
    const Eigen::Index n = a.rows(), k = a.cols();
    Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(n + k, k);
    stacked.topRows(n) = a;
    stacked.bottomRows(k).diagonal().setConstant(std::sqrt(ridge));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + k);
    rhs.head(n) = y;
    return stacked.colPivHouseholderQr().solve(rhs);
}

/// Running state of the orthogonal selection: residual and leverages of the
/// regularized fit on the columns accepted so far.
struct OrthogonalFit {
    Eigen::VectorXd residual;
    Eigen::VectorXd leverage;
    double ridge = 0.0;

    // Both outputs are what accepting orthogonal column q would leave behind.
    void preview(const Eigen::VectorXd& q, Eigen::VectorXd& r, Eigen::VectorXd& h) const {
        const double denom = q.squaredNorm() + ridge;
        r = residual - (q.dot(residual) / denom) * q;
        h = leverage.array() + q.array().square() / denom;
    }

    void accept(const Eigen::VectorXd& q) {
        const double denom = q.squaredNorm() + ridge;
        residual -= (q.dot(residual) / denom) * q;
        leverage.array() += q.array().square() / denom;
    }
};

inline double loo_mse(const Eigen::VectorXd& r, const Eigen::VectorXd& h) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double denom = 1.0 - h[i];
        if (!(denom > 1e-12)) return std::numeric_limits<double>::infinity();
        s += (r[i] / denom) * (r[i] / denom);
    }
    return s / static_cast<double>(r.size());
}

}  // namespace detail

/// Trains the network. Candidate centres are the normalized training inputs.
///
/// Selection works on columns orthogonalized against everything already in
/// the model (bias and any linear terms first). Adding an orthogonal column q
/// with regularized weight g = q'r / (q'q + ridge) updates the residual r and
/// the leverages h in O(n), so every candidate's leave-one-out error
/// mean((r_i / (1 - h_i))^2) is cheap.
inline RbfnnModel train_rbfnn(std::span<const RbfRow> rows, const RbfTrainConfig& config = {}) {
    validate(config);
    if (rows.size() < 2) throw ValidationError("regressor needs at least 2 rows");
    for (const auto& r : rows) {
        if (!std::isfinite(r.ucp) || !std::isfinite(r.productivity) || !std::isfinite(r.effort)) {
            throw ValidationError("non-finite value in regressor input");
        }
        if (!(r.effort > 0.0)) throw ValidationError("regressor targets must be positive");
        if (config.input_scale == ValueScale::log && !(r.ucp > 0.0 && r.productivity > 0.0)) {
            throw ValidationError("log-scaled regressor inputs must be positive");
        }
    }

    const std::size_t n = rows.size();
    const auto rows_n = static_cast<Eigen::Index>(n);
    const double ridge = config.ridge;
    RbfnnModel model;
    model.normalizer = detail::fit_normalizer(rows, config.input_scale);
    model.effort_floor = config.effort_floor;
    model.target_scale = config.target_scale;
    model.linear_terms = config.linear_terms;

    std::vector<RbfInput> x(n);
    Eigen::VectorXd y(rows_n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        x[i] = model.normalizer.apply(rows[i].ucp, rows[i].productivity);
        y[e] = config.target_scale == ValueScale::log ? std::log(rows[i].effort) : rows[i].effort;
    }

    // Always-present columns: bias, then the raw inputs when linear terms are on.
    Eigen::MatrixXd base(rows_n, config.linear_terms ? 3 : 1);
    base.col(0).setOnes();
    if (config.linear_terms) {
        for (Eigen::Index i = 0; i < rows_n; ++i) {
            base(i, 1) = x[static_cast<std::size_t>(i)][0];
            base(i, 2) = x[static_cast<std::size_t>(i)][1];
        }
    }

    // Candidate columns, skipping repeated inputs (they would be collinear).
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < n; ++c) {
        bool repeat = false;
        for (std::size_t p : candidates) repeat = repeat || (x[p] == x[c]);
        if (!repeat) candidates.push_back(c);
    }
    const auto m = static_cast<Eigen::Index>(candidates.size());
    Eigen::MatrixXd phi(rows_n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const RbfNeuron unit{x[candidates[static_cast<std::size_t>(j)]], config.spread};
        for (Eigen::Index i = 0; i < rows_n; ++i) phi(i, j) = activation(unit, x[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd original_norm = phi.colwise().squaredNorm().transpose();
    Eigen::MatrixXd w = phi;

    detail::OrthogonalFit fit{y, Eigen::VectorXd::Zero(rows_n), ridge};
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    auto orthogonalize_rest = [&](const Eigen::VectorXd& q) {
        const double d = q.squaredNorm();
        for (Eigen::Index j = 0; j < m; ++j) {
            if (!used[static_cast<std::size_t>(j)]) w.col(j) -= (q.dot(w.col(j)) / d) * q;
        }
    };

    // Base columns go in unconditionally; a degenerate one (constant input) is skipped.
    std::vector<Eigen::Index> base_kept;
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index b = 0; b < base.cols(); ++b) {
        Eigen::VectorXd q = base.col(b);
        const double norm0 = q.squaredNorm();
        for (const auto& prev : basis) q -= (prev.dot(q) / prev.squaredNorm()) * prev;
        if (!(q.squaredNorm() > 1e-10 * norm0)) continue;
        fit.accept(q);
        orthogonalize_rest(q);
        basis.push_back(q);
        base_kept.push_back(b);
    }

    double current = detail::loo_mse(fit.residual, fit.leverage);
    model.selection_trace.push_back(current);

    std::vector<Eigen::Index> chosen;
    const std::size_t limit = std::min<std::size_t>(config.max_neurons, static_cast<std::size_t>(m));
    Eigen::VectorXd r, h;
    while (chosen.size() < limit) {
        Eigen::Index best = -1;
        double best_loo = std::numeric_limits<double>::infinity();
        double best_sse = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < m; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            if (!(w.col(j).squaredNorm() > 1e-10 * original_norm[j])) continue;
            fit.preview(w.col(j), r, h);
            const double l = detail::loo_mse(r, h);
            const double sse = r.squaredNorm();
            if (l < best_loo || (l == best_loo && sse < best_sse)) {
                best = j;
                best_loo = l;
                best_sse = sse;
            }
        }
        if (best < 0) break;
        if (config.stop_rule == StopRule::loo_no_improvement && !(best_loo < current)) break;

        const Eigen::VectorXd q = w.col(best);
        fit.accept(q);
        used[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
        current = best_loo;
        model.selection_trace.push_back(current);
        orthogonalize_rest(q);
    }

    const auto nb = static_cast<Eigen::Index>(base_kept.size());
    const auto k = static_cast<Eigen::Index>(chosen.size());
    Eigen::MatrixXd design(rows_n, nb + k);
    for (Eigen::Index b = 0; b < nb; ++b) design.col(b) = base.col(base_kept[static_cast<std::size_t>(b)]);
    for (Eigen::Index c = 0; c < k; ++c) design.col(nb + c) = phi.col(chosen[static_cast<std::size_t>(c)]);
    const Eigen::VectorXd weights = detail::ridge_solve(design, y, ridge);

    for (Eigen::Index b = 0; b < nb; ++b) {
        const Eigen::Index which = base_kept[static_cast<std::size_t>(b)];
        if (which == 0) model.output_bias = weights[b];
        else model.linear_weights[static_cast<std::size_t>(which - 1)] = weights[b];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        const std::size_t row = candidates[static_cast<std::size_t>(chosen[static_cast<std::size_t>(c)])];
        model.neurons.push_back({x[row], config.spread});
        model.output_weights.push_back(weights[nb + c]);
        model.selected_rows.push_back(row);
    }
    model.trained = true;
    return model;
}

}  // namespace ucpe
