#pragma once

// Bisecting k-medoids over one-dimensional productivity values. A cluster is
// split in two by 2-medoids; the split is kept when both children are more
// homogeneous than the parent, otherwise the cluster becomes a leaf. Leaves
// become ordinal productivity labels.

#include "ucpe/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ucpe {

struct ClusterConfig {
    /// Clusters smaller than 2 * min_leaf are never split, and a split is only
    /// accepted when both children keep at least min_leaf members.
    std::size_t min_leaf = 2;
    /// Split accepted iff max(child variance) < theta * parent variance.
    double theta = 1.0;
};

struct Cluster {
    std::vector<std::size_t> members;  // ascending row indices
    std::size_t medoid = 0;            // row index, one of `members`
    double medoid_value = 0.0;
    double variance = 0.0;
};

struct ClusterTree {
    struct Node {
        Cluster cluster;
        std::optional<std::array<std::size_t, 2>> children;  // indices into `nodes`
    };

    std::vector<Node> nodes;          // nodes[0] is the root
    std::vector<std::size_t> leaves;  // node indices, ascending medoid value

    const Cluster& leaf(std::size_t i) const { return nodes.at(leaves.at(i)).cluster; }
    std::size_t leaf_count() const noexcept { return leaves.size(); }
};

struct ProductivityLabel {
    std::size_t id = 0;
    std::string name;
    double medoid_productivity = 0.0;
};

inline void validate(const ClusterConfig& config) {
    if (config.min_leaf < 1) throw ValidationError("min_leaf must be at least 1");
    if (!(config.theta > 0.0) || !std::isfinite(config.theta)) throw ValidationError("theta must be positive");
}

/// Mean squared distance of `values` to `medoid`.
inline double cluster_variance(std::span<const double> values, double medoid) {
    if (values.empty()) throw ValidationError("variance of an empty cluster");
    double sum = 0.0;
    for (double v : values) sum += (v - medoid) * (v - medoid);
    return sum / static_cast<double>(values.size());
}

namespace detail {

inline double member_variance(std::span<const double> values, const std::vector<std::size_t>& members,
                              double medoid) {
    if (members.empty()) throw ValidationError("variance of an empty cluster");
    double sum = 0.0;
    for (std::size_t m : members) sum += (values[m] - medoid) * (values[m] - medoid);
    return sum / static_cast<double>(members.size());
}

/// Member with the least summed absolute distance to the others; the lowest
/// row index wins ties because `members` is ascending.
inline std::size_t find_medoid(std::span<const double> values, const std::vector<std::size_t>& members) {
    std::size_t best = members.front();
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t candidate : members) {
        double cost = 0.0;
        for (std::size_t m : members) cost += std::abs(values[m] - values[candidate]);
        if (cost < best_cost) {
            best_cost = cost;
            best = candidate;
        }
    }
    return best;
}

inline Cluster make_cluster(std::span<const double> values, std::vector<std::size_t> members) {
    Cluster c;
    c.members = std::move(members);
    c.medoid = find_medoid(values, c.members);
    c.medoid_value = values[c.medoid];
    c.variance = member_variance(values, c.members, c.medoid_value);
    return c;
}

}  // namespace detail

/// Median-style medoid of a bare value list (index into `values`).
inline std::size_t medoid_index(std::span<const double> values) {
    if (values.empty()) throw ValidationError("medoid of an empty set");
    std::vector<std::size_t> all(values.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return detail::find_medoid(values, all);
}

/// Two-medoid split of the rows `members` of `values`, minimizing the summed
/// distance of every member to its cluster's medoid.
///
/// With one-dimensional values each point belongs to its nearer medoid, so an
/// optimal partition is a cut of the members sorted by (value, row). Every cut
/// is scored in O(1) from prefix sums around the block medians; the first cut
/// reaching the minimum wins. The returned pair is ordered by medoid value.
inline std::pair<Cluster, Cluster> kmedoids_split(std::span<const double> values,
                                                  const std::vector<std::size_t>& members) {
    if (members.size() < 2) throw ValidationError("k-medoids split needs at least 2 members");

    std::vector<std::size_t> order(members);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] != values[b] ? values[a] < values[b] : a < b;
    });
    const std::size_t n = order.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[order[i]];

    // Summed |x - median| over sorted positions [lo, hi).
    auto block_cost = [&](std::size_t lo, std::size_t hi) {
        const std::size_t mid = lo + (hi - lo - 1) / 2;
        const double m = values[order[mid]];
        const double below = m * static_cast<double>(mid - lo) - (prefix[mid] - prefix[lo]);
        const double above = (prefix[hi] - prefix[mid + 1]) - m * static_cast<double>(hi - mid - 1);
        return below + above;
    };

    std::size_t best_cut = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t cut = 1; cut < n; ++cut) {
        const double cost = block_cost(0, cut) + block_cost(cut, n);
        if (cost < best_cost) {
            best_cost = cost;
            best_cut = cut;
        }
    }

    std::vector<std::size_t> low(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_cut));
    std::vector<std::size_t> high(order.begin() + static_cast<std::ptrdiff_t>(best_cut), order.end());
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());
    Cluster first = detail::make_cluster(values, std::move(low));
    Cluster second = detail::make_cluster(values, std::move(high));
    if (second.medoid_value < first.medoid_value) std::swap(first, second);
    return {std::move(first), std::move(second)};
}

inline std::pair<Cluster, Cluster> kmedoids_split(std::span<const double> values) {
    std::vector<std::size_t> all(values.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return kmedoids_split(values, all);
}

/// Builds the bisecting k-medoids tree, one level at a time.
inline ClusterTree bisect(std::span<const double> values, const ClusterConfig& config = {}) {
    validate(config);
    if (values.empty()) throw ValidationError("cannot cluster an empty dataset");
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("non-finite value in clustering input");
    }

    ClusterTree tree;
    std::vector<std::size_t> all(values.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    tree.nodes.push_back({detail::make_cluster(values, std::move(all)), std::nullopt});

    std::vector<std::size_t> level{0};
    while (!level.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t node_index : level) {
            const Cluster& parent = tree.nodes[node_index].cluster;
            const std::size_t size = parent.members.size();
            if (size < 2 || size < 2 * config.min_leaf) {
                tree.leaves.push_back(node_index);
                continue;
            }
            auto [left, right] = kmedoids_split(values, parent.members);
            const bool big_enough = left.members.size() >= config.min_leaf && right.members.size() >= config.min_leaf;
            const bool tighter = std::max(left.variance, right.variance) < config.theta * parent.variance;
            if (!(big_enough && tighter)) {
                tree.leaves.push_back(node_index);
                continue;
            }
            const std::size_t left_index = tree.nodes.size();
            tree.nodes.push_back({std::move(left), std::nullopt});
            tree.nodes.push_back({std::move(right), std::nullopt});
            tree.nodes[node_index].children = std::array<std::size_t, 2>{left_index, left_index + 1};
            next.push_back(left_index);
            next.push_back(left_index + 1);
        }
        level = std::move(next);
    }

    std::sort(tree.leaves.begin(), tree.leaves.end(), [&](std::size_t a, std::size_t b) {
        const Cluster& ca = tree.nodes[a].cluster;
        const Cluster& cb = tree.nodes[b].cluster;
        if (ca.medoid_value != cb.medoid_value) return ca.medoid_value < cb.medoid_value;
        return ca.medoid < cb.medoid;
    });
    return tree;
}

/// Name for label `rank` of `count`; "fair" sits in the middle of small label sets.
inline std::string linguistic_name(std::size_t rank, std::size_t count) {
    static constexpr std::array<const char*, 5> vocabulary{"very high", "high", "fair", "low", "very low"};
    const std::size_t offset = count == 0 ? 2 : 2 - std::min<std::size_t>(2, (count - 1) / 2);
    const std::size_t slot = offset + rank;
    if (slot < vocabulary.size()) return vocabulary[slot];
    return "extra-low-" + std::to_string(slot - vocabulary.size() + 1);
}

inline std::vector<ProductivityLabel> make_labels(const ClusterTree& tree) {
    std::vector<ProductivityLabel> labels;
    labels.reserve(tree.leaf_count());
    for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
        labels.push_back({i, linguistic_name(i, tree.leaf_count()), tree.leaf(i).medoid_value});
    }
    return labels;
}

/// Label id of every input row, given the tree built over those rows.
inline std::vector<std::size_t> row_labels(const ClusterTree& tree) {
    if (tree.nodes.empty()) return {};
    std::vector<std::size_t> out(tree.nodes.front().cluster.members.size());
    for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
        for (std::size_t m : tree.leaf(i).members) out.at(m) = i;
    }
    return out;
}

}  // namespace ucpe
