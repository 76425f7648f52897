#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace curveclust {

/// Per-point cost table: cost(r, c) = -ln p_c - ln f_c(x_r), +inf for
/// inactive clusters. Shared by the CEC-style Lloyd loops.
using CostMatrix = Eigen::MatrixXd;

/// Cluster with the smallest cost in row r among the allowed ones; ties go to
/// the lowest index. Returns -1 when no cluster is allowed.
inline int best_cluster(const CostMatrix& cost, Eigen::Index r, const std::vector<bool>& allowed)
{
    int arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < cost.cols(); ++c) {
        if (!allowed[static_cast<std::size_t>(c)]) continue;
        const double v = cost(r, c);
        if (arg < 0 || v < best) {
            best = v;
            arg = static_cast<int>(c);
        }
    }
    return arg;
}

inline std::vector<int> assign_by_cost(const CostMatrix& cost, const std::vector<bool>& active)
{
    std::vector<int> labels(static_cast<std::size_t>(cost.rows()));
    for (Eigen::Index r = 0; r < cost.rows(); ++r) labels[static_cast<std::size_t>(r)] = best_cluster(cost, r, active);
    return labels;
}

inline std::vector<long> cluster_sizes(const std::vector<int>& labels, std::size_t clusters)
{
    std::vector<long> sizes(clusters, 0);
    for (int l : labels)
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

/// Deactivates clusters with fewer than `min_size` points, smallest first
/// (ties to the lowest index), moving their points to the cheapest remaining
/// active cluster. Sizes are recounted after every removal. The last active
/// cluster is never removed. Returns the removed indices in order.
inline std::vector<int> remove_small_by_cost(const CostMatrix& cost, std::vector<int>& labels,
                                             std::vector<bool>& active, double min_size)
{
    std::vector<int> removed;
    while (true) {
        const std::vector<long> sizes = cluster_sizes(labels, active.size());
        int active_count = 0;
        int victim = -1;
        for (std::size_t c = 0; c < active.size(); ++c) {
            if (!active[c]) continue;
            ++active_count;
            if (static_cast<double>(sizes[c]) < min_size &&
                (victim < 0 || sizes[c] < sizes[static_cast<std::size_t>(victim)]))
                victim = static_cast<int>(c);
        }
        if (victim < 0 || active_count <= 1) break;
        active[static_cast<std::size_t>(victim)] = false;
        for (std::size_t r = 0; r < labels.size(); ++r)
            if (labels[r] == victim) labels[r] = best_cluster(cost, static_cast<Eigen::Index>(r), active);
        removed.push_back(victim);
    }
    return removed;
}

} // namespace curveclust
