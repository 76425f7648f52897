#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/dataset.hpp"
#include "curveclust/rng.hpp"

namespace curveclust {

struct KMeansResult {
    PointMatrix centers;
    std::vector<int> labels;
    double inertia = 0.0;
    int iters = 0;
};

/// k-means++ seeding: the first center uniformly, every further one with
/// probability proportional to the squared distance to the nearest chosen center.
inline PointMatrix kmeans_pp_seed(const PointMatrix& points, int k, Rng& rng)
{
    const Eigen::Index count = points.rows();
    if (k < 1 || k > count) throw std::invalid_argument("kmeans_pp_seed: need 1 <= k <= number of points");
    PointMatrix centers(k, points.cols());
    centers.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(count))));
    Eigen::VectorXd dist = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = dist.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = count - 1;
            for (Eigen::Index r = 0; r < count; ++r) {
                acc += dist(r);
                if (acc > target) {
                    pick = r;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(count)));
        }
        centers.row(c) = points.row(pick);
        dist = dist.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

/// Nearest center per point; ties go to the lowest index.
inline std::vector<int> nearest_center(const PointMatrix& points, const PointMatrix& centers, double* inertia = nullptr)
{
    std::vector<int> labels(static_cast<std::size_t>(points.rows()));
    double total = 0.0;
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (Eigen::Index c = 0; c < centers.rows(); ++c) {
            const double d2 = (points.row(r) - centers.row(c)).squaredNorm();
            if (d2 < best) {
                best = d2;
                arg = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(r)] = arg;
        total += best;
    }
    if (inertia) *inertia = total;
    return labels;
}

/// k-means++ seeding followed by Lloyd iterations until the labels stop
/// changing. An empty cluster keeps its previous center.
inline KMeansResult kmeans(const PointMatrix& points, int k, Rng& rng, int max_iters = 100)
{
    KMeansResult res;
    res.centers = kmeans_pp_seed(points, k, rng);
    res.labels = nearest_center(points, res.centers, &res.inertia);
    for (res.iters = 1; res.iters <= max_iters; ++res.iters) {
        PointMatrix sums = PointMatrix::Zero(k, points.cols());
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index r = 0; r < points.rows(); ++r) {
            const int c = res.labels[static_cast<std::size_t>(r)];
            sums.row(c) += points.row(r);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0)
                res.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        std::vector<int> next = nearest_center(points, res.centers, &res.inertia);
        if (next == res.labels) break;
        res.labels = std::move(next);
    }
    return res;
}

} // namespace curveclust
