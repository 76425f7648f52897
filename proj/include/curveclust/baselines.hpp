#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/curve_density.hpp"
#include "curveclust/dataset.hpp"
#include "curveclust/hard_assign.hpp"
#include "curveclust/kmeans.hpp"
#include "curveclust/metrics.hpp"
#include "curveclust/rng.hpp"
#include "curveclust/segment_stats.hpp"

namespace curveclust {

/// Added to the covariance diagonal when its smallest eigenvalue falls below it.
inline constexpr double kCovarianceFloor = 1e-6;

struct GaussianComponent {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double weight = 0.0;
    bool active = true;
};

/// Full-covariance Gaussian mixture as produced by the GMM and CEC baselines.
struct GaussianMixture {
    std::vector<GaussianComponent> components;
    std::vector<int> labels;
    double loglik = 0.0;        ///< soft for GMM, assignment-conditional for CEC
    std::string likelihood;     ///< "soft" or "hard"
    std::vector<double> trace;  ///< GMM: loglik per E-step; CEC: energy per iteration
    int iters = 0;
    bool converged = false;

    int active_count() const
    {
        int c = 0;
        for (const auto& g : components) c += g.active ? 1 : 0;
        return c;
    }
};

inline int gaussian_param_count(int n) { return n + n * (n + 1) / 2; }

inline int mixture_param_count(const GaussianMixture& mix, int n)
{
    const int active = mix.active_count();
    return active * gaussian_param_count(n) + active - 1;
}

inline ModelScore score(const GaussianMixture& mix, const PointMatrix& points)
{
    return make_score(mix.loglik, mixture_param_count(mix, static_cast<int>(points.cols())),
                      static_cast<long>(points.rows()), mix.likelihood);
}

namespace detail {

/// Adds kCovarianceFloor to the diagonal of a collapsed covariance.
inline Eigen::MatrixXd regularize_cov(Eigen::MatrixXd cov)
{
    cov = 0.5 * (cov + cov.transpose());
    const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (!(smallest >= kCovarianceFloor)) cov.diagonal().array() += kCovarianceFloor - std::min(smallest, 0.0);
    return cov;
}

inline GaussianComponent weighted_moments(const PointMatrix& points, const Eigen::VectorXd& w)
{
    GaussianComponent g;
    const double total = w.sum();
    g.mean = (points.transpose() * w) / total;
    const Eigen::MatrixXd centered = points.rowwise() - g.mean.transpose();
    g.cov = regularize_cov((centered.transpose() * w.asDiagonal() * centered) / total);
    return g;
}

inline std::vector<SegmentGaussian> factorize(const GaussianMixture& mix)
{
    std::vector<SegmentGaussian> out;
    for (const auto& g : mix.components)
        out.push_back(g.active ? SegmentGaussian::from_moments(g.mean, g.cov) : SegmentGaussian{});
    return out;
}

inline std::vector<int> initial_labels(const PointMatrix& points, int k, std::uint64_t seed)
{
    Rng rng(seed);
    return kmeans(points, k, rng).labels;
}

} // namespace detail

/// Expectation maximization for a k-component full-covariance Gaussian
/// mixture, started from the k-means++/Lloyd partition. Stops when the
/// log-likelihood gain drops below `tol` (relative) or after max_iters.
inline GaussianMixture gmm_em(const PointMatrix& points, int k, std::uint64_t seed, int max_iters = 500,
                              double tol = 1e-10)
{
    const Eigen::Index count = points.rows();
    if (k < 1 || count < k) throw std::invalid_argument("gmm_em: need 1 <= k <= number of points");
    GaussianMixture mix;
    mix.likelihood = "soft";
    mix.components.resize(static_cast<std::size_t>(k));

    Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(count, k);
    const std::vector<int> init = detail::initial_labels(points, k, seed);
    for (Eigen::Index r = 0; r < count; ++r) resp(r, init[static_cast<std::size_t>(r)]) = 1.0;

    Eigen::VectorXd row(k);
    double prev = -std::numeric_limits<double>::infinity();
    for (mix.iters = 0; mix.iters < max_iters; ++mix.iters) {
        // M-step.
        for (int c = 0; c < k; ++c) {
            auto& g = mix.components[static_cast<std::size_t>(c)];
            const double nk = resp.col(c).sum();
            if (!g.active || nk < 1e-8) {
                g.active = false;
                g.weight = 0.0;
                continue;
            }
            g = detail::weighted_moments(points, resp.col(c));
            g.weight = nk / static_cast<double>(count);
        }
        // E-step.
        const std::vector<SegmentGaussian> gs = detail::factorize(mix);
        double ll = 0.0;
        for (Eigen::Index r = 0; r < count; ++r) {
            double mx = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const auto& g = mix.components[static_cast<std::size_t>(c)];
                row(c) = g.active ? std::log(g.weight) + gs[static_cast<std::size_t>(c)].log_pdf(points.data() + r * points.cols())
                                  : -std::numeric_limits<double>::infinity();
                mx = std::max(mx, row(c));
            }
            const double lse = mx + std::log((row.array() - mx).exp().sum());
            resp.row(r) = (row.array() - lse).exp().matrix().transpose();
            ll += lse;
        }
        mix.trace.push_back(ll);
        mix.loglik = ll;
        if (ll - prev < tol * std::abs(ll)) {
            mix.converged = true;
            ++mix.iters;
            break;
        }
        prev = ll;
    }

    mix.labels.assign(static_cast<std::size_t>(count), 0);
    for (Eigen::Index r = 0; r < count; ++r) {
        Eigen::Index arg = 0;
        resp.row(r).maxCoeff(&arg);
        mix.labels[static_cast<std::size_t>(r)] = static_cast<int>(arg);
    }
    return mix;
}

/// Classic cross-entropy clustering with full Gaussians: hard assignment to
/// argmin -ln p_i - ln N_i(x), closed-form per-cluster MLE, and removal of
/// clusters holding fewer than removal_pct percent of the points. Energy is
/// sum_i p_i (-ln p_i + H(X_i || N_i)). eps <= 0 means 1e-4 |first energy|.
inline GaussianMixture cec_gaussian(const PointMatrix& points, int k, std::uint64_t seed, double removal_pct = 5.0,
                                    int max_iters = 100, double eps = 0.0)
{
    const Eigen::Index count = points.rows();
    const int n = static_cast<int>(points.cols());
    if (k < 1 || count < k) throw std::invalid_argument("cec_gaussian: need 1 <= k <= number of points");
    if (!(removal_pct > 0.0 && removal_pct < 100.0))
        throw std::invalid_argument("cec_gaussian: removal_pct must lie in (0, 100)");
    GaussianMixture mix;
    mix.likelihood = "hard";
    mix.components.resize(static_cast<std::size_t>(k));
    std::vector<int> labels = detail::initial_labels(points, k, seed);
    std::vector<bool> active(static_cast<std::size_t>(k), true);
    // A full covariance needs n + 1 points to be nonsingular.
    const double min_size = std::max(removal_pct / 100.0 * static_cast<double>(count), static_cast<double>(n + 1));

    auto refit = [&]() {
        const std::vector<long> sizes = cluster_sizes(labels, active.size());
        for (int c = 0; c < k; ++c) {
            auto& g = mix.components[static_cast<std::size_t>(c)];
            g.active = active[static_cast<std::size_t>(c)];
            if (!g.active) {
                g.weight = 0.0;
                continue;
            }
            Eigen::VectorXd w = Eigen::VectorXd::Zero(count);
            for (Eigen::Index r = 0; r < count; ++r)
                if (labels[static_cast<std::size_t>(r)] == c) w(r) = 1.0;
            const double weight = static_cast<double>(sizes[static_cast<std::size_t>(c)]) / static_cast<double>(count);
            g = detail::weighted_moments(points, w);
            g.weight = weight;
        }
    };
    auto costs = [&]() {
        const std::vector<SegmentGaussian> gs = detail::factorize(mix);
        CostMatrix cost(count, k);
        for (int c = 0; c < k; ++c) {
            const auto& g = mix.components[static_cast<std::size_t>(c)];
            for (Eigen::Index r = 0; r < count; ++r)
                cost(r, c) = g.active ? -std::log(g.weight) - gs[static_cast<std::size_t>(c)].log_pdf(points.data() + r * n)
                                      : std::numeric_limits<double>::infinity();
        }
        return cost;
    };
    auto energy = [&](const CostMatrix& cost) {
        double total = 0.0;
        for (Eigen::Index r = 0; r < count; ++r) total += cost(r, labels[static_cast<std::size_t>(r)]);
        return total / static_cast<double>(count);
    };

    // Initial clusters that are too small start out inactive.
    {
        const std::vector<long> sizes = cluster_sizes(labels, active.size());
        std::size_t largest = 0;
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            if (sizes[c] > sizes[largest]) largest = c;
            if (static_cast<double>(sizes[c]) < min_size) active[c] = false;
        }
        active[largest] = true;
    }
    // Fit with the k-means partition, treating points of inactive clusters as
    // unassigned until the first reassignment.
    for (std::size_t r = 0; r < labels.size(); ++r)
        if (!active[static_cast<std::size_t>(labels[r])]) labels[r] = -1;
    refit();
    {
        // Weights over the active clusters only.
        double total = 0.0;
        for (const auto& g : mix.components) total += g.weight;
        for (auto& g : mix.components) g.weight /= total;
    }

    double prev = std::numeric_limits<double>::infinity();
    for (mix.iters = 0; mix.iters < max_iters; ++mix.iters) {
        CostMatrix cost = costs();
        labels = assign_by_cost(cost, active);
        remove_small_by_cost(cost, labels, active, min_size);
        refit();
        cost = costs();
        const double h = energy(cost);
        mix.trace.push_back(h);
        if (mix.iters == 0 && eps <= 0.0) eps = 1e-4 * std::abs(h);
        if (!(h < prev - eps)) {
            mix.converged = true;
            ++mix.iters;
            break;
        }
        prev = h;
    }
    mix.labels = labels;
    mix.loglik = -static_cast<double>(count) * mix.trace.back();
    return mix;
}

} // namespace curveclust
