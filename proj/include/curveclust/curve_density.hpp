#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/dataset.hpp"
#include "curveclust/fourier_curve.hpp"
#include "curveclust/quadrature.hpp"
#include "curveclust/rng.hpp"
#include "curveclust/segment_stats.hpp"

namespace curveclust {

/// Smallest admissible sigma of a model. Keeps every segment covariance
/// positive definite.
inline constexpr double kSigmaFloor = 1e-6;
inline constexpr int kDefaultSegments = 16;

/// Running log-sum-exp accumulator.
class LogSumExp {
public:
    void add(double v)
    {
        if (v == -std::numeric_limits<double>::infinity()) return;
        if (v > max_) {
            sum_ = sum_ * std::exp(max_ - v) + 1.0;
            max_ = v;
        } else {
            sum_ += std::exp(v - max_);
        }
    }
    double value() const
    {
        if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

/// Gaussian distribution on a closed curve (or torus), evaluated through the
/// chain-of-Gaussians approximation: an equal-weight mixture of the K^d
/// segment Gaussians.
class CurveGaussianModel {
public:
    CurveGaussianModel(FourierCurve curve, double sigma, int segments = kDefaultSegments)
        : curve_(std::move(curve)), sigma_(sigma), segments_(segments)
    {
        if (!std::isfinite(sigma_) || sigma_ < kSigmaFloor)
            throw std::invalid_argument("CurveGaussianModel: sigma must be finite and >= 1e-6");
        if (segments_ < 1) throw std::invalid_argument("CurveGaussianModel: segment count must be >= 1");
        basis_ = BasisIntegrals::get(curve_.intrinsic_dim(), curve_.order(), segments_);
        gaussians_ = all_segments(curve_, sigma_, *basis_);
        log_norm_ = std::log(static_cast<double>(gaussians_.size()));
    }

    const FourierCurve& curve() const { return curve_; }
    double sigma() const { return sigma_; }
    int segments() const { return segments_; }
    int ambient_dim() const { return curve_.ambient_dim(); }
    const BasisIntegrals& basis() const { return *basis_; }
    const std::vector<SegmentGaussian>& segment_gaussians() const { return gaussians_; }

    /// ln((1/K^d) sum_l N(x; mu_l, Sigma_l)).
    double log_density(const double* x) const
    {
        LogSumExp acc;
        for (const auto& g : gaussians_) acc.add(g.log_pdf(x));
        return acc.value() - log_norm_;
    }

    double log_density(const Eigen::VectorXd& x) const
    {
        if (x.size() != ambient_dim()) throw std::invalid_argument("log_density: point has wrong dimension");
        return log_density(x.data());
    }

    Eigen::VectorXd log_density(const PointMatrix& points) const
    {
        if (points.cols() != ambient_dim()) throw std::invalid_argument("log_density: points have wrong dimension");
        Eigen::VectorXd out(points.rows());
        for (Eigen::Index r = 0; r < points.rows(); ++r) out(r) = log_density(points.data() + r * points.cols());
        return out;
    }

private:
    FourierCurve curve_;
    double sigma_;
    int segments_;
    std::shared_ptr<const BasisIntegrals> basis_;
    std::vector<SegmentGaussian> gaussians_;
    double log_norm_ = 0.0;
};

inline double log_density(const CurveGaussianModel& model, const Eigen::VectorXd& x) { return model.log_density(x); }

/// ln of the isotropic Gaussian N(center, sigma^2 I) at x.
inline double log_isotropic_gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& center, double sigma)
{
    const double n = static_cast<double>(x.size());
    return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma * sigma) -
           (x - center).squaredNorm() / (2.0 * sigma * sigma);
}

/// The exact marginal density, integrated over [0,1]^d by a composite
/// Gauss-Legendre rule with 16-node panels. `quad_points` is the node count
/// per axis and is rounded up to a multiple of 16.
inline double log_density_exact(const FourierCurve& curve, double sigma, const Eigen::VectorXd& x,
                                 int quad_points = 1024)
{
    if (quad_points < 32) throw std::invalid_argument("log_density_exact: quad_points must be >= 32");
    if (!(sigma > 0.0)) throw std::invalid_argument("log_density_exact: sigma must be > 0");
    if (x.size() != curve.ambient_dim()) throw std::invalid_argument("log_density_exact: wrong dimension");
    constexpr int kPanelNodes = 16;
    const int panels = (quad_points + kPanelNodes - 1) / kPanelNodes;
    const QuadratureRule rule = composite_gauss_legendre(panels, kPanelNodes, 0.0, 1.0);
    const int d = curve.intrinsic_dim();
    const auto per_axis = static_cast<int>(rule.nodes.size());
    const MultiIndexRange grid(d, 0, per_axis - 1);

    LogSumExp acc;
    std::vector<double> s(static_cast<std::size_t>(d));
    for (std::size_t r = 0; r < grid.size(); ++r) {
        const MultiIndex q = grid.at(r);
        double log_w = 0.0;
        for (int m = 0; m < d; ++m) {
            const auto qm = static_cast<std::size_t>(q[static_cast<std::size_t>(m)]);
            s[static_cast<std::size_t>(m)] = rule.nodes[qm];
            log_w += std::log(rule.weights[qm]);
        }
        acc.add(log_w + log_isotropic_gaussian(x, curve.eval(s), sigma));
    }
    return acc.value();
}

/// Equal-weight sum of isotropic Gaussians centred at phi(i/K), i = 0..K-1.
/// Only defined for curves (d = 1).
inline double log_density_pointsum(const FourierCurve& curve, double sigma, const Eigen::VectorXd& x, int segments)
{
    if (curve.intrinsic_dim() != 1) throw std::invalid_argument("log_density_pointsum: only defined for d = 1");
    if (segments < 1) throw std::invalid_argument("log_density_pointsum: K must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("log_density_pointsum: sigma must be > 0");
    LogSumExp acc;
    for (int i = 0; i < segments; ++i)
        acc.add(log_isotropic_gaussian(x, curve.eval(static_cast<double>(i) / segments), sigma));
    return acc.value() - std::log(static_cast<double>(segments));
}

/// Draws s uniformly from [0,1)^d and returns phi(s) + sigma * z. sigma = 0
/// gives points exactly on the curve.
inline PointMatrix sample_curve(const FourierCurve& curve, double sigma, Eigen::Index count, Rng& rng)
{
    if (sigma < 0.0 || !std::isfinite(sigma)) throw std::invalid_argument("sample_curve: sigma must be >= 0");
    PointMatrix out(count, curve.ambient_dim());
    std::vector<double> s(static_cast<std::size_t>(curve.intrinsic_dim()));
    for (Eigen::Index r = 0; r < count; ++r) {
        for (auto& v : s) v = rng.uniform();
        Eigen::VectorXd p = curve.eval(s);
        for (int i = 0; i < curve.ambient_dim(); ++i) out(r, i) = p(i) + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
    }
    return out;
}

/// Samples from the model's generative definition. `noiseless` drops the
/// Gaussian term entirely (the sigma -> 0 limit a model cannot represent).
inline Dataset sample(const CurveGaussianModel& model, Eigen::Index count, std::uint64_t seed, bool noiseless = false)
{
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    Rng rng(seed);
    Dataset ds;
    ds.name = "sample";
    ds.points = sample_curve(model.curve(), noiseless ? 0.0 : model.sigma(), count, rng);
    return ds;
}

} // namespace curveclust
