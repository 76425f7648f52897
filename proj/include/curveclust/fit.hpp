#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/bfgs.hpp"
#include "curveclust/curve_density.hpp"
#include "curveclust/dataset.hpp"
#include "curveclust/gradient.hpp"

namespace curveclust {

struct FitConfig {
    int max_iters = 200;
    double grad_tol = 1e-6;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    double sigma_floor = kSigmaFloor;

    void validate() const
    {
        if (max_iters < 1) throw std::invalid_argument("FitConfig: max_iters must be >= 1");
        if (!(grad_tol > 0.0)) throw std::invalid_argument("FitConfig: grad_tol must be > 0");
        if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
            throw std::invalid_argument("FitConfig: need 0 < wolfe_c1 < wolfe_c2 < 1");
        if (!(sigma_floor >= kSigmaFloor)) throw std::invalid_argument("FitConfig: sigma_floor must be >= 1e-6");
    }
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitResult {
    CurveGaussianModel model;
    double final_cross_entropy = 0.0;
    int iters = 0;
    bool converged = false;
    std::vector<double> trace; ///< cross-entropy after each accepted step
    std::string status;
};

/// -(1/|X|) sum_x ln f(x).
inline double cross_entropy(const CurveGaussianModel& model, const PointMatrix& points)
{
    if (points.rows() == 0) throw std::invalid_argument("cross_entropy: empty point set");
    if (points.cols() != model.ambient_dim()) throw std::invalid_argument("cross_entropy: wrong dimension");
    return -loglik(model, points) / static_cast<double>(points.rows());
}

inline double cross_entropy(const CurveGaussianModel& model, const Dataset& points)
{
    return cross_entropy(model, points.points);
}

/// Number of free parameters of one curve component: all coefficients plus sigma.
inline int curve_param_count(int n, int d, int order)
{
    return n * static_cast<int>(int_pow(static_cast<std::size_t>(2 * order + 1), d)) + 1;
}

namespace detail {

/// theta = [coeffs in row-major order, ln sigma].
inline Eigen::VectorXd pack(const CurveGaussianModel& model)
{
    const CoeffMatrix& c = model.curve().coeffs();
    Eigen::VectorXd theta(c.size() + 1);
    theta.head(c.size()) = Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
    theta(c.size()) = std::log(model.sigma());
    return theta;
}

inline CoeffMatrix unpack_coeffs(const FourierCurve& like, const Eigen::VectorXd& theta)
{
    CoeffMatrix c(like.coeffs().rows(), like.coeffs().cols());
    Eigen::Map<Eigen::VectorXd>(c.data(), c.size()) = theta.head(c.size());
    return c;
}

} // namespace detail

/// Minimizes the cross-entropy of `points` over all Fourier coefficients and
/// sigma with BFGS, starting from `init`. sigma is optimized as ln sigma and
/// steps below the floor are rejected by the line search.
inline FitResult fit_component(const PointMatrix& points, const CurveGaussianModel& init, const FitConfig& config = {})
{
    config.validate();
    const FourierCurve& shape = init.curve();
    const int params = curve_param_count(shape.ambient_dim(), shape.intrinsic_dim(), shape.order());
    if (points.cols() != shape.ambient_dim()) throw std::invalid_argument("fit_component: wrong point dimension");
    if (points.rows() < params)
        throw FitError("fit_component: need at least " + std::to_string(params) + " points for " +
                       std::to_string(params) + " parameters, got " + std::to_string(points.rows()));
    const double inv_n = 1.0 / static_cast<double>(points.rows());
    const double floor = config.sigma_floor;
    const int segments = init.segments();

    auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) -> double {
        const double sigma = std::exp(theta(theta.size() - 1));
        if (!std::isfinite(sigma) || sigma < floor || !theta.allFinite()) {
            grad.setConstant(std::numeric_limits<double>::quiet_NaN());
            return std::numeric_limits<double>::infinity();
        }
        try {
            const CurveGaussianModel model(
                FourierCurve(shape.ambient_dim(), shape.intrinsic_dim(), shape.order(),
                             detail::unpack_coeffs(shape, theta)),
                sigma, segments);
            const LoglikAndGradient lg = loglik_with_gradient(model, points);
            const CoeffMatrix& dc = lg.gradient.d_coeffs;
            grad.head(dc.size()) = -inv_n * Eigen::Map<const Eigen::VectorXd>(dc.data(), dc.size());
            grad(dc.size()) = -inv_n * lg.gradient.d_sigma * sigma;
            return -inv_n * lg.loglik;
        } catch (const std::exception&) {
            grad.setConstant(std::numeric_limits<double>::quiet_NaN());
            return std::numeric_limits<double>::infinity();
        }
    };

    BfgsOptions opt;
    opt.max_iters = config.max_iters;
    opt.grad_tol = config.grad_tol;
    opt.c1 = config.wolfe_c1;
    opt.c2 = config.wolfe_c2;
    Eigen::VectorXd theta0 = detail::pack(init);
    if (std::exp(theta0(theta0.size() - 1)) < floor) theta0(theta0.size() - 1) = std::log(floor);
    BfgsResult res = minimize_bfgs(objective, theta0, opt);
    if (!std::isfinite(res.value))
        throw FitError("fit_component: objective is not finite at the initial guess (" + res.status + ")");

    const double sigma = std::max(std::exp(res.x(res.x.size() - 1)), floor);
    CurveGaussianModel model(
        FourierCurve(shape.ambient_dim(), shape.intrinsic_dim(), shape.order(), detail::unpack_coeffs(shape, res.x)),
        sigma, segments);
    const double ce = cross_entropy(model, points);
    return FitResult{std::move(model), ce, res.iterations, res.converged, std::move(res.trace), std::move(res.status)};
}

inline FitResult fit_component(const Dataset& points, const CurveGaussianModel& init, const FitConfig& config = {})
{
    return fit_component(points.points, init, config);
}

/// Moment-matching initial guess for a closed curve (d = 1).
///
/// The constant term is the centroid. The order-1 terms trace the covariance
/// ellipse: cos term sqrt(2 l1) v1, sin term sqrt(2 l2) v2 for the two leading
/// eigenpairs, so the curve's second moment equals the data's in that plane.
/// sigma is the RMS distance from the points to the ellipse divided by the
/// square root of the codimension, floored at `sigma_floor`.
inline CurveGaussianModel init_curve_guess(const PointMatrix& points, int order, int segments = kDefaultSegments,
                                           double sigma_floor = kSigmaFloor)
{
    if (points.rows() < 3) throw std::invalid_argument("init_curve_guess: need at least 3 points");
    if (order < 0) throw std::invalid_argument("init_curve_guess: order must be >= 0");
    const int n = static_cast<int>(points.cols());
    const double count = static_cast<double>(points.rows());
    const Eigen::RowVectorXd centroid = points.colwise().mean();
    const Eigen::MatrixXd centered = points.rowwise() - centroid;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / count;

    // For d = 1 the column of term l is l + order.
    CoeffMatrix coeffs = CoeffMatrix::Zero(n, 2 * order + 1);
    coeffs.col(order) = centroid.transpose();
    if (cov.trace() <= 0.0) return CurveGaussianModel(FourierCurve(n, 1, order, coeffs), sigma_floor, segments);

    int codim = n;
    if (order >= 1 && n >= 2) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
        const Eigen::VectorXd v1 = eig.eigenvectors().col(n - 1);
        const Eigen::VectorXd v2 = eig.eigenvectors().col(n - 2);
        const double r1 = std::sqrt(2.0 * lambda(n - 1));
        const double r2 = std::sqrt(2.0 * lambda(n - 2));
        coeffs.col(order - 1) = r1 * v1;
        coeffs.col(order + 1) = r2 * v2;
        codim = n - 1;
    } else if (order >= 1) {
        coeffs(0, order - 1) = std::sqrt(2.0 * cov(0, 0));
        codim = 1;
    }
    FourierCurve curve(n, 1, order, coeffs);

    // Distance to the curve by a dense parameter sweep.
    constexpr int kSweep = 512;
    PointMatrix sweep(kSweep, n);
    for (int t = 0; t < kSweep; ++t) sweep.row(t) = curve.eval(static_cast<double>(t) / kSweep).transpose();
    double sum_sq = 0.0;
    for (Eigen::Index r = 0; r < points.rows(); ++r)
        sum_sq += (sweep.rowwise() - points.row(r)).rowwise().squaredNorm().minCoeff();
    const double sigma = std::max(std::sqrt(sum_sq / count / codim), sigma_floor);
    return CurveGaussianModel(std::move(curve), sigma, segments);
}

} // namespace curveclust
