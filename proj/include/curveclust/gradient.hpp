#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/curve_density.hpp"
#include "curveclust/dataset.hpp"

namespace curveclust {

/// Gradient of the total log-likelihood sum_x ln f(x) with respect to every
/// Fourier coefficient a_l^(i) (same layout as FourierCurve::coeffs) and sigma.
struct ParamGradient {
    CoeffMatrix d_coeffs;
    double d_sigma = 0.0;

    double max_abs() const { return std::max(d_coeffs.cwiseAbs().maxCoeff(), std::abs(d_sigma)); }
};

struct LoglikAndGradient {
    double loglik = 0.0;
    ParamGradient gradient;
};

/// d mu_seg / d a_term^(i) = K^d delta_{i,.} g(seg, term).
inline Eigen::VectorXd mean_coeff_derivative(const CurveGaussianModel& model, std::size_t seg, int i,
                                             Eigen::Index term)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(model.ambient_dim());
    out(i) = model.basis().volume_scale() * model.basis().single(static_cast<Eigen::Index>(seg), term);
    return out;
}

/// d Sigma_seg / d a_term^(i), by the product rule applied to the closed-form
/// covariance:
///   K^d (delta_{i1 i} (A G2)_{i2,term} + delta_{i2 i} (A G2)_{i1,term})
///     - dmu^(i1) mu^(i2) - mu^(i1) dmu^(i2)
/// where G2 = g(seg, ., .). Note the second coefficient factor carries the
/// index of the *other* coordinate, which keeps the derivative symmetric.
inline Eigen::MatrixXd cov_coeff_derivative(const CurveGaussianModel& model, std::size_t seg, int i,
                                            Eigen::Index term)
{
    const int n = model.ambient_dim();
    const double scale = model.basis().volume_scale();
    const Eigen::VectorXd a_g2 = model.curve().coeffs() * model.basis().pair[seg].col(term);
    const Eigen::VectorXd dmu = mean_coeff_derivative(model, seg, i, term);
    const Eigen::VectorXd& mu = model.segment_gaussians()[seg].mean;
    Eigen::MatrixXd out = -(dmu * mu.transpose() + mu * dmu.transpose());
    for (int c = 0; c < n; ++c) {
        out(i, c) += scale * a_g2(c);
        out(c, i) += scale * a_g2(c);
    }
    return out;
}

/// Total log-likelihood of `points` under the chain approximation together
/// with its analytic gradient.
///
/// Per point the segment responsibilities r_l = N_l(x) / sum_m N_m(x) are
/// formed once (with the same max shift as log_density). With
/// w = Sigma_l^-1 (x - mu_l) the per-segment sufficient statistics are
///   Gmu_l = sum_x r_l w,   GS_l = 1/2 sum_x r_l (w w^T - Sigma_l^-1),
/// and the chain rule through the closed-form segment moments gives
///   dL/dA     = K^d sum_l [ (Gmu_l - 2 GS_l mu_l) g_l^T + 2 GS_l A G2_l ]
///   dL/dsigma = sum_l < GS_l, 2 sigma I >.
inline LoglikAndGradient loglik_with_gradient(const CurveGaussianModel& model, const PointMatrix& points)
{
    const int n = model.ambient_dim();
    if (points.cols() != n) throw std::invalid_argument("loglik_with_gradient: points have wrong dimension");
    if (points.rows() == 0) throw std::invalid_argument("loglik_with_gradient: no points");
    const auto& segs = model.segment_gaussians();
    const std::size_t S = segs.size();
    const double log_norm = std::log(static_cast<double>(S));

    Eigen::MatrixXd g_mu = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(S));
    std::vector<Eigen::MatrixXd> g_sigma(S, Eigen::MatrixXd::Zero(n, n));
    std::vector<double> resp_total(S, 0.0);

    std::vector<double> logp(S);
    std::vector<double> whitened(S * static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n));
    double total = 0.0;

    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        const double* x = points.data() + r * n;
        double max_logp = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < S; ++l) {
            const SegmentGaussian& g = segs[l];
            double quad = 0.0;
            for (int a = 0; a < n; ++a) {
                double v = x[a] - g.mean(a);
                for (int b = 0; b < a; ++b) v -= g.chol(a, b) * z[static_cast<std::size_t>(b)];
                z[static_cast<std::size_t>(a)] = v / g.chol(a, a);
                quad += z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
            }
            double* w = whitened.data() + l * static_cast<std::size_t>(n);
            for (int a = n - 1; a >= 0; --a) {
                double v = z[static_cast<std::size_t>(a)];
                for (int b = a + 1; b < n; ++b) v -= g.chol(b, a) * w[b];
                w[a] = v / g.chol(a, a);
            }
            logp[l] = -0.5 * (n * std::log(2.0 * std::numbers::pi) + g.log_det + quad);
            max_logp = std::max(max_logp, logp[l]);
        }
        double sum = 0.0;
        for (std::size_t l = 0; l < S; ++l) {
            logp[l] = std::exp(logp[l] - max_logp);
            sum += logp[l];
        }
        total += max_logp + std::log(sum) - log_norm;
        for (std::size_t l = 0; l < S; ++l) {
            const double resp = logp[l] / sum;
            if (resp == 0.0) continue;
            const double* w = whitened.data() + l * static_cast<std::size_t>(n);
            resp_total[l] += resp;
            Eigen::MatrixXd& gs = g_sigma[l];
            for (int a = 0; a < n; ++a) {
                g_mu(a, static_cast<Eigen::Index>(l)) += resp * w[a];
                for (int b = 0; b <= a; ++b) gs(a, b) += 0.5 * resp * w[a] * w[b];
            }
        }
    }

    const FourierCurve& curve = model.curve();
    const BasisIntegrals& basis = model.basis();
    const double scale = basis.volume_scale();
    CoeffMatrix centered = curve.coeffs();
    const Eigen::VectorXd center = centered.col(curve.constant_term());
    centered.col(curve.constant_term()).setZero();

    LoglikAndGradient out;
    out.loglik = total;
    out.gradient.d_coeffs = CoeffMatrix::Zero(n, centered.cols());
    double trace_sum = 0.0;
    for (std::size_t l = 0; l < S; ++l) {
        Eigen::MatrixXd& gs = g_sigma[l];
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) gs(a, b) = gs(b, a);
        gs -= 0.5 * resp_total[l] * segs[l].precision;
        trace_sum += gs.trace();
        const Eigen::VectorXd mu_c = segs[l].mean - center;
        const Eigen::VectorXd v = g_mu.col(static_cast<Eigen::Index>(l)) - 2.0 * gs * mu_c;
        out.gradient.d_coeffs.noalias() += scale * v * basis.single.row(static_cast<Eigen::Index>(l));
        out.gradient.d_coeffs.noalias() += (2.0 * scale) * gs * (centered * basis.pair[l]);
    }
    out.gradient.d_sigma = 2.0 * model.sigma() * trace_sum;
    return out;
}

inline double loglik(const CurveGaussianModel& model, const PointMatrix& points)
{
    double total = 0.0;
    for (Eigen::Index r = 0; r < points.rows(); ++r) total += model.log_density(points.data() + r * points.cols());
    return total;
}

inline ParamGradient grad_loglik(const CurveGaussianModel& model, const Dataset& points)
{
    return loglik_with_gradient(model, points.points).gradient;
}

/// Central differences of the total log-likelihood, rebuilding the segment
/// Gaussians for every perturbed parameter.
inline ParamGradient fd_gradient(const CurveGaussianModel& model, const Dataset& points, double h)
{
    if (!(h >= 1e-8 && h <= 1e-3)) throw std::invalid_argument("fd_gradient: h must lie in [1e-8, 1e-3]");
    const FourierCurve& curve = model.curve();
    ParamGradient out;
    out.d_coeffs = CoeffMatrix::Zero(curve.coeffs().rows(), curve.coeffs().cols());
    for (Eigen::Index i = 0; i < curve.coeffs().rows(); ++i) {
        for (Eigen::Index t = 0; t < curve.coeffs().cols(); ++t) {
            CoeffMatrix plus = curve.coeffs();
            CoeffMatrix minus = curve.coeffs();
            plus(i, t) += h;
            minus(i, t) -= h;
            const CurveGaussianModel mp(FourierCurve(curve.ambient_dim(), curve.intrinsic_dim(), curve.order(), plus),
                                        model.sigma(), model.segments());
            const CurveGaussianModel mm(FourierCurve(curve.ambient_dim(), curve.intrinsic_dim(), curve.order(), minus),
                                        model.sigma(), model.segments());
            out.d_coeffs(i, t) = (loglik(mp, points.points) - loglik(mm, points.points)) / (2.0 * h);
        }
    }
    const CurveGaussianModel sp(curve, model.sigma() + h, model.segments());
    const CurveGaussianModel sm(curve, model.sigma() - h, model.segments());
    out.d_sigma = (loglik(sp, points.points) - loglik(sm, points.points)) / (2.0 * h);
    return out;
}

} // namespace curveclust
