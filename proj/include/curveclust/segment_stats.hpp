#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/fourier_curve.hpp"
#include "curveclust/multi_index.hpp"
#include "curveclust/quadrature.hpp"

namespace curveclust {

/// Gaussian piece N(mean, cov) of the chain approximation, with the
/// factorization needed for density evaluation cached.
struct SegmentGaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd chol;      ///< lower triangular, chol * chol^T = cov
    Eigen::MatrixXd precision; ///< cov^-1
    double log_det = 0.0;

    static SegmentGaussian from_moments(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    {
        SegmentGaussian g;
        g.mean = std::move(mean);
        g.cov = std::move(cov);
        Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("SegmentGaussian: covariance is not positive definite");
        g.chol = llt.matrixL();
        g.log_det = 2.0 * g.chol.diagonal().array().log().sum();
        g.precision = llt.solve(Eigen::MatrixXd::Identity(g.cov.rows(), g.cov.cols()));
        return g;
    }

    int dim() const { return static_cast<int>(mean.size()); }

    /// log N(x; mean, cov). `x` must have dim() entries.
    double log_pdf(const double* x) const
    {
        const int n = dim();
        double buf[16];
        std::vector<double> heap;
        double* z = buf;
        if (n > 16) {
            heap.resize(static_cast<std::size_t>(n));
            z = heap.data();
        }
        // Forward substitution L z = x - mean.
        double quad = 0.0;
        for (int a = 0; a < n; ++a) {
            double v = x[a] - mean(a);
            for (int b = 0; b < a; ++b) v -= chol(a, b) * z[b];
            z[a] = v / chol(a, a);
            quad += z[a] * z[a];
        }
        return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + quad);
    }

    double log_pdf(const Eigen::VectorXd& x) const { return log_pdf(x.data()); }
};

/// Coefficient-independent tables of g(j, l) and g(j, l1, l2) for every
/// segment j and every term pair, for a fixed (d, k, K). Shared between all
/// models with the same shape.
struct BasisIntegrals {
    int intrinsic_dim = 1;
    int order = 0;
    int segments = 1;
    /// single(j, l) = g(j, l); rows are segment ranks, columns term ranks.
    Eigen::MatrixXd single;
    /// pair[j](l1, l2) = g(j, l1, l2); symmetric.
    std::vector<Eigen::MatrixXd> pair;

    std::size_t num_segments() const { return pair.size(); }
    double volume_scale() const { return std::pow(static_cast<double>(segments), intrinsic_dim); }

    static BasisIntegrals compute(int d, int k, int K)
    {
        BasisIntegrals b;
        b.intrinsic_dim = d;
        b.order = k;
        b.segments = K;
        const MultiIndexRange seg = segment_range(d, K);
        const MultiIndexRange trm = term_range(d, k);
        const auto nseg = static_cast<Eigen::Index>(seg.size());
        const auto nt = static_cast<Eigen::Index>(trm.size());
        const std::vector<MultiIndex> terms = trm.all();
        b.single.resize(nseg, nt);
        b.pair.assign(static_cast<std::size_t>(nseg), Eigen::MatrixXd(nt, nt));
        for (Eigen::Index js = 0; js < nseg; ++js) {
            const MultiIndex j = seg.at(static_cast<std::size_t>(js));
            for (Eigen::Index a = 0; a < nt; ++a) {
                b.single(js, a) = g_single(j, terms[static_cast<std::size_t>(a)], K);
                for (Eigen::Index c = a; c < nt; ++c) {
                    const double v = g_pair(j, terms[static_cast<std::size_t>(a)], terms[static_cast<std::size_t>(c)], K);
                    b.pair[static_cast<std::size_t>(js)](a, c) = v;
                    b.pair[static_cast<std::size_t>(js)](c, a) = v;
                }
            }
        }
        return b;
    }

    /// Process-wide cache; tables are immutable once built.
    static std::shared_ptr<const BasisIntegrals> get(int d, int k, int K)
    {
        if (d < 1 || k < 0 || K < 1) throw std::invalid_argument("BasisIntegrals: invalid (d, k, K)");
        static std::mutex mutex;
        static std::map<std::tuple<int, int, int>, std::shared_ptr<const BasisIntegrals>> cache;
        const auto key = std::make_tuple(d, k, K);
        {
            std::lock_guard<std::mutex> lock(mutex);
            auto it = cache.find(key);
            if (it != cache.end()) return it->second;
        }
        auto built = std::make_shared<const BasisIntegrals>(compute(d, k, K));
        std::lock_guard<std::mutex> lock(mutex);
        return cache.emplace(key, std::move(built)).first->second;
    }
};

/// mu_j^(i) = K^d sum_l a_l^(i) g(j, l).
inline Eigen::VectorXd segment_mean(const FourierCurve& curve, const MultiIndex& j, int segments)
{
    if (static_cast<int>(j.size()) != curve.intrinsic_dim())
        throw std::invalid_argument("segment_mean: segment index has wrong dimension");
    const MultiIndexRange trm = curve.terms();
    Eigen::VectorXd basis(static_cast<Eigen::Index>(trm.size()));
    for (std::size_t r = 0; r < trm.size(); ++r) basis(static_cast<Eigen::Index>(r)) = g_single(j, trm.at(r), segments);
    const double scale = std::pow(static_cast<double>(segments), curve.intrinsic_dim());
    return scale * (curve.coeffs() * basis);
}

/// Sigma_j = sigma^2 I + K^d sum_{l1,l2} a_l1^(i1) a_l2^(i2) g(j,l1,l2) - mu_j mu_j^T.
/// The second moment is formed about the curve's l = 0 term to limit
/// cancellation; the result is translation invariant either way.
inline Eigen::MatrixXd segment_cov(const FourierCurve& curve, double sigma, const MultiIndex& j, int segments)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("segment_cov: sigma must be > 0");
    if (static_cast<int>(j.size()) != curve.intrinsic_dim())
        throw std::invalid_argument("segment_cov: segment index has wrong dimension");
    const MultiIndexRange trm = curve.terms();
    const auto nt = static_cast<Eigen::Index>(trm.size());
    const std::vector<MultiIndex> terms = trm.all();
    Eigen::MatrixXd pair(nt, nt);
    for (Eigen::Index a = 0; a < nt; ++a)
        for (Eigen::Index c = 0; c < nt; ++c)
            pair(a, c) = g_pair(j, terms[static_cast<std::size_t>(a)], terms[static_cast<std::size_t>(c)], segments);

    CoeffMatrix centered = curve.coeffs();
    const Eigen::VectorXd center = centered.col(curve.constant_term());
    centered.col(curve.constant_term()).setZero();
    const double scale = std::pow(static_cast<double>(segments), curve.intrinsic_dim());
    const Eigen::VectorXd mu = segment_mean(curve, j, segments) - center;
    Eigen::MatrixXd cov = scale * (centered * pair * centered.transpose()) - mu * mu.transpose();
    cov = 0.5 * (cov + cov.transpose());
    cov.diagonal().array() += sigma * sigma;
    return cov;
}

/// d Sigma_l / d sigma. The sigma^2 term sits on the diagonal only, so this
/// is 2 sigma I for every segment.
inline Eigen::MatrixXd segment_cov_sigma_derivative(double sigma, int ambient_dim)
{
    return 2.0 * sigma * Eigen::MatrixXd::Identity(ambient_dim, ambient_dim);
}

/// Batched segment statistics from the shared tables, in lexicographic
/// segment order.
inline std::vector<SegmentGaussian> all_segments(const FourierCurve& curve, double sigma, const BasisIntegrals& basis)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("all_segments: sigma must be > 0");
    if (basis.intrinsic_dim != curve.intrinsic_dim() || basis.order != curve.order())
        throw std::invalid_argument("all_segments: basis tables do not match the curve shape");
    const double scale = basis.volume_scale();
    CoeffMatrix centered = curve.coeffs();
    const Eigen::VectorXd center = centered.col(curve.constant_term());
    centered.col(curve.constant_term()).setZero();

    std::vector<SegmentGaussian> out;
    out.reserve(basis.num_segments());
    for (std::size_t js = 0; js < basis.num_segments(); ++js) {
        const Eigen::VectorXd mu_c = scale * (centered * basis.single.row(static_cast<Eigen::Index>(js)).transpose());
        Eigen::MatrixXd cov = scale * (centered * basis.pair[js] * centered.transpose()) - mu_c * mu_c.transpose();
        cov = 0.5 * (cov + cov.transpose());
        cov.diagonal().array() += sigma * sigma;
        out.push_back(SegmentGaussian::from_moments(mu_c + center, std::move(cov)));
    }
    return out;
}

inline std::vector<SegmentGaussian> all_segments(const FourierCurve& curve, double sigma, int segments)
{
    return all_segments(curve, sigma, *BasisIntegrals::get(curve.intrinsic_dim(), curve.order(), segments));
}

/// Segment mean and covariance straight from their integral definitions,
/// using a tensor-product Gauss-Legendre rule on the segment. Used as an
/// independent check of the closed forms.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> segment_stats_oracle(const FourierCurve& curve, double sigma,
                                                                        const MultiIndex& j, int segments,
                                                                        int quad_points = 64)
{
    if (quad_points < 8) throw std::invalid_argument("segment_stats_oracle: quad_points must be >= 8");
    if (!(sigma > 0.0)) throw std::invalid_argument("segment_stats_oracle: sigma must be > 0");
    detail::check_segment(j, segments);
    const int d = curve.intrinsic_dim();
    const int n = curve.ambient_dim();
    if (static_cast<int>(j.size()) != d) throw std::invalid_argument("segment_stats_oracle: bad segment index");

    std::vector<QuadratureRule> rules;
    for (int m = 0; m < d; ++m)
        rules.push_back(gauss_legendre(quad_points, static_cast<double>(j[static_cast<std::size_t>(m)]) / segments,
                                       static_cast<double>(j[static_cast<std::size_t>(m)] + 1) / segments));

    // Evaluate the curve at every tensor node once.
    const MultiIndexRange nodes(d, 0, quad_points - 1);
    std::vector<Eigen::VectorXd> values;
    std::vector<double> weights;
    values.reserve(nodes.size());
    weights.reserve(nodes.size());
    std::vector<double> s(static_cast<std::size_t>(d));
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        const MultiIndex q = nodes.at(r);
        double w = 1.0;
        for (int m = 0; m < d; ++m) {
            const auto qm = static_cast<std::size_t>(q[static_cast<std::size_t>(m)]);
            s[static_cast<std::size_t>(m)] = rules[static_cast<std::size_t>(m)].nodes[qm];
            w *= rules[static_cast<std::size_t>(m)].weights[qm];
        }
        values.push_back(curve.eval(s));
        weights.push_back(w);
    }

    const double scale = std::pow(static_cast<double>(segments), d);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (std::size_t r = 0; r < values.size(); ++r) mean += weights[r] * values[r];
    mean *= scale;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < values.size(); ++r) {
        const Eigen::VectorXd dv = values[r] - mean;
        cov += weights[r] * dv * dv.transpose();
    }
    cov *= scale;
    cov.diagonal().array() += sigma * sigma;
    return {mean, cov};
}

} // namespace curveclust
