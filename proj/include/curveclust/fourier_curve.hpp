#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/multi_index.hpp"

namespace curveclust {

/// Dense coefficient storage: row i is the ambient coordinate, column is the
/// lexicographic rank of the term multi-index l (see MultiIndexRange).
using CoeffMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tag written to model files. The trig convention is:
///   l_m < 0  ->  cos(-2 pi l_m s_m)
///   l_m = 0  ->  1
///   l_m > 0  ->  sin(2 pi l_m s_m)
/// cos is even so the sign inside the cosine is immaterial numerically, but
/// negative indices always mean cosine terms in stored coefficients.
inline constexpr const char* kTrigConvention = "neg:cos,zero:one,pos:sin";

/// One-axis basis function.
inline double trig_basis(int l, double s)
{
    if (l < 0) return std::cos(-kTwoPi * l * s);
    if (l == 0) return 1.0;
    return std::sin(kTwoPi * l * s);
}

/// Truncated d-dimensional Fourier series mapping [0,1]^d into R^n.
class FourierCurve {
public:
    FourierCurve(int ambient_dim, int intrinsic_dim, int order)
        : n_(ambient_dim), d_(intrinsic_dim), k_(order)
    {
        validate_dims();
        coeffs_ = CoeffMatrix::Zero(n_, static_cast<Eigen::Index>(num_terms()));
    }

    FourierCurve(int ambient_dim, int intrinsic_dim, int order, CoeffMatrix coeffs)
        : n_(ambient_dim), d_(intrinsic_dim), k_(order), coeffs_(std::move(coeffs))
    {
        validate_dims();
        if (coeffs_.rows() != n_ || coeffs_.cols() != static_cast<Eigen::Index>(num_terms()))
            throw std::invalid_argument("FourierCurve: coefficient matrix must be n x (2k+1)^d");
        if (!coeffs_.allFinite())
            throw std::invalid_argument("FourierCurve: coefficients must be finite");
    }

    int ambient_dim() const { return n_; }
    int intrinsic_dim() const { return d_; }
    int order() const { return k_; }
    std::size_t num_terms() const { return int_pow(static_cast<std::size_t>(2 * k_ + 1), d_); }
    MultiIndexRange terms() const { return term_range(d_, k_); }

    const CoeffMatrix& coeffs() const { return coeffs_; }

    double coeff(int i, const MultiIndex& l) const
    {
        return coeffs_(i, static_cast<Eigen::Index>(terms().rank(l)));
    }

    void set_coeff(int i, const MultiIndex& l, double value)
    {
        if (!std::isfinite(value)) throw std::invalid_argument("FourierCurve: non-finite coefficient");
        coeffs_(i, static_cast<Eigen::Index>(terms().rank(l))) = value;
    }

    /// Column of the constant (l = 0) term.
    Eigen::Index constant_term() const
    {
        return static_cast<Eigen::Index>(terms().rank(MultiIndex(static_cast<std::size_t>(d_), 0)));
    }

    Eigen::VectorXd eval(std::span<const double> s) const
    {
        if (static_cast<int>(s.size()) != d_)
            throw std::invalid_argument("FourierCurve::eval: parameter has wrong dimension");
        // Per-axis basis tables, then a product over axes for every term.
        const int w = 2 * k_ + 1;
        std::vector<double> table(static_cast<std::size_t>(d_ * w));
        for (int m = 0; m < d_; ++m)
            for (int l = -k_; l <= k_; ++l)
                table[static_cast<std::size_t>(m * w + l + k_)] = trig_basis(l, s[static_cast<std::size_t>(m)]);

        Eigen::VectorXd basis(static_cast<Eigen::Index>(num_terms()));
        const MultiIndexRange range = terms();
        for (std::size_t r = 0; r < range.size(); ++r) {
            const MultiIndex l = range.at(r);
            double prod = 1.0;
            for (int m = 0; m < d_; ++m)
                prod *= table[static_cast<std::size_t>(m * w + l[static_cast<std::size_t>(m)] + k_)];
            basis(static_cast<Eigen::Index>(r)) = prod;
        }
        return coeffs_ * basis;
    }

    Eigen::VectorXd eval(double s) const
    {
        const double p[1] = {s};
        return eval(std::span<const double>(p, 1));
    }

private:
    void validate_dims() const
    {
        if (n_ < 1) throw std::invalid_argument("FourierCurve: ambient dimension must be >= 1");
        if (d_ < 1) throw std::invalid_argument("FourierCurve: intrinsic dimension must be >= 1");
        if (k_ < 0) throw std::invalid_argument("FourierCurve: order must be >= 0");
    }

    int n_;
    int d_;
    int k_;
    CoeffMatrix coeffs_;
};

/// Constant curve sitting at `point`.
inline FourierCurve constant_curve(const Eigen::VectorXd& point, int intrinsic_dim = 1, int order = 0)
{
    FourierCurve c(static_cast<int>(point.size()), intrinsic_dim, order);
    for (int i = 0; i < point.size(); ++i)
        c.set_coeff(i, MultiIndex(static_cast<std::size_t>(intrinsic_dim), 0), point(i));
    return c;
}

namespace detail {

/// int_a^b trig(l, s) ds.
inline double axis_integral(int l, double a, double b)
{
    if (l < 0) {
        const double c = -1.0 / (kTwoPi * l);
        return c * std::sin(-kTwoPi * l * b) - c * std::sin(-kTwoPi * l * a);
    }
    if (l == 0) return b - a;
    const double c = -1.0 / (kTwoPi * l);
    return c * std::cos(kTwoPi * l * b) - c * std::cos(kTwoPi * l * a);
}

/// Antiderivative F(s) of trig(l1, s) * trig(l2, s), one branch per sign
/// pattern. The l1 = +-l2 sub-branches drop the term whose denominator
/// would vanish.
inline double axis_pair_antiderivative(int l1, int l2, double s)
{
    const double pi4 = 2.0 * kTwoPi;
    const int sum = l1 + l2;
    const int diff = l1 - l2;
    if (l1 < 0 && l2 < 0) {
        if (l1 != l2)
            return -std::sin(-kTwoPi * s * sum) / (pi4 * sum) - std::sin(-kTwoPi * s * diff) / (pi4 * diff);
        return -std::sin(-kTwoPi * s * sum) / (pi4 * sum) + s / 2.0;
    }
    if (l1 < 0 && l2 == 0) return -std::sin(-kTwoPi * l1 * s) / (kTwoPi * l1);
    if (l1 < 0 && l2 > 0) {
        if (l1 != -l2)
            return std::cos(-kTwoPi * s * diff) / (pi4 * diff) - std::cos(-kTwoPi * s * sum) / (pi4 * sum);
        return std::cos(-kTwoPi * s * diff) / (pi4 * diff);
    }
    if (l1 == 0 && l2 < 0) return -std::sin(-kTwoPi * l2 * s) / (kTwoPi * l2);
    if (l1 == 0 && l2 == 0) return s;
    if (l1 == 0 && l2 > 0) return -std::cos(kTwoPi * l2 * s) / (kTwoPi * l2);
    if (l1 > 0 && l2 < 0) {
        if (l1 != -l2)
            return -std::cos(kTwoPi * s * diff) / (pi4 * diff) - std::cos(kTwoPi * s * sum) / (pi4 * sum);
        return -std::cos(kTwoPi * s * diff) / (pi4 * diff);
    }
    if (l1 > 0 && l2 == 0) return -std::cos(kTwoPi * l1 * s) / (kTwoPi * l1);
    // l1 > 0 && l2 > 0
    if (l1 != l2)
        return std::sin(kTwoPi * s * diff) / (pi4 * diff) - std::sin(kTwoPi * s * sum) / (pi4 * sum);
    return s / 2.0 - std::sin(kTwoPi * s * sum) / (pi4 * sum);
}

/// int_a^b trig(l1, s) trig(l2, s) ds.
inline double axis_pair_integral(int l1, int l2, double a, double b)
{
    return axis_pair_antiderivative(l1, l2, b) - axis_pair_antiderivative(l1, l2, a);
}

inline void check_segment(const MultiIndex& j, int segments)
{
    if (segments < 1) throw std::invalid_argument("segment count K must be >= 1");
    for (int v : j)
        if (v < 0 || v >= segments) throw std::out_of_range("segment index outside {0..K-1}");
}

} // namespace detail

/// Integral of the basis product prod_m trig(l_m, s_m) over the segment
/// prod_m [j_m/K, (j_m+1)/K].
inline double g_single(const MultiIndex& j, const MultiIndex& l, int segments)
{
    if (j.size() != l.size()) throw std::invalid_argument("g_single: dimension mismatch");
    detail::check_segment(j, segments);
    const double width = 1.0 / segments;
    double prod = 1.0;
    for (std::size_t m = 0; m < j.size(); ++m)
        prod *= detail::axis_integral(l[m], j[m] * width, (j[m] + 1) * width);
    return prod;
}

/// Integral of prod_m trig(l1_m, s_m) trig(l2_m, s_m) over segment j.
inline double g_pair(const MultiIndex& j, const MultiIndex& l1, const MultiIndex& l2, int segments)
{
    if (j.size() != l1.size() || j.size() != l2.size())
        throw std::invalid_argument("g_pair: dimension mismatch");
    detail::check_segment(j, segments);
    const double width = 1.0 / segments;
    double prod = 1.0;
    for (std::size_t m = 0; m < j.size(); ++m)
        prod *= detail::axis_pair_integral(l1[m], l2[m], j[m] * width, (j[m] + 1) * width);
    return prod;
}

} // namespace curveclust
