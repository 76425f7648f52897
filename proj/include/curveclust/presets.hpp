#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/curve_density.hpp"
#include "curveclust/dataset.hpp"
#include "curveclust/fourier_curve.hpp"
#include "curveclust/rng.hpp"

namespace curveclust {

struct CurvePreset {
    std::string name;
    FourierCurve curve;
    double sigma = 0.05;
};

/// One curve of a generated dataset.
struct CurveSpec {
    FourierCurve curve;
    double sigma = 0.05;
    Eigen::Index count = 0;
};

namespace detail {

/// Planar closed curve from per-order cosine/sine coefficients:
/// x(s) = x0 + sum_m xc[m] cos(2 pi (m+1) s) + xs[m] sin(2 pi (m+1) s), same for y.
inline FourierCurve planar_curve(double x0, double y0, const std::vector<double>& xc, const std::vector<double>& xs,
                                 const std::vector<double>& yc, const std::vector<double>& ys)
{
    const int order = static_cast<int>(xc.size());
    if (xs.size() != xc.size() || yc.size() != xc.size() || ys.size() != xc.size())
        throw std::invalid_argument("planar_curve: coefficient lists must have equal length");
    FourierCurve c(2, 1, order);
    c.set_coeff(0, {0}, x0);
    c.set_coeff(1, {0}, y0);
    for (int m = 1; m <= order; ++m) {
        const auto i = static_cast<std::size_t>(m - 1);
        c.set_coeff(0, {-m}, xc[i]);
        c.set_coeff(0, {m}, xs[i]);
        c.set_coeff(1, {-m}, yc[i]);
        c.set_coeff(1, {m}, ys[i]);
    }
    return c;
}

} // namespace detail

/// Order-5 rabbit-shaped curve.
inline FourierCurve rabbit_curve()
{
    return detail::planar_curve(0.0, 0.0, {1.0, 0.5, 0.0, -0.125, 0.125}, {0.5, 0.25, 0.0, 0.25, -0.125},
                                {0.25, 0.0, -0.125, 0.0, 0.125}, {1.0, 0.5, 0.25, 0.0, 0.125});
}

/// (a0 + a1 cos 2 pi s, b0 + b1 sin 2 pi s).
inline FourierCurve ellipse_curve(double a0, double b0, double a1, double b1)
{
    return detail::planar_curve(a0, b0, {a1}, {0.0}, {0.0}, {b1});
}

inline FourierCurve circle_curve(double cx = 0.0, double cy = 0.0, double radius = 1.0)
{
    return ellipse_curve(cx, cy, radius, radius);
}

inline std::vector<std::string> preset_names()
{
    return {"rabbit", "circle", "ellipse", "two-circles", "two-ellipses"};
}

/// Curves of a named preset, each with its default sigma.
inline std::vector<CurvePreset> preset_curves(const std::string& name)
{
    if (name == "rabbit") return {{"rabbit", rabbit_curve(), 0.05}};
    if (name == "circle") return {{"circle", circle_curve(), 0.05}};
    if (name == "ellipse") return {{"ellipse", ellipse_curve(0.0, 0.0, 2.0, 1.0), 0.05}};
    if (name == "two-circles")
        return {{"circle-a", circle_curve(-1.5, 0.0, 1.0), 0.05}, {"circle-b", circle_curve(1.5, 0.0, 1.0), 0.05}};
    if (name == "two-ellipses")
        return {{"ellipse-a", ellipse_curve(-2.0, 0.0, 1.5, 0.75), 0.05},
                {"ellipse-b", ellipse_curve(2.0, 0.5, 0.75, 1.5), 0.05}};
    throw std::invalid_argument("unknown preset '" + name + "'");
}

/// Concatenated samples of every curve, labelled by curve index. Curve c draws
/// from its own stream derive_seed(seed, c), so adding curves leaves the
/// samples of earlier ones unchanged.
inline Dataset generate(const std::vector<CurveSpec>& curves, std::uint64_t seed, std::string name = "generated")
{
    if (curves.empty()) throw std::invalid_argument("generate: no curves");
    const int n = curves.front().curve.ambient_dim();
    Eigen::Index total = 0;
    for (const auto& c : curves) {
        if (c.count < 1) throw std::invalid_argument("generate: every count must be >= 1");
        if (c.curve.ambient_dim() != n) throw std::invalid_argument("generate: curves differ in dimension");
        total += c.count;
    }
    Dataset ds;
    ds.name = std::move(name);
    ds.points.resize(total, n);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(total));
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        Rng rng(seed, c);
        ds.points.middleRows(row, curves[c].count) = sample_curve(curves[c].curve, curves[c].sigma, curves[c].count, rng);
        labels.insert(labels.end(), static_cast<std::size_t>(curves[c].count), static_cast<int>(c));
        row += curves[c].count;
    }
    ds.labels = std::move(labels);
    return ds;
}

/// A desk-scale synthetic benchmark case: disjoint closed curves of one order.
struct SuiteCase {
    std::string name;
    int order = 1;
    int curves = 2;
    std::vector<CurveSpec> specs;
};

/// Random planar curve of exact order `order` centred at (cx, cy): the
/// order-1 terms form an ellipse with semi-axes in [0.6, 1.0], higher orders
/// add perturbations of decaying size so the curve stays within radius ~1.2
/// of its centre and does not self-intersect.
inline FourierCurve random_planar_curve(int order, double cx, double cy, Rng& rng)
{
    FourierCurve c(2, 1, order);
    c.set_coeff(0, {0}, cx);
    c.set_coeff(1, {0}, cy);
    const double a = 0.6 + 0.4 * rng.uniform();
    const double b = 0.6 + 0.4 * rng.uniform();
    const double angle = 2.0 * 3.141592653589793 * rng.uniform();
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    c.set_coeff(0, {-1}, a * ca);
    c.set_coeff(1, {-1}, a * sa);
    c.set_coeff(0, {1}, -b * sa);
    c.set_coeff(1, {1}, b * ca);
    for (int m = 2; m <= order; ++m) {
        const double scale = 0.12 / m;
        for (int i = 0; i < 2; ++i) {
            c.set_coeff(i, {-m}, scale * (2.0 * rng.uniform() - 1.0));
            c.set_coeff(i, {m}, scale * (2.0 * rng.uniform() - 1.0));
        }
    }
    return c;
}

/// Suite "orderK": cases with 2 and 3 curves of order K placed on a row with
/// spacing 3, 300 points each, sigma = 0.05. Deterministic per seed.
inline std::vector<SuiteCase> suite(const std::string& name, std::uint64_t seed)
{
    int order = 0;
    if (name == "order1") order = 1;
    else if (name == "order2") order = 2;
    else if (name == "order3") order = 3;
    else if (name == "order4") order = 4;
    else throw std::invalid_argument("unknown suite '" + name + "'");
    std::vector<SuiteCase> out;
    for (int curves : {2, 3}) {
        SuiteCase sc;
        sc.name = name + "-" + std::to_string(curves) + "curves";
        sc.order = order;
        sc.curves = curves;
        Rng rng(seed, static_cast<std::uint64_t>(100 * order + curves));
        for (int c = 0; c < curves; ++c)
            sc.specs.push_back({random_planar_curve(order, 3.0 * c, 0.0, rng), 0.05, 300});
        out.push_back(std::move(sc));
    }
    return out;
}

} // namespace curveclust
