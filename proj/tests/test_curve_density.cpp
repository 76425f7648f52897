#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace cc = curveclust;
using cc::testing::unit_circle;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

/// The curve re-parametrized by s -> s + c (d = 1).
cc::FourierCurve phase_shift(const cc::FourierCurve& c, double shift)
{
    cc::FourierCurve out = c;
    for (int l = 1; l <= c.order(); ++l) {
        const double phi = 2.0 * std::numbers::pi * l * shift;
        for (int i = 0; i < c.ambient_dim(); ++i) {
            const double ca = c.coeff(i, {-l});
            const double sa = c.coeff(i, {l});
            out.set_coeff(i, {-l}, ca * std::cos(phi) + sa * std::sin(phi));
            out.set_coeff(i, {l}, sa * std::cos(phi) - ca * std::sin(phi));
        }
    }
    return out;
}

/// Trapezoid rule of exp(log_density) over the curve's bounding box padded by 6 sigma.
double integrate_density(const cc::CurveGaussianModel& m, int cells)
{
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int t = 0; t < 2000; ++t) {
        const Eigen::VectorXd p = m.curve().eval(t / 2000.0);
        xmin = std::min(xmin, p(0));
        xmax = std::max(xmax, p(0));
        ymin = std::min(ymin, p(1));
        ymax = std::max(ymax, p(1));
    }
    const double pad = 6.0 * m.sigma();
    xmin -= pad, xmax += pad, ymin -= pad, ymax += pad;
    const double hx = (xmax - xmin) / cells;
    const double hy = (ymax - ymin) / cells;
    double total = 0.0;
    for (int a = 0; a <= cells; ++a) {
        for (int b = 0; b <= cells; ++b) {
            const double w = (a == 0 || a == cells ? 0.5 : 1.0) * (b == 0 || b == cells ? 0.5 : 1.0);
            const double x[2] = {xmin + a * hx, ymin + b * hy};
            total += w * std::exp(m.log_density(x));
        }
    }
    return total * hx * hy;
}

} // namespace

TEST(CurveGaussianModel, RejectsBadParameters)
{
    EXPECT_THROW(cc::CurveGaussianModel(unit_circle(), 0.0), std::invalid_argument);
    EXPECT_THROW(cc::CurveGaussianModel(unit_circle(), 1e-7), std::invalid_argument);
    EXPECT_THROW(cc::CurveGaussianModel(unit_circle(), 0.1, 0), std::invalid_argument);
}

TEST(CurveGaussianModel, SegmentCacheMatchesRebuild)
{
    const cc::CurveGaussianModel m(cc::rabbit_curve(), 0.05, 16);
    const auto rebuilt = cc::all_segments(m.curve(), m.sigma(), 16);
    ASSERT_EQ(rebuilt.size(), m.segment_gaussians().size());
    for (std::size_t s = 0; s < rebuilt.size(); ++s) {
        EXPECT_LT((rebuilt[s].mean - m.segment_gaussians()[s].mean).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((rebuilt[s].cov - m.segment_gaussians()[s].cov).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(LogDensity, ConstantCurveIsStandardNormal)
{
    const Eigen::Vector2d m(0.5, -1.5);
    for (int K : {1, 4, 16}) {
        const cc::CurveGaussianModel model(cc::constant_curve(m), 1.0, K);
        EXPECT_NEAR(model.log_density(Eigen::VectorXd(m)), -kLog2Pi, 1e-13);
    }
}

TEST(LogDensity, CircleRotationalSymmetry)
{
    const cc::CurveGaussianModel model(unit_circle(), 0.1, 64);
    const double a = std::exp(model.log_density(Eigen::VectorXd(Eigen::Vector2d(1, 0))));
    const double b = std::exp(model.log_density(Eigen::VectorXd(Eigen::Vector2d(0, 1))));
    EXPECT_NEAR(a / b, 1.0, 1e-3);
}

TEST(LogDensity, FarPointIsFinite)
{
    const cc::CurveGaussianModel model(cc::rabbit_curve(), 0.05);
    const double v = model.log_density(Eigen::VectorXd(Eigen::Vector2d(1e6, -1e6)));
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LT(v, -1e12);
}

TEST(LogDensity, RejectsWrongDimension)
{
    const cc::CurveGaussianModel model(unit_circle(), 0.1);
    EXPECT_THROW(model.log_density(Eigen::VectorXd(Eigen::Vector3d(0, 0, 0))), std::invalid_argument);
}

TEST(LogDensity, IntegratesToOne)
{
    EXPECT_NEAR(integrate_density(cc::CurveGaussianModel(unit_circle(), 0.1, 16), 400), 1.0, 0.01);
    EXPECT_NEAR(integrate_density(cc::CurveGaussianModel(cc::rabbit_curve(), 0.05, 16), 400), 1.0, 0.01);
    EXPECT_NEAR(integrate_density(cc::CurveGaussianModel(cc::ellipse_curve(1, 2, 2, 1), 0.2, 4), 400), 1.0, 0.01);
}

TEST(LogDensityExact, ConstantCurve)
{
    const Eigen::Vector2d m(2, 3);
    for (int q : {32, 64, 100})
        EXPECT_NEAR(cc::log_density_exact(cc::constant_curve(m), 1.0, Eigen::VectorXd(m), q), -kLog2Pi, 1e-13);
    EXPECT_THROW(cc::log_density_exact(cc::constant_curve(m), 1.0, Eigen::VectorXd(m), 16), std::invalid_argument);
}

TEST(LogDensityExact, CircleMatchesAdaptiveQuadrature)
{
    const Eigen::Vector2d x(0.9, 0.3);
    const double oracle = cc::testing::adaptive(
        [&](double s) {
            const Eigen::Vector2d p(std::cos(2 * std::numbers::pi * s), std::sin(2 * std::numbers::pi * s));
            return std::exp(-(x - p).squaredNorm() / (2 * 0.01)) / (2 * std::numbers::pi * 0.01);
        },
        0.0, 1.0);
    EXPECT_NEAR(cc::log_density_exact(unit_circle(), 0.1, Eigen::VectorXd(x)), std::log(oracle), 1e-10);
}

TEST(LogDensityExact, ChainApproximationCloseAtK64)
{
    const cc::CurveGaussianModel model(unit_circle(), 0.1, 64);
    cc::Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Vector2d x(2.4 * rng.uniform() - 1.2, 2.4 * rng.uniform() - 1.2);
        const double exact = cc::log_density_exact(unit_circle(), 0.1, Eigen::VectorXd(x));
        EXPECT_LT(std::abs(model.log_density(Eigen::VectorXd(x)) - exact), 1e-2);
    }
}

TEST(LogDensityExact, EllipseCentreFarBelowCurve)
{
    const cc::FourierCurve e = cc::ellipse_curve(0.5, -0.5, 2.0, 1.0);
    const double centre = cc::log_density_exact(e, 0.05, Eigen::VectorXd(Eigen::Vector2d(0.5, -0.5)));
    const double on_curve = cc::log_density_exact(e, 0.05, e.eval(0.3));
    EXPECT_LT(centre, on_curve - 50.0);
}

TEST(LogDensity, ChainErrorShrinksWithK)
{
    for (const auto& curve : {cc::ellipse_curve(0, 0, 2, 1), cc::rabbit_curve()}) {
        const cc::Dataset pts = cc::sample(cc::CurveGaussianModel(curve, 0.05), 100, 4);
        double prev = INFINITY;
        for (int K : {4, 16, 64}) {
            const cc::CurveGaussianModel model(curve, 0.05, K);
            double worst = 0.0;
            for (Eigen::Index r = 0; r < pts.size(); ++r) {
                const Eigen::VectorXd x = pts.points.row(r).transpose();
                worst = std::max(worst, std::abs(model.log_density(x) - cc::log_density_exact(curve, 0.05, x)));
            }
            EXPECT_LE(worst, prev);
            prev = worst;
        }
    }
}

TEST(LogDensity, PhaseShiftInvarianceAtK1)
{
    cc::Rng rng(17);
    const cc::FourierCurve c = cc::testing::random_curve(2, 1, 3, rng);
    const cc::FourierCurve shifted = phase_shift(c, 0.137);
    EXPECT_LT((shifted.eval(0.2) - c.eval(0.337)).norm(), 1e-12);
    const cc::CurveGaussianModel a(c, 0.3, 1);
    const cc::CurveGaussianModel b(shifted, 0.3, 1);
    for (int t = 0; t < 10; ++t) {
        const Eigen::VectorXd x = Eigen::Vector2d(rng.uniform() - 0.5, rng.uniform() - 0.5);
        EXPECT_NEAR(a.log_density(x), b.log_density(x), 1e-12);
        EXPECT_NEAR(cc::log_density_exact(c, 0.3, x), cc::log_density_exact(shifted, 0.3, x), 1e-12);
    }
}

TEST(PointSum, ConstantCurveMatchesChain)
{
    const Eigen::Vector2d m(1, 1);
    const Eigen::VectorXd x = Eigen::Vector2d(1.3, 0.4);
    for (int K : {1, 5, 16}) {
        const cc::CurveGaussianModel model(cc::constant_curve(m), 0.4, K);
        EXPECT_NEAR(cc::log_density_pointsum(model.curve(), 0.4, x, K), model.log_density(x), 1e-12);
    }
}

TEST(PointSum, HolesBetweenNodes)
{
    const cc::FourierCurve e = cc::ellipse_curve(0, 0, 2, 1);
    const cc::CurveGaussianModel chain(e, 0.01, 16);
    for (int i = 0; i < 16; ++i) {
        const Eigen::VectorXd mid = e.eval((i + 0.5) / 16.0);
        EXPECT_LT(cc::log_density_pointsum(e, 0.01, mid, 16), chain.log_density(mid));
    }
}

TEST(PointSum, ConvergesToExact)
{
    const cc::FourierCurve e = cc::ellipse_curve(0, 0, 2, 1);
    cc::Rng rng(1);
    for (int t = 0; t < 10; ++t) {
        const Eigen::VectorXd x = e.eval(rng.uniform()) + 0.1 * Eigen::Vector2d(rng.normal(), rng.normal());
        EXPECT_NEAR(cc::log_density_pointsum(e, 0.1, x, 1024), cc::log_density_exact(e, 0.1, x), 1e-3);
    }
    EXPECT_THROW(cc::log_density_pointsum(cc::FourierCurve(2, 2, 1), 0.1, Eigen::Vector2d(0, 0), 4),
                 std::invalid_argument);
}

TEST(Sample, ConstantCurveMean)
{
    const Eigen::Vector2d m(3, -2);
    const cc::Dataset ds = cc::sample(cc::CurveGaussianModel(cc::constant_curve(m), 0.1), 10000, 5);
    EXPECT_LT((ds.points.colwise().mean().transpose() - m).cwiseAbs().maxCoeff(), 0.01);
}

TEST(Sample, NoiselessCircleOnCurve)
{
    const cc::Dataset ds = cc::sample(cc::CurveGaussianModel(unit_circle(), 0.1), 500, 5, true);
    for (Eigen::Index r = 0; r < ds.size(); ++r) EXPECT_NEAR(ds.points.row(r).norm(), 1.0, 1e-12);
}

TEST(Sample, Deterministic)
{
    const cc::CurveGaussianModel model(cc::rabbit_curve(), 0.05);
    EXPECT_EQ(cc::sample(model, 100, 42).points, cc::sample(model, 100, 42).points);
    EXPECT_NE(cc::sample(model, 100, 42).points, cc::sample(model, 100, 43).points);
    EXPECT_THROW(cc::sample(model, 0, 1), std::invalid_argument);
}
