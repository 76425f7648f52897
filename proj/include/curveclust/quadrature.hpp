#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace curveclust {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

/// Returns P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x)
{
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace detail

/// n-point Gauss-Legendre rule on [a, b]. Nodes are roots of P_n found by
/// Newton iteration.
inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadratureRule rule;
    if (n == 1) {
        rule.nodes = {0.5 * (a + b)};
        rule.weights = {b - a};
        return rule;
    }
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = detail::legendre_with_derivative(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = detail::legendre_with_derivative(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = mid - half * x;
        rule.nodes[hi] = mid + half * x;
        rule.weights[lo] = half * w;
        rule.weights[hi] = half * w;
    }
    return rule;
}

/// Composite rule: [a, b] split into `panels` equal pieces with a
/// `per_panel`-point Gauss-Legendre rule on each.
inline QuadratureRule composite_gauss_legendre(int panels, int per_panel, double a, double b)
{
    if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels must be >= 1");
    const QuadratureRule base = gauss_legendre(per_panel);
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels * per_panel));
    rule.weights.reserve(static_cast<std::size_t>(panels * per_panel));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (std::size_t q = 0; q < base.nodes.size(); ++q) {
            rule.nodes.push_back(lo + 0.5 * h * (base.nodes[q] + 1.0));
            rule.weights.push_back(0.5 * h * base.weights[q]);
        }
    }
    return rule;
}

} // namespace curveclust
