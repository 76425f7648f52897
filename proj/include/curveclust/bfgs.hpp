#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace curveclust {

struct BfgsOptions {
    int max_iters = 200;
    double grad_tol = 1e-6;        ///< stop when ||grad||_inf < grad_tol
    double c1 = 1e-4;              ///< sufficient decrease constant
    double c2 = 0.9;               ///< curvature constant, c1 < c2 < 1
    int max_line_search_evals = 40;
    double curvature_eps = 1e-10;  ///< skip the update when y^T s <= curvature_eps
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    int evaluations = 0;
    int skipped_updates = 0;
    bool converged = false;
    /// Objective after every accepted step, starting with the initial value.
    std::vector<double> trace;
    std::string status;
};

namespace detail {

struct LinePoint {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd grad;
    bool finite() const { return std::isfinite(value) && std::isfinite(slope); }
};

/// Minimizer of the cubic through (lo, hi) with matching values and slopes,
/// falling back to bisection when it is undefined or too close to an end.
inline double cubic_step(const LinePoint& lo, const LinePoint& hi)
{
    const double mid = 0.5 * (lo.alpha + hi.alpha);
    if (!lo.finite() || !hi.finite()) return mid;
    const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (lo.alpha - hi.alpha);
    const double disc = d1 * d1 - lo.slope * hi.slope;
    if (!(disc >= 0.0)) return mid;
    const double d2 = std::copysign(std::sqrt(disc), hi.alpha - lo.alpha);
    const double denom = hi.slope - lo.slope + 2.0 * d2;
    if (denom == 0.0) return mid;
    const double a = hi.alpha - (hi.alpha - lo.alpha) * (hi.slope + d2 - d1) / denom;
    const double left = std::min(lo.alpha, hi.alpha);
    const double right = std::max(lo.alpha, hi.alpha);
    const double margin = 0.1 * (right - left);
    if (!std::isfinite(a) || a < left + margin || a > right - margin) return mid;
    return a;
}

} // namespace detail

/// Minimizes `objective` with BFGS on the inverse Hessian and a strong Wolfe
/// line search (bracketing phase followed by zoom). `objective(x, grad)`
/// returns f(x) and writes the gradient; it may return +inf or NaN to reject
/// a point, which the line search treats as an overly long step.
template <class Objective>
BfgsResult minimize_bfgs(Objective&& objective, Eigen::VectorXd x0, const BfgsOptions& opt = {})
{
    BfgsResult res;
    const Eigen::Index dim = x0.size();
    res.x = std::move(x0);
    res.gradient.resize(dim);
    res.value = objective(res.x, res.gradient);
    res.evaluations = 1;
    res.trace.push_back(res.value);
    if (!std::isfinite(res.value) || !res.gradient.allFinite()) {
        res.status = "objective is not finite at the initial point";
        return res;
    }

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(dim, dim);
    bool scaled = false;

    auto evaluate = [&](const Eigen::VectorXd& origin, const Eigen::VectorXd& dir, double alpha) {
        detail::LinePoint p;
        p.alpha = alpha;
        p.x = origin + alpha * dir;
        p.grad.resize(dim);
        p.value = objective(p.x, p.grad);
        ++res.evaluations;
        p.slope = p.grad.allFinite() ? p.grad.dot(dir) : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(p.value)) p.value = std::numeric_limits<double>::infinity();
        return p;
    };

    for (res.iterations = 0; res.iterations < opt.max_iters; ++res.iterations) {
        if (res.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
            res.converged = true;
            res.status = "gradient tolerance reached";
            return res;
        }
        Eigen::VectorXd dir = -(inv_hessian * res.gradient);
        double slope0 = res.gradient.dot(dir);
        if (!(slope0 < 0.0)) {
            inv_hessian.setIdentity();
            scaled = false;
            dir = -res.gradient;
            slope0 = res.gradient.dot(dir);
        }

        detail::LinePoint start;
        start.alpha = 0.0;
        start.value = res.value;
        start.slope = slope0;
        start.x = res.x;
        start.grad = res.gradient;

        double alpha = 1.0;
        if (!scaled) alpha = std::min(1.0, 1.0 / std::max(dir.lpNorm<Eigen::Infinity>(), 1e-300));

        // Bracketing phase.
        detail::LinePoint prev = start;
        detail::LinePoint accepted;
        bool found = false;
        bool zoom = false;
        detail::LinePoint lo;
        detail::LinePoint hi;
        int evals = 0;
        for (int i = 0; evals < opt.max_line_search_evals; ++i) {
            detail::LinePoint cur = evaluate(res.x, dir, alpha);
            ++evals;
            if (!cur.finite() || cur.value > start.value + opt.c1 * alpha * slope0 ||
                (i > 0 && cur.value >= prev.value)) {
                lo = prev;
                hi = cur;
                zoom = true;
                break;
            }
            if (std::abs(cur.slope) <= -opt.c2 * slope0) {
                accepted = cur;
                found = true;
                break;
            }
            if (cur.slope >= 0.0) {
                lo = cur;
                hi = prev;
                zoom = true;
                break;
            }
            prev = cur;
            alpha *= 2.0;
        }

        // Zoom phase: lo always satisfies sufficient decrease and has the
        // lowest value seen; the bracket [lo, hi] contains a Wolfe point.
        while (zoom && !found && evals < opt.max_line_search_evals) {
            const double a = detail::cubic_step(lo, hi);
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
            detail::LinePoint cur = evaluate(res.x, dir, a);
            ++evals;
            if (!cur.finite() || cur.value > start.value + opt.c1 * a * slope0 || cur.value >= lo.value) {
                hi = cur;
            } else {
                if (std::abs(cur.slope) <= -opt.c2 * slope0) {
                    accepted = cur;
                    found = true;
                    break;
                }
                if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = cur;
            }
        }
        if (!found) {
            // Fall back to the best sufficient-decrease point, if any.
            if (zoom && lo.alpha > 0.0 && lo.value < start.value) {
                accepted = lo;
                found = true;
            } else {
                res.status = "line search failed";
                return res;
            }
        }

        const Eigen::VectorXd s = accepted.x - res.x;
        const Eigen::VectorXd y = accepted.grad - res.gradient;
        res.x = accepted.x;
        res.gradient = accepted.grad;
        res.value = accepted.value;
        res.trace.push_back(res.value);

        const double ys = y.dot(s);
        if (ys > opt.curvature_eps) {
            if (!scaled) {
                inv_hessian *= ys / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / ys;
            const Eigen::VectorXd hy = inv_hessian * y;
            // H+ = (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
            inv_hessian += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
                           rho * (hy * s.transpose() + s * hy.transpose());
            inv_hessian = 0.5 * (inv_hessian + inv_hessian.transpose());
        } else {
            ++res.skipped_updates;
        }
    }
    res.converged = res.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol;
    res.status = res.converged ? "gradient tolerance reached" : "iteration limit reached";
    return res;
}

} // namespace curveclust
