#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curveclust/curve_density.hpp"
#include "curveclust/dataset.hpp"
#include "curveclust/fit.hpp"
#include "curveclust/hard_assign.hpp"
#include "curveclust/kmeans.hpp"
#include "curveclust/metrics.hpp"
#include "curveclust/rng.hpp"

namespace curveclust {

struct MixtureComponent {
    CurveGaussianModel model;
    double weight = 0.0;
    bool active = true;
};

/// Weighted collection of curve models with a hard assignment of points.
struct MixtureState {
    std::vector<MixtureComponent> components;
    std::vector<int> assignment;
    double energy = std::numeric_limits<double>::quiet_NaN();

    std::size_t size() const { return components.size(); }
    int active_count() const
    {
        int c = 0;
        for (const auto& m : components) c += m.active ? 1 : 0;
        return c;
    }
    std::vector<bool> active_mask() const
    {
        std::vector<bool> out;
        for (const auto& m : components) out.push_back(m.active);
        return out;
    }
    /// Rows assigned to component c.
    std::vector<Eigen::Index> members(int c) const
    {
        std::vector<Eigen::Index> out;
        for (std::size_t r = 0; r < assignment.size(); ++r)
            if (assignment[r] == c) out.push_back(static_cast<Eigen::Index>(r));
        return out;
    }
};

struct McecConfig {
    int k = 2;
    int order = 1;
    int segments = kDefaultSegments;
    double eps = 0.0;           ///< stop threshold; <= 0 means 1e-4 |first energy|
    double removal_pct = 5.0;   ///< clusters below this percent of |X| are removed
    std::uint64_t seed = 0;
    int max_lloyd_iters = 100;
    FitConfig fit;

    void validate() const
    {
        if (k < 1) throw std::invalid_argument("McecConfig: k must be >= 1");
        if (order < 0) throw std::invalid_argument("McecConfig: order must be >= 0");
        if (segments < 1) throw std::invalid_argument("McecConfig: segments must be >= 1");
        if (eps < 0.0 || !std::isfinite(eps)) throw std::invalid_argument("McecConfig: eps must be >= 0");
        if (!(removal_pct > 0.0 && removal_pct < 100.0))
            throw std::invalid_argument("McecConfig: removal_pct must lie in (0, 100)");
        if (max_lloyd_iters < 1) throw std::invalid_argument("McecConfig: max_lloyd_iters must be >= 1");
        fit.validate();
    }
};

struct McecResult {
    MixtureState state;
    std::vector<double> trace;      ///< energy after every Lloyd iteration
    std::vector<int> active_trace;  ///< active cluster count after every iteration
    int iters = 0;
    bool converged = false;
    double eps = 0.0;               ///< stop threshold actually used
    std::vector<std::string> warnings;
};

/// cost(r, c) = -ln p_c - ln f_c(x_r) for active c, +inf otherwise.
inline CostMatrix cost_matrix(const MixtureState& state, const PointMatrix& points)
{
    CostMatrix cost(points.rows(), static_cast<Eigen::Index>(state.size()));
    for (std::size_t c = 0; c < state.size(); ++c) {
        const MixtureComponent& m = state.components[c];
        const auto col = static_cast<Eigen::Index>(c);
        if (!m.active || !(m.weight > 0.0)) {
            cost.col(col).setConstant(std::numeric_limits<double>::infinity());
            continue;
        }
        const double lw = std::log(m.weight);
        for (Eigen::Index r = 0; r < points.rows(); ++r)
            cost(r, col) = -lw - m.model.log_density(points.data() + r * points.cols());
    }
    return cost;
}

/// p_i = |X_i| / |X| for active clusters, 0 for inactive ones.
inline void update_weights(MixtureState& state)
{
    const std::vector<long> sizes = cluster_sizes(state.assignment, state.size());
    const double total = static_cast<double>(state.assignment.size());
    for (std::size_t c = 0; c < state.size(); ++c)
        state.components[c].weight = state.components[c].active ? static_cast<double>(sizes[c]) / total : 0.0;
}

/// Moves every point to the active cluster minimizing -ln p_i - ln f_i(x).
inline void assign(MixtureState& state, const PointMatrix& points)
{
    if (state.active_count() == 0) throw std::invalid_argument("assign: no active cluster");
    state.assignment = assign_by_cost(cost_matrix(state, points), state.active_mask());
}

/// Deactivates clusters holding fewer than removal_pct percent of the points
/// (or fewer than `min_points`), reassigns their points and renormalizes the
/// weights. Returns the removed indices.
inline std::vector<int> remove_small_clusters(MixtureState& state, const PointMatrix& points, double removal_pct,
                                              double min_points = 0.0)
{
    const double min_size = std::max(removal_pct / 100.0 * static_cast<double>(points.rows()), min_points);
    std::vector<bool> active = state.active_mask();
    const CostMatrix cost = cost_matrix(state, points);
    std::vector<int> removed = remove_small_by_cost(cost, state.assignment, active, min_size);
    for (std::size_t c = 0; c < state.size(); ++c) state.components[c].active = active[c];
    update_weights(state);
    return removed;
}

/// sum_i p_i (-ln p_i + H(X_i || f_i)), recomputed from scratch.
inline double mixture_energy(const MixtureState& state, const PointMatrix& points)
{
    double total = 0.0;
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        const MixtureComponent& m = state.components[static_cast<std::size_t>(state.assignment[static_cast<std::size_t>(r)])];
        total += -std::log(m.weight) - m.model.log_density(points.data() + r * points.cols());
    }
    return total / static_cast<double>(points.rows());
}

/// Number of free parameters: every active curve's coefficients and sigma plus
/// the active weights minus one.
inline int mixture_param_count(const MixtureState& state)
{
    int params = 0;
    for (const auto& m : state.components)
        if (m.active)
            params += curve_param_count(m.model.ambient_dim(), m.model.curve().intrinsic_dim(), m.model.curve().order());
    return params + state.active_count() - 1;
}

/// ln sum_i p_i f_i(x) over the active components.
inline double mixture_log_density(const MixtureState& state, const double* x)
{
    LogSumExp acc;
    for (const auto& m : state.components)
        if (m.active && m.weight > 0.0) acc.add(std::log(m.weight) + m.model.log_density(x));
    return acc.value();
}

/// Log-likelihood of the points under the mixture. Hard: sum_x ln(p_cl f_cl(x))
/// with the stored assignment. Soft: sum_x ln sum_i p_i f_i(x).
inline double mixture_loglik(const MixtureState& state, const PointMatrix& points, bool soft = false)
{
    double total = 0.0;
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        const double* x = points.data() + r * points.cols();
        if (soft) {
            total += mixture_log_density(state, x);
        } else {
            const auto& m = state.components[static_cast<std::size_t>(state.assignment[static_cast<std::size_t>(r)])];
            total += std::log(m.weight) + m.model.log_density(x);
        }
    }
    return total;
}

inline ModelScore score(const MixtureState& state, const PointMatrix& points, bool soft = false)
{
    return make_score(mixture_loglik(state, points, soft), mixture_param_count(state),
                      static_cast<long>(points.rows()), soft ? "soft" : "hard");
}

/// MCEC Lloyd iteration. The initial partition comes from k-means++ and one
/// Lloyd pass; clusters large enough are fitted from a moment-matching guess. Every
/// iteration then reassigns points, updates p, removes small clusters,
/// refits each active cluster from its previous parameters and records the
/// energy. The loop continues while the energy drops by more than eps.
inline McecResult mcec_run(const PointMatrix& points, const McecConfig& config)
{
    config.validate();
    const Eigen::Index count = points.rows();
    const int n = static_cast<int>(points.cols());
    const int params = curve_param_count(n, 1, config.order);
    if (count < static_cast<Eigen::Index>(config.k) * (params + 1))
        throw std::invalid_argument("mcec_run: need at least k (n(2 order + 1) + 2) points");
    const double min_size = std::max(config.removal_pct / 100.0 * static_cast<double>(count), static_cast<double>(params));

    McecResult res;
    Rng rng(config.seed);
    // k-means++ seeding followed by a single Lloyd pass.
    const std::vector<int> initial = kmeans(points, config.k, rng, 1).labels;
    const std::vector<long> sizes = cluster_sizes(initial, static_cast<std::size_t>(config.k));

    MixtureState& state = res.state;
    std::size_t largest = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c)
        if (sizes[c] > sizes[largest]) largest = c;
    for (int c = 0; c < config.k; ++c) {
        std::vector<Eigen::Index> rows;
        for (std::size_t r = 0; r < initial.size(); ++r)
            if (initial[r] == c) rows.push_back(static_cast<Eigen::Index>(r));
        const bool big = static_cast<double>(rows.size()) >= min_size || static_cast<std::size_t>(c) == largest;
        std::optional<CurveGaussianModel> model;
        if (rows.size() >= 3) {
            const PointMatrix sub = select_rows(points, rows);
            model = init_curve_guess(sub, config.order, config.segments, config.fit.sigma_floor);
            if (big) {
                try {
                    model = fit_component(sub, *model, config.fit).model;
                } catch (const FitError& e) {
                    res.warnings.push_back("initial cluster " + std::to_string(c) + ": " + e.what());
                    if (static_cast<std::size_t>(c) == largest) throw;
                    model.reset();
                }
            }
        }
        if (!model) {
            // Placeholder for a cluster that never becomes active.
            Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
            for (Eigen::Index r : rows) center += points.row(r).transpose();
            if (!rows.empty()) center /= static_cast<double>(rows.size());
            model.emplace(constant_curve(center, 1, config.order), 1.0, config.segments);
        }
        const bool active = big && (rows.size() >= 3);
        state.components.push_back(MixtureComponent{std::move(*model), active ? static_cast<double>(rows.size()) : 0.0, active});
    }
    {
        double total = 0.0;
        for (const auto& m : state.components) total += m.weight;
        for (auto& m : state.components) m.weight /= total;
    }

    res.eps = config.eps;
    double prev = std::numeric_limits<double>::infinity();
    for (res.iters = 0; res.iters < config.max_lloyd_iters;) {
        assign(state, points);
        update_weights(state);
        remove_small_clusters(state, points, config.removal_pct, static_cast<double>(params));
        for (std::size_t c = 0; c < state.size(); ++c) {
            MixtureComponent& m = state.components[c];
            if (!m.active) continue;
            const PointMatrix sub = select_rows(points, state.members(static_cast<int>(c)));
            try {
                m.model = fit_component(sub, m.model, config.fit).model;
            } catch (const FitError& e) {
                if (state.active_count() <= 1) throw;
                res.warnings.push_back("cluster " + std::to_string(c) + " deactivated: " + e.what());
                std::vector<bool> active = state.active_mask();
                active[c] = false;
                const CostMatrix cost = cost_matrix(state, points);
                for (std::size_t r = 0; r < state.assignment.size(); ++r)
                    if (state.assignment[r] == static_cast<int>(c))
                        state.assignment[r] = best_cluster(cost, static_cast<Eigen::Index>(r), active);
                m.active = false;
                update_weights(state);
            }
        }
        const double h = mixture_energy(state, points);
        state.energy = h;
        res.trace.push_back(h);
        res.active_trace.push_back(state.active_count());
        ++res.iters;
        if (res.iters == 1 && config.eps <= 0.0) res.eps = 1e-4 * std::abs(h);
        if (!(h < prev - res.eps)) {
            res.converged = true;
            break;
        }
        prev = h;
    }
    return res;
}

inline McecResult mcec_run(const Dataset& points, const McecConfig& config) { return mcec_run(points.points, config); }

} // namespace curveclust
