#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace curveclust {

/// Maximized log-likelihood with its information criteria.
struct ModelScore {
    double mle = 0.0;
    int n_params = 0;
    long n_points = 0;
    double bic = 0.0;
    double aic = 0.0;
    std::string likelihood = "hard"; ///< "hard" (assignment-conditional) or "soft" (mixture)
};

inline ModelScore make_score(double mle, int n_params, long n_points, std::string likelihood = "hard")
{
    if (n_params < 0) throw std::invalid_argument("make_score: n_params must be >= 0");
    if (n_points < 1) throw std::invalid_argument("make_score: n_points must be >= 1");
    ModelScore s;
    s.mle = mle;
    s.n_params = n_params;
    s.n_points = n_points;
    s.aic = -2.0 * mle + 2.0 * n_params;
    s.bic = -2.0 * mle + n_params * std::log(static_cast<double>(n_points));
    s.likelihood = std::move(likelihood);
    return s;
}

namespace detail {

struct PairCounts {
    double total = 0.0;   ///< all pairs
    double both = 0.0;    ///< together in a and in b
    double in_a = 0.0;    ///< together in a
    double in_b = 0.0;    ///< together in b
};

inline double pairs_of(std::int64_t m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); }

/// Pair counts from the contingency table of the two labelings.
inline PairCounts pair_counts(const std::vector<int>& a, const std::vector<int>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("labelings have different lengths");
    if (a.size() < 2) throw std::invalid_argument("labelings need at least 2 entries");
    std::map<std::pair<int, int>, std::int64_t> cells;
    std::map<int, std::int64_t> rows;
    std::map<int, std::int64_t> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++cells[{a[i], b[i]}];
        ++rows[a[i]];
        ++cols[b[i]];
    }
    PairCounts pc;
    pc.total = pairs_of(static_cast<std::int64_t>(a.size()));
    for (const auto& [key, m] : cells) pc.both += pairs_of(m);
    for (const auto& [key, m] : rows) pc.in_a += pairs_of(m);
    for (const auto& [key, m] : cols) pc.in_b += pairs_of(m);
    return pc;
}

} // namespace detail

/// Fraction of point pairs on which the two labelings agree (together in
/// both or apart in both).
inline double rand_index(const std::vector<int>& a, const std::vector<int>& b)
{
    const detail::PairCounts pc = detail::pair_counts(a, b);
    return (pc.total + 2.0 * pc.both - pc.in_a - pc.in_b) / pc.total;
}

/// Pairs together in both / pairs together in at least one. Returns 1 when
/// no pair is together in either labeling.
inline double jaccard_index(const std::vector<int>& a, const std::vector<int>& b)
{
    const detail::PairCounts pc = detail::pair_counts(a, b);
    const double either = pc.in_a + pc.in_b - pc.both;
    if (either == 0.0) return 1.0;
    return pc.both / either;
}

} // namespace curveclust
