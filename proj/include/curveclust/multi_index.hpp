#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace curveclust {

/// Integer tuple of length d. Used both for Fourier term indices l in
/// {-k..k}^d and for segment indices j in {0..K-1}^d.
using MultiIndex = std::vector<int>;

inline std::size_t int_pow(std::size_t base, int exponent)
{
    std::size_t result = 1;
    for (int e = 0; e < exponent; ++e) result *= base;
    return result;
}

/// The box {lo..hi}^dim enumerated lexicographically with the first
/// coordinate most significant, i.e. rank(l) = sum_m (l_m - lo) * w^(dim-1-m)
/// with w = hi - lo + 1. This ordering fixes the column layout of curve
/// coefficients and the order of segment lists everywhere in the library.
class MultiIndexRange {
public:
    MultiIndexRange(int dim, int lo, int hi) : dim_(dim), lo_(lo), hi_(hi)
    {
        if (dim < 1) throw std::invalid_argument("MultiIndexRange: dim must be >= 1");
        if (hi < lo) throw std::invalid_argument("MultiIndexRange: empty range");
    }

    int dim() const { return dim_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    std::size_t width() const { return static_cast<std::size_t>(hi_ - lo_ + 1); }
    std::size_t size() const { return int_pow(width(), dim_); }

    MultiIndex at(std::size_t rank) const
    {
        MultiIndex idx(static_cast<std::size_t>(dim_));
        const std::size_t w = width();
        for (int m = dim_ - 1; m >= 0; --m) {
            idx[static_cast<std::size_t>(m)] = lo_ + static_cast<int>(rank % w);
            rank /= w;
        }
        return idx;
    }

    std::size_t rank(const MultiIndex& idx) const
    {
        if (static_cast<int>(idx.size()) != dim_)
            throw std::invalid_argument("MultiIndexRange::rank: dimension mismatch");
        std::size_t r = 0;
        for (int v : idx) {
            if (v < lo_ || v > hi_)
                throw std::out_of_range("MultiIndexRange::rank: entry out of range");
            r = r * width() + static_cast<std::size_t>(v - lo_);
        }
        return r;
    }

    bool contains(const MultiIndex& idx) const
    {
        if (static_cast<int>(idx.size()) != dim_) return false;
        for (int v : idx)
            if (v < lo_ || v > hi_) return false;
        return true;
    }

    std::vector<MultiIndex> all() const
    {
        std::vector<MultiIndex> out;
        out.reserve(size());
        for (std::size_t r = 0; r < size(); ++r) out.push_back(at(r));
        return out;
    }

private:
    int dim_;
    int lo_;
    int hi_;
};

/// Fourier term indices {-order..order}^dim.
inline MultiIndexRange term_range(int dim, int order) { return {dim, -order, order}; }

/// Segment indices {0..segments-1}^dim.
inline MultiIndexRange segment_range(int dim, int segments) { return {dim, 0, segments - 1}; }

} // namespace curveclust
