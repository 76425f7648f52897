#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curveclust/dataset.hpp"

namespace curveclust {

struct BoundingBox {
    double xmin = 0.0;
    double xmax = 1.0;
    double ymin = 0.0;
    double ymax = 1.0;

    void validate() const
    {
        if (!(std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) && std::isfinite(ymax)))
            throw std::invalid_argument("bounding box must be finite");
        if (!(xmax > xmin) || !(ymax > ymin)) throw std::invalid_argument("degenerate bounding box");
    }
};

/// Log-density sampled at the cell centres of a W x H grid. Row 0 is the top
/// row (largest y), matching image and SVG orientation.
struct DensityGrid {
    BoundingBox box;
    int width = 0;
    int height = 0;
    std::vector<double> log_density; ///< row-major, height x width

    double dx() const { return (box.xmax - box.xmin) / width; }
    double dy() const { return (box.ymax - box.ymin) / height; }
    double x(int col) const { return box.xmin + (col + 0.5) * dx(); }
    double y(int row) const { return box.ymax - (row + 0.5) * dy(); }
    double at(int row, int col) const { return log_density[static_cast<std::size_t>(row) * width + col]; }

    /// Sum of density times cell area.
    double mass() const
    {
        double total = 0.0;
        for (double v : log_density) total += std::exp(v);
        return total * dx() * dy();
    }
};

/// Evaluates `log_density(x, y)` on the grid.
inline DensityGrid density_grid(const std::function<double(double, double)>& log_density, const BoundingBox& box,
                                int width, int height)
{
    box.validate();
    if (width < 2 || height < 2) throw std::invalid_argument("density grid needs at least 2 x 2 cells");
    DensityGrid g;
    g.box = box;
    g.width = width;
    g.height = height;
    g.log_density.resize(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            g.log_density[static_cast<std::size_t>(r) * width + c] = log_density(g.x(c), g.y(r));
    return g;
}

/// "x,y,log_density" with one line per cell.
inline void write_grid_csv(const DensityGrid& g, std::ostream& out)
{
    out << "x,y,log_density\n";
    char buf[96];
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.x(c), g.y(r), g.at(r, c));
            out << buf;
        }
}

/// Density thresholds splitting [min, max] of the (linear) density into ten
/// equal bands: nine interior levels.
inline std::vector<double> decile_levels(const DensityGrid& g)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : g.log_density) {
        lo = std::min(lo, std::exp(v));
        hi = std::max(hi, std::exp(v));
    }
    std::vector<double> levels;
    for (int k = 1; k < 10; ++k) levels.push_back(lo + (hi - lo) * k / 10.0);
    return levels;
}

/// Line segments of the iso-contour density == level through the grid of
/// cell centres (marching squares, saddles split by the cell-centre mean).
/// Coordinates are in grid units: column c centre at c + 0.5, row r at r + 0.5.
inline std::vector<std::array<double, 4>> iso_segments(const DensityGrid& g, double level)
{
    std::vector<std::array<double, 4>> segs;
    auto val = [&](int r, int c) { return std::exp(g.at(r, c)) - level; };
    auto lerp = [](double a, double b) { return a / (a - b); };
    for (int r = 0; r + 1 < g.height; ++r) {
        for (int c = 0; c + 1 < g.width; ++c) {
            // Corners: 0 top-left, 1 top-right, 2 bottom-right, 3 bottom-left.
            const double v[4] = {val(r, c), val(r, c + 1), val(r + 1, c + 1), val(r + 1, c)};
            const double px[4] = {c + 0.5, c + 1.5, c + 1.5, c + 0.5};
            const double py[4] = {r + 0.5, r + 0.5, r + 1.5, r + 1.5};
            std::vector<std::array<double, 2>> hits;
            for (int e = 0; e < 4; ++e) {
                const int a = e;
                const int b = (e + 1) % 4;
                if ((v[a] >= 0.0) != (v[b] >= 0.0)) {
                    const double t = lerp(v[a], v[b]);
                    hits.push_back({px[a] + t * (px[b] - px[a]), py[a] + t * (py[b] - py[a])});
                }
            }
            if (hits.size() == 2) {
                segs.push_back({hits[0][0], hits[0][1], hits[1][0], hits[1][1]});
            } else if (hits.size() == 4) {
                const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                // Edge hits are ordered top, right, bottom, left.
                if ((centre >= 0.0) == (v[0] >= 0.0)) {
                    segs.push_back({hits[0][0], hits[0][1], hits[1][0], hits[1][1]});
                    segs.push_back({hits[2][0], hits[2][1], hits[3][0], hits[3][1]});
                } else {
                    segs.push_back({hits[0][0], hits[0][1], hits[3][0], hits[3][1]});
                    segs.push_back({hits[1][0], hits[1][1], hits[2][0], hits[2][1]});
                }
            }
        }
    }
    return segs;
}

struct SvgPoints {
    const PointMatrix* points = nullptr;
    const std::vector<int>* labels = nullptr;
};

/// Filled decile bands (cells merged into row runs, one path per band), iso
/// lines at the nine interior levels, and optionally the data points coloured
/// by label. The viewBox is in grid units.
inline void write_density_svg(const DensityGrid& g, std::ostream& out, const SvgPoints& overlay = {})
{
    static const char* band_colors[10] = {"#440154", "#482878", "#3e4989", "#31688e", "#26828e",
                                          "#1f9e89", "#35b779", "#6ece58", "#b5de2b", "#fde725"};
    static const char* label_colors[8] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                                          "#ff7f00", "#a65628", "#f781bf", "#999999"};
    const std::vector<double> levels = decile_levels(g);
    auto band_of = [&](double log_d) {
        const double d = std::exp(log_d);
        return static_cast<int>(std::upper_bound(levels.begin(), levels.end(), d) - levels.begin());
    };
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %d %d\" width=\"%d\" height=\"%d\">\n",
                  g.width, g.height, 600, std::max(1, 600 * g.height / g.width));
    out << buf;
    std::snprintf(buf, sizeof buf, "<desc>bbox %.10g %.10g %.10g %.10g</desc>\n", g.box.xmin, g.box.xmax, g.box.ymin,
                  g.box.ymax);
    out << buf;
    for (int band = 0; band < 10; ++band) {
        std::string d;
        for (int r = 0; r < g.height; ++r) {
            int c = 0;
            while (c < g.width) {
                if (band_of(g.at(r, c)) != band) {
                    ++c;
                    continue;
                }
                int end = c;
                while (end < g.width && band_of(g.at(r, end)) == band) ++end;
                std::snprintf(buf, sizeof buf, "M%d %dh%dv1h-%dz", c, r, end - c, end - c);
                d += buf;
                c = end;
            }
        }
        if (d.empty()) continue;
        out << "<path class=\"band\" data-band=\"" << band << "\" fill=\"" << band_colors[band] << "\" d=\"" << d
            << "\"/>\n";
    }
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto segs = iso_segments(g, levels[k]);
        if (segs.empty()) continue;
        std::snprintf(buf, sizeof buf, "<path class=\"iso\" data-level=\"%.10g\" fill=\"none\" stroke=\"#ffffff\" "
                                       "stroke-width=\"0.25\" d=\"", levels[k]);
        out << buf;
        for (const auto& s : segs) {
            std::snprintf(buf, sizeof buf, "M%.4f %.4fL%.4f %.4f", s[0], s[1], s[2], s[3]);
            out << buf;
        }
        out << "\"/>\n";
    }
    if (overlay.points) {
        const PointMatrix& p = *overlay.points;
        for (Eigen::Index r = 0; r < p.rows(); ++r) {
            const double cx = (p(r, 0) - g.box.xmin) / g.dx();
            const double cy = (g.box.ymax - p(r, 1)) / g.dy();
            const int lab = overlay.labels ? (*overlay.labels)[static_cast<std::size_t>(r)] : 0;
            std::snprintf(buf, sizeof buf, "<circle class=\"point\" cx=\"%.3f\" cy=\"%.3f\" r=\"0.6\" fill=\"%s\"/>\n",
                          cx, cy, label_colors[((lab % 8) + 8) % 8]);
            out << buf;
        }
    }
    out << "</svg>\n";
}

} // namespace curveclust
