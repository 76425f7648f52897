#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace curveclust {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Rows of `points` listed in `indices`, in that order.
inline PointMatrix select_rows(const PointMatrix& points, const std::vector<Eigen::Index>& indices)
{
    PointMatrix out(static_cast<Eigen::Index>(indices.size()), points.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = points.row(indices[r]);
    return out;
}

/// N points in R^n, one per row, with optional integer labels.
struct Dataset {
    PointMatrix points;
    std::optional<std::vector<int>> labels;
    std::string name;

    Eigen::Index size() const { return points.rows(); }
    int dim() const { return static_cast<int>(points.cols()); }
    const double* row(Eigen::Index i) const { return points.data() + i * points.cols(); }

    void validate() const
    {
        if (!points.allFinite()) throw std::invalid_argument("Dataset: coordinates must be finite");
        if (labels && static_cast<Eigen::Index>(labels->size()) != points.rows())
            throw std::invalid_argument("Dataset: label count does not match point count");
    }

    /// Rows listed in `indices`, labels carried along.
    Dataset subset(const std::vector<Eigen::Index>& indices) const
    {
        Dataset out;
        out.name = name;
        out.points = select_rows(points, indices);
        std::vector<int> lab;
        for (Eigen::Index r : indices)
            if (labels) lab.push_back((*labels)[static_cast<std::size_t>(r)]);
        if (labels) out.labels = std::move(lab);
        return out;
    }
};

class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Reads "x1,...,xn[,label]" CSV. Errors carry the 1-based line number.
inline Dataset read_csv(std::istream& in, std::string name = {})
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw CsvError("missing header", 1);
    ++lineno;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // BOM
    const auto header = detail::split_commas(detail::trim(line));
    bool has_label = false;
    std::size_t dim = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string_view h = detail::trim(header[c]);
        if (h == "label" && c + 1 == header.size() && c > 0) {
            has_label = true;
        } else if (h == "x" + std::to_string(c + 1)) {
            ++dim;
        } else {
            throw CsvError("unexpected header column '" + std::string(h) + "'", lineno);
        }
    }
    if (dim == 0) throw CsvError("header declares no coordinate columns", lineno);

    std::vector<double> values;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = detail::trim(line);
        if (row.empty()) continue;
        const auto cells = detail::split_commas(row);
        if (cells.size() != header.size())
            throw CsvError("expected " + std::to_string(header.size()) + " columns, found " +
                               std::to_string(cells.size()),
                           lineno);
        for (std::size_t c = 0; c < dim; ++c) {
            const std::string_view cell = detail::trim(cells[c]);
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw CsvError("malformed number '" + std::string(cell) + "'", lineno);
            if (!std::isfinite(v)) throw CsvError("non-finite value '" + std::string(cell) + "'", lineno);
            values.push_back(v);
        }
        if (has_label) {
            const std::string_view cell = detail::trim(cells[dim]);
            int lab = 0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), lab);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw CsvError("malformed label '" + std::string(cell) + "'", lineno);
            labels.push_back(lab);
        }
    }

    Dataset ds;
    ds.name = std::move(name);
    const auto rows = static_cast<Eigen::Index>(values.size() / dim);
    ds.points = Eigen::Map<PointMatrix>(values.data(), rows, static_cast<Eigen::Index>(dim));
    if (has_label) ds.labels = std::move(labels);
    return ds;
}

inline Dataset read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_csv(in, path);
}

/// 17 significant digits so every double survives a round trip.
inline void write_csv(const Dataset& ds, std::ostream& out)
{
    ds.validate();
    for (int c = 0; c < ds.dim(); ++c) out << (c ? "," : "") << 'x' << (c + 1);
    if (ds.labels) out << ",label";
    out << '\n';
    char buf[40];
    for (Eigen::Index r = 0; r < ds.size(); ++r) {
        for (int c = 0; c < ds.dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.points(r, c));
            out << (c ? "," : "") << buf;
        }
        if (ds.labels) out << ',' << (*ds.labels)[static_cast<std::size_t>(r)];
        out << '\n';
    }
}

inline void write_csv(const Dataset& ds, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(ds, out);
}

} // namespace curveclust
