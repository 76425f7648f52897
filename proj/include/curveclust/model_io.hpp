#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "curveclust/baselines.hpp"
#include "curveclust/curve_density.hpp"
#include "curveclust/fourier_curve.hpp"
#include "curveclust/mcec.hpp"

namespace curveclust {

inline constexpr const char* kModelSchema = "curveclust.model";
inline constexpr int kModelSchemaVersion = 1;

/// Invalid model file; `path()` names the offending field, e.g.
/// "components[0].weight".
class ModelFormatError : public std::runtime_error {
public:
    ModelFormatError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path)
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

inline nlohmann::json curve_model_to_json(const CurveGaussianModel& model)
{
    const FourierCurve& c = model.curve();
    nlohmann::json coeffs = nlohmann::json::array();
    const MultiIndexRange terms = c.terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        nlohmann::json a = nlohmann::json::array();
        for (int i = 0; i < c.ambient_dim(); ++i) a.push_back(c.coeffs()(i, static_cast<Eigen::Index>(t)));
        coeffs.push_back({{"l", terms.at(t)}, {"a", a}});
    }
    return {{"n", c.ambient_dim()}, {"d", c.intrinsic_dim()}, {"order", c.order()}, {"K", model.segments()},
            {"sigma", model.sigma()}, {"coeffs", coeffs}};
}

inline nlohmann::json mixture_to_json(const MixtureState& state)
{
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& m : state.components) {
        nlohmann::json j = curve_model_to_json(m.model);
        j["weight"] = m.weight;
        j["active"] = m.active;
        comps.push_back(std::move(j));
    }
    nlohmann::json out = {{"schema", kModelSchema},
                          {"schema_version", kModelSchemaVersion},
                          {"kind", "curve_mixture"},
                          {"trig_convention", kTrigConvention},
                          {"components", comps}};
    if (std::isfinite(state.energy)) out["energy"] = state.energy;
    return out;
}

inline nlohmann::json mixture_to_json(const GaussianMixture& mix)
{
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& g : mix.components) {
        nlohmann::json j;
        j["active"] = g.active;
        j["weight"] = g.weight;
        if (g.active) {
            j["mean"] = std::vector<double>(g.mean.data(), g.mean.data() + g.mean.size());
            nlohmann::json cov = nlohmann::json::array();
            for (Eigen::Index r = 0; r < g.cov.rows(); ++r) {
                std::vector<double> row(static_cast<std::size_t>(g.cov.cols()));
                for (Eigen::Index c = 0; c < g.cov.cols(); ++c) row[static_cast<std::size_t>(c)] = g.cov(r, c);
                cov.push_back(row);
            }
            j["cov"] = cov;
        }
        comps.push_back(std::move(j));
    }
    return {{"schema", kModelSchema},
            {"schema_version", kModelSchemaVersion},
            {"kind", "gaussian_mixture"},
            {"likelihood", mix.likelihood},
            {"components", comps}};
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object()) throw ModelFormatError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ModelFormatError(path + "." + key, "missing field");
    return *it;
}

inline double number_field(const nlohmann::json& obj, const std::string& key, const std::string& path)
{
    const nlohmann::json& v = field(obj, key, path);
    if (!v.is_number()) throw ModelFormatError(path + "." + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ModelFormatError(path + "." + key, "must be finite");
    return x;
}

inline int int_field(const nlohmann::json& obj, const std::string& key, const std::string& path)
{
    const nlohmann::json& v = field(obj, key, path);
    if (!v.is_number_integer()) throw ModelFormatError(path + "." + key, "expected an integer");
    return v.get<int>();
}

} // namespace detail

inline CurveGaussianModel curve_model_from_json(const nlohmann::json& j, const std::string& path)
{
    const int n = detail::int_field(j, "n", path);
    const int d = detail::int_field(j, "d", path);
    const int order = detail::int_field(j, "order", path);
    const int segments = detail::int_field(j, "K", path);
    const double sigma = detail::number_field(j, "sigma", path);
    if (n < 1) throw ModelFormatError(path + ".n", "must be >= 1");
    if (d < 1) throw ModelFormatError(path + ".d", "must be >= 1");
    if (order < 0) throw ModelFormatError(path + ".order", "must be >= 0");
    if (segments < 1) throw ModelFormatError(path + ".K", "must be >= 1");
    if (sigma < kSigmaFloor) throw ModelFormatError(path + ".sigma", "must be >= 1e-6");

    FourierCurve curve(n, d, order);
    const MultiIndexRange terms = curve.terms();
    const nlohmann::json& coeffs = detail::field(j, "coeffs", path);
    if (!coeffs.is_array() || coeffs.size() != terms.size())
        throw ModelFormatError(path + ".coeffs", "expected an array of " + std::to_string(terms.size()) + " terms");
    std::vector<bool> seen(terms.size(), false);
    for (std::size_t t = 0; t < coeffs.size(); ++t) {
        const std::string tp = path + ".coeffs[" + std::to_string(t) + "]";
        const nlohmann::json& l = detail::field(coeffs[t], "l", tp);
        if (!l.is_array() || l.size() != static_cast<std::size_t>(d))
            throw ModelFormatError(tp + ".l", "expected " + std::to_string(d) + " integers");
        MultiIndex idx;
        for (const auto& v : l) {
            if (!v.is_number_integer()) throw ModelFormatError(tp + ".l", "expected integers");
            idx.push_back(v.get<int>());
        }
        if (!terms.contains(idx)) throw ModelFormatError(tp + ".l", "index outside [-order, order]");
        const std::size_t rank = terms.rank(idx);
        if (seen[rank]) throw ModelFormatError(tp + ".l", "duplicate index");
        seen[rank] = true;
        const nlohmann::json& a = detail::field(coeffs[t], "a", tp);
        if (!a.is_array() || a.size() != static_cast<std::size_t>(n))
            throw ModelFormatError(tp + ".a", "expected " + std::to_string(n) + " numbers");
        for (int i = 0; i < n; ++i) {
            const auto& v = a[static_cast<std::size_t>(i)];
            if (!v.is_number() || !std::isfinite(v.get<double>()))
                throw ModelFormatError(tp + ".a[" + std::to_string(i) + "]", "expected a finite number");
            curve.set_coeff(i, idx, v.get<double>());
        }
    }
    return CurveGaussianModel(std::move(curve), sigma, segments);
}

/// Parses and validates a curve-mixture document.
inline MixtureState mixture_from_json(const nlohmann::json& doc)
{
    const nlohmann::json& schema = detail::field(doc, "schema", "$");
    if (schema != kModelSchema) throw ModelFormatError("$.schema", "expected \"" + std::string(kModelSchema) + "\"");
    if (detail::int_field(doc, "schema_version", "$") != kModelSchemaVersion)
        throw ModelFormatError("$.schema_version", "unsupported version");
    const nlohmann::json& kind = detail::field(doc, "kind", "$");
    if (kind != "curve_mixture") throw ModelFormatError("$.kind", "expected \"curve_mixture\"");
    const nlohmann::json& trig = detail::field(doc, "trig_convention", "$");
    if (trig != kTrigConvention)
        throw ModelFormatError("$.trig_convention", "expected \"" + std::string(kTrigConvention) + "\"");
    const nlohmann::json& comps = detail::field(doc, "components", "$");
    if (!comps.is_array() || comps.empty()) throw ModelFormatError("$.components", "expected a nonempty array");

    MixtureState state;
    double total = 0.0;
    int dim = -1;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const std::string path = "$.components[" + std::to_string(c) + "]";
        CurveGaussianModel model = curve_model_from_json(comps[c], path);
        const double weight = detail::number_field(comps[c], "weight", path);
        const nlohmann::json& active = detail::field(comps[c], "active", path);
        if (!active.is_boolean()) throw ModelFormatError(path + ".active", "expected a boolean");
        if (weight < 0.0 || weight > 1.0) throw ModelFormatError(path + ".weight", "must lie in [0, 1]");
        if (!active.get<bool>() && weight != 0.0) throw ModelFormatError(path + ".weight", "inactive component must have weight 0");
        if (dim >= 0 && model.ambient_dim() != dim) throw ModelFormatError(path + ".n", "differs between components");
        dim = model.ambient_dim();
        if (active.get<bool>()) total += weight;
        state.components.push_back(MixtureComponent{std::move(model), weight, active.get<bool>()});
    }
    if (state.active_count() == 0) throw ModelFormatError("$.components", "no active component");
    if (std::abs(total - 1.0) > 1e-9) throw ModelFormatError("$.components", "active weights must sum to 1");
    if (doc.contains("energy")) state.energy = detail::number_field(doc, "energy", "$");
    return state;
}

inline void save_model(const MixtureState& state, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << mixture_to_json(state).dump(2) << '\n';
}

inline MixtureState load_model(std::istream& in)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelFormatError("$", std::string("invalid JSON: ") + e.what());
    }
    return mixture_from_json(doc);
}

inline MixtureState load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return load_model(in);
}

} // namespace curveclust
