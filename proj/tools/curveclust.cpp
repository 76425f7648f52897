// curveclust command-line front end.
//
//   curveclust generate --preset rabbit --sigma 0.05 --count 500 --seed 1 --out r.csv
//   curveclust cluster  --in r.csv --method mcec --k 4 --starts 16 --out-model m.json --out-report rep.json
//   curveclust density  --model m.json --grid 200x200 --out d.svg
//   curveclust bench    --suite order1 --seed 0 --out-dir bench/
//
// Exit codes: 0 success, 1 run error, 2 usage error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curveclust/curveclust.hpp"

namespace cc = curveclust;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json score_json(const cc::ModelScore& s)
{
    return {{"mle", s.mle},
            {"n_params", s.n_params},
            {"n_points", s.n_points},
            {"bic", s.bic},
            {"aic", s.aic},
            {"likelihood", s.likelihood}};
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

// ---- generate ------------------------------------------------------------

struct GenerateArgs {
    std::string preset;
    std::string curve_file;
    std::optional<double> sigma;
    long count = 500;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_generate(const GenerateArgs& a)
{
    if (a.preset.empty() == a.curve_file.empty()) throw UsageError("give exactly one of --preset and --curve-file");
    if (a.count < 1) throw UsageError("--count must be >= 1");
    if (a.sigma && !(*a.sigma >= 0.0)) throw UsageError("--sigma must be >= 0");

    std::vector<cc::CurveSpec> specs;
    std::string name;
    if (!a.preset.empty()) {
        std::vector<cc::CurvePreset> curves;
        try {
            curves = cc::preset_curves(a.preset);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string(e.what()) + " (known: rabbit, circle, ellipse, two-circles, two-ellipses)");
        }
        for (auto& p : curves) specs.push_back({p.curve, a.sigma.value_or(p.sigma), a.count});
        name = a.preset;
    } else {
        const cc::MixtureState state = cc::load_model(a.curve_file);
        for (const auto& m : state.components)
            if (m.active) specs.push_back({m.model.curve(), a.sigma.value_or(m.model.sigma()), a.count});
        name = a.curve_file;
    }
    const cc::Dataset ds = cc::generate(specs, a.seed, name);
    if (a.out.empty()) {
        cc::write_csv(ds, std::cout);
    } else {
        cc::write_csv(ds, a.out);
        std::cout << json{{"out", a.out}, {"points", ds.size()}, {"dim", ds.dim()}, {"curves", specs.size()},
                          {"seed", a.seed}}
                         .dump()
                  << '\n';
    }
    return 0;
}

// ---- cluster -------------------------------------------------------------

struct ClusterArgs {
    std::string in;
    std::string method = "mcec";
    int k = 2;
    int order = 1;
    int segments = cc::kDefaultSegments;
    int starts = 16;
    std::uint64_t seed = 0;
    double removal_pct = 5.0;
    double eps = 0.0;
    int max_iters = 100;
    int threads = 1;
    bool soft = false;
    bool timings = false;
    std::string out_model;
    std::string out_report;
};

int cmd_cluster(const ClusterArgs& a)
{
    cc::MultiStartConfig cfg;
    try {
        cfg.method = cc::parse_method(a.method);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.k < 1) throw UsageError("--k must be >= 1");
    if (a.order < 0) throw UsageError("--order must be >= 0");
    if (a.segments < 1) throw UsageError("--segments must be >= 1");
    if (a.starts < 1) throw UsageError("--starts must be >= 1");
    if (!(a.removal_pct > 0.0 && a.removal_pct < 100.0)) throw UsageError("--removal-pct must lie in (0, 100)");
    if (a.eps < 0.0) throw UsageError("--eps must be >= 0");
    cfg.k = a.k;
    cfg.order = a.order;
    cfg.segments = a.segments;
    cfg.starts = a.starts;
    cfg.seed = a.seed;
    cfg.removal_pct = a.removal_pct;
    cfg.eps = a.eps;
    cfg.max_lloyd_iters = a.max_iters;
    cfg.threads = cc::resolve_threads(a.threads);

    const cc::Dataset data = cc::read_csv(a.in);
    data.validate();
    const cc::MultiStartResult res = cc::run_multistart(data, cfg);

    json starts = json::array();
    for (const auto& s : res.starts) {
        json j = {{"start", s.index}, {"seed", s.seed}, {"ok", s.ok}};
        if (!s.ok) {
            j["error"] = s.error;
            std::cerr << "start " << s.index << " failed: " << s.error << '\n';
        } else {
            cc::ModelScore sc = s.score;
            if (a.soft && s.curves) sc = cc::score(*s.curves, data.points, true);
            j["criterion"] = s.criterion;
            j["score"] = score_json(sc);
            j["rand"] = s.rand ? json(*s.rand) : json(nullptr);
            j["jaccard"] = s.jaccard ? json(*s.jaccard) : json(nullptr);
            j["iterations"] = s.iters;
            j["active_clusters"] = s.active;
            j["trace"] = s.trace;
            if (cfg.method == cc::Method::mcec) j["eps_used"] = s.eps;
            j["warnings"] = s.warnings;
            for (const auto& w : s.warnings) std::cerr << "start " << s.index << ": " << w << '\n';
        }
        if (a.timings) j["seconds"] = s.seconds;
        starts.push_back(std::move(j));
    }

    const cc::FitConfig& fit = cfg.fit;
    json report = {
        {"command", "cluster"},
        {"config",
         {{"in", a.in},
          {"method", a.method},
          {"k", cfg.k},
          {"order", cfg.order},
          {"segments", cfg.segments},
          {"starts", cfg.starts},
          {"seed", cfg.seed},
          {"removal_pct", cfg.removal_pct},
          {"eps", cfg.eps},
          {"eps_rule", cfg.eps > 0.0 ? "fixed" : "1e-4 * |first energy|"},
          {"max_lloyd_iters", cfg.max_lloyd_iters},
          {"gmm_max_iters", cfg.gmm_max_iters},
          {"threads", cfg.threads},
          {"likelihood", a.soft ? "soft" : (cfg.method == cc::Method::gmm ? "soft" : "hard")},
          {"fit",
           {{"max_iters", fit.max_iters},
            {"grad_tol", fit.grad_tol},
            {"wolfe_c1", fit.wolfe_c1},
            {"wolfe_c2", fit.wolfe_c2},
            {"sigma_floor", fit.sigma_floor}}},
          {"trig_convention", cc::kTrigConvention}}},
        {"data", {{"points", data.size()}, {"dim", data.dim()}, {"labels", data.labels.has_value()}}},
        {"selection", res.criterion},
        {"best_start", res.best >= 0 ? json(res.best) : json(nullptr)},
        {"starts", starts}};
    if (res.best >= 0) report["best"] = starts[static_cast<std::size_t>(res.best)];

    if (!a.out_report.empty()) write_text(a.out_report, report.dump(2) + "\n");
    if (res.best < 0) {
        std::cerr << "all starts failed\n";
        return 1;
    }
    const cc::StartOutcome& best = res.best_start();
    if (!a.out_model.empty()) {
        const json model = best.curves ? cc::mixture_to_json(*best.curves) : cc::mixture_to_json(*best.gaussians);
        write_text(a.out_model, model.dump(2) + "\n");
    }
    json summary = {{"best_start", res.best}, {"criterion", best.criterion}, {"active_clusters", best.active}};
    summary["score"] = report["best"]["score"];
    if (best.rand) summary["rand"] = *best.rand;
    if (best.jaccard) summary["jaccard"] = *best.jaccard;
    std::cout << summary.dump() << '\n';
    return 0;
}

// ---- density -------------------------------------------------------------

struct DensityArgs {
    std::string model;
    std::string grid = "200x200";
    std::vector<double> bbox;
    std::string out;
    std::string format;
    std::string points;
};

cc::BoundingBox auto_bbox(const cc::MixtureState& state)
{
    cc::BoundingBox box{1e300, -1e300, 1e300, -1e300};
    for (const auto& m : state.components) {
        if (!m.active) continue;
        const double pad = 6.0 * m.model.sigma();
        for (int t = 0; t < 1024; ++t) {
            const Eigen::VectorXd p = m.model.curve().eval(t / 1024.0);
            box.xmin = std::min(box.xmin, p(0) - pad);
            box.xmax = std::max(box.xmax, p(0) + pad);
            box.ymin = std::min(box.ymin, p(1) - pad);
            box.ymax = std::max(box.ymax, p(1) + pad);
        }
    }
    return box;
}

int cmd_density(const DensityArgs& a)
{
    int width = 0;
    int height = 0;
    {
        char x = 0;
        std::istringstream in(a.grid);
        if (!(in >> width >> x >> height) || x != 'x' || width < 2 || height < 2 || !in.eof())
            throw UsageError("--grid must look like WxH with W, H >= 2");
    }
    std::string format = a.format;
    if (format.empty()) {
        const std::string ext = std::filesystem::path(a.out).extension().string();
        format = ext == ".csv" ? "csv" : "svg";
    }
    if (format != "svg" && format != "csv") throw UsageError("--format must be svg or csv");

    const cc::MixtureState state = cc::load_model(a.model);
    if (state.components.front().model.ambient_dim() != 2) throw UsageError("density plots need a 2D model");
    cc::BoundingBox box;
    if (a.bbox.empty()) {
        box = auto_bbox(state);
    } else {
        if (a.bbox.size() != 4) throw UsageError("--bbox takes xmin,xmax,ymin,ymax");
        box = {a.bbox[0], a.bbox[1], a.bbox[2], a.bbox[3]};
        try {
            box.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--bbox: ") + e.what());
        }
    }
    const cc::DensityGrid grid = cc::density_grid(
        [&](double x, double y) {
            const double p[2] = {x, y};
            return cc::mixture_log_density(state, p);
        },
        box, width, height);

    std::ostringstream body;
    if (format == "csv") {
        cc::write_grid_csv(grid, body);
    } else {
        std::optional<cc::Dataset> pts;
        if (!a.points.empty()) pts = cc::read_csv(a.points);
        cc::SvgPoints overlay;
        if (pts) {
            overlay.points = &pts->points;
            if (pts->labels) overlay.labels = &*pts->labels;
        }
        cc::write_density_svg(grid, body, overlay);
    }
    if (a.out.empty()) {
        std::cout << body.str();
    } else {
        write_text(a.out, body.str());
        std::cout << json{{"out", a.out}, {"format", format}, {"grid", {width, height}},
                          {"bbox", {box.xmin, box.xmax, box.ymin, box.ymax}}, {"mass", grid.mass()}}
                         .dump()
                  << '\n';
    }
    return 0;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
    std::string suite = "order1";
    std::uint64_t seed = 0;
    int starts = 8;
    int threads = 1;
    std::string out_dir;
};

int cmd_bench(const BenchArgs& a)
{
    if (a.starts < 1) throw UsageError("--starts must be >= 1");
    cc::BenchConfig cfg;
    cfg.suite = a.suite;
    cfg.seed = a.seed;
    cfg.starts = a.starts;
    cfg.threads = cc::resolve_threads(a.threads);
    std::vector<cc::BenchRow> rows;
    try {
        cc::suite(a.suite, a.seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(e.what()) + " (known: order1, order2, order3, order4)");
    }
    rows = cc::run_bench(cfg);

    std::ostringstream table;
    cc::write_bench_markdown(rows, table);
    std::cout << table.str();
    if (!a.out_dir.empty()) {
        std::filesystem::create_directories(a.out_dir);
        json j = json::array();
        for (const auto& r : rows) {
            j.push_back({{"case", r.case_name},
                         {"curves", r.curves},
                         {"method", r.method},
                         {"k", r.k},
                         {"active_clusters", r.active},
                         {"score", score_json(r.score)},
                         {"rand", r.rand ? json(*r.rand) : json(nullptr)},
                         {"jaccard", r.jaccard ? json(*r.jaccard) : json(nullptr)}});
        }
        const json doc = {{"command", "bench"},
                          {"config", {{"suite", cfg.suite}, {"seed", cfg.seed}, {"starts", cfg.starts},
                                      {"threads", cfg.threads}, {"points_per_curve", 300}, {"sigma", 0.05},
                                      {"baseline_multiplier", cc::baseline_multiplier(cc::suite(a.suite, a.seed).front().order)}}},
                          {"rows", j}};
        const std::filesystem::path dir(a.out_dir);
        write_text((dir / ("bench_" + a.suite + ".json")).string(), doc.dump(2) + "\n");
        write_text((dir / ("bench_" + a.suite + ".md")).string(), table.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gaussian distributions on closed curves and MCEC clustering"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Sample a labelled dataset from preset or saved curves");
    auto* g_preset = g->add_option("--preset", gen.preset, "rabbit | circle | ellipse | two-circles | two-ellipses");
    auto* g_file = g->add_option("--curve-file", gen.curve_file, "Model JSON whose active curves are sampled");
    g_preset->excludes(g_file);
    g->add_option("--sigma", gen.sigma, "Noise level (default: the curve's own sigma)");
    g->add_option("--count", gen.count, "Points per curve")->capture_default_str();
    g->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output CSV (stdout if omitted)");

    ClusterArgs cl;
    auto* c = app.add_subcommand("cluster", "Multi-start MCEC, CEC or GMM clustering");
    c->add_option("--in", cl.in, "Input CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--method", cl.method, "mcec | cec | gmm")->capture_default_str();
    c->add_option("--k", cl.k, "Initial number of clusters")->capture_default_str();
    c->add_option("--order", cl.order, "Fourier order of the curves (mcec)")->capture_default_str();
    c->add_option("--segments", cl.segments, "Segments K of the chain approximation")->capture_default_str();
    c->add_option("--starts", cl.starts, "Number of seeded starts")->capture_default_str();
    c->add_option("--seed", cl.seed, "Master seed")->capture_default_str();
    c->add_option("--removal-pct", cl.removal_pct, "Cluster removal threshold in percent")->capture_default_str();
    c->add_option("--eps", cl.eps, "Energy stop threshold (0: 1e-4 * |first energy|)")->capture_default_str();
    c->add_option("--max-iters", cl.max_iters, "Maximum Lloyd iterations")->capture_default_str();
    c->add_option("--threads", cl.threads, "Worker threads (0: one per core)")->capture_default_str();
    c->add_flag("--soft-mle", cl.soft, "Report the mixture likelihood instead of the assignment likelihood");
    c->add_flag("--timings", cl.timings, "Include wall-clock times in the report");
    c->add_option("--out-model", cl.out_model, "Best model as JSON");
    c->add_option("--out-report", cl.out_report, "Run report as JSON");

    DensityArgs de;
    auto* d = app.add_subcommand("density", "Evaluate a model's density on a grid");
    d->add_option("--model", de.model, "Model JSON")->required()->check(CLI::ExistingFile);
    d->add_option("--grid", de.grid, "Grid size WxH")->capture_default_str();
    d->add_option("--bbox", de.bbox, "xmin,xmax,ymin,ymax (default: curves padded by 6 sigma)")->delimiter(',');
    d->add_option("--out", de.out, "Output file; .csv selects CSV, anything else SVG");
    d->add_option("--format", de.format, "svg | csv (overrides the extension)");
    d->add_option("--points", de.points, "CSV of points drawn over the SVG, coloured by label")
        ->check(CLI::ExistingFile);

    BenchArgs be;
    auto* b = app.add_subcommand("bench", "Synthetic benchmark suites");
    b->add_option("--suite", be.suite, "order1 | order2 | order3 | order4")->capture_default_str();
    b->add_option("--seed", be.seed, "Seed")->capture_default_str();
    b->add_option("--starts", be.starts, "Starts per method and case")->capture_default_str();
    b->add_option("--threads", be.threads, "Worker threads (0: one per core)")->capture_default_str();
    b->add_option("--out-dir", be.out_dir, "Directory for bench_<suite>.md and .json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (g->parsed()) return cmd_generate(gen);
        if (c->parsed()) return cmd_cluster(cl);
        if (d->parsed()) return cmd_density(de);
        if (b->parsed()) return cmd_bench(be);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
