// Acceptance checks AC1..AC10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace cc = curveclust;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome ac1_closed_form()
{
    const auto t0 = std::chrono::steady_clock::now();
    cc::Rng rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + trial % 2;
        const int n = 2 + (trial / 2) % 2;
        const int k = 1 + (trial / 4) % 3;
        const int K = std::vector<int>{1, 4, 16}[static_cast<std::size_t>((trial / 12) % 3)];
        const cc::FourierCurve c = cc::testing::random_curve(n, d, k, rng);
        const double sigma = 0.05 + 0.3 * rng.uniform();
        const auto segs = cc::all_segments(c, sigma, K);
        const cc::MultiIndexRange range = cc::segment_range(d, K);
        // Every segment for d = 1; a sample of 8 for the torus at K = 16.
        const std::size_t stride = range.size() > 16 ? range.size() / 8 : 1;
        for (std::size_t s = 0; s < range.size(); s += stride) {
            const auto [mean, cov] = cc::segment_stats_oracle(c, sigma, range.at(s), K);
            worst = std::max(worst, (segs[s].mean - mean).cwiseAbs().maxCoeff());
            worst = std::max(worst, (segs[s].cov - cov).cwiseAbs().maxCoeff());
        }
    }
    const double t = seconds_since(t0);
    return {worst < 1e-10 && t < 10.0, fmt("max error %.3g over 100 curves, %.2f s", worst, t)};
}

Outcome ac2_gradient()
{
    const auto t0 = std::chrono::steady_clock::now();
    cc::Rng rng(202);
    int bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 2;
        const int k = 1 + trial % 2;
        const int K = trial % 4 < 2 ? 1 : 4;
        const cc::FourierCurve truth = cc::testing::random_curve(n, 1, k, rng);
        cc::CoeffMatrix a = truth.coeffs();
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] += 0.1 * rng.normal();
        const cc::CurveGaussianModel model(cc::FourierCurve(n, 1, k, a), 0.15 + 0.2 * rng.uniform(), K);
        const cc::Dataset data = cc::sample(cc::CurveGaussianModel(truth, 0.1, K), 50, rng.next());
        const cc::ParamGradient g = cc::grad_loglik(model, data);
        const cc::ParamGradient fd = cc::fd_gradient(model, data, 1e-5);
        auto check = [&](double got, double ref) {
            const double err = std::abs(got - ref);
            if (std::abs(ref) > 1e-8) {
                worst = std::max(worst, err / std::abs(ref));
                bad += err > 1e-5 * std::abs(ref);
            } else {
                bad += err > 1e-8;
            }
        };
        check(g.d_sigma, fd.d_sigma);
        for (Eigen::Index i = 0; i < fd.d_coeffs.size(); ++i) check(g.d_coeffs.data()[i], fd.d_coeffs.data()[i]);
    }
    const double t = seconds_since(t0);
    return {bad == 0 && t < 30.0, fmt("%d components out of tolerance, worst relative error %.3g, %.2f s", bad, worst, t)};
}

Outcome ac3_normalization()
{
    const auto t0 = std::chrono::steady_clock::now();
    const cc::CurveGaussianModel m(cc::rabbit_curve(), 0.05, 16);
    cc::BoundingBox box{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (int t = 0; t < 2000; ++t) {
        const Eigen::VectorXd p = m.curve().eval(t / 2000.0);
        box = {std::min(box.xmin, p(0)), std::max(box.xmax, p(0)), std::min(box.ymin, p(1)), std::max(box.ymax, p(1))};
    }
    const double pad = 6.0 * m.sigma();
    box = {box.xmin - pad, box.xmax + pad, box.ymin - pad, box.ymax + pad};
    const cc::DensityGrid g = cc::density_grid(
        [&](double x, double y) {
            const double p[2] = {x, y};
            return m.log_density(p);
        },
        box, 400, 400);
    const double mass = g.mass();
    const double t = seconds_since(t0);
    return {std::abs(mass - 1.0) <= 0.01 && t < 5.0, fmt("mass %.5f, %.2f s", mass, t)};
}

Outcome ac4_chain_convergence()
{
    const cc::FourierCurve e = cc::ellipse_curve(0.0, 0.0, 2.0, 1.0);
    const cc::Dataset pts = cc::sample(cc::CurveGaussianModel(e, 0.05), 100, 404);
    std::vector<double> err;
    for (int K : {4, 16, 64}) {
        const cc::CurveGaussianModel m(e, 0.05, K);
        double worst = 0.0;
        for (Eigen::Index r = 0; r < pts.size(); ++r) {
            const Eigen::VectorXd x = pts.points.row(r).transpose();
            worst = std::max(worst, std::abs(m.log_density(x) - cc::log_density_exact(e, 0.05, x)));
        }
        err.push_back(worst);
    }
    const bool pass = err[1] <= err[0] && err[2] <= err[1] && err[2] < 1e-2;
    return {pass, fmt("max error K=4 %.3g, K=16 %.3g, K=64 %.3g", err[0], err[1], err[2])};
}

Outcome ac5_point_sum_gap()
{
    const cc::FourierCurve e = cc::ellipse_curve(0.0, 0.0, 2.0, 1.0);
    const cc::CurveGaussianModel chain(e, 0.01, 16);
    bool all_above = true;
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 16; ++i) {
        const Eigen::VectorXd mid = e.eval((i + 0.5) / 16.0);
        const double gap = chain.log_density(mid) - cc::log_density_pointsum(e, 0.01, mid, 16);
        all_above = all_above && gap > 0.0;
        worst_gap = std::min(worst_gap, gap);
    }
    const bool pass = all_above && worst_gap > std::log(10.0);
    return {pass, fmt("chain above point-sum at every midpoint: %s, smallest log density ratio %.3g",
                      all_above ? "yes" : "no", worst_gap)};
}

Outcome ac6_clustering()
{
    const auto t0 = std::chrono::steady_clock::now();
    const cc::SuiteCase sc = cc::suite("order1", 606)[0];
    cc::Dataset data = cc::generate(sc.specs, 606, sc.name);
    cc::MultiStartConfig cfg;
    cfg.k = sc.curves;
    cfg.starts = 16;
    cfg.seed = 606;
    const cc::MultiStartResult mcec = cc::run_multistart(data, cfg);
    cfg.k = 2 * sc.curves;
    cfg.method = cc::Method::gmm;
    const cc::MultiStartResult gmm = cc::run_multistart(data, cfg);
    cfg.method = cc::Method::cec;
    const cc::MultiStartResult cec = cc::run_multistart(data, cfg);
    const double t = seconds_since(t0);
    const cc::StartOutcome& b = mcec.best_start();
    const double mle = b.score.mle;
    const bool pass = *b.rand >= 0.99 && *b.jaccard >= 0.99 && mle > gmm.best_start().score.mle &&
                      mle > cec.best_start().score.mle && t < 60.0;
    return {pass, fmt("Rand %.4f, Jaccard %.4f, MLE mcec %.2f gmm %.2f cec %.2f, %.2f s", *b.rand, *b.jaccard, mle,
                      gmm.best_start().score.mle, cec.best_start().score.mle, t)};
}

Outcome ac7_reduction()
{
    int reduced = 0;
    int runs = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (const cc::SuiteCase& sc : cc::suite("order1", seed)) {
            const cc::Dataset data = cc::generate(sc.specs, seed, sc.name);
            cc::McecConfig cfg;
            cfg.k = 2 * sc.curves;
            cfg.seed = seed;
            const cc::McecResult r = cc::mcec_run(data, cfg);
            reduced += r.state.active_count() < cfg.k;
            ++runs;
        }
    }
    const double rate = static_cast<double>(reduced) / runs;
    return {rate >= 0.8, fmt("%d of %d single-start runs deactivated a cluster (%.0f%%)", reduced, runs, 100.0 * rate)};
}

Outcome ac8_monotone()
{
    int runs = 0;
    int violations = 0;
    int bad_stops = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        for (const cc::SuiteCase& sc : cc::suite("order1", 800 + seed)) {
            const cc::Dataset data = cc::generate(sc.specs, 800 + seed, sc.name);
            for (int k : {sc.curves, 2 * sc.curves}) {
                cc::McecConfig cfg;
                cfg.k = k;
                cfg.seed = seed;
                const cc::McecResult r = cc::mcec_run(data, cfg);
                ++runs;
                for (std::size_t t = 1; t < r.trace.size(); ++t) violations += r.trace[t] > r.trace[t - 1] + 1e-9;
                // The loop stops at the first step whose improvement is below eps,
                // and never before.
                const std::size_t n = r.trace.size();
                for (std::size_t t = 1; t + 1 < n; ++t) bad_stops += !(r.trace[t] < r.trace[t - 1] - r.eps);
                if (r.converged && n >= 2) bad_stops += r.trace[n - 1] < r.trace[n - 2] - r.eps;
                if (!r.converged) bad_stops += r.iters != cfg.max_lloyd_iters;
            }
        }
    }
    return {violations == 0 && bad_stops == 0,
            fmt("%d runs, %d monotonicity violations, %d stop-rule violations", runs, violations, bad_stops)};
}

Outcome ac9_em_monotone()
{
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const cc::SuiteCase sc = cc::suite("order1", 900 + seed)[seed % 2];
        const cc::Dataset data = cc::generate(sc.specs, 900 + seed, sc.name);
        const cc::GaussianMixture g = cc::gmm_em(data.points, 2 * sc.curves, seed);
        for (std::size_t t = 1; t < g.trace.size(); ++t) violations += g.trace[t] < g.trace[t - 1] - 1e-10;
    }
    return {violations == 0, fmt("%d violations over 10 datasets", violations)};
}

Outcome ac10_metrics()
{
    const cc::ModelScore s = cc::make_score(548.54, 7, 128);
    const bool aic_ok = std::abs(s.aic - (-1083.08)) < 1e-9;
    const bool bic_ok = std::abs(s.bic - (-1063.12)) <= 0.05;
    cc::Rng rng(1010);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.index(120);
        const auto a = cc::testing::random_labels(n, 1 + static_cast<int>(rng.index(5)), rng);
        const auto b = cc::testing::random_labels(n, 1 + static_cast<int>(rng.index(5)), rng);
        const auto [rand, jaccard] = cc::testing::pair_enumeration(a, b);
        worst = std::max(worst, std::abs(cc::rand_index(a, b) - rand));
        worst = std::max(worst, std::abs(cc::jaccard_index(a, b) - jaccard));
    }
    return {aic_ok && bic_ok && worst < 1e-12,
            fmt("AIC %.4f, BIC %.4f, worst index error %.3g over 50 pairs", s.aic, s.bic, worst)};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
        {"AC1 closed-form segment statistics", ac1_closed_form},
        {"AC2 gradient against finite differences", ac2_gradient},
        {"AC3 density normalization", ac3_normalization},
        {"AC4 chain approximation convergence", ac4_chain_convergence},
        {"AC5 point-sum deficiency", ac5_point_sum_gap},
        {"AC6 clustering quality", ac6_clustering},
        {"AC7 cluster reduction", ac7_reduction},
        {"AC8 Lloyd monotonicity", ac8_monotone},
        {"AC9 EM monotonicity", ac9_em_monotone},
        {"AC10 metric identities", ac10_metrics},
    };
    int failed = 0;
    for (const auto& [name, fn] : checks) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
