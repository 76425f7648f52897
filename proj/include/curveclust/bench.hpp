#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "curveclust/presets.hpp"
#include "curveclust/runner.hpp"

namespace curveclust {

struct BenchConfig {
    std::string suite = "order1";
    std::uint64_t seed = 0;
    int starts = 8;
    int threads = 1;
};

struct BenchRow {
    std::string case_name;
    int curves = 0;
    std::string method;
    int k = 0;
    ModelScore score;
    std::optional<double> rand;
    std::optional<double> jaccard;
    int active = 0;
};

/// Cluster-count multiplier of the baselines: 2 for orders 1 and 2, 4 above.
inline int baseline_multiplier(int order) { return order <= 2 ? 2 : 4; }

/// Runs MCEC with k = number of curves and CEC/GMM with the multiplied count
/// on every case of the suite, keeping the best of `starts` starts each.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg)
{
    std::vector<BenchRow> rows;
    for (const SuiteCase& sc : suite(cfg.suite, cfg.seed)) {
        const Dataset data = generate(sc.specs, cfg.seed, sc.name);
        for (Method m : {Method::mcec, Method::cec, Method::gmm}) {
            MultiStartConfig mc;
            mc.method = m;
            mc.order = sc.order;
            mc.k = m == Method::mcec ? sc.curves : sc.curves * baseline_multiplier(sc.order);
            mc.starts = cfg.starts;
            mc.seed = cfg.seed;
            mc.threads = cfg.threads;
            const MultiStartResult res = run_multistart(data, mc);
            BenchRow row;
            row.case_name = sc.name;
            row.curves = sc.curves;
            row.method = method_name(m);
            row.k = mc.k;
            if (res.best >= 0) {
                const StartOutcome& best = res.best_start();
                row.score = best.score;
                row.rand = best.rand;
                row.jaccard = best.jaccard;
                row.active = best.active;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

inline void write_bench_markdown(const std::vector<BenchRow>& rows, std::ostream& out)
{
    out << "| case | method | k | active | MLE | BIC | AIC | Rand | Jaccard |\n";
    out << "|---|---|---|---|---|---|---|---|---|\n";
    char buf[256];
    auto index = [](const BenchRow& r, const std::optional<double>& v) {
        if (r.method != "mcec" || !v) return std::string("-");
        char b[32];
        std::snprintf(b, sizeof b, "%.2f", *v);
        return std::string(b);
    };
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "| %s | %s | %d | %d | %.2f | %.2f | %.2f | %s | %s |\n", r.case_name.c_str(),
                      r.method.c_str(), r.k, r.active, r.score.mle, r.score.bic, r.score.aic,
                      index(r, r.rand).c_str(), index(r, r.jaccard).c_str());
        out << buf;
    }
}

} // namespace curveclust
