#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "curveclust/baselines.hpp"
#include "curveclust/dataset.hpp"
#include "curveclust/mcec.hpp"
#include "curveclust/metrics.hpp"
#include "curveclust/rng.hpp"

namespace curveclust {

/// Thread count: CURVECLUST_THREADS wins over `requested`; 0 means one per core.
inline int resolve_threads(int requested)
{
    if (const char* env = std::getenv("CURVECLUST_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) requested = static_cast<int>(v);
    }
    if (requested <= 0) requested = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return requested;
}

/// Calls fn(i) for i in [0, count) on up to `threads` threads. Results must
/// be written by index; the first exception is rethrown after joining.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn)
{
    const auto workers = static_cast<std::size_t>(std::clamp<long>(threads, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (!failed) {
                const std::size_t i = next++;
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

enum class Method { mcec, cec, gmm };

inline std::string method_name(Method m)
{
    switch (m) {
    case Method::mcec: return "mcec";
    case Method::cec: return "cec";
    case Method::gmm: return "gmm";
    }
    return "?";
}

inline Method parse_method(const std::string& s)
{
    if (s == "mcec") return Method::mcec;
    if (s == "cec") return Method::cec;
    if (s == "gmm") return Method::gmm;
    throw std::invalid_argument("unknown method '" + s + "'");
}

struct MultiStartConfig {
    Method method = Method::mcec;
    int k = 2;
    int order = 1;
    int segments = kDefaultSegments;
    int starts = 16;
    std::uint64_t seed = 0;
    double removal_pct = 5.0;
    double eps = 0.0;
    int max_lloyd_iters = 100;
    int gmm_max_iters = 500;
    int threads = 1;
    FitConfig fit;
};

struct StartOutcome {
    int index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double criterion = 0.0;  ///< energy (mcec, cec) or log-likelihood (gmm)
    ModelScore score;
    std::optional<double> rand;
    std::optional<double> jaccard;
    std::vector<double> trace;
    int iters = 0;
    int active = 0;
    double eps = 0.0;
    double seconds = 0.0;
    std::vector<int> labels;
    std::vector<std::string> warnings;
    std::optional<MixtureState> curves;
    std::optional<GaussianMixture> gaussians;
};

struct MultiStartResult {
    std::vector<StartOutcome> starts;
    int best = -1;
    std::string criterion;  ///< "min_energy" or "max_loglik"

    const StartOutcome& best_start() const
    {
        if (best < 0) throw std::runtime_error("no start succeeded");
        return starts[static_cast<std::size_t>(best)];
    }
};

inline StartOutcome run_start(const Dataset& data, const MultiStartConfig& cfg, int index)
{
    StartOutcome out;
    out.index = index;
    out.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (cfg.method == Method::mcec) {
            McecConfig mc;
            mc.k = cfg.k;
            mc.order = cfg.order;
            mc.segments = cfg.segments;
            mc.eps = cfg.eps;
            mc.removal_pct = cfg.removal_pct;
            mc.seed = out.seed;
            mc.max_lloyd_iters = cfg.max_lloyd_iters;
            mc.fit = cfg.fit;
            McecResult r = mcec_run(data.points, mc);
            out.criterion = r.trace.back();
            out.score = score(r.state, data.points);
            out.trace = r.trace;
            out.iters = r.iters;
            out.active = r.state.active_count();
            out.eps = r.eps;
            out.labels = r.state.assignment;
            out.warnings = r.warnings;
            out.curves = std::move(r.state);
        } else if (cfg.method == Method::cec) {
            GaussianMixture g = cec_gaussian(data.points, cfg.k, out.seed, cfg.removal_pct, cfg.max_lloyd_iters, cfg.eps);
            out.criterion = g.trace.back();
            out.score = score(g, data.points);
            out.trace = g.trace;
            out.iters = g.iters;
            out.active = g.active_count();
            out.labels = g.labels;
            out.gaussians = std::move(g);
        } else {
            GaussianMixture g = gmm_em(data.points, cfg.k, out.seed, cfg.gmm_max_iters);
            out.criterion = g.loglik;
            out.score = score(g, data.points);
            out.trace = g.trace;
            out.iters = g.iters;
            out.active = g.active_count();
            out.labels = g.labels;
            out.gaussians = std::move(g);
        }
        if (data.labels) {
            out.rand = rand_index(*data.labels, out.labels);
            out.jaccard = jaccard_index(*data.labels, out.labels);
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Runs `starts` independently seeded starts (seed of start s is
/// derive_seed(seed, s)) and picks the best by the method's own criterion:
/// lowest energy for MCEC and CEC, highest log-likelihood for GMM. Ties go to
/// the lowest start index, so the choice does not depend on thread count.
inline MultiStartResult run_multistart(const Dataset& data, const MultiStartConfig& cfg)
{
    if (cfg.starts < 1) throw std::invalid_argument("starts must be >= 1");
    MultiStartResult res;
    res.criterion = cfg.method == Method::gmm ? "max_loglik" : "min_energy";
    res.starts.resize(static_cast<std::size_t>(cfg.starts));
    parallel_for(res.starts.size(), cfg.threads,
                 [&](std::size_t s) { res.starts[s] = run_start(data, cfg, static_cast<int>(s)); });
    for (std::size_t s = 0; s < res.starts.size(); ++s) {
        const StartOutcome& o = res.starts[s];
        if (!o.ok) continue;
        if (res.best < 0) {
            res.best = static_cast<int>(s);
            continue;
        }
        const double cur = res.starts[static_cast<std::size_t>(res.best)].criterion;
        const bool better = cfg.method == Method::gmm ? o.criterion > cur : o.criterion < cur;
        if (better) res.best = static_cast<int>(s);
    }
    return res;
}

} // namespace curveclust
