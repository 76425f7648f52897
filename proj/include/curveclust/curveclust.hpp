#pragma once

// Umbrella header.
#include "curveclust/baselines.hpp"
#include "curveclust/bench.hpp"
#include "curveclust/bfgs.hpp"
#include "curveclust/curve_density.hpp"
#include "curveclust/dataset.hpp"
#include "curveclust/fit.hpp"
#include "curveclust/fourier_curve.hpp"
#include "curveclust/gradient.hpp"
#include "curveclust/hard_assign.hpp"
#include "curveclust/kmeans.hpp"
#include "curveclust/mcec.hpp"
#include "curveclust/metrics.hpp"
#include "curveclust/model_io.hpp"
#include "curveclust/multi_index.hpp"
#include "curveclust/plot.hpp"
#include "curveclust/presets.hpp"
#include "curveclust/quadrature.hpp"
#include "curveclust/rng.hpp"
#include "curveclust/runner.hpp"
#include "curveclust/segment_stats.hpp"
