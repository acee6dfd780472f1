#pragma once

// Forecasting toolkit for chaotic dynamical systems: trajectory generators,
// delay-feature construction (neighbor-coupled and full outer-product
// variants), ridge readouts, a leaky echo-state baseline, prediction metrics
// and a benchmark harness.

#include "chaoscast/errors.hpp"
#include "chaoscast/rng.hpp"
#include "chaoscast/time_series.hpp"
#include "chaoscast/lorenz.hpp"
#include "chaoscast/kuramoto_sivashinsky.hpp"
#include "chaoscast/lyapunov.hpp"
#include "chaoscast/features.hpp"
#include "chaoscast/ridge.hpp"
#include "chaoscast/esn.hpp"
#include "chaoscast/readout.hpp"
#include "chaoscast/metrics.hpp"
#include "chaoscast/io.hpp"
#include "chaoscast/bench.hpp"
#include "chaoscast/suites.hpp"

namespace chaoscast {
inline constexpr const char* kVersion = "0.1.0";
}
