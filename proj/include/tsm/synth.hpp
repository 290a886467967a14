#pragma once

#include <cstdint>

#include "tsm/cournot.hpp"
#include "tsm/market.hpp"
#include "tsm/series.hpp"

// Forward models that generate market series with known ground truth,
// used to exercise the regression engine. Noise is additive Gaussian on
// prices only (demands are exogenous), matching the regressions'
// error-in-equation form. Both generators are deterministic in the seed.

namespace tsm::empirics {

// Price-formation coefficients of the generating model.
struct PriceModel {
    double alpha_da = 0.0;
    double beta_da = 0.0;
    double alpha_rt = 0.0;
    double gamma = 1.0;   // loading of the day-ahead price in the real-time equation
    double delta = 0.0;   // real-time intercept
};

struct SynthOptions {
    double demand_scale_min = 0.5;   // uniform per-record scaling of the load profile
    double demand_scale_max = 1.5;
    double rt_jitter = 0.2;          // relative spread of the real-time split around equilibrium
    std::int64_t start_timestamp = 1514764800;  // 2018-01-01T00:00:00Z
    std::int64_t step_seconds = 3600;
};

/// Draws n demand scenarios, splits each at the Cournot equilibrium of
/// (fleet, loads, virtual_count), jitters the realized real-time share,
/// and prices both stages from the fleet aggregates plus iid Gaussian
/// noise of standard deviation noise_sigma on each price.
MarketSeries synthesize_series(const market::Fleet& fleet, const cournot::LoadProfile& loads,
                               int virtual_count, int n, double noise_sigma, std::uint64_t seed,
                               const SynthOptions& options = {});

struct ModelSynthOptions {
    double da_load_min = 12.0;
    double da_load_max = 28.0;
    double rt_load_min = -1.0;
    double rt_load_max = 2.5;
    double noise_sigma_da = 0.0;
    double noise_sigma_rt = 0.0;
    std::int64_t start_timestamp = 1514764800;
    std::int64_t step_seconds = 3600;
};

/// Same price equations from explicit model coefficients, with both
/// loads drawn independently and uniformly. Allows gamma != 1 and a
/// nonzero real-time intercept.
MarketSeries synthesize_from_model(const PriceModel& model, int n,
                                   const ModelSynthOptions& options, std::uint64_t seed);

}  // namespace tsm::empirics
