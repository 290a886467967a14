#include "tsm/synth.hpp"

#include <random>
#include <stdexcept>

namespace tsm::empirics {

namespace {

void check_common(int n, double sigma) {
    if (n < 1) {
        throw std::invalid_argument("synthesis needs n >= 1 records");
    }
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("noise sigma must be nonnegative");
    }
}

}  // namespace

MarketSeries synthesize_series(const market::Fleet& fleet, const cournot::LoadProfile& loads,
                               int virtual_count, int n, double noise_sigma, std::uint64_t seed,
                               const SynthOptions& options) {
    check_common(n, noise_sigma);
    if (!(options.demand_scale_min > 0.0) ||
        !(options.demand_scale_max >= options.demand_scale_min)) {
        throw std::invalid_argument("invalid demand scale range");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale_dist(options.demand_scale_min,
                                                      options.demand_scale_max);
    std::normal_distribution<double> normal(0.0, 1.0);

    MarketSeries series;
    series.records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double scale = scale_dist(rng);
        const double jitter = normal(rng);
        const double eps_da = noise_sigma * normal(rng);
        const double eps_rt = noise_sigma * normal(rng);

        std::vector<double> scaled = loads.demands;
        for (double& d : scaled) d *= scale;
        const cournot::LoadProfile scenario(std::move(scaled));
        const cournot::CournotSolution eq =
            cournot::cournot_closed_form(fleet, scenario, virtual_count);

        // The realized split wanders around the equilibrium one; moving
        // volume between stages keeps the total demand fixed and breaks
        // the collinearity between the two cleared loads.
        const double rt_load = eq.total_rt * (1.0 + options.rt_jitter * jitter);
        const double da_load = scenario.total - rt_load;

        MarketRecord rec;
        rec.timestamp = options.start_timestamp + options.step_seconds * i;
        rec.da_load = da_load;
        rec.rt_load = rt_load;
        rec.da_price = fleet.alpha_da() * da_load + fleet.beta_da() + eps_da;
        rec.rt_price = fleet.alpha_rt() * rt_load + rec.da_price + eps_rt;
        series.records.push_back(rec);
    }
    return series;
}

MarketSeries synthesize_from_model(const PriceModel& model, int n,
                                   const ModelSynthOptions& options, std::uint64_t seed) {
    check_common(n, options.noise_sigma_da);
    if (!(options.noise_sigma_rt >= 0.0)) {
        throw std::invalid_argument("noise sigma must be nonnegative");
    }
    if (!(options.da_load_max > options.da_load_min) ||
        !(options.rt_load_max > options.rt_load_min)) {
        throw std::invalid_argument("invalid load ranges");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> da_dist(options.da_load_min, options.da_load_max);
    std::uniform_real_distribution<double> rt_dist(options.rt_load_min, options.rt_load_max);
    std::normal_distribution<double> normal(0.0, 1.0);

    MarketSeries series;
    series.records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        MarketRecord rec;
        rec.timestamp = options.start_timestamp + options.step_seconds * i;
        rec.da_load = da_dist(rng);
        rec.rt_load = rt_dist(rng);
        rec.da_price = model.alpha_da * rec.da_load + model.beta_da +
                       options.noise_sigma_da * normal(rng);
        rec.rt_price = model.alpha_rt * rec.rt_load + model.gamma * rec.da_price + model.delta +
                       options.noise_sigma_rt * normal(rng);
        series.records.push_back(rec);
    }
    return series;
}

}  // namespace tsm::empirics
