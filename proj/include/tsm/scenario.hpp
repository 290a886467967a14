#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsm/cournot.hpp"
#include "tsm/market.hpp"

// Scenario files drive the CLI: a fleet, a load profile, virtual bidder
// count, solver options, and (optionally) a sweep specification. See the
// annotated example in the repository docs for the JSON schema.

namespace tsm::cli {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 10000;
};

struct SweepSpec {
    std::string parameter;  // "L", "V", or "demand_scale"
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
};

struct Scenario {
    Scenario(market::Fleet fleet_in, cournot::LoadProfile loads_in)
        : fleet(std::move(fleet_in)), loads(std::move(loads_in)) {}

    market::Fleet fleet;
    cournot::LoadProfile loads;
    int virtual_count = 0;
    SolverOptions solver;
    std::optional<SweepSpec> sweep;
    std::string output_format = "json";
    std::vector<std::pair<std::int64_t, std::int64_t>> exclusions;
};

/// Parses and validates a scenario JSON file. Throws
/// std::invalid_argument with a descriptive message on any schema or
/// invariant violation.
Scenario load_scenario(const std::string& path);

Scenario parse_scenario_json(const std::string& text, const std::string& origin);

}  // namespace tsm::cli
