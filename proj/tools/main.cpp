// Command-line front end: clears scenarios, computes strategic equilibria,
// runs parameter sweeps, fits price-formation regressions, and produces
// event-study tables. All inputs come from scenario/data files; reports go
// to stdout or --out as JSON (12-significant-digit CSV for tabular output).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsm/cournot.hpp"
#include "tsm/event_study.hpp"
#include "tsm/json_io.hpp"
#include "tsm/market.hpp"
#include "tsm/regression.hpp"
#include "tsm/scenario.hpp"
#include "tsm/series.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;

struct GlobalOptions {
    std::string scenario_path;
    std::string format;  // "", "json", or "csv"
    std::string out_path;
    std::uint64_t seed = 1;
};

std::string format_cell(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void emit(const GlobalOptions& options, const std::string& text) {
    if (options.out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(options.out_path, std::ios::binary);
    if (!out) {
        throw std::invalid_argument("cannot write output file '" + options.out_path + "'");
    }
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

void emit_json(const GlobalOptions& options, const json& doc) {
    if (options.format == "csv") {
        throw std::invalid_argument("csv format is not supported for this command");
    }
    emit(options, doc.dump(2));
}

tsm::cli::Scenario require_scenario(const GlobalOptions& options) {
    if (options.scenario_path.empty()) {
        throw std::invalid_argument("this command requires --scenario");
    }
    return tsm::cli::load_scenario(options.scenario_path);
}

// ---------------------------------------------------------------- clear ---

int cmd_clear(const GlobalOptions& options, double d_da, double d_rt) {
    const tsm::cli::Scenario scenario = require_scenario(options);
    const tsm::market::TwoStageOutcome outcome =
        tsm::market::settle_two_stage(scenario.fleet, d_da, d_rt);

    json doc = outcome;
    doc["efficient"] =
        outcome.efficiency_gap <= 1e-7 * std::max(1.0, std::abs(outcome.total_cost));
    emit_json(options, doc);
    return kExitOk;
}

// -------------------------------------------------------------- optimum ---

int cmd_optimum(const GlobalOptions& options, std::optional<double> demand_override) {
    const tsm::cli::Scenario scenario = require_scenario(options);
    const double demand = demand_override.value_or(scenario.loads.total);
    const tsm::cournot::PlayerDecision split =
        tsm::cournot::single_load_optimum(scenario.fleet, demand);

    const std::vector<tsm::cournot::PlayerDecision> solo = {split};
    const double spent = tsm::cournot::expenditure(scenario.fleet, solo, 0);
    const std::vector<tsm::cournot::PlayerDecision> all_da = {{demand, 0.0, false}};
    const double spent_all_da = tsm::cournot::expenditure(scenario.fleet, all_da, 0);

    const double price_da = scenario.fleet.alpha_da() * split.da + scenario.fleet.beta_da();
    const double price_rt = scenario.fleet.alpha_rt() * split.rt + price_da;
    emit_json(options, json{{"demand", demand},
                            {"da", split.da},
                            {"rt", split.rt},
                            {"price_da", price_da},
                            {"price_rt", price_rt},
                            {"spread", price_da - price_rt},
                            {"expenditure", spent},
                            {"expenditure_all_day_ahead", spent_all_da},
                            {"saving", spent_all_da - spent}});
    return kExitOk;
}

// ---------------------------------------------------------- equilibrium ---

int cmd_equilibrium(const GlobalOptions& options, int random_starts) {
    const tsm::cli::Scenario scenario = require_scenario(options);
    const auto& fleet = scenario.fleet;
    const auto& loads = scenario.loads;
    const int v = scenario.virtual_count;

    const tsm::cournot::CournotSolution closed = tsm::cournot::cournot_closed_form(fleet, loads, v);
    const tsm::cournot::CournotSolution iterated = tsm::cournot::cournot_best_response_iterate(
        fleet, loads, v, scenario.solver.tol, scenario.solver.max_iter);

    double max_discrepancy = 0.0;
    for (std::size_t i = 0; i < closed.decisions.size(); ++i) {
        max_discrepancy = std::max(
            max_discrepancy, std::abs(closed.decisions[i].da - iterated.decisions[i].da));
    }

    json doc{{"closed_form", closed},
             {"best_response", iterated},
             {"max_da_discrepancy", max_discrepancy}};

    bool all_converged = iterated.converged;
    if (random_starts > 0) {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double max_start_discrepancy = 0.0;
        for (int s = 0; s < random_starts; ++s) {
            std::vector<tsm::cournot::PlayerDecision> start(closed.decisions.size());
            for (std::size_t l = 0; l < start.size(); ++l) {
                const double d_l = l < loads.size() ? loads.demands[l] : 0.0;
                const double cap = l < loads.size() ? loads.demands[l] : loads.total;
                start[l].da = unit(rng) * cap;
                start[l].rt = d_l - start[l].da;
                start[l].is_virtual = l >= loads.size();
            }
            const tsm::cournot::CournotSolution run = tsm::cournot::cournot_best_response_iterate(
                fleet, loads, v, scenario.solver.tol, scenario.solver.max_iter, start);
            all_converged = all_converged && run.converged;
            for (std::size_t i = 0; i < run.decisions.size(); ++i) {
                max_start_discrepancy = std::max(
                    max_start_discrepancy,
                    std::abs(run.decisions[i].da - closed.decisions[i].da));
            }
        }
        doc["random_starts"] = random_starts;
        doc["max_start_discrepancy"] = max_start_discrepancy;
    }

    emit_json(options, doc);
    return all_converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------- sweep ---

struct SweepRow {
    int num_loads = 0;
    int virtual_count = 0;
    double total_da = 0.0;
    double total_rt = 0.0;
    double spread = 0.0;
    double efficiency_gap = 0.0;
    double real_da_share = 0.0;
};

SweepRow sweep_point(const tsm::market::Fleet& fleet, const tsm::cournot::LoadProfile& loads,
                     int virtual_count) {
    const tsm::cournot::CournotSolution eq =
        tsm::cournot::cournot_closed_form(fleet, loads, virtual_count);
    const tsm::market::TwoStageOutcome settled =
        tsm::market::settle_two_stage(fleet, eq.total_da, eq.total_rt);

    double real_da = 0.0;
    for (std::size_t l = 0; l < loads.size(); ++l) real_da += eq.decisions[l].da;

    SweepRow row;
    row.num_loads = static_cast<int>(loads.size());
    row.virtual_count = virtual_count;
    row.total_da = eq.total_da;
    row.total_rt = eq.total_rt;
    row.spread = eq.spread;
    row.efficiency_gap = settled.efficiency_gap;
    row.real_da_share = real_da / loads.total;
    return row;
}

int cmd_sweep(const GlobalOptions& options) {
    const tsm::cli::Scenario scenario = require_scenario(options);
    if (!scenario.sweep) {
        throw std::invalid_argument("sweep command requires a 'sweep' block in the scenario");
    }
    const tsm::cli::SweepSpec& spec = *scenario.sweep;

    std::vector<SweepRow> rows;
    if (spec.parameter == "L") {
        for (int n = static_cast<int>(spec.from); n <= static_cast<int>(spec.to);
             n += static_cast<int>(spec.step)) {
            const double each = scenario.loads.total / n;
            rows.push_back(sweep_point(scenario.fleet,
                                       tsm::cournot::LoadProfile(std::vector<double>(n, each)),
                                       scenario.virtual_count));
        }
    } else if (spec.parameter == "V") {
        for (int v = static_cast<int>(spec.from); v <= static_cast<int>(spec.to);
             v += static_cast<int>(spec.step)) {
            rows.push_back(sweep_point(scenario.fleet, scenario.loads, v));
        }
    } else {  // demand_scale
        for (double s = spec.from; s <= spec.to + 1e-12 * spec.step; s += spec.step) {
            std::vector<double> scaled = scenario.loads.demands;
            for (double& d : scaled) d *= s;
            rows.push_back(sweep_point(scenario.fleet, tsm::cournot::LoadProfile(std::move(scaled)),
                                       scenario.virtual_count));
        }
    }

    const std::string format = options.format.empty()
                                   ? (scenario.output_format.empty() ? "csv" : scenario.output_format)
                                   : options.format;
    if (format == "csv") {
        std::ostringstream csv;
        csv << "L,V,total_da,total_rt,spread,efficiency_gap,real_da_share\n";
        for (const SweepRow& row : rows) {
            csv << row.num_loads << ',' << row.virtual_count << ',' << format_cell(row.total_da)
                << ',' << format_cell(row.total_rt) << ',' << format_cell(row.spread) << ','
                << format_cell(row.efficiency_gap) << ',' << format_cell(row.real_da_share)
                << '\n';
        }
        emit(options, csv.str());
    } else {
        json doc = json::array();
        for (const SweepRow& row : rows) {
            doc.push_back({{"L", row.num_loads},
                           {"V", row.virtual_count},
                           {"total_da", row.total_da},
                           {"total_rt", row.total_rt},
                           {"spread", row.spread},
                           {"efficiency_gap", row.efficiency_gap},
                           {"real_da_share", row.real_da_share}});
        }
        emit(options, doc.dump(2));
    }
    return kExitOk;
}

// ------------------------------------------------------------------ fit ---

std::vector<std::pair<std::int64_t, std::int64_t>> parse_exclusion_flags(
    const std::vector<std::string>& flags) {
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    for (const std::string& flag : flags) {
        const std::size_t sep = flag.find("..");
        if (sep == std::string::npos) {
            throw std::invalid_argument("exclusion must look like FROM..TO, got '" + flag + "'");
        }
        const std::int64_t from = tsm::empirics::parse_timestamp(flag.substr(0, sep));
        const std::int64_t to = tsm::empirics::parse_timestamp(flag.substr(sep + 2));
        if (to < from) {
            throw std::invalid_argument("exclusion range ends before it starts: '" + flag + "'");
        }
        ranges.emplace_back(from, to);
    }
    return ranges;
}

tsm::empirics::ColumnMap parse_column_map(const std::string& spec) {
    tsm::empirics::ColumnMap map;
    if (spec.empty()) return map;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--columns entries must look like field=column");
        }
        const std::string field = item.substr(0, eq);
        const std::string column = item.substr(eq + 1);
        if (field == "timestamp") {
            map.timestamp = column;
        } else if (field == "da_load") {
            map.da_load = column;
        } else if (field == "rt_load") {
            map.rt_load = column;
        } else if (field == "da_price") {
            map.da_price = column;
        } else if (field == "rt_price") {
            map.rt_price = column;
        } else {
            throw std::invalid_argument("unknown field '" + field + "' in --columns");
        }
    }
    return map;
}

int cmd_fit(const GlobalOptions& options, const std::string& data_path, const std::string& model,
            const std::string& columns_spec, const std::vector<std::string>& exclusion_flags) {
    tsm::empirics::MarketSeries series =
        tsm::empirics::load_market_csv(data_path, parse_column_map(columns_spec));

    auto ranges = parse_exclusion_flags(exclusion_flags);
    if (!options.scenario_path.empty()) {
        const tsm::cli::Scenario scenario = tsm::cli::load_scenario(options.scenario_path);
        ranges.insert(ranges.end(), scenario.exclusions.begin(), scenario.exclusions.end());
    }
    tsm::empirics::mark_exclusions(series, ranges);

    json doc{{"model", model},
             {"records", series.records.size()},
             {"included", series.included_count()}};
    if (model == "da") {
        doc["fit"] = tsm::empirics::fit_da_price(series);
    } else {
        const tsm::empirics::RegressionFit fit = tsm::empirics::fit_rt_price(series);
        const tsm::empirics::RtModelCheck check = tsm::empirics::check_rt_model(fit);
        doc["fit"] = fit;
        doc["model_consistency"] = {{"gamma_gap", check.gamma_gap},
                                    {"gamma_within_2se", check.gamma_within_2se},
                                    {"delta_sign", check.delta_sign}};
    }
    emit_json(options, doc);
    return kExitOk;
}

// ---------------------------------------------------------- event study ---

int cmd_event_study(const GlobalOptions& options, const std::string& data_path,
                    const std::string& break_period, const std::string& bucket,
                    const std::string& columns_spec) {
    tsm::empirics::ShareColumnMap columns;
    if (!columns_spec.empty()) {
        std::stringstream ss(columns_spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("--columns entries must look like field=column");
            }
            const std::string field = item.substr(0, eq);
            const std::string column = item.substr(eq + 1);
            if (field == "timestamp") {
                columns.timestamp = column;
            } else if (field == "da_real_load") {
                columns.da_real_load = column;
            } else if (field == "total_load") {
                columns.total_load = column;
            } else {
                throw std::invalid_argument("unknown field '" + field + "' in --columns");
            }
        }
    }

    tsm::empirics::BucketGranularity granularity;
    if (bucket == "monthly") {
        granularity = tsm::empirics::BucketGranularity::Monthly;
    } else if (bucket == "quarterly") {
        granularity = tsm::empirics::BucketGranularity::Quarterly;
    } else if (bucket == "daily") {
        granularity = tsm::empirics::BucketGranularity::Daily;
    } else {
        throw std::invalid_argument("--bucket must be daily, monthly, or quarterly");
    }

    const auto rows = tsm::empirics::load_share_csv(data_path, columns);
    const auto periods = tsm::empirics::bucket_load_shares(rows, granularity);
    const tsm::empirics::EventStudyResult result = tsm::empirics::event_study(periods, break_period);

    json doc = result;
    doc["break_period"] = break_period;
    doc["bucket"] = bucket;

    if (options.format == "csv") {
        std::ostringstream csv;
        csv << "period,share\n";
        for (const auto& b : result.buckets) {
            csv << b.period << ',' << format_cell(b.share) << '\n';
        }
        emit(options, csv.str());
    } else {
        emit(options, doc.dump(2));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage settlement electricity market toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions options;
    app.add_option("--scenario", options.scenario_path, "Scenario JSON file");
    app.add_option("--format", options.format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", options.out_path, "Write the report to this path instead of stdout");
    app.add_option("--seed", options.seed, "Seed for randomized verification");

    double d_da = 0.0, d_rt = 0.0;
    CLI::App* clear = app.add_subcommand("clear", "Settle both stages for a demand split");
    clear->add_option("--dda", d_da, "Day-ahead cleared demand, MW")->required();
    clear->add_option("--drt", d_rt, "Real-time cleared demand, MW (any sign)")->required();

    std::optional<double> optimum_demand;
    CLI::App* optimum =
        app.add_subcommand("optimum", "Expenditure-minimizing split for one strategic load");
    optimum->add_option("--demand", optimum_demand,
                        "Demand, MW (defaults to the scenario's total load)");

    int random_starts = 0;
    CLI::App* equilibrium =
        app.add_subcommand("equilibrium", "Cournot equilibrium, closed form vs best response");
    equilibrium->add_option("--random-starts", random_starts,
                            "Extra best-response runs from random starts");

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep L, V, or demand scale");

    std::string fit_data, fit_model, fit_columns;
    std::vector<std::string> fit_exclusions;
    CLI::App* fit = app.add_subcommand("fit", "Fit a price-formation regression to market data");
    fit->add_option("--data", fit_data, "Market data CSV")->required();
    fit->add_option("--model", fit_model, "Which price model: da or rt")
        ->required()
        ->check(CLI::IsMember({"da", "rt"}));
    fit->add_option("--columns", fit_columns, "Column remapping, e.g. da_load=DA_MW,rt_load=RT_MW");
    fit->add_option("--exclude", fit_exclusions,
                    "Timestamp range FROM..TO to exclude (repeatable)");

    std::string es_data, es_break, es_bucket = "monthly", es_columns;
    CLI::App* event_study_cmd =
        app.add_subcommand("event-study", "Day-ahead real-load share around a break");
    event_study_cmd->add_option("--data", es_data, "Load share CSV")->required();
    event_study_cmd->add_option("--break", es_break, "First period of the post-break regime")
        ->required();
    event_study_cmd->add_option("--bucket", es_bucket, "Bucket granularity (default monthly)");
    event_study_cmd->add_option("--columns", es_columns, "Column remapping");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (clear->parsed()) return cmd_clear(options, d_da, d_rt);
        if (optimum->parsed()) return cmd_optimum(options, optimum_demand);
        if (equilibrium->parsed()) return cmd_equilibrium(options, random_starts);
        if (sweep->parsed()) return cmd_sweep(options);
        if (fit->parsed()) return cmd_fit(options, fit_data, fit_model, fit_columns, fit_exclusions);
        if (event_study_cmd->parsed()) {
            return cmd_event_study(options, es_data, es_break, es_bucket, es_columns);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
