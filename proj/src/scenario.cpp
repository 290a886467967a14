#include "tsm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tsm/series.hpp"

namespace tsm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
    throw std::invalid_argument("scenario '" + origin + "': " + message);
}

std::int64_t parse_bound(const json& value, const std::string& origin, const char* key) {
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_string()) return empirics::parse_timestamp(value.get<std::string>());
    fail(origin, std::string("exclusion '") + key + "' must be a timestamp");
}

}  // namespace

Scenario parse_scenario_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be an object");

    if (!doc.contains("fleet") || !doc["fleet"].is_array() || doc["fleet"].empty()) {
        fail(origin, "'fleet' must be a nonempty array of generators");
    }
    std::vector<market::Generator> generators;
    for (const json& g : doc["fleet"]) {
        if (!g.is_object() || !g.contains("id") || !g.contains("kind") || !g.contains("alpha") ||
            !g.contains("beta")) {
            fail(origin, "each generator needs id, kind, alpha, beta");
        }
        market::Generator gen;
        gen.id = g["id"].get<std::string>();
        const std::string kind = g["kind"].get<std::string>();
        if (kind == "fast") {
            gen.kind = market::GeneratorKind::Fast;
        } else if (kind == "slow") {
            gen.kind = market::GeneratorKind::Slow;
        } else {
            fail(origin, "generator '" + gen.id + "': kind must be \"fast\" or \"slow\"");
        }
        if (!g["alpha"].is_number() || !g["beta"].is_number()) {
            fail(origin, "generator '" + gen.id + "': alpha and beta must be numbers");
        }
        gen.alpha = g["alpha"].get<double>();
        gen.beta = g["beta"].get<double>();
        generators.push_back(std::move(gen));
    }

    if (!doc.contains("loads") || !doc["loads"].is_array() || doc["loads"].empty()) {
        fail(origin, "'loads' must be a nonempty array of positive demands");
    }
    std::vector<double> demands;
    for (const json& d : doc["loads"]) {
        if (!d.is_number()) fail(origin, "'loads' entries must be numbers");
        demands.push_back(d.get<double>());
    }

    Scenario scenario(market::Fleet(std::move(generators)),
                      cournot::LoadProfile(std::move(demands)));

    if (doc.contains("virtual_count")) {
        if (!doc["virtual_count"].is_number_integer() || doc["virtual_count"].get<int>() < 0) {
            fail(origin, "'virtual_count' must be a nonnegative integer");
        }
        scenario.virtual_count = doc["virtual_count"].get<int>();
    }

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        if (!s.is_object()) fail(origin, "'solver' must be an object");
        if (s.contains("tol")) scenario.solver.tol = s["tol"].get<double>();
        if (s.contains("max_iter")) scenario.solver.max_iter = s["max_iter"].get<int>();
        if (!(scenario.solver.tol > 0.0)) fail(origin, "solver tol must be positive");
        if (scenario.solver.max_iter < 1) fail(origin, "solver max_iter must be at least 1");
    }

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        if (!s.is_object() || !s.contains("parameter") || !s.contains("from") ||
            !s.contains("to")) {
            fail(origin, "'sweep' needs parameter, from, to (and optional step)");
        }
        SweepSpec sweep;
        sweep.parameter = s["parameter"].get<std::string>();
        static const std::set<std::string> kParams = {"L", "V", "demand_scale"};
        if (!kParams.count(sweep.parameter)) {
            fail(origin, "sweep parameter must be one of L, V, demand_scale");
        }
        sweep.from = s["from"].get<double>();
        sweep.to = s["to"].get<double>();
        sweep.step = s.contains("step") ? s["step"].get<double>() : 1.0;
        if (!(sweep.step > 0.0)) fail(origin, "sweep step must be positive");
        if (sweep.to < sweep.from) fail(origin, "sweep range is empty");
        if (sweep.parameter != "demand_scale") {
            const double min_value = sweep.parameter == "L" ? 1.0 : 0.0;
            if (sweep.from < min_value || sweep.from != std::floor(sweep.from) ||
                sweep.step != std::floor(sweep.step)) {
                fail(origin, "sweep over " + sweep.parameter + " needs integer bounds and step" +
                                 (sweep.parameter == "L" ? ", from >= 1" : ", from >= 0"));
            }
        } else if (!(sweep.from > 0.0)) {
            fail(origin, "demand_scale sweep must start above zero");
        }
        scenario.sweep = sweep;
    }

    if (doc.contains("output_format")) {
        scenario.output_format = doc["output_format"].get<std::string>();
        if (scenario.output_format != "json" && scenario.output_format != "csv") {
            fail(origin, "output_format must be \"json\" or \"csv\"");
        }
    }

    if (doc.contains("exclusions")) {
        if (!doc["exclusions"].is_array()) fail(origin, "'exclusions' must be an array");
        for (const json& e : doc["exclusions"]) {
            if (!e.is_object() || !e.contains("from") || !e.contains("to")) {
                fail(origin, "each exclusion needs 'from' and 'to'");
            }
            const std::int64_t from = parse_bound(e["from"], origin, "from");
            const std::int64_t to = parse_bound(e["to"], origin, "to");
            if (to < from) fail(origin, "exclusion range ends before it starts");
            scenario.exclusions.emplace_back(from, to);
        }
    }

    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_json(buffer.str(), path);
}

}  // namespace tsm::cli
