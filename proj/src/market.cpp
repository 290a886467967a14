#include "tsm/market.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tsm::market {

namespace {

constexpr double kBoundSlack = 1e-12;

double bound_tolerance(double scale) {
    return kBoundSlack * std::max(1.0, std::abs(scale));
}

}  // namespace

Fleet::Fleet(std::vector<Generator> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) {
        throw std::invalid_argument("fleet must contain at least one generator");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        const Generator& g = generators_[i];
        if (!(g.alpha > 0.0) || !std::isfinite(g.alpha)) {
            throw std::invalid_argument("generator '" + g.id + "': alpha must be strictly positive");
        }
        if (!std::isfinite(g.beta)) {
            throw std::invalid_argument("generator '" + g.id + "': beta must be finite");
        }
        if (!ids.insert(g.id).second) {
            throw std::invalid_argument("duplicate generator id '" + g.id + "'");
        }
        (g.kind == GeneratorKind::Fast ? fast_ : slow_).push_back(i);
    }
    if (fast_.empty()) {
        throw std::invalid_argument("real-time market unclearable: fleet has no fast generator");
    }

    double inv_all = 0.0, ratio_all = 0.0, inv_fast = 0.0;
    for (const Generator& g : generators_) {
        inv_all += 1.0 / g.alpha;
        ratio_all += g.beta / g.alpha;
        if (g.kind == GeneratorKind::Fast) inv_fast += 1.0 / g.alpha;
    }
    agg_.alpha_da = 1.0 / inv_all;
    agg_.beta_da = ratio_all / inv_all;
    agg_.alpha_rt = 1.0 / inv_fast;
}

AggregateCoefficients aggregate_coefficients(const Fleet& fleet) {
    return fleet.aggregates();
}

const char* stage_name(Stage stage) {
    switch (stage) {
        case Stage::DayAhead: return "DayAhead";
        case Stage::RealTime: return "RealTime";
        case Stage::SocialOptimum: return "SocialOptimum";
    }
    return "unknown";
}

QpSolution solve_bounded_eq_qp(std::span<const QpCost> costs,
                               std::span<const double> offsets,
                               double target) {
    const std::size_t n = costs.size();
    if (n == 0) {
        throw std::invalid_argument("bounded QP needs at least one variable");
    }
    if (offsets.size() != n) {
        throw std::invalid_argument("bounded QP: offsets size mismatch");
    }
    for (const QpCost& c : costs) {
        if (!(c.alpha > 0.0)) {
            throw std::invalid_argument("bounded QP: alpha must be strictly positive");
        }
    }

    // Work in total outputs y_i = x_i + o_i, so every bound is y_i >= 0 and
    // the balance becomes sum y_i = target + sum o_i.
    double total = target;
    for (double o : offsets) total += o;
    const double slack = bound_tolerance(total);
    if (total < -slack) {
        throw std::invalid_argument("bounded QP infeasible: total output would be negative");
    }
    total = std::max(total, 0.0);

    std::vector<bool> clamped(n, false);
    std::vector<double> y(n, 0.0);
    double multiplier = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
        double inv = 0.0, ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (clamped[i]) continue;
            inv += 1.0 / costs[i].alpha;
            ratio += costs[i].beta / costs[i].alpha;
        }
        multiplier = (total + ratio) / inv;

        bool violated = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (clamped[i]) continue;
            y[i] = (multiplier - costs[i].beta) / costs[i].alpha;
            if (y[i] < -slack) {
                clamped[i] = true;
                y[i] = 0.0;
                violated = true;
            }
        }
        if (!violated) break;
    }

    QpSolution out;
    out.dispatch.resize(n);
    out.multiplier = multiplier;
    out.interior = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (clamped[i]) out.interior = false;
        out.dispatch[i] = std::max(y[i], 0.0) - offsets[i];
    }
    return out;
}

namespace {

struct ClearInputs {
    std::vector<QpCost> costs;
    std::vector<double> offsets;
    std::vector<std::size_t> indices;  // fleet indices, in fleet order
};

ClearInputs all_generator_inputs(const Fleet& fleet) {
    ClearInputs in;
    const auto& gens = fleet.generators();
    in.costs.reserve(gens.size());
    in.offsets.assign(gens.size(), 0.0);
    in.indices.reserve(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
        in.costs.push_back({gens[i].alpha, gens[i].beta});
        in.indices.push_back(i);
    }
    return in;
}

// Clears `demand` over the given units, preferring the closed-form
// aggregate solution and falling back to the active-set solver whenever
// any unit's closed-form output would cross its bound.
ClearingOutcome clear_over_units(const Fleet& fleet, const ClearInputs& in, Stage stage,
                                 double demand, double closed_form_price) {
    const auto& gens = fleet.generators();

    ClearingOutcome out;
    out.stage = stage;
    out.cleared_quantity = demand;

    bool closed_form_ok = true;
    std::vector<double> totals(in.indices.size());
    for (std::size_t k = 0; k < in.indices.size(); ++k) {
        totals[k] = (closed_form_price - in.costs[k].beta) / in.costs[k].alpha;
        if (totals[k] < 0.0) {
            closed_form_ok = false;
            break;
        }
    }

    if (closed_form_ok) {
        out.price = closed_form_price;
        out.interior = true;
    } else {
        QpSolution qp = solve_bounded_eq_qp(in.costs, in.offsets, demand);
        out.price = qp.multiplier;
        out.interior = qp.interior;
        for (std::size_t k = 0; k < in.indices.size(); ++k) {
            totals[k] = std::max(qp.dispatch[k] + in.offsets[k], 0.0);
        }
    }

    out.total_cost = 0.0;
    for (std::size_t k = 0; k < in.indices.size(); ++k) {
        const Generator& g = gens[in.indices[k]];
        out.total_cost += g.cost(totals[k]);
        out.dispatch[g.id] = totals[k] - in.offsets[k];
    }
    return out;
}

}  // namespace

ClearingOutcome clear_day_ahead(const Fleet& fleet, double d_da) {
    if (!std::isfinite(d_da) || d_da < 0.0) {
        throw std::invalid_argument("day-ahead demand must be nonnegative and finite");
    }
    ClearInputs in = all_generator_inputs(fleet);
    const double price = fleet.alpha_da() * d_da + fleet.beta_da();
    return clear_over_units(fleet, in, Stage::DayAhead, d_da, price);
}

ClearingOutcome clear_real_time(const Fleet& fleet, const ClearingOutcome& day_ahead, double d_rt) {
    if (day_ahead.stage != Stage::DayAhead) {
        throw std::invalid_argument("real-time clearing requires a day-ahead outcome");
    }
    if (!std::isfinite(d_rt)) {
        throw std::invalid_argument("real-time demand must be finite");
    }

    const auto& gens = fleet.generators();
    ClearInputs in;
    in.costs.reserve(fleet.fast_indices().size());
    in.offsets.reserve(fleet.fast_indices().size());
    for (std::size_t i : fleet.fast_indices()) {
        auto it = day_ahead.dispatch.find(gens[i].id);
        if (it == day_ahead.dispatch.end()) {
            throw std::invalid_argument("day-ahead outcome does not cover generator '" + gens[i].id + "'");
        }
        in.costs.push_back({gens[i].alpha, gens[i].beta});
        in.offsets.push_back(it->second);
        in.indices.push_back(i);
    }

    // The aggregate price form holds only when every fast unit sits on its
    // day-ahead marginal-cost curve (none was clamped day-ahead).
    bool fast_stationary = true;
    const double price_tol = 1e-9 * std::max(1.0, std::abs(day_ahead.price));
    for (std::size_t k = 0; k < in.indices.size(); ++k) {
        const double mc = in.costs[k].alpha * in.offsets[k] + in.costs[k].beta;
        if (std::abs(mc - day_ahead.price) > price_tol) {
            fast_stationary = false;
            break;
        }
    }

    ClearingOutcome out;
    if (fast_stationary) {
        const double price = fleet.alpha_rt() * d_rt + day_ahead.price;
        bool ok = true;
        for (std::size_t k = 0; k < in.indices.size(); ++k) {
            const double delta = (price - day_ahead.price) / in.costs[k].alpha;
            if (in.offsets[k] + delta < 0.0) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out.stage = Stage::RealTime;
            out.cleared_quantity = d_rt;
            out.price = price;
            out.interior = true;
            out.total_cost = 0.0;
            for (std::size_t k = 0; k < in.indices.size(); ++k) {
                const Generator& g = gens[in.indices[k]];
                const double delta = (price - day_ahead.price) / g.alpha;
                out.dispatch[g.id] = delta;
                out.total_cost += g.cost(in.offsets[k] + delta);
            }
            return out;
        }
    }

    QpSolution qp = solve_bounded_eq_qp(in.costs, in.offsets, d_rt);
    out.stage = Stage::RealTime;
    out.cleared_quantity = d_rt;
    out.price = qp.multiplier;
    out.interior = qp.interior;
    out.total_cost = 0.0;
    for (std::size_t k = 0; k < in.indices.size(); ++k) {
        const Generator& g = gens[in.indices[k]];
        out.dispatch[g.id] = qp.dispatch[k];
        out.total_cost += g.cost(std::max(qp.dispatch[k] + in.offsets[k], 0.0));
    }
    return out;
}

ClearingOutcome social_optimum(const Fleet& fleet, double d) {
    if (!std::isfinite(d) || d < 0.0) {
        throw std::invalid_argument("demand must be nonnegative and finite");
    }
    ClearInputs in = all_generator_inputs(fleet);
    const double price = fleet.alpha_da() * d + fleet.beta_da();
    return clear_over_units(fleet, in, Stage::SocialOptimum, d, price);
}

TwoStageOutcome settle_two_stage(const Fleet& fleet, double d_da, double d_rt) {
    TwoStageOutcome out;
    out.day_ahead = clear_day_ahead(fleet, d_da);
    out.real_time = clear_real_time(fleet, out.day_ahead, d_rt);
    out.spread = out.day_ahead.price - out.real_time.price;

    // Real-time total_cost already carries the fast generators' full cost at
    // final output; add the slow generators' day-ahead cost to get the true
    // two-stage social cost.
    out.total_cost = out.real_time.total_cost;
    const auto& gens = fleet.generators();
    for (std::size_t i : fleet.slow_indices()) {
        out.total_cost += gens[i].cost(out.day_ahead.dispatch.at(gens[i].id));
    }

    const ClearingOutcome optimum = social_optimum(fleet, d_da + d_rt);
    out.efficiency_gap = out.total_cost - optimum.total_cost;
    return out;
}

}  // namespace tsm::market
