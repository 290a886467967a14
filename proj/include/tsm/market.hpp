#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

// Two-stage settlement market clearing for a fleet of quadratic-cost
// generators. Quantities are MW, prices are currency/MWh, and the
// settlement interval is one hour, so energy equals power numerically.

namespace tsm::market {

enum class GeneratorKind { Fast, Slow };

// One supply unit with cost C(x) = alpha/2 * x^2 + beta * x, x >= 0.
struct Generator {
    std::string id;
    GeneratorKind kind = GeneratorKind::Fast;
    double alpha = 0.0;  // cost curvature, currency/(MW^2 h); must be > 0
    double beta = 0.0;   // marginal-cost intercept, currency/MWh; any sign

    double cost(double x) const { return 0.5 * alpha * x * x + beta * x; }
    double marginal_cost(double x) const { return alpha * x + beta; }
};

// Harmonic-sum aggregates of the fleet's cost curves. alpha_da/beta_da
// price the day-ahead stage (all generators); alpha_rt prices the
// real-time stage (fast generators only). alpha_rt >= alpha_da always,
// strictly so when any slow generator exists.
struct AggregateCoefficients {
    double alpha_da = 0.0;
    double beta_da = 0.0;
    double alpha_rt = 0.0;
};

// Immutable, validated generator population. Throws std::invalid_argument
// on construction if a generator has alpha <= 0, an id repeats, or the
// fast set is empty (the real-time market would be unclearable).
class Fleet {
public:
    explicit Fleet(std::vector<Generator> generators);

    const std::vector<Generator>& generators() const { return generators_; }
    const std::vector<std::size_t>& fast_indices() const { return fast_; }
    const std::vector<std::size_t>& slow_indices() const { return slow_; }
    bool has_slow() const { return !slow_.empty(); }

    double alpha_da() const { return agg_.alpha_da; }
    double beta_da() const { return agg_.beta_da; }
    double alpha_rt() const { return agg_.alpha_rt; }
    const AggregateCoefficients& aggregates() const { return agg_; }

private:
    std::vector<Generator> generators_;
    std::vector<std::size_t> fast_;
    std::vector<std::size_t> slow_;
    AggregateCoefficients agg_;
};

AggregateCoefficients aggregate_coefficients(const Fleet& fleet);

enum class Stage { DayAhead, RealTime, SocialOptimum };

const char* stage_name(Stage stage);

// Result of one clearing. For Stage::RealTime the dispatch entries are
// output adjustments (any sign) of the fast generators; otherwise they
// are absolute outputs. `interior` is true iff no nonnegativity bound
// was binding in the solve.
struct ClearingOutcome {
    Stage stage = Stage::DayAhead;
    std::map<std::string, double> dispatch;
    double price = 0.0;
    double cleared_quantity = 0.0;
    double total_cost = 0.0;
    bool interior = true;
};

// A settled day-ahead/real-time pair. total_cost is the true two-stage
// social cost (day-ahead slow cost plus full fast cost at final output,
// i.e. including the sunk term the real-time objective carries).
// efficiency_gap compares against the joint social optimum at the same
// total demand and is zero exactly when the whole load clears day-ahead.
struct TwoStageOutcome {
    ClearingOutcome day_ahead;
    ClearingOutcome real_time;
    double spread = 0.0;  // day_ahead.price - real_time.price
    double total_cost = 0.0;
    double efficiency_gap = 0.0;
};

/// Clears `d_da` MW across the whole fleet. Throws std::invalid_argument
/// if d_da is negative or not finite.
ClearingOutcome clear_day_ahead(const Fleet& fleet, double d_da);

/// Clears a `d_rt` MW deviation (any sign) across the fast generators,
/// starting from their day-ahead schedule. `day_ahead` must be a
/// DayAhead outcome for the same fleet.
ClearingOutcome clear_real_time(const Fleet& fleet, const ClearingOutcome& day_ahead, double d_rt);

/// Jointly dispatches all generators to serve `d` MW at minimum cost.
ClearingOutcome social_optimum(const Fleet& fleet, double d);

/// Runs both stages and reports the spread and the efficiency gap
/// against social_optimum(fleet, d_da + d_rt).
TwoStageOutcome settle_two_stage(const Fleet& fleet, double d_da, double d_rt);

// ---------------------------------------------------------------------------
// Bounded equality-constrained QP:
//   min  sum_i alpha_i/2 * (x_i + o_i)^2 + beta_i * (x_i + o_i)
//   s.t. sum_i x_i = target,  x_i + o_i >= 0.
// Solved exactly by active-set elimination: clamp every variable whose
// free solution violates its bound, re-solve the equality system on the
// remaining set. The multiplier decreases monotonically across rounds,
// so clamped variables never need releasing; terminates in <= n rounds.
// ---------------------------------------------------------------------------

struct QpCost {
    double alpha = 0.0;  // > 0
    double beta = 0.0;
};

struct QpSolution {
    std::vector<double> dispatch;  // x_i; clamped entries equal -offset_i
    double multiplier = 0.0;       // shadow price of the balance constraint
    bool interior = true;          // no bound clamped
};

QpSolution solve_bounded_eq_qp(std::span<const QpCost> costs,
                               std::span<const double> offsets,
                               double target);

}  // namespace tsm::market
