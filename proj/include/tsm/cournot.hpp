#pragma once

#include <cstdint>
#include <vector>

#include "tsm/market.hpp"

// Strategic load-side analysis of the two-stage settlement market: loads
// (and purely financial virtual bidders) choose how to split their demand
// between the day-ahead and real-time stages, anticipating the price
// impact of the aggregate split. Quantity competition among them forms a
// Cournot game with a unique interior Nash equilibrium.

namespace tsm::cournot {

// Per-participant inelastic demands, all strictly positive.
struct LoadProfile {
    explicit LoadProfile(std::vector<double> demands_in);

    std::vector<double> demands;
    double total = 0.0;

    std::size_t size() const { return demands.size(); }
};

// One participant's stage split. Real loads satisfy da + rt = demand;
// virtual bidders hold a decrement position da = -rt >= 0.
struct PlayerDecision {
    double da = 0.0;
    double rt = 0.0;
    bool is_virtual = false;
};

enum class SolveMethod { ClosedForm, BestResponse };

const char* solve_method_name(SolveMethod method);

struct CournotSolution {
    std::vector<PlayerDecision> decisions;  // real loads first, then virtual bidders
    double total_da = 0.0;
    double total_rt = 0.0;
    double price_da = 0.0;
    double price_rt = 0.0;
    double spread = 0.0;
    std::vector<double> expenditures;
    SolveMethod method = SolveMethod::ClosedForm;
    int iterations = 0;  // best-response sweeps; 0 for ClosedForm
    bool converged = true;
};

/// Expenditure-minimizing split for a single load of demand d > 0:
/// da = (1 - alpha_da / (2 alpha_rt)) * d. The resulting spread is
/// strictly negative whenever the fleet has a slow generator.
PlayerDecision single_load_optimum(const market::Fleet& fleet, double d);

/// Purchase cost of `player` under the aggregate prices implied by all
/// decisions: lambda_da * da + lambda_rt * rt, with the real-time price
/// anchored at the day-ahead price.
double expenditure(const market::Fleet& fleet, const std::vector<PlayerDecision>& decisions,
                   std::size_t player);

/// One player's best response given everyone else's current split.
/// Players with index >= loads.size() are virtual bidders (zero demand).
/// The day-ahead quantity is clamped at zero; the clamp can bind during
/// iteration but never at an equilibrium.
PlayerDecision best_response(const market::Fleet& fleet, const LoadProfile& loads,
                             const std::vector<PlayerDecision>& decisions, std::size_t player);

/// Nash equilibrium of the load-side Cournot game with `virtual_count`
/// virtual bidders, from the joint first-order system. With no virtual
/// bidders the per-load closed form is used directly; otherwise the
/// (L+V)x(L+V) linear system is solved.
CournotSolution cournot_closed_form(const market::Fleet& fleet, const LoadProfile& loads,
                                    int virtual_count);

/// Independent equilibrium oracle: cyclic (Gauss-Seidel) best-response
/// sweeps from `start` until the largest per-player day-ahead change in a
/// sweep is <= tol. Non-convergence within max_iter is reported through
/// the converged flag, never thrown.
CournotSolution cournot_best_response_iterate(const market::Fleet& fleet, const LoadProfile& loads,
                                              int virtual_count, double tol, int max_iter,
                                              const std::vector<PlayerDecision>& start);

/// Same, starting from the all-day-ahead profile.
CournotSolution cournot_best_response_iterate(const market::Fleet& fleet, const LoadProfile& loads,
                                              int virtual_count, double tol, int max_iter);

std::vector<PlayerDecision> all_day_ahead_start(const LoadProfile& loads, int virtual_count);

// No boundary equilibria exist: any candidate profile that pins some
// players' day-ahead quantity at zero leaves those players with a
// strictly positive unclamped best response. verify_no_boundary_equilibrium
// probes randomized pinned candidates (remaining players settled to their
// restricted equilibrium) and counts violations; a sound implementation
// reports zero.
struct BoundaryCheckReport {
    int candidates_checked = 0;
    int pinned_players_checked = 0;
    int violations = 0;
};

BoundaryCheckReport verify_no_boundary_equilibrium(const market::Fleet& fleet,
                                                   const LoadProfile& loads, int trials,
                                                   std::uint64_t seed = 0x5eedu);

/// Fraction of total real demand that real loads clear day-ahead at the
/// equilibrium with L real loads and V virtual bidders:
/// 1 - (V+1) alpha_da / ((L+V+1) alpha_rt). Positive, strictly
/// decreasing in V, with limit 1 - alpha_da/alpha_rt.
double real_da_load_share(double alpha_da, double alpha_rt, int num_loads, int virtual_count);

}  // namespace tsm::cournot
