#include "tsm/cournot.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace tsm::cournot {

namespace {

double demand_of(const LoadProfile& loads, std::size_t player) {
    return player < loads.size() ? loads.demands[player] : 0.0;
}

// Unclamped first-order best response in the day-ahead quantity:
//   da_l = (1 - r/2) d_l + 1/2 * sum_{k != l} (d_k - da_k),  r = alpha_da/alpha_rt.
// Virtual bidders are the d_l = 0 case.
double unclamped_best_response_da(const market::Fleet& fleet, const LoadProfile& loads,
                                  const std::vector<PlayerDecision>& decisions,
                                  std::size_t player) {
    const double ratio = fleet.alpha_da() / fleet.alpha_rt();
    double residual_others = 0.0;
    for (std::size_t k = 0; k < decisions.size(); ++k) {
        if (k == player) continue;
        residual_others += demand_of(loads, k) - decisions[k].da;
    }
    return (1.0 - 0.5 * ratio) * demand_of(loads, player) + 0.5 * residual_others;
}

CournotSolution assemble_solution(const market::Fleet& fleet, std::vector<PlayerDecision> decisions,
                                  SolveMethod method, int iterations, bool converged) {
    CournotSolution sol;
    sol.decisions = std::move(decisions);
    sol.method = method;
    sol.iterations = iterations;
    sol.converged = converged;

    sol.total_da = 0.0;
    sol.total_rt = 0.0;
    for (const PlayerDecision& d : sol.decisions) {
        sol.total_da += d.da;
        sol.total_rt += d.rt;
    }
    sol.price_da = fleet.alpha_da() * sol.total_da + fleet.beta_da();
    sol.price_rt = fleet.alpha_rt() * sol.total_rt + sol.price_da;
    sol.spread = sol.price_da - sol.price_rt;

    sol.expenditures.reserve(sol.decisions.size());
    for (const PlayerDecision& d : sol.decisions) {
        sol.expenditures.push_back(sol.price_da * d.da + sol.price_rt * d.rt);
    }
    return sol;
}

void check_virtual_count(int virtual_count) {
    if (virtual_count < 0) {
        throw std::invalid_argument("virtual bidder count must be nonnegative");
    }
}

}  // namespace

LoadProfile::LoadProfile(std::vector<double> demands_in) : demands(std::move(demands_in)) {
    if (demands.empty()) {
        throw std::invalid_argument("load profile needs at least one demand");
    }
    for (double d : demands) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw std::invalid_argument("load demands must be strictly positive and finite");
        }
        total += d;
    }
}

const char* solve_method_name(SolveMethod method) {
    return method == SolveMethod::ClosedForm ? "ClosedForm" : "BestResponse";
}

PlayerDecision single_load_optimum(const market::Fleet& fleet, double d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw std::invalid_argument("single-load demand must be strictly positive");
    }
    PlayerDecision out;
    out.da = (1.0 - fleet.alpha_da() / (2.0 * fleet.alpha_rt())) * d;
    out.rt = d - out.da;
    out.is_virtual = false;
    return out;
}

double expenditure(const market::Fleet& fleet, const std::vector<PlayerDecision>& decisions,
                   std::size_t player) {
    if (player >= decisions.size()) {
        throw std::invalid_argument("expenditure: player index out of range");
    }
    double total_da = 0.0, total_rt = 0.0;
    for (const PlayerDecision& d : decisions) {
        total_da += d.da;
        total_rt += d.rt;
    }
    const double price_da = fleet.alpha_da() * total_da + fleet.beta_da();
    const double price_rt = fleet.alpha_rt() * total_rt + price_da;
    return price_da * decisions[player].da + price_rt * decisions[player].rt;
}

PlayerDecision best_response(const market::Fleet& fleet, const LoadProfile& loads,
                             const std::vector<PlayerDecision>& decisions, std::size_t player) {
    if (player >= decisions.size()) {
        throw std::invalid_argument("best_response: player index out of range");
    }
    PlayerDecision out;
    out.is_virtual = player >= loads.size();
    out.da = std::max(0.0, unclamped_best_response_da(fleet, loads, decisions, player));
    out.rt = demand_of(loads, player) - out.da;
    return out;
}

CournotSolution cournot_closed_form(const market::Fleet& fleet, const LoadProfile& loads,
                                    int virtual_count) {
    check_virtual_count(virtual_count);
    const std::size_t num_loads = loads.size();
    const std::size_t n = num_loads + static_cast<std::size_t>(virtual_count);
    const double ratio = fleet.alpha_da() / fleet.alpha_rt();

    std::vector<PlayerDecision> decisions(n);
    if (virtual_count == 0) {
        // Per-load equilibrium: da_l = (1 - L r / (L+1)) d_l + r/(L+1) * sum_{k!=l} d_k.
        const double coef = ratio / (static_cast<double>(num_loads) + 1.0);
        for (std::size_t l = 0; l < num_loads; ++l) {
            const double d_l = loads.demands[l];
            decisions[l].da =
                (1.0 - coef * static_cast<double>(num_loads)) * d_l + coef * (loads.total - d_l);
            decisions[l].rt = d_l - decisions[l].da;
        }
    } else {
        // Mixed population: solve the joint first-order system
        //   da_l + 1/2 sum_{k != l} da_k = (1 - r/2) d_l + 1/2 (D - d_l)
        // over all real and virtual players (d_l = 0 for the latter).
        Eigen::MatrixXd a = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n), 0.5);
        a.diagonal().setOnes();
        Eigen::VectorXd b(static_cast<Eigen::Index>(n));
        for (std::size_t l = 0; l < n; ++l) {
            const double d_l = l < num_loads ? loads.demands[l] : 0.0;
            b(static_cast<Eigen::Index>(l)) =
                (1.0 - 0.5 * ratio) * d_l + 0.5 * (loads.total - d_l);
        }
        Eigen::VectorXd da = a.llt().solve(b);
        for (std::size_t l = 0; l < n; ++l) {
            decisions[l].da = da(static_cast<Eigen::Index>(l));
            decisions[l].rt = (l < num_loads ? loads.demands[l] : 0.0) - decisions[l].da;
            decisions[l].is_virtual = l >= num_loads;
        }
    }
    return assemble_solution(fleet, std::move(decisions), SolveMethod::ClosedForm, 0, true);
}

std::vector<PlayerDecision> all_day_ahead_start(const LoadProfile& loads, int virtual_count) {
    check_virtual_count(virtual_count);
    std::vector<PlayerDecision> start(loads.size() + static_cast<std::size_t>(virtual_count));
    for (std::size_t l = 0; l < start.size(); ++l) {
        start[l].da = l < loads.size() ? loads.demands[l] : 0.0;
        start[l].rt = 0.0;
        start[l].is_virtual = l >= loads.size();
    }
    return start;
}

CournotSolution cournot_best_response_iterate(const market::Fleet& fleet, const LoadProfile& loads,
                                              int virtual_count, double tol, int max_iter,
                                              const std::vector<PlayerDecision>& start) {
    check_virtual_count(virtual_count);
    if (!(tol > 0.0)) {
        throw std::invalid_argument("best-response tolerance must be positive");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("best-response max_iter must be at least 1");
    }
    const std::size_t n = loads.size() + static_cast<std::size_t>(virtual_count);
    if (start.size() != n) {
        throw std::invalid_argument("best-response start profile has the wrong player count");
    }

    std::vector<PlayerDecision> decisions = start;
    for (std::size_t l = 0; l < n; ++l) {
        decisions[l].is_virtual = l >= loads.size();
    }

    bool converged = false;
    int sweeps = 0;
    while (sweeps < max_iter) {
        ++sweeps;
        double max_change = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            PlayerDecision next = best_response(fleet, loads, decisions, l);
            max_change = std::max(max_change, std::abs(next.da - decisions[l].da));
            decisions[l] = next;
        }
        if (max_change <= tol) {
            converged = true;
            break;
        }
    }
    return assemble_solution(fleet, std::move(decisions), SolveMethod::BestResponse, sweeps,
                             converged);
}

CournotSolution cournot_best_response_iterate(const market::Fleet& fleet, const LoadProfile& loads,
                                              int virtual_count, double tol, int max_iter) {
    return cournot_best_response_iterate(fleet, loads, virtual_count, tol, max_iter,
                                         all_day_ahead_start(loads, virtual_count));
}

BoundaryCheckReport verify_no_boundary_equilibrium(const market::Fleet& fleet,
                                                   const LoadProfile& loads, int trials,
                                                   std::uint64_t seed) {
    if (trials < 1) {
        throw std::invalid_argument("boundary check needs at least one trial");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t n = loads.size();
    BoundaryCheckReport report;
    for (int trial = 0; trial < trials; ++trial) {
        // Pin a random nonempty subset at da = 0, settle the remaining
        // players to their restricted equilibrium, then test the pinned
        // players' unclamped first-order response.
        std::vector<bool> pinned(n, false);
        std::size_t pinned_count = 0;
        for (std::size_t l = 0; l < n; ++l) {
            if (unit(rng) < 0.5) {
                pinned[l] = true;
                ++pinned_count;
            }
        }
        if (pinned_count == 0) {
            pinned[trial % n] = true;
            pinned_count = 1;
        }

        std::vector<PlayerDecision> decisions(n);
        for (std::size_t l = 0; l < n; ++l) {
            decisions[l].da = pinned[l] ? 0.0 : unit(rng) * loads.demands[l];
            decisions[l].rt = loads.demands[l] - decisions[l].da;
        }
        for (int sweep = 0; sweep < 10000; ++sweep) {
            double max_change = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                if (pinned[l]) continue;
                PlayerDecision next = best_response(fleet, loads, decisions, l);
                max_change = std::max(max_change, std::abs(next.da - decisions[l].da));
                decisions[l] = next;
            }
            if (max_change <= 1e-12 || pinned_count == n) break;
        }

        ++report.candidates_checked;
        for (std::size_t l = 0; l < n; ++l) {
            if (!pinned[l]) continue;
            ++report.pinned_players_checked;
            if (unclamped_best_response_da(fleet, loads, decisions, l) <= 0.0) {
                ++report.violations;
            }
        }
    }
    return report;
}

double real_da_load_share(double alpha_da, double alpha_rt, int num_loads, int virtual_count) {
    if (num_loads < 1) {
        throw std::invalid_argument("real_da_load_share: need at least one real load");
    }
    if (virtual_count < 0) {
        throw std::invalid_argument("real_da_load_share: virtual count must be nonnegative");
    }
    if (!(alpha_da > 0.0) || !(alpha_rt >= alpha_da)) {
        throw std::invalid_argument("real_da_load_share: need alpha_rt >= alpha_da > 0");
    }
    const double players = static_cast<double>(num_loads + virtual_count) + 1.0;
    return 1.0 - static_cast<double>(virtual_count + 1) * alpha_da / (players * alpha_rt);
}

}  // namespace tsm::cournot
