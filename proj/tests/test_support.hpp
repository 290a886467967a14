#pragma once

// Test-side oracles and generators, independent of the implementation
// paths they verify. The QP oracles solve the same dispatch problems by
// monotone price search and by exhaustive active-set enumeration; the
// expenditure grid search brackets the single-load optimum directly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "tsm/market.hpp"

namespace testsupport {

struct OracleSolution {
    std::vector<double> totals;  // total output per unit, >= 0
    double price = 0.0;
};

// Monotone-price oracle: total supply at price p is sum_i max(0, (p - beta_i)/alpha_i),
// continuous and nondecreasing; bisect until it meets the required total.
inline OracleSolution qp_bisection(const std::vector<tsm::market::QpCost>& costs,
                                   const std::vector<double>& offsets, double target) {
    double total = target;
    for (double o : offsets) total += o;
    if (total < 0.0) throw std::invalid_argument("oracle: infeasible total");

    const auto supply = [&](double p) {
        double s = 0.0;
        for (const auto& c : costs) s += std::max(0.0, (p - c.beta) / c.alpha);
        return s;
    };

    double lo = costs.front().beta, hi = costs.front().beta;
    double max_alpha = 0.0;
    for (const auto& c : costs) {
        lo = std::min(lo, c.beta);
        hi = std::max(hi, c.beta);
        max_alpha = std::max(max_alpha, c.alpha);
    }
    hi += total * max_alpha + 1.0;
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (supply(mid) < total) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    OracleSolution out;
    out.price = 0.5 * (lo + hi);
    // At a flat segment (supply == total over an interval) bisection ends
    // at the segment's lower edge, which is the marginal-cost price.
    out.totals.reserve(costs.size());
    double produced = 0.0;
    for (const auto& c : costs) {
        const double y = std::max(0.0, (out.price - c.beta) / c.alpha);
        out.totals.push_back(y);
        produced += y;
    }
    // Rescale the free outputs so the balance holds exactly despite the
    // finite bisection tolerance.
    if (produced > 0.0 && total > 0.0) {
        for (double& y : out.totals) y *= total / produced;
    }
    return out;
}

// Exhaustive active-set oracle for n <= 16: tries every clamp pattern,
// keeps KKT-consistent candidates, returns the cheapest.
inline OracleSolution qp_exhaustive(const std::vector<tsm::market::QpCost>& costs,
                                    const std::vector<double>& offsets, double target) {
    const std::size_t n = costs.size();
    if (n > 16) throw std::invalid_argument("oracle: exhaustive search limited to n <= 16");
    double total = target;
    for (double o : offsets) total += o;

    const auto objective = [&](const std::vector<double>& totals) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            c += 0.5 * costs[i].alpha * totals[i] * totals[i] + costs[i].beta * totals[i];
        }
        return c;
    };

    bool found = false;
    OracleSolution best;
    double best_cost = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double inv = 0.0, ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) continue;  // bit set = clamped at zero
            inv += 1.0 / costs[i].alpha;
            ratio += costs[i].beta / costs[i].alpha;
        }
        if (inv == 0.0) {
            if (std::abs(total) > 1e-12) continue;
        }
        const double price = inv > 0.0 ? (total + ratio) / inv : 0.0;
        std::vector<double> totals(n, 0.0);
        bool feasible = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                // Clamped: marginal cost at zero must not be below price.
                if (costs[i].beta < price - 1e-9 * std::max(1.0, std::abs(price))) {
                    feasible = false;
                    break;
                }
            } else {
                totals[i] = (price - costs[i].beta) / costs[i].alpha;
                if (totals[i] < -1e-12) {
                    feasible = false;
                    break;
                }
                totals[i] = std::max(totals[i], 0.0);
            }
        }
        if (!feasible) continue;
        const double cost = objective(totals);
        if (!found || cost < best_cost - 1e-12) {
            found = true;
            best_cost = cost;
            best.totals = std::move(totals);
            best.price = price;
        }
    }
    if (!found) throw std::runtime_error("oracle: no KKT-consistent active set found");
    return best;
}

struct GridSearchResult {
    double da = 0.0;
    double expenditure = 0.0;
};

// Brute-force single-load expenditure search over da in [0, d] at fixed step.
inline GridSearchResult grid_min_expenditure(double alpha_da, double beta_da, double alpha_rt,
                                             double d, double step) {
    GridSearchResult best{0.0, 0.0};
    bool first = true;
    const auto spend = [&](double da) {
        const double rt = d - da;
        const double price_da = alpha_da * da + beta_da;
        const double price_rt = alpha_rt * rt + price_da;
        return price_da * da + price_rt * rt;
    };
    const auto n_steps = static_cast<std::int64_t>(std::floor(d / step));
    for (std::int64_t k = 0; k <= n_steps; ++k) {
        const double da = std::min(static_cast<double>(k) * step, d);
        const double e = spend(da);
        if (first || e < best.expenditure) {
            first = false;
            best = {da, e};
        }
    }
    const double e_end = spend(d);
    if (e_end < best.expenditure) best = {d, e_end};
    return best;
}

// --------------------------------------------------------------- fleets ---

struct FleetOptions {
    int min_generators = 2;
    int max_generators = 20;
    bool require_slow = false;
    double alpha_min = 0.05;
    double alpha_max = 5.0;
    double beta_min = 0.0;
    double beta_max = 20.0;
};

inline tsm::market::Fleet random_fleet(std::mt19937_64& rng, const FleetOptions& opt = {}) {
    std::uniform_int_distribution<int> count(opt.min_generators, opt.max_generators);
    std::uniform_real_distribution<double> alpha(opt.alpha_min, opt.alpha_max);
    std::uniform_real_distribution<double> beta(opt.beta_min, opt.beta_max);
    std::bernoulli_distribution is_fast(0.6);

    const int n = count(rng);
    std::vector<tsm::market::Generator> gens;
    gens.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        tsm::market::Generator g;
        g.id = "g" + std::to_string(i);
        g.kind = is_fast(rng) ? tsm::market::GeneratorKind::Fast : tsm::market::GeneratorKind::Slow;
        g.alpha = alpha(rng);
        g.beta = beta(rng);
        gens.push_back(std::move(g));
    }
    gens.front().kind = tsm::market::GeneratorKind::Fast;
    if (opt.require_slow && n > 1) gens.back().kind = tsm::market::GeneratorKind::Slow;
    return tsm::market::Fleet(std::move(gens));
}

// Demand large enough that every generator runs strictly above zero in the
// day-ahead clearing (and stays above zero for moderate real-time swings).
inline double interior_demand(const tsm::market::Fleet& fleet, std::mt19937_64& rng,
                              double headroom = 1.2) {
    double beta_max = fleet.generators().front().beta;
    for (const auto& g : fleet.generators()) beta_max = std::max(beta_max, g.beta);
    const double d_min = std::max(0.0, (beta_max - fleet.beta_da()) / fleet.alpha_da());
    std::uniform_real_distribution<double> extra(1.0, 30.0);
    return d_min * headroom + extra(rng);
}

}  // namespace testsupport
