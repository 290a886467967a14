#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tsm/series.hpp"

// Price-formation regressions. The day-ahead price is modeled as linear
// in the day-ahead cleared load; the real-time price as linear in the
// real-time cleared load and the day-ahead price. Plain OLS with classic
// standard errors and two-sided Student-t p-values.

namespace tsm::empirics {

struct RegressionFit {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> p_values;
    double rmse = 0.0;       // degrees-of-freedom-corrected residual RMS
    double r_squared = 0.0;
    std::size_t n = 0;

    std::size_t index_of(std::string_view name) const;
    double coefficient(std::string_view name) const;
    double std_error(std::string_view name) const;
    double p_value(std::string_view name) const;
};

/// OLS of y on the columns of x (row-major, n x k). Throws on n <= k or
/// a rank-deficient design.
RegressionFit fit_ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                      std::vector<std::string> names);

/// da_price = alpha_da * da_load + beta_da. Needs >= 3 included records
/// and nonconstant da_load.
RegressionFit fit_da_price(const MarketSeries& series);

/// rt_price = alpha_rt * rt_load + gamma * da_price + delta. Needs >= 4
/// included records and a full-rank design.
RegressionFit fit_rt_price(const MarketSeries& series);

// Model-consistency summary for the real-time fit: the two-stage model
// predicts gamma = 1 and no intercept.
struct RtModelCheck {
    double gamma_gap = 0.0;        // gamma_hat - 1
    bool gamma_within_2se = false;
    int delta_sign = 0;            // -1, 0, +1
};

RtModelCheck check_rt_model(const RegressionFit& fit);

}  // namespace tsm::empirics
