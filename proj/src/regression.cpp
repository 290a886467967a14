#include "tsm/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "tsm/stats.hpp"

namespace tsm::empirics {

std::size_t RegressionFit::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw std::invalid_argument("regression fit has no coefficient '" + std::string(name) + "'");
}

double RegressionFit::coefficient(std::string_view name) const {
    return coefficients[index_of(name)];
}

double RegressionFit::std_error(std::string_view name) const {
    return std_errors[index_of(name)];
}

double RegressionFit::p_value(std::string_view name) const {
    return p_values[index_of(name)];
}

RegressionFit fit_ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                      std::vector<std::string> names) {
    const std::size_t n = x.size();
    if (n == 0 || n != y.size()) {
        throw std::invalid_argument("fit_ols: design and response sizes do not match");
    }
    const std::size_t k = x.front().size();
    if (k == 0 || names.size() != k) {
        throw std::invalid_argument("fit_ols: need one name per design column");
    }
    if (n <= k) {
        throw std::invalid_argument("fit_ols: need more observations than coefficients");
    }

    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    Eigen::VectorXd response(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].size() != k) {
            throw std::invalid_argument("fit_ols: ragged design matrix");
        }
        for (std::size_t j = 0; j < k; ++j) {
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
        }
        response(static_cast<Eigen::Index>(i)) = y[i];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(k)) {
        throw std::invalid_argument("fit_ols: rank-deficient design (degenerate regressors)");
    }

    const Eigen::VectorXd beta = qr.solve(response);
    const Eigen::VectorXd residuals = response - design * beta;
    const double ssr = residuals.squaredNorm();
    const double dof = static_cast<double>(n - k);
    const double sigma2 = ssr / dof;

    const Eigen::MatrixXd xtx_inv =
        (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(
            static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));

    const double mean_y = response.mean();
    const double sst = (response.array() - mean_y).matrix().squaredNorm();

    RegressionFit fit;
    fit.names = std::move(names);
    fit.n = n;
    fit.rmse = std::sqrt(sigma2);
    fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : (ssr <= 1e-24 ? 1.0 : 0.0);
    fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
    fit.coefficients.resize(k);
    fit.std_errors.resize(k);
    fit.p_values.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        fit.coefficients[j] = beta(jj);
        fit.std_errors[j] = std::sqrt(std::max(sigma2 * xtx_inv(jj, jj), 0.0));
        fit.p_values[j] = fit.std_errors[j] > 0.0
                              ? stats::student_t_two_sided_p(beta(jj) / fit.std_errors[j], dof)
                              : 0.0;
    }
    return fit;
}

namespace {

std::vector<const MarketRecord*> included_records(const MarketSeries& series) {
    std::vector<const MarketRecord*> out;
    out.reserve(series.records.size());
    for (const MarketRecord& rec : series.records) {
        if (!rec.excluded) out.push_back(&rec);
    }
    return out;
}

}  // namespace

RegressionFit fit_da_price(const MarketSeries& series) {
    const auto records = included_records(series);
    if (records.size() < 3) {
        throw std::invalid_argument("fit_da_price: need at least 3 included records");
    }
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    x.reserve(records.size());
    y.reserve(records.size());
    for (const MarketRecord* rec : records) {
        x.push_back({rec->da_load, 1.0});
        y.push_back(rec->da_price);
    }
    return fit_ols(x, y, {"alpha_da", "beta_da"});
}

RegressionFit fit_rt_price(const MarketSeries& series) {
    const auto records = included_records(series);
    if (records.size() < 4) {
        throw std::invalid_argument("fit_rt_price: need at least 4 included records");
    }
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    x.reserve(records.size());
    y.reserve(records.size());
    for (const MarketRecord* rec : records) {
        x.push_back({rec->rt_load, rec->da_price, 1.0});
        y.push_back(rec->rt_price);
    }
    return fit_ols(x, y, {"alpha_rt", "gamma", "delta"});
}

RtModelCheck check_rt_model(const RegressionFit& fit) {
    RtModelCheck check;
    const double gamma = fit.coefficient("gamma");
    const double gamma_se = fit.std_error("gamma");
    const double delta = fit.coefficient("delta");
    check.gamma_gap = gamma - 1.0;
    check.gamma_within_2se = std::abs(check.gamma_gap) <= 2.0 * gamma_se;
    check.delta_sign = delta > 0.0 ? 1 : (delta < 0.0 ? -1 : 0);
    return check;
}

}  // namespace tsm::empirics
