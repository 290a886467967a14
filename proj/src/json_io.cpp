#include "tsm/json_io.hpp"

namespace tsm::market {

void to_json(nlohmann::json& j, const ClearingOutcome& outcome) {
    j = nlohmann::json{{"stage", stage_name(outcome.stage)},
                       {"dispatch", outcome.dispatch},
                       {"price", outcome.price},
                       {"cleared_quantity", outcome.cleared_quantity},
                       {"total_cost", outcome.total_cost},
                       {"interior", outcome.interior}};
}

void to_json(nlohmann::json& j, const TwoStageOutcome& outcome) {
    j = nlohmann::json{{"day_ahead", outcome.day_ahead},
                       {"real_time", outcome.real_time},
                       {"spread", outcome.spread},
                       {"total_cost", outcome.total_cost},
                       {"efficiency_gap", outcome.efficiency_gap}};
}

}  // namespace tsm::market

namespace tsm::cournot {

void to_json(nlohmann::json& j, const PlayerDecision& decision) {
    j = nlohmann::json{
        {"da", decision.da}, {"rt", decision.rt}, {"is_virtual", decision.is_virtual}};
}

void to_json(nlohmann::json& j, const CournotSolution& solution) {
    j = nlohmann::json{{"decisions", solution.decisions},
                       {"total_da", solution.total_da},
                       {"total_rt", solution.total_rt},
                       {"price_da", solution.price_da},
                       {"price_rt", solution.price_rt},
                       {"spread", solution.spread},
                       {"expenditures", solution.expenditures},
                       {"method", solve_method_name(solution.method)},
                       {"iterations", solution.iterations},
                       {"converged", solution.converged}};
}

}  // namespace tsm::cournot

namespace tsm::empirics {

void to_json(nlohmann::json& j, const RegressionFit& fit) {
    nlohmann::json coefficients = nlohmann::json::object();
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        coefficients[fit.names[i]] = {{"estimate", fit.coefficients[i]},
                                      {"std_error", fit.std_errors[i]},
                                      {"p_value", fit.p_values[i]}};
    }
    j = nlohmann::json{{"coefficients", coefficients},
                       {"rmse", fit.rmse},
                       {"r_squared", fit.r_squared},
                       {"n", fit.n}};
}

void to_json(nlohmann::json& j, const EventStudyResult& result) {
    nlohmann::json buckets = nlohmann::json::array();
    for (const auto& bucket : result.buckets) {
        buckets.push_back({{"period", bucket.period}, {"share", bucket.share}});
    }
    j = nlohmann::json{{"buckets", buckets},
                       {"pre_mean", result.pre_mean},
                       {"post_mean", result.post_mean},
                       {"difference", result.difference},
                       {"warnings", result.warnings}};
}

}  // namespace tsm::empirics
