#pragma once

#include <json.hpp>

#include "tsm/cournot.hpp"
#include "tsm/event_study.hpp"
#include "tsm/market.hpp"
#include "tsm/regression.hpp"

// JSON views of the result types; field names mirror the structs.

namespace tsm::market {
void to_json(nlohmann::json& j, const ClearingOutcome& outcome);
void to_json(nlohmann::json& j, const TwoStageOutcome& outcome);
}  // namespace tsm::market

namespace tsm::cournot {
void to_json(nlohmann::json& j, const PlayerDecision& decision);
void to_json(nlohmann::json& j, const CournotSolution& solution);
}  // namespace tsm::cournot

namespace tsm::empirics {
void to_json(nlohmann::json& j, const RegressionFit& fit);
void to_json(nlohmann::json& j, const EventStudyResult& result);
}  // namespace tsm::empirics
