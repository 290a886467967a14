#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsm/series.hpp"

// Before/after comparison of the day-ahead real-load share around a
// structural break (e.g. the introduction of virtual bidding). The
// share of real demand cleared day-ahead drops when financial
// participants enter the day-ahead market.

namespace tsm::empirics {

struct SharePeriod {
    std::string period;        // sortable label, e.g. "2001-11"
    double da_real_load = 0.0; // MW cleared day-ahead by real loads
    double total_load = 0.0;   // MW actual total load
};

struct EventStudyResult {
    struct Bucket {
        std::string period;
        double share = 0.0;
    };
    std::vector<Bucket> buckets;   // chronological
    double pre_mean = 0.0;
    double post_mean = 0.0;
    double difference = 0.0;       // post_mean - pre_mean
    std::vector<std::string> warnings;
};

/// Computes per-period shares and the pre/post means around
/// `break_period` (the first period of the post regime; labels compare
/// lexicographically, so use ISO-style labels). Periods with zero total
/// load are dropped with a warning. Requires >= 2 periods on each side.
EventStudyResult event_study(std::span<const SharePeriod> periods,
                             const std::string& break_period);

// Row-level input for the CLI path: per-interval day-ahead real load
// and actual total load.
struct LoadShareRecord {
    std::int64_t timestamp = 0;
    double da_real_load = 0.0;
    double total_load = 0.0;
};

enum class BucketGranularity { Daily, Monthly, Quarterly };

/// Sums rows into calendar buckets; share denominators aggregate before
/// division.
std::vector<SharePeriod> bucket_load_shares(std::span<const LoadShareRecord> rows,
                                            BucketGranularity granularity);

struct ShareColumnMap {
    std::string timestamp = "timestamp";
    std::string da_real_load = "da_real_load";
    std::string total_load = "total_load";
};

std::vector<LoadShareRecord> load_share_csv(const std::string& path,
                                            const ShareColumnMap& columns = {});

}  // namespace tsm::empirics
