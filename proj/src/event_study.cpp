#include "tsm/event_study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tsm::empirics {

EventStudyResult event_study(std::span<const SharePeriod> periods,
                             const std::string& break_period) {
    if (break_period.empty()) {
        throw std::invalid_argument("event_study: break period must be nonempty");
    }

    EventStudyResult result;
    double pre_sum = 0.0, post_sum = 0.0;
    int pre_count = 0, post_count = 0;
    for (const SharePeriod& p : periods) {
        if (p.total_load == 0.0) {
            result.warnings.push_back("period " + p.period + ": zero total load, excluded");
            continue;
        }
        const double share = p.da_real_load / p.total_load;
        if (!(share >= 0.0) || !(share <= 1.0)) {
            throw std::invalid_argument("event_study: share outside [0, 1] in period " + p.period);
        }
        result.buckets.push_back({p.period, share});
        if (p.period < break_period) {
            pre_sum += share;
            ++pre_count;
        } else {
            post_sum += share;
            ++post_count;
        }
    }
    if (pre_count < 2 || post_count < 2) {
        throw std::invalid_argument(
            "event_study: need at least 2 periods on each side of the break");
    }
    std::sort(result.buckets.begin(), result.buckets.end(),
              [](const auto& a, const auto& b) { return a.period < b.period; });
    result.pre_mean = pre_sum / pre_count;
    result.post_mean = post_sum / post_count;
    result.difference = result.post_mean - result.pre_mean;
    return result;
}

std::vector<SharePeriod> bucket_load_shares(std::span<const LoadShareRecord> rows,
                                            BucketGranularity granularity) {
    std::map<std::string, SharePeriod> buckets;
    for (const LoadShareRecord& row : rows) {
        std::string label;
        switch (granularity) {
            case BucketGranularity::Daily: label = day_label(row.timestamp); break;
            case BucketGranularity::Monthly: label = month_label(row.timestamp); break;
            case BucketGranularity::Quarterly: label = quarter_label(row.timestamp); break;
        }
        SharePeriod& bucket = buckets[label];
        bucket.period = label;
        bucket.da_real_load += row.da_real_load;
        bucket.total_load += row.total_load;
    }
    std::vector<SharePeriod> out;
    out.reserve(buckets.size());
    for (auto& [label, bucket] : buckets) out.push_back(std::move(bucket));
    return out;
}

std::vector<LoadShareRecord> load_share_csv(const std::string& path,
                                            const ShareColumnMap& columns) {
    const CsvTable table =
        read_csv_columns(path, {columns.timestamp, columns.da_real_load, columns.total_load});

    std::vector<LoadShareRecord> rows;
    rows.reserve(table.rows.size());
    std::vector<std::string> errors;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        LoadShareRecord rec;
        try {
            rec.timestamp = parse_timestamp(row[0]);
        } catch (const std::invalid_argument& e) {
            errors.push_back("line " + std::to_string(line) + ", column '" + columns.timestamp +
                             "': " + e.what());
            continue;
        }
        const std::pair<const std::string*, double*> cells[] = {
            {&columns.da_real_load, &rec.da_real_load},
            {&columns.total_load, &rec.total_load}};
        bool ok = true;
        for (std::size_t c = 0; c < 2; ++c) {
            const std::string& text = row[c + 1];
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
                errors.push_back("line " + std::to_string(line) + ", column '" + *cells[c].first +
                                 "': non-numeric value '" + text + "'");
                ok = false;
            } else {
                *cells[c].second = value;
            }
        }
        if (ok) rows.push_back(rec);
    }
    if (!errors.empty()) {
        throw CsvError("'" + path + "': malformed rows", std::move(errors));
    }
    if (rows.empty()) {
        throw CsvError("'" + path + "': no data rows", {});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const LoadShareRecord& a,
                                                  const LoadShareRecord& b) {
        return a.timestamp < b.timestamp;
    });
    return rows;
}

}  // namespace tsm::empirics
