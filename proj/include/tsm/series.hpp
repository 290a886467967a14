#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Market time-series ingestion: CSV parsing with itemized row/column
// error reporting, strict chronological validation, and explicit
// exclusion windows (abnormal periods are removed by configuration,
// never by automatic outlier rejection).

namespace tsm::empirics {

struct MarketRecord {
    std::int64_t timestamp = 0;  // Unix seconds, UTC
    double da_load = 0.0;        // MW
    double rt_load = 0.0;        // MW, any sign
    double da_price = 0.0;       // currency/MWh
    double rt_price = 0.0;       // currency/MWh
    bool excluded = false;
};

struct MarketSeries {
    std::vector<MarketRecord> records;

    std::size_t included_count() const;
};

// CSV column names holding each field; defaults match the documented
// data format.
struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string da_load = "da_load";
    std::string rt_load = "rt_load";
    std::string da_price = "da_price";
    std::string rt_price = "rt_price";
};

// Parse failure carrying one item per offending row/column.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& summary, std::vector<std::string> items);
    const std::vector<std::string>& items() const { return items_; }

private:
    std::vector<std::string> items_;
};

/// Loads and validates a market CSV (header row required). Rows are
/// sorted chronologically; duplicate timestamps are an error. All
/// malformed cells are reported together, each naming its line and
/// column.
MarketSeries load_market_csv(const std::string& path, const ColumnMap& columns = {});

/// Marks records inside any [from, to] timestamp range as excluded.
void mark_exclusions(MarketSeries& series,
                     std::span<const std::pair<std::int64_t, std::int64_t>> ranges);

/// Accepts Unix seconds or ISO-8601 ("YYYY-MM-DD", optionally with
/// "[T ]HH:MM[:SS]"). Throws std::invalid_argument on anything else.
std::int64_t parse_timestamp(std::string_view text);

/// ISO-8601 "YYYY-MM-DDTHH:MM:SSZ" (UTC).
std::string format_timestamp(std::int64_t unix_seconds);

/// Calendar bucket labels for event studies: "YYYY-MM-DD", "YYYY-MM", or
/// "YYYY-Qn".
std::string day_label(std::int64_t unix_seconds);
std::string month_label(std::int64_t unix_seconds);
std::string quarter_label(std::int64_t unix_seconds);

// Minimal generic CSV table used by the loaders: selected columns by
// name, every cell parsed as text. Shared so other file formats (load
// share data) reuse the same validation and error reporting.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // cell text, aligned with columns
    std::vector<std::size_t> line_numbers;       // 1-based source line per row
};

CsvTable read_csv_columns(const std::string& path, const std::vector<std::string>& wanted);

}  // namespace tsm::empirics
