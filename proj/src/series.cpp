#include "tsm/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tsm::empirics {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view text, double& value) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end && std::isfinite(value);
}

bool parse_int(std::string_view text, int& value) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

bool days_in_month_ok(int y, int m, int d) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    int limit = kDays[m - 1];
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (m == 2 && leap) limit = 29;
    return d <= limit;
}

}  // namespace

std::size_t MarketSeries::included_count() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(),
                      [](const MarketRecord& r) { return !r.excluded; }));
}

CsvError::CsvError(const std::string& summary, std::vector<std::string> items)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << summary;
          for (const std::string& item : items) os << "\n  " << item;
          return os.str();
      }()),
      items_(std::move(items)) {}

std::int64_t parse_timestamp(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        throw std::invalid_argument("empty timestamp");
    }

    // Plain integer: Unix seconds.
    const bool all_digits = text.find_first_not_of("0123456789", text[0] == '-' ? 1 : 0) ==
                            std::string_view::npos;
    if (all_digits) {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc() && ptr == text.data() + text.size()) return value;
        throw std::invalid_argument("invalid epoch timestamp '" + std::string(text) + "'");
    }

    // ISO-8601: YYYY-MM-DD, optional [T or space] HH:MM[:SS], optional Z.
    int y = 0, mo = 0, da = 0, hh = 0, mi = 0, ss = 0;
    std::string s(text);
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.pop_back();
    const bool ok = [&] {
        if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
        if (!parse_int(std::string_view(s).substr(0, 4), y) ||
            !parse_int(std::string_view(s).substr(5, 2), mo) ||
            !parse_int(std::string_view(s).substr(8, 2), da)) {
            return false;
        }
        if (s.size() == 10) return true;
        if (s[10] != 'T' && s[10] != ' ') return false;
        if (s.size() < 16 || s[13] != ':') return false;
        if (!parse_int(std::string_view(s).substr(11, 2), hh) ||
            !parse_int(std::string_view(s).substr(14, 2), mi)) {
            return false;
        }
        if (s.size() == 16) return true;
        if (s.size() != 19 || s[16] != ':') return false;
        return parse_int(std::string_view(s).substr(17, 2), ss);
    }();
    if (!ok || !days_in_month_ok(y, mo, da) || hh < 0 || hh > 23 || mi < 0 || mi > 59 ||
        ss < 0 || ss > 60) {
        throw std::invalid_argument("invalid timestamp '" + std::string(text) + "'");
    }
    return days_from_civil(y, mo, da) * 86400 + hh * 3600 + mi * 60 + ss;
}

std::string format_timestamp(std::int64_t unix_seconds) {
    std::int64_t days = unix_seconds / 86400;
    std::int64_t rem = unix_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y = 0;
    unsigned mo = 0, da = 0;
    civil_from_days(days, y, mo, da);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, mo, da,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

namespace {

void civil_of(std::int64_t unix_seconds, int& y, unsigned& mo, unsigned& da) {
    std::int64_t days = unix_seconds / 86400;
    if (unix_seconds % 86400 < 0) --days;
    civil_from_days(days, y, mo, da);
}

}  // namespace

std::string day_label(std::int64_t unix_seconds) {
    int y;
    unsigned mo, da;
    civil_of(unix_seconds, y, mo, da);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, mo, da);
    return buf;
}

std::string month_label(std::int64_t unix_seconds) {
    int y;
    unsigned mo, da;
    civil_of(unix_seconds, y, mo, da);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", y, mo);
    return buf;
}

std::string quarter_label(std::int64_t unix_seconds) {
    int y;
    unsigned mo, da;
    civil_of(unix_seconds, y, mo, da);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-Q%u", y, (mo - 1) / 3 + 1);
    return buf;
}

CsvTable read_csv_columns(const std::string& path, const std::vector<std::string>& wanted) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError("'" + path + "': empty file", {});
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string_view> header = split_fields(line);
    std::vector<std::size_t> positions;
    std::vector<std::string> missing;
    for (const std::string& name : wanted) {
        auto it = std::find(header.begin(), header.end(), std::string_view(name));
        if (it == header.end()) {
            missing.push_back("missing column '" + name + "'");
        } else {
            positions.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    }
    if (!missing.empty()) {
        throw CsvError("'" + path + "': header does not match expected columns", std::move(missing));
    }

    CsvTable table;
    table.columns = wanted;
    std::size_t line_no = 1;
    std::vector<std::string> errors;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string_view> fields = split_fields(line);
        std::vector<std::string> row;
        row.reserve(wanted.size());
        bool row_ok = true;
        for (std::size_t c = 0; c < wanted.size(); ++c) {
            if (positions[c] >= fields.size()) {
                errors.push_back("line " + std::to_string(line_no) + ": missing column '" +
                                 wanted[c] + "'");
                row_ok = false;
                break;
            }
            row.emplace_back(fields[positions[c]]);
        }
        if (row_ok) {
            table.rows.push_back(std::move(row));
            table.line_numbers.push_back(line_no);
        }
    }
    if (!errors.empty()) {
        throw CsvError("'" + path + "': malformed rows", std::move(errors));
    }
    return table;
}

MarketSeries load_market_csv(const std::string& path, const ColumnMap& columns) {
    const CsvTable table = read_csv_columns(
        path, {columns.timestamp, columns.da_load, columns.rt_load, columns.da_price,
               columns.rt_price});

    MarketSeries series;
    series.records.reserve(table.rows.size());
    std::vector<std::string> errors;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        MarketRecord rec;
        try {
            rec.timestamp = parse_timestamp(row[0]);
        } catch (const std::invalid_argument& e) {
            errors.push_back("line " + std::to_string(line) + ", column '" + columns.timestamp +
                             "': " + e.what());
            continue;
        }
        struct Cell {
            const std::string* name;
            const std::string* text;
            double* slot;
        };
        const Cell cells[] = {{&columns.da_load, &row[1], &rec.da_load},
                              {&columns.rt_load, &row[2], &rec.rt_load},
                              {&columns.da_price, &row[3], &rec.da_price},
                              {&columns.rt_price, &row[4], &rec.rt_price}};
        bool ok = true;
        for (const Cell& cell : cells) {
            if (!parse_double(*cell.text, *cell.slot)) {
                errors.push_back("line " + std::to_string(line) + ", column '" + *cell.name +
                                 "': non-numeric value '" + *cell.text + "'");
                ok = false;
            }
        }
        if (ok) series.records.push_back(rec);
    }
    if (!errors.empty()) {
        throw CsvError("'" + path + "': malformed rows", std::move(errors));
    }
    if (series.records.empty()) {
        throw CsvError("'" + path + "': no data rows", {});
    }

    std::stable_sort(series.records.begin(), series.records.end(),
                     [](const MarketRecord& a, const MarketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    for (std::size_t i = 1; i < series.records.size(); ++i) {
        if (series.records[i].timestamp == series.records[i - 1].timestamp) {
            throw CsvError("'" + path + "': non-increasing timestamps",
                           {"duplicate timestamp " +
                            format_timestamp(series.records[i].timestamp)});
        }
    }
    return series;
}

void mark_exclusions(MarketSeries& series,
                     std::span<const std::pair<std::int64_t, std::int64_t>> ranges) {
    for (MarketRecord& rec : series.records) {
        for (const auto& [from, to] : ranges) {
            if (rec.timestamp >= from && rec.timestamp <= to) {
                rec.excluded = true;
                break;
            }
        }
    }
}

}  // namespace tsm::empirics
