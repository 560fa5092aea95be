#pragma once

#include "vbpbb/series.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vbpbb {

enum class GapPolicy { Reject, ZeroFill };

GapPolicy parse_gap_policy(std::string_view text);

struct IngestConfig {
    std::filesystem::path input_path;
    std::string date_column = "date";
    std::string value_column = "value";
    bool cumulative = false;
    double population = 1.0;
    double per = 100000.0;
    GapPolicy gap_policy = GapPolicy::Reject;
    bool normalize = false; ///< apply per/population scaling

    void validate() const;
};

/// RFC-4180 style rows (quoted fields, doubled quotes, CRLF tolerated).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// One sample per calendar day, sorted by date. Throws ParseError,
/// DuplicateDate or GapError naming the offending row or date.
TimeSeries load_csv(const IngestConfig& cfg);
TimeSeries parse_daily_csv(std::string_view text, const IngestConfig& cfg);

struct IncidentSeries {
    TimeSeries series;
    std::int64_t negative_increments = 0; ///< reporting corrections kept as-is
};

/// out(0) = in(0), out(t) = in(t) - in(t-1).
IncidentSeries cumulative_to_incident(const TimeSeries& series);

/// Multiplies every sample by per / population.
TimeSeries normalize_per_capita(const TimeSeries& series, double population, double per = 100000.0);

} // namespace vbpbb
