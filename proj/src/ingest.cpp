#include "vbpbb/ingest.hpp"

#include "vbpbb/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace vbpbb {

GapPolicy parse_gap_policy(std::string_view text)
{
    if (text == "reject") {
        return GapPolicy::Reject;
    }
    if (text == "zero-fill") {
        return GapPolicy::ZeroFill;
    }
    throw InvalidParameter("unknown gap policy '" + std::string(text) +
                           "' (expected reject or zero-fill)");
}

void IngestConfig::validate() const
{
    if (!(population > 0.0) || !std::isfinite(population)) {
        throw InvalidParameter("population must be a positive number");
    }
    if (!(per > 0.0) || !std::isfinite(per)) {
        throw InvalidParameter("normalization base --per must be positive");
    }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row.front().empty())) {
            rows.push_back(std::move(row));
        }
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started) {
                throw ParseError("malformed CSV: stray quote on line " + std::to_string(line));
            }
            quoted = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            end_row();
            ++line;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (quoted) {
        throw ParseError("malformed CSV: unterminated quoted field");
    }
    if (field_started || !row.empty()) {
        end_row();
    }
    return rows;
}

namespace {

std::string trim_ws(std::string s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

TimeSeries parse_daily_csv(std::string_view text, const IngestConfig& cfg)
{
    const auto rows = parse_csv(text);
    if (rows.empty()) {
        throw ParseError("CSV is empty; a header row is required");
    }
    const auto& header = rows.front();
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim_ws(header[i]) == name) {
                return i;
            }
        }
        throw ParseError("CSV header has no column named '" + name + "'");
    };
    const std::size_t date_col = column(cfg.date_column);
    const std::size_t value_col = column(cfg.value_column);

    struct Row {
        Date date;
        double value;
        std::size_t line;
    };
    std::vector<Row> parsed;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        const std::size_t line = r + 1;
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(header.size()));
        }
        const std::string date_text = trim_ws(fields[date_col]);
        const auto date = Date::parse(date_text);
        if (!date) {
            throw ParseError("row " + std::to_string(line) + ": cannot parse date '" + date_text +
                             "' (expected YYYY-MM-DD)");
        }
        const std::string value_text = trim_ws(fields[value_col]);
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
        if (value_text.empty() || ec != std::errc() || ptr != value_text.data() + value_text.size() ||
            !std::isfinite(value)) {
            throw ParseError("row " + std::to_string(line) + ": cannot parse value '" + value_text + "'");
        }
        parsed.push_back({*date, value, line});
    }
    if (parsed.empty()) {
        throw ParseError("CSV has a header but no data rows");
    }

    std::stable_sort(parsed.begin(), parsed.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    std::vector<double> values;
    values.reserve(parsed.size());
    values.push_back(parsed.front().value);
    for (std::size_t i = 1; i < parsed.size(); ++i) {
        const auto step = days_between(parsed[i - 1].date, parsed[i].date);
        if (step == 0) {
            throw DuplicateDate("row " + std::to_string(parsed[i].line) + ": duplicate date " +
                                parsed[i].date.iso() + " (also on row " +
                                std::to_string(parsed[i - 1].line) + ")");
        }
        if (step > 1) {
            if (cfg.gap_policy == GapPolicy::Reject) {
                throw GapError("missing date " + parsed[i - 1].date.plus_days(1).iso() +
                               " (gap of " + std::to_string(step - 1) + " day(s) before row " +
                               std::to_string(parsed[i].line) + ")");
            }
            values.insert(values.end(), static_cast<std::size_t>(step - 1), 0.0);
        }
        values.push_back(parsed[i].value);
    }
    return TimeSeries(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                        static_cast<Eigen::Index>(values.size())),
                      0, parsed.front().date);
}

TimeSeries load_csv(const IngestConfig& cfg)
{
    cfg.validate();
    return parse_daily_csv(read_file(cfg.input_path), cfg);
}

IncidentSeries cumulative_to_incident(const TimeSeries& series)
{
    const auto& in = series.values();
    Eigen::VectorXd out(in.size());
    out[0] = in[0];
    std::int64_t negatives = 0;
    for (Eigen::Index t = 1; t < in.size(); ++t) {
        out[t] = in[t] - in[t - 1];
        negatives += out[t] < 0.0 ? 1 : 0;
    }
    return {TimeSeries(std::move(out), series.origin_index(), series.origin_label()), negatives};
}

TimeSeries normalize_per_capita(const TimeSeries& series, double population, double per)
{
    if (!(population > 0.0) || !std::isfinite(population)) {
        throw InvalidParameter("population must be a positive number");
    }
    if (!(per > 0.0) || !std::isfinite(per)) {
        throw InvalidParameter("normalization base must be positive");
    }
    return TimeSeries(series.values() * (per / population), series.origin_index(),
                      series.origin_label());
}

} // namespace vbpbb
