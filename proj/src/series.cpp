#include "vbpbb/series.hpp"

#include "vbpbb/errors.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace vbpbb {

using json = nlohmann::json;

__extension__ using int128_t = __int128;

Frequency::Frequency(std::int64_t numerator, std::int64_t denominator)
{
    if (denominator <= 0 || numerator < 0) {
        throw InvalidParameter("frequency must be a nonnegative ratio with positive denominator");
    }
    const std::int64_t g = std::gcd(numerator, denominator);
    num_ = numerator / g;
    den_ = denominator / g;
}

Frequency Frequency::parse(std::string_view text)
{
    auto parse_int = [&](std::string_view part) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
            throw InvalidParameter("cannot parse frequency '" + std::string(text) + "'");
        }
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Frequency(parse_int(text), 1);
    }
    return Frequency(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::string Frequency::str() const
{
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Frequency& a, const Frequency& b)
{
    const int128_t lhs = static_cast<int128_t>(a.num_) * b.den_;
    const int128_t rhs = static_cast<int128_t>(b.num_) * a.den_;
    if (lhs < rhs) {
        return std::strong_ordering::less;
    }
    if (lhs > rhs) {
        return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

Frequency abs_difference(const Frequency& a, const Frequency& b)
{
    const std::int64_t l = std::lcm(a.denominator(), b.denominator());
    const std::int64_t x = a.numerator() * (l / a.denominator());
    const std::int64_t y = b.numerator() * (l / b.denominator());
    return Frequency(x > y ? x - y : y - x, l);
}

TimeSeries::TimeSeries(Eigen::VectorXd values, std::int64_t origin_index,
                       std::optional<Date> origin_label)
    : values_(std::move(values)), origin_index_(origin_index), origin_label_(origin_label)
{
    if (values_.size() < 1) {
        throw InsufficientData("time series must contain at least one sample");
    }
    if (origin_index_ < 0) {
        throw InvalidParameter("origin_index must be nonnegative");
    }
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DataError("non-finite sample at index " + std::to_string(i));
        }
    }
}

std::int64_t phase_of_absolute(std::int64_t absolute_index, std::int64_t period)
{
    if (period <= 0) {
        throw InvalidPeriod("period must be a positive integer");
    }
    const std::int64_t r = absolute_index % period;
    return r < 0 ? r + period : r;
}

std::int64_t TimeSeries::phase_of(Eigen::Index t, std::int64_t period) const
{
    if (period <= 0) {
        throw InvalidPeriod("period must be a positive integer");
    }
    if (t < 0 || t >= size()) {
        throw BoundsError("sample index " + std::to_string(t) + " outside series of length " +
                          std::to_string(size()));
    }
    return phase_of_absolute(origin_index_ + t, period);
}

std::optional<Date> TimeSeries::anchor_date() const
{
    if (!origin_label_) {
        return std::nullopt;
    }
    return origin_label_->plus_days(-origin_index_);
}

TimeSeries trim(const TimeSeries& series, Eigen::Index from, Eigen::Index to)
{
    if (from < 0 || to < from || to >= series.size()) {
        throw BoundsError("trim range [" + std::to_string(from) + ", " + std::to_string(to) +
                          "] outside series of length " + std::to_string(series.size()));
    }
    std::optional<Date> label;
    if (series.origin_label()) {
        label = series.origin_label()->plus_days(from);
    }
    return TimeSeries(series.values().segment(from, to - from + 1), series.origin_index() + from,
                      label);
}

ComponentSpec::ComponentSpec(std::int64_t period, std::int64_t harmonic,
                             std::optional<std::int64_t> block_period)
    : period_(period), harmonic_(harmonic), block_period_(block_period.value_or(period))
{
    if (period_ <= 0) {
        throw InvalidPeriod("period must be a positive integer");
    }
    if (harmonic_ <= 0) {
        throw InvalidParameter("harmonic index must be a positive integer");
    }
    if (2 * harmonic_ > period_) {
        throw InvalidParameter("harmonic " + std::to_string(harmonic_) + " of period " +
                               std::to_string(period_) + " exceeds the Nyquist frequency 1/2");
    }
    // Smallest integer multiple of the harmonic's true period P/j.
    const std::int64_t cycle = period_ / std::gcd(period_, harmonic_);
    if (block_period_ <= 0 || block_period_ % cycle != 0) {
        throw InvalidParameter("block period " + std::to_string(block_period_) +
                               " is not a multiple of " + std::to_string(cycle));
    }
}

std::string ComponentSpec::label() const
{
    return std::to_string(period_) + ":" + std::to_string(harmonic_);
}

ComponentSpec ComponentSpec::parse(std::string_view label)
{
    const auto colon = label.find(':');
    auto parse_int = [&](std::string_view part) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
            throw InvalidParameter("cannot parse component '" + std::string(label) +
                                   "' (expected PERIOD or PERIOD:HARMONIC)");
        }
        return v;
    };
    if (colon == std::string_view::npos) {
        return ComponentSpec(parse_int(label));
    }
    return ComponentSpec(parse_int(label.substr(0, colon)), parse_int(label.substr(colon + 1)));
}

std::string_view to_string(Method method)
{
    return method == Method::PBB ? "PBB" : "VBPBB";
}

Method parse_method(std::string_view text)
{
    if (text == "PBB" || text == "pbb") {
        return Method::PBB;
    }
    if (text == "VBPBB" || text == "vbpbb") {
        return Method::VBPBB;
    }
    throw InvalidParameter("unknown method '" + std::string(text) + "'");
}

void CIBand::validate() const
{
    if (lower.size() != median.size() || lower.size() != upper.size() || lower.size() == 0) {
        throw InvalidParameter("band curves must be nonempty and of equal length");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidParameter("alpha must lie in (0, 1)");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(median[i]) || !std::isfinite(upper[i])) {
            throw InvalidParameter("band is not finite at phase " + std::to_string(i));
        }
        if (lower[i] > median[i] || median[i] > upper[i]) {
            throw InvalidParameter("band ordering violated at phase " + std::to_string(i));
        }
    }
}

std::string CIBand::calendar_label(Eigen::Index phase) const
{
    return phase_zero_date ? phase_zero_date->plus_days(phase).iso() : std::string();
}

std::string series_to_json(const TimeSeries& series)
{
    json doc;
    doc["origin_index"] = series.origin_index();
    doc["origin_label"] = series.origin_label() ? json(series.origin_label()->iso()) : json(nullptr);
    std::vector<double> values(series.values().data(),
                               series.values().data() + series.values().size());
    doc["values"] = values;
    return doc.dump() + "\n";
}

TimeSeries series_from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed series JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("values") || !doc["values"].is_array()) {
        throw ParseError("series JSON must be an object with a \"values\" array");
    }
    std::int64_t origin = 0;
    if (doc.contains("origin_index")) {
        if (!doc["origin_index"].is_number_integer()) {
            throw ParseError("origin_index must be an integer");
        }
        origin = doc["origin_index"].get<std::int64_t>();
    }
    std::optional<Date> label;
    if (doc.contains("origin_label") && !doc["origin_label"].is_null()) {
        if (!doc["origin_label"].is_string()) {
            throw ParseError("origin_label must be a YYYY-MM-DD string or null");
        }
        label = Date::parse(doc["origin_label"].get<std::string>());
        if (!label) {
            throw ParseError("origin_label is not a valid YYYY-MM-DD date");
        }
    }
    const auto& arr = doc["values"];
    Eigen::VectorXd values(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
            throw ParseError("values[" + std::to_string(i) + "] is not a number");
        }
        values[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return TimeSeries(std::move(values), origin, label);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TimeSeries load_series(const std::filesystem::path& path)
{
    return series_from_json(read_file(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write '" + tmp.string() + "'");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw DataError("write failed for '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace vbpbb
