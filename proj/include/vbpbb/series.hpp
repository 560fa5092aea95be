#pragma once

#include "vbpbb/calendar.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace vbpbb {

/// Exact rational frequency in cycles per sample, kept in lowest terms.
class Frequency {
public:
    Frequency() = default;
    Frequency(std::int64_t numerator, std::int64_t denominator);

    /// Parses "NUM/DEN" or a bare integer.
    static Frequency parse(std::string_view text);

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend bool operator==(const Frequency& a, const Frequency& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Frequency& a, const Frequency& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// |a - b| as an exact rational.
Frequency abs_difference(const Frequency& a, const Frequency& b);

/// Regularly sampled, finite, real-valued series. Sample t sits at absolute
/// index origin_index + t; phases are taken from the absolute index so they
/// survive trimming.
class TimeSeries {
public:
    explicit TimeSeries(Eigen::VectorXd values, std::int64_t origin_index = 0,
                        std::optional<Date> origin_label = std::nullopt);

    const Eigen::VectorXd& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double operator[](Eigen::Index t) const { return values_[t]; }

    std::int64_t origin_index() const { return origin_index_; }
    const std::optional<Date>& origin_label() const { return origin_label_; }

    std::int64_t phase_of(Eigen::Index t, std::int64_t period) const;

    /// Date of absolute index 0, if the series carries a calendar label.
    std::optional<Date> anchor_date() const;

private:
    Eigen::VectorXd values_;
    std::int64_t origin_index_ = 0;
    std::optional<Date> origin_label_;
};

/// Phase of absolute index `absolute_index` in a cycle of `period` samples.
std::int64_t phase_of_absolute(std::int64_t absolute_index, std::int64_t period);

/// Inclusive subsequence [from, to]; origin_index and origin_label advance by `from`.
TimeSeries trim(const TimeSeries& series, Eigen::Index from, Eigen::Index to);

/// Periodic component: harmonic j of a fundamental period P (frequency j/P).
class ComponentSpec {
public:
    ComponentSpec(std::int64_t period, std::int64_t harmonic = 1,
                  std::optional<std::int64_t> block_period = std::nullopt);

    std::int64_t period() const { return period_; }
    std::int64_t harmonic() const { return harmonic_; }
    std::int64_t block_period() const { return block_period_; }
    Frequency frequency() const { return Frequency(harmonic_, period_); }

    /// "P:j", e.g. "365:2".
    std::string label() const;
    static ComponentSpec parse(std::string_view label);

    friend bool operator==(const ComponentSpec&, const ComponentSpec&) = default;
    friend auto operator<=>(const ComponentSpec&, const ComponentSpec&) = default;

private:
    std::int64_t period_;
    std::int64_t harmonic_;
    std::int64_t block_period_;
};

enum class Method { PBB, VBPBB };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

/// Per-phase confidence envelope for a periodic mean, one entry per phase
/// 0..P-1 of the absolute phase grid.
struct CIBand {
    Eigen::VectorXd lower;
    Eigen::VectorXd median;
    Eigen::VectorXd upper;
    double alpha = 0.05;
    ComponentSpec component;
    Method method = Method::PBB;
    std::optional<Date> phase_zero_date;

    Eigen::Index size() const { return lower.size(); }

    /// Throws InvalidParameter if the ordering/finiteness invariants fail.
    void validate() const;

    /// ISO date of the first occurrence of `phase`, or empty.
    std::string calendar_label(Eigen::Index phase) const;
};

// Interchange format: {"origin_index": int, "origin_label": "YYYY-MM-DD"|null, "values": [...]}
std::string series_to_json(const TimeSeries& series);
TimeSeries series_from_json(std::string_view text);
TimeSeries load_series(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

} // namespace vbpbb
