#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vbpbb {

/// Calendar day, ordered and differenced by whole days.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days day) : day_(day) {}

    /// Strict YYYY-MM-DD; nullopt for anything else, including impossible dates.
    static std::optional<Date> parse(std::string_view text);

    std::string iso() const;
    std::chrono::sys_days days() const { return day_; }

    Date plus_days(std::int64_t count) const
    {
        return Date(day_ + std::chrono::days(count));
    }

    friend std::int64_t days_between(const Date& from, const Date& to)
    {
        return (to.day_ - from.day_).count();
    }

    auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days day_{};
};

} // namespace vbpbb
