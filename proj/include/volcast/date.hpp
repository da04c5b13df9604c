#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace volcast {

// Calendar day stored as a serial count (days since 1970-01-01).
// Conversions use the standard civil-calendar algorithms.
class Date {
public:
    Date() = default;
    explicit Date(std::int64_t serial) : serial_(serial) {}
    Date(int year, unsigned month, unsigned day);

    // Parses strict ISO-8601 "YYYY-MM-DD". Throws DataError on malformed input.
    static Date parse(const std::string& iso);

    [[nodiscard]] std::int64_t serial() const { return serial_; }
    [[nodiscard]] std::string to_string() const;

    Date next() const { return Date(serial_ + 1); }

    auto operator<=>(const Date&) const = default;

private:
    std::int64_t serial_ = 0;
};

}  // namespace volcast
