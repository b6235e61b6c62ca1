#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace resdn {

/// Exact fraction with 64-bit numerator and positive 64-bit denominator,
/// always stored in lowest terms. Intermediate products use 128-bit
/// integers; a result that does not fit throws std::overflow_error.
///
/// Rates, link loads, utilities and interval bounds all live in this type
/// so that tests such as "utility == 0" or "u_min <= U <= u_max" are exact.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }

    [[nodiscard]] bool is_zero() const { return num_ == 0; }
    [[nodiscard]] bool is_positive() const { return num_ > 0; }
    [[nodiscard]] bool is_negative() const { return num_ < 0; }

    [[nodiscard]] double to_double() const;
    [[nodiscard]] std::string to_string() const;

    /// Parses "12", "-3", "7.79", "1e-3", "2.5E2" or "3/4" exactly.
    /// Throws std::invalid_argument on malformed input.
    static Rational parse(std::string_view text);

    /// Nearest fraction with denominator at most max_den (continued fractions).
    /// Only used where the input is already floating point, e.g. seeded draws.
    static Rational approximate(double value, std::int64_t max_den = 1'000'000);

    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace resdn
