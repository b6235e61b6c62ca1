#include "resdn/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace resdn {
namespace {

using Wide = __int128;

Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

Wide wide_gcd(Wide a, Wide b) {
    a = wide_abs(a);
    b = wide_abs(b);
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits(Wide v) {
    return v >= std::numeric_limits<std::int64_t>::min() &&
           v <= std::numeric_limits<std::int64_t>::max();
}

Wide pow10(int exp) {
    Wide r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= 10;
        if (!fits(r)) throw std::overflow_error("rational: exponent too large");
    }
    return r;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational: zero denominator");
    *this = from_wide(num, den);
}

Rational Rational::from_wide(Wide num, Wide den) {
    if (den == 0) throw std::domain_error("rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Wide g = wide_gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0) den = 1;
    if (!fits(num) || !fits(den)) throw std::overflow_error("rational: value out of 64-bit range");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

double Rational::to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
    if (den_ == 1) return fmt::format("{}", num_);
    return fmt::format("{}/{}", num_, den_);
}

Rational Rational::parse(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw std::invalid_argument(fmt::format("not a number: '{}'", text));
    };
    if (text.empty()) return fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational n = parse(text.substr(0, slash));
        Rational d = parse(text.substr(slash + 1));
        if (d.is_zero()) throw std::invalid_argument(fmt::format("zero denominator in '{}'", text));
        return n / d;
    }

    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    Wide mantissa = 0;
    int frac_digits = 0;
    bool any_digit = false;
    bool in_fraction = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            any_digit = true;
            mantissa = mantissa * 10 + (c - '0');
            if (!fits(mantissa)) throw std::overflow_error(fmt::format("number too long: '{}'", text));
            if (in_fraction) ++frac_digits;
        } else if (c == '.' && !in_fraction) {
            in_fraction = true;
        } else {
            break;
        }
    }
    if (!any_digit) return fail();

    int exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') return fail();
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_negative = text[i] == '-';
            ++i;
        }
        if (i >= text.size()) return fail();
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (c < '0' || c > '9') return fail();
            exponent = exponent * 10 + (c - '0');
            if (exponent > 36) throw std::overflow_error(fmt::format("exponent too large: '{}'", text));
        }
        if (exp_negative) exponent = -exponent;
    }

    int scale = exponent - frac_digits;
    Wide num = negative ? -mantissa : mantissa;
    if (scale >= 0) return from_wide(num * pow10(scale), 1);
    return from_wide(num, pow10(-scale));
}

Rational Rational::approximate(double value, std::int64_t max_den) {
    if (!std::isfinite(value)) throw std::invalid_argument("rational: non-finite value");
    bool negative = value < 0;
    double x = std::fabs(value);
    // Convergents h/k of the continued fraction of x.
    Wide h_prev = 1, h = static_cast<Wide>(std::floor(x));
    Wide k_prev = 0, k = 1;
    double frac = x - std::floor(x);
    while (frac > 1e-15) {
        double inv = 1.0 / frac;
        Wide a = static_cast<Wide>(std::floor(inv));
        Wide k_next = a * k + k_prev;
        if (k_next > max_den) break;
        Wide h_next = a * h + h_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        frac = inv - std::floor(inv);
    }
    return from_wide(negative ? -h : h, k);
}

Rational& Rational::operator+=(const Rational& rhs) {
    Wide g = wide_gcd(den_, rhs.den_);
    Wide lhs_scale = rhs.den_ / g;
    Wide rhs_scale = den_ / g;
    *this = from_wide(static_cast<Wide>(num_) * lhs_scale + static_cast<Wide>(rhs.num_) * rhs_scale,
                      static_cast<Wide>(den_) * lhs_scale);
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
    // Cross-reduce first so the 128-bit products stay small.
    Wide g1 = wide_gcd(num_, rhs.den_);
    Wide g2 = wide_gcd(rhs.num_, den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    *this = from_wide((static_cast<Wide>(num_) / g1) * (static_cast<Wide>(rhs.num_) / g2),
                      (static_cast<Wide>(den_) / g2) * (static_cast<Wide>(rhs.den_) / g1));
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw std::domain_error("rational: division by zero");
    Rational inv;
    inv.num_ = rhs.den_;
    inv.den_ = rhs.num_;
    if (inv.den_ < 0) {
        inv.num_ = -inv.num_;
        inv.den_ = -inv.den_;
    }
    return *this *= inv;
}

Rational Rational::operator-() const {
    Rational r = *this;
    if (r.num_ == std::numeric_limits<std::int64_t>::min())
        throw std::overflow_error("rational: negation overflow");
    r.num_ = -r.num_;
    return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    Wide lhs = static_cast<Wide>(a.num_) * b.den_;
    Wide rhs = static_cast<Wide>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace resdn
