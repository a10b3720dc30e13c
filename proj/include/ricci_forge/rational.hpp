#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ricci_forge {

/// Exact rational number over int64 with overflow detection.
///
/// Always normalized: gcd(num, den) == 1 and den > 0. Every operation that
/// would leave the int64 range throws std::overflow_error instead of wrapping.
class Rational {
  public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return (num_ > 0) - (num_ < 0); }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const {
        if (num_ == INT64_MIN) throw std::overflow_error("rational negation overflow");
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        const __int128 n = static_cast<__int128>(a.num_) * (b.den_ / g) +
                           static_cast<__int128>(b.num_) * (a.den_ / g);
        const __int128 d = static_cast<__int128>(a.den_ / g) * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        const __int128 n = static_cast<__int128>(a.num_) * b.num_;
        const __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        const __int128 n = static_cast<__int128>(a.num_) * b.den_;
        const __int128 d = static_cast<__int128>(a.den_) * b.num_;
        return from_wide(n, d);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }

    /// Integer power; negative exponents invert.
    Rational pow(std::int64_t e) const {
        Rational base = e < 0 ? Rational(1) / *this : *this;
        std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
        Rational acc(1);
        while (k) {
            if (k & 1U) acc *= base;
            k >>= 1U;
            if (k) base *= base;
        }
        return acc;
    }

    /// Largest integer <= value.
    std::int64_t floor() const {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }

    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "p", "p/q", or a finite decimal such as "-1.25" or "2e-3" exactly.
    static Rational parse(std::string_view s);

  private:
    void assign(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        *this = from_wide(n, d);
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX)
            throw std::overflow_error("rational arithmetic overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational Rational::parse(std::string_view s) {
    auto fail = [&]() -> Rational {
        throw std::invalid_argument("not a rational literal: '" + std::string(s) + "'");
    };
    if (s.empty()) return fail();
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        return parse(s.substr(0, slash)) / parse(s.substr(slash + 1));
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    Rational value(0);
    bool digits = false;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
        value = value * 10 + Rational(s[i] - '0');
        digits = true;
    }
    if (i < s.size() && s[i] == '.') {
        Rational scale(1, 10);
        for (++i; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
            value += scale * Rational(s[i] - '0');
            scale = scale / 10;
            digits = true;
        }
    }
    if (!digits) return fail();
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        int exponent = 0;
        std::size_t start = i + 1;
        if (start < s.size() && s[start] == '+') ++start;
        auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + s.size(), exponent);
        if (ec != std::errc() || ptr != s.data() + s.size()) return fail();
        value *= Rational(10).pow(exponent);
        i = s.size();
    }
    if (i != s.size()) return fail();
    return neg ? -value : value;
}

/// Exact rational equal to the shortest decimal that round-trips `x`.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return Rational::parse(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace ricci_forge
