#pragma once

/// @file carbon_ledger/decimal.hpp
/// @brief Exact decimal arithmetic backed by arbitrary-precision rationals.
///
/// Values parse from plain decimal text and stay exact through every
/// operation, division included. Rounding happens only when a value is
/// formatted for display, and always rounds half to even.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace carbon_ledger {

/// Thrown when text cannot be parsed as a plain decimal number.
class DecimalParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt pow10(int exponent) {
  BigInt result = 1;
  for (int i = 0; i < exponent; ++i) result *= 10;
  return result;
}

// Rounds num/den (den > 0) to the nearest integer, ties to even.
inline BigInt div_round_half_even(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  BigInt r = num % den;
  if (r < 0) {
    r += den;
    q -= 1;
  }
  const BigInt twice = r * 2;
  if (twice > den || (twice == den && (q & 1) != 0)) q += 1;
  return q;
}

inline std::size_t decimal_digits(BigInt v) {
  if (v < 0) v = -v;
  return v == 0 ? 1 : v.str().size();
}

}  // namespace detail

/// Exact rational number with decimal text I/O.
class Decimal {
 public:
  Decimal() = default;
  Decimal(std::int64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  explicit Decimal(detail::BigRational v) : value_(std::move(v)) {}

  static Decimal ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("Decimal: zero denominator");
    return Decimal(detail::BigRational(num, den));
  }

  /// Parses `[-]digits[.digits]`. Exponents, signs other than a leading
  /// minus, separators and whitespace are rejected.
  static Decimal parse(std::string_view text) {
    auto parsed = try_parse(text);
    if (!parsed) {
      throw DecimalParseError("not a plain decimal: '" + std::string(text) + "'");
    }
    return *parsed;
  }

  static std::optional<Decimal> try_parse(std::string_view text) {
    bool negative = false;
    if (!text.empty() && text.front() == '-') {
      negative = true;
      text.remove_prefix(1);
    }
    const auto dot = text.find('.');
    const std::string_view int_part = text.substr(0, dot);
    const std::string_view frac_part =
        dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (int_part.empty()) return std::nullopt;
    if (dot != std::string_view::npos && frac_part.empty()) return std::nullopt;
    for (char c : int_part)
      if (c < '0' || c > '9') return std::nullopt;
    for (char c : frac_part)
      if (c < '0' || c > '9') return std::nullopt;

    // A leading zero would make the string constructor read octal.
    std::string all = std::string(int_part) + std::string(frac_part);
    all.erase(0, std::min(all.find_first_not_of('0'), all.size() - 1));
    detail::BigInt num(all);
    if (negative) num = -num;
    return Decimal(detail::BigRational(
        num, detail::pow10(static_cast<int>(frac_part.size()))));
  }

  /// Number of digits after the decimal point as written in `text`.
  static std::size_t written_scale(std::string_view text) {
    const auto dot = text.find('.');
    return dot == std::string_view::npos ? 0 : text.size() - dot - 1;
  }

  const detail::BigRational& rational() const { return value_; }
  detail::BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  detail::BigInt denominator() const { return boost::multiprecision::denominator(value_); }

  int sign() const { return value_.sign(); }
  bool is_zero() const { return value_ == 0; }
  bool is_negative() const { return value_ < 0; }
  bool is_integer() const { return denominator() == 1; }

  /// True when the value has a finite decimal expansion.
  bool is_terminating() const {
    detail::BigInt den = denominator();
    while (den % 2 == 0) den /= 2;
    while (den % 5 == 0) den /= 5;
    return den == 1;
  }

  /// Digits after the point in the shortest exact expansion; nullopt if
  /// the expansion does not terminate.
  std::optional<int> scale() const {
    if (!is_terminating()) return std::nullopt;
    int places = 0;
    detail::BigRational scaled = value_;
    while (boost::multiprecision::denominator(scaled) != 1) {
      scaled *= 10;
      ++places;
    }
    return places;
  }

  /// Shortest exact decimal text (no exponent, no trailing zeros).
  /// Throws std::domain_error for non-terminating values.
  std::string to_string() const {
    auto places = scale();
    if (!places) throw std::domain_error("Decimal: non-terminating expansion");
    return format_scaled(numerator() * detail::pow10(*places) / denominator(), *places,
                         true);
  }

  /// Exact text: the decimal expansion when it terminates, `num/den` otherwise.
  std::string exact_string() const {
    if (is_terminating()) return to_string();
    return numerator().str() + "/" + denominator().str();
  }

  /// Inverse of exact_string().
  static Decimal parse_exact(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse(text);
    const Decimal num = parse(text.substr(0, slash));
    const Decimal den = parse(text.substr(slash + 1));
    if (!num.is_integer() || !den.is_integer() || den.sign() <= 0) {
      throw DecimalParseError("not an exact fraction: '" + std::string(text) + "'");
    }
    return num / den;
  }

  /// Rounds to `places` digits after the point (negative places round to
  /// tens, hundreds, ...), ties to even.
  Decimal round_places(int places) const {
    detail::BigRational scaled = value_;
    if (places >= 0) {
      scaled *= detail::BigRational(detail::pow10(places));
    } else {
      scaled /= detail::BigRational(detail::pow10(-places));
    }
    detail::BigInt rounded = detail::div_round_half_even(
        boost::multiprecision::numerator(scaled), boost::multiprecision::denominator(scaled));
    if (places >= 0) {
      return Decimal(detail::BigRational(rounded, detail::pow10(places)));
    }
    return Decimal(detail::BigRational(rounded * detail::pow10(-places)));
  }

  /// Power of ten of the leading digit: floor(log10(|x|)). Zero maps to 0.
  int magnitude() const {
    if (is_zero()) return 0;
    detail::BigInt num = numerator();
    if (num < 0) num = -num;
    const detail::BigInt den = denominator();
    int e = static_cast<int>(detail::decimal_digits(num)) -
            static_cast<int>(detail::decimal_digits(den));
    // |x| lies in [10^(e-1), 10^(e+1)); settle on the exact exponent.
    const auto at_least = [&](int exp) {
      return exp >= 0 ? num >= den * detail::pow10(exp) : num * detail::pow10(-exp) >= den;
    };
    while (!at_least(e)) --e;
    while (at_least(e + 1)) ++e;
    return e;
  }

  /// Rounds to `digits` significant digits, ties to even.
  Decimal round_significant(int digits) const {
    if (digits < 1) throw std::invalid_argument("significant digits must be >= 1");
    if (is_zero()) return *this;
    return round_places(digits - 1 - magnitude());
  }

  /// Display text rounded to `digits` significant digits, trailing zeros
  /// trimmed.
  std::string format_significant(int digits) const {
    return round_significant(digits).to_string();
  }

  /// Display text with exactly `places` digits after the point.
  std::string format_fixed(int places) const {
    const Decimal rounded = round_places(places);
    return format_scaled(rounded.numerator() * detail::pow10(places) / rounded.denominator(),
                         places, false);
  }

  double to_double() const { return value_.convert_to<double>(); }

  friend Decimal operator+(const Decimal& a, const Decimal& b) { return Decimal(a.value_ + b.value_); }
  friend Decimal operator-(const Decimal& a, const Decimal& b) { return Decimal(a.value_ - b.value_); }
  friend Decimal operator*(const Decimal& a, const Decimal& b) { return Decimal(a.value_ * b.value_); }
  friend Decimal operator/(const Decimal& a, const Decimal& b) {
    if (b.is_zero()) throw std::domain_error("Decimal: division by zero");
    return Decimal(a.value_ / b.value_);
  }
  Decimal operator-() const { return Decimal(-value_); }
  Decimal& operator+=(const Decimal& o) { value_ += o.value_; return *this; }
  Decimal& operator-=(const Decimal& o) { value_ -= o.value_; return *this; }
  Decimal& operator*=(const Decimal& o) { value_ *= o.value_; return *this; }
  Decimal& operator/=(const Decimal& o) { return *this = *this / o; }

  friend bool operator==(const Decimal& a, const Decimal& b) { return a.value_ == b.value_; }
  friend bool operator<(const Decimal& a, const Decimal& b) { return a.value_ < b.value_; }
  friend bool operator>(const Decimal& a, const Decimal& b) { return b < a; }
  friend bool operator<=(const Decimal& a, const Decimal& b) { return !(b < a); }
  friend bool operator>=(const Decimal& a, const Decimal& b) { return !(a < b); }

 private:
  static std::string format_scaled(detail::BigInt scaled, int places, bool trim) {
    const bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.str();
    if (places > 0) {
      if (digits.size() <= static_cast<std::size_t>(places)) {
        digits.insert(0, static_cast<std::size_t>(places) - digits.size() + 1, '0');
      }
      digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
      if (trim) {
        while (digits.back() == '0') digits.pop_back();
        if (digits.back() == '.') digits.pop_back();
      }
    }
    if (negative && digits.find_first_not_of("0.") != std::string::npos) {
      digits.insert(0, "-");
    }
    return digits;
  }

  detail::BigRational value_{0};
};

inline Decimal pow1000(int exponent) {
  return Decimal(detail::BigRational(detail::pow10(3 * exponent)));
}

}  // namespace carbon_ledger
