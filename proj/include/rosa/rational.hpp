#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace rosa {

/// Exact non-integral seconds. Always normalised, den > 0.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);  // NOLINT(implicit)

  /// "1.25", "-3", "2e-3", "7/4". Throws Error on malformed text.
  static Rational parse(const std::string& text);
  /// Shortest decimal that round-trips the double, made exact.
  static Rational from_double(double d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  /// Decimal when the expansion terminates, "n/d" otherwise.
  std::string to_string() const;

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator-() const { return Rational(-num_, den_); }

  bool operator==(const Rational& o) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace rosa
