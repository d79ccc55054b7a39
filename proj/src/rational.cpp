#include "rosa/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "rosa/core.hpp"

namespace rosa {

namespace {

using i128 = __int128;

Rational make(i128 num, i128 den) {
  if (den == 0) throw Error("division by zero in time arithmetic");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX) throw Error("time value out of range");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Rational Rational::parse(const std::string& text) {
  if (auto slash = text.find('/'); slash != std::string::npos) {
    std::int64_t n = 0, d = 0;
    auto r1 = std::from_chars(text.data(), text.data() + slash, n);
    auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), d);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != text.data() + slash ||
        r2.ptr != text.data() + text.size() || d == 0) {
      throw Error("malformed rational '" + text + "'");
    }
    return Rational(n, d);
  }
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) neg = text[i++] == '-';
  i128 num = 0;
  i128 den = 1;
  bool digits = false;
  auto digit = [&](char c) {
    num = num * 10 + (c - '0');
    if (num > (i128(1) << 100)) throw Error("time value out of range: " + text);
    digits = true;
  };
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) digit(text[i++]);
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digit(text[i++]);
      den *= 10;
    }
  }
  if (!digits) throw Error("malformed number '" + text + "'");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    int exp = 0;
    auto r = std::from_chars(text.data() + i + 1 + (text[i + 1] == '+' ? 1 : 0), text.data() + text.size(), exp);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size() || std::abs(exp) > 30) {
      throw Error("malformed number '" + text + "'");
    }
    for (; exp > 0; --exp) num *= 10;
    for (; exp < 0; ++exp) den *= 10;
    i = text.size();
  }
  if (i != text.size()) throw Error("malformed number '" + text + "'");
  return make(neg ? -num : num, den);
}

Rational Rational::from_double(double d) {
  if (!std::isfinite(d)) throw Error("time must be finite");
  return parse(nlohmann::json(d).dump());
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
  const int places = std::max(twos, fives);
  i128 scaled = static_cast<i128>(num_);
  i128 factor = 1;
  for (int k = 0; k < places; ++k) factor *= 10;
  scaled = scaled * (factor / den_);
  const bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string digits;
  i128 v = scaled;
  do {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  } while (v != 0);
  while (static_cast<int>(digits.size()) <= places) digits.insert(digits.begin(), '0');
  digits.insert(digits.end() - places, '.');
  return (neg ? "-" : "") + digits;
}

Rational Rational::operator+(const Rational& o) const {
  return make(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
}
Rational Rational::operator-(const Rational& o) const {
  return make(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
}
Rational Rational::operator*(const Rational& o) const {
  return make(i128(num_) * o.num_, i128(den_) * o.den_);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  i128 a = i128(num_) * o.den_;
  i128 b = i128(o.num_) * den_;
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace rosa
