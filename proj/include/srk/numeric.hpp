#ifndef SRK_NUMERIC_HPP
#define SRK_NUMERIC_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>

namespace srk {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline const double kLn3 = std::log(3.0);

/// log base 3 of a positive big integer. Uses the leading 64 bits and the
/// binary exponent, so it is accurate to double precision at any size.
inline double log3(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  const auto msb = static_cast<std::int64_t>(boost::multiprecision::msb(x));
  if (msb < 63) return std::log(x.convert_to<double>()) / kLn3;
  const std::int64_t shift = msb - 62;
  const BigInt top = x >> static_cast<unsigned>(shift);
  const double mant = top.convert_to<double>();
  return (std::log(mant) + static_cast<double>(shift) * std::log(2.0)) / kLn3;
}

inline double log3(double x) { return std::log(x) / kLn3; }

/// log3(3^a + 3^b) without leaving log space.
inline double log3_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp((lo - hi) * kLn3)) / kLn3;
}

inline BigInt ipow(BigInt base, std::uint64_t exp) {
  BigInt out = 1;
  while (exp > 0) {
    if (exp & 1U) out *= base;
    exp >>= 1U;
    if (exp > 0) base *= base;
  }
  return out;
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// Reads a positive integer override from the environment, or `fallback`.
inline std::size_t env_cap(const char* name, std::size_t fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) return fallback;
  return static_cast<std::size_t>(v);
}

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace srk

#endif  // SRK_NUMERIC_HPP
