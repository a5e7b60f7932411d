#pragma once

// Exact rational scalars and small rational vectors. Everything that claims
// exactness in this library funnels through these types; no doubles sneak in
// except through the explicit approx() conversions.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geolab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using VecQ = std::vector<Rat>;

inline Int rat_num(const Rat& q) { return numerator(q); }
inline Int rat_den(const Rat& q) { return denominator(q); }  // always > 0

inline double approx(const Rat& q) { return q.convert_to<double>(); }

// floor(q) as an exact integer; cpp_int division truncates toward zero.
inline Int floor_rat(const Rat& q) {
  Int n = rat_num(q), d = rat_den(q);
  Int f = n / d;
  if (n % d != 0 && n < 0) --f;
  return f;
}

inline Int ceil_rat(const Rat& q) { return -floor_rat(-q); }

// Nearest integer, halves rounded up. Used by basis reduction.
inline Int round_rat(const Rat& q) { return floor_rat(q + Rat(1, 2)); }

// q reduced modulo m into [0, m), m > 0.
inline Rat mod_rat(const Rat& q, const Rat& m) {
  Rat r = q - Rat(floor_rat(q / m)) * m;
  if (r < 0) r += m;      // guards against floor_rat edge slack
  if (r >= m) r -= m;
  return r;
}

inline bool is_integer(const Rat& q) { return rat_den(q) == 1; }

// ---- parsing / printing -------------------------------------------------

// Accepts "p/q", plain integers, and finite decimals ("-3/2", "7", "0.25").
Rat parse_rational(const std::string& text);

// Canonical form: "p/q" when q != 1, else "p".
std::string rational_str(const Rat& q);

// Comma-separated rational vector, e.g. "1/2, -3".
VecQ parse_vecq(const std::string& text);
std::string vecq_str(const VecQ& v);

// ---- vector helpers ------------------------------------------------------

inline VecQ vec_add(const VecQ& a, const VecQ& b) {
  VecQ r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline VecQ vec_sub(const VecQ& a, const VecQ& b) {
  VecQ r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline VecQ vec_scale(const Rat& c, const VecQ& a) {
  VecQ r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline Rat vec_dot(const VecQ& a, const VecQ& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool vec_is_zero(const VecQ& a) {
  for (const Rat& x : a)
    if (x != 0) return false;
  return true;
}

// Strict lexicographic order; the tie-breaker everywhere a canonical
// ordering of exact data is needed.
inline bool vec_lex_less(const VecQ& a, const VecQ& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

inline bool vec_eq(const VecQ& a, const VecQ& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

// Integer square root helpers for exact enumeration bounds.
inline Int isqrt_floor(const Int& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative value");
  return boost::multiprecision::sqrt(n);
}

// Smallest k with k*k >= n.
inline Int isqrt_ceil(const Int& n) {
  Int r = isqrt_floor(n);
  if (r * r < n) ++r;
  return r;
}

}  // namespace geolab
