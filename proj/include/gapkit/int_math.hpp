#pragma once

// Exact integer arithmetic helpers: overflow-checked 64-bit ops, 128-bit
// modular arithmetic, integer roots, and a small exact rational type used
// for the constants c, c', epsilon, kappa.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>

#include "gapkit/errors.hpp"

namespace gapkit {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("i64 add overflow");
  return r;
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("i64 mul overflow");
  return r;
}

inline i128 checked_add128(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("i128 add overflow");
  return r;
}

inline i128 checked_mul128(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("i128 mul overflow");
  return r;
}

inline u128 checked_mul_u128(u128 a, u128 b) {
  u128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("u128 mul overflow");
  return r;
}

inline i64 narrow_i64(i128 v) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
    throw OverflowError("value does not fit in 64 bits");
  return static_cast<i64>(v);
}

inline std::string to_string_i128(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? u128(-(v + 1)) + 1 : u128(v);
  std::string s;
  while (u > 0) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

inline std::string to_string_u128(u128 u) {
  if (u == 0) return "0";
  std::string s;
  while (u > 0) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  return std::string(s.rbegin(), s.rend());
}

// ---- modular arithmetic, overflow-free for p < 2^61 ----

inline u64 add_mod(u64 a, u64 b, u64 p) {
  u64 s = a + b;  // a, b < p < 2^61, no wrap
  return s >= p ? s - p : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

inline u64 mul_mod(u64 a, u64 b, u64 p) {
  return static_cast<u64>((u128(a) * b) % p);
}

inline u64 neg_mod(u64 a, u64 p) { return a == 0 ? 0 : p - a; }

inline u64 pow_mod(u64 base, u64 exp, u64 p) {
  u64 r = 1 % p;
  base %= p;
  while (exp > 0) {
    if (exp & 1) r = mul_mod(r, base, p);
    base = mul_mod(base, base, p);
    exp >>= 1;
  }
  return r;
}

// Canonical residue of a signed integer.
inline u64 mod_i64(i64 a, u64 p) {
  i64 m = a % static_cast<i64>(p);
  return m < 0 ? static_cast<u64>(m + static_cast<i64>(p)) : static_cast<u64>(m);
}

inline u64 mod_i128(i128 a, u64 p) {
  i128 m = a % static_cast<i128>(p);
  return m < 0 ? static_cast<u64>(m + static_cast<i128>(p)) : static_cast<u64>(m);
}

// Extended gcd based modular inverse; throws on non-invertible input.
inline u64 inv_mod_u64(u64 a, u64 p) {
  if (a % p == 0) throw ZeroInverseError();
  i64 t = 0, new_t = 1;
  i64 r = static_cast<i64>(p), new_r = static_cast<i64>(a % p);
  while (new_r != 0) {
    i64 q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (r != 1) throw ZeroInverseError();  // composite p would land here
  return t < 0 ? static_cast<u64>(t + static_cast<i64>(p)) : static_cast<u64>(t);
}

// ---- integer roots ----

inline u64 isqrt_u64(u64 n) {
  if (n == 0) return 0;
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && u128(r) * r > n) --r;
  while (u128(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// floor(base^(1/k)); exact for any u64 via big-integer verification.
inline u64 kth_root_floor(const boost::multiprecision::cpp_int& base, unsigned k) {
  namespace mp = boost::multiprecision;
  if (k == 0) throw InvalidArgumentError("kth_root_floor: k must be positive");
  if (base < 0) throw InvalidArgumentError("kth_root_floor: negative base");
  if (base == 0) return 0;
  if (k == 1) {
    if (base > mp::cpp_int(UINT64_MAX)) throw OverflowError("root does not fit in u64");
    return base.convert_to<u64>();
  }
  mp::cpp_int lo = 0, hi = 1;
  while (mp::pow(hi, k) <= base) hi <<= 1;
  while (hi - lo > 1) {
    mp::cpp_int mid = (lo + hi) / 2;
    if (mp::pow(mid, k) <= base) lo = mid;
    else hi = mid;
  }
  if (lo > mp::cpp_int(UINT64_MAX)) throw OverflowError("root does not fit in u64");
  return lo.convert_to<u64>();
}

// ---- exact rationals ----

// Small exact rational; denominator kept positive, always reduced.
struct Rat {
  i64 num = 0;
  i64 den = 1;

  Rat() = default;
  Rat(i64 n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rat(i64 n, i64 d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw InvalidArgumentError("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    i64 g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  bool positive() const { return num > 0; }
  bool is_integer() const { return den == 1; }

  Rat operator*(const Rat& o) const {
    // cross-reduce before multiplying to keep intermediates in range
    i64 g = std::gcd(num < 0 ? -num : num, o.den);
    i64 g2 = std::gcd(o.num < 0 ? -o.num : o.num, den);
    Rat r;
    r.num = checked_mul(num / g, o.num / g2);
    r.den = checked_mul(den / g2, o.den / g);
    r.normalize();
    return r;
  }

  Rat operator/(const Rat& o) const {
    if (o.num == 0) throw InvalidArgumentError("rational division by zero");
    return *this * Rat(o.den, o.num);
  }

  Rat operator+(const Rat& o) const {
    i64 g = std::gcd(den, o.den);
    i64 l = checked_mul(den / g, o.den);
    i64 n = checked_add(checked_mul(num, l / den), checked_mul(o.num, l / o.den));
    return Rat(n, l);
  }

  Rat operator-(const Rat& o) const { return *this + Rat(-o.num, o.den); }

  // exact comparisons via 128-bit cross products
  friend bool operator<(const Rat& a, const Rat& b) {
    return i128(a.num) * b.den < i128(b.num) * a.den;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }
  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

  i64 floor() const {
    i64 q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
  }

  i64 ceil() const {
    i64 q = num / den;
    if (num % den != 0 && num > 0) ++q;
    return q;
  }

  // floor(this * m) exactly
  i64 mul_floor(i64 m) const {
    i128 n = i128(num) * m;
    i128 q = n / den;
    if (n % den != 0 && n < 0) --q;
    return narrow_i64(q);
  }

  std::string str() const {
    return den == 1 ? std::to_string(num)
                    : std::to_string(num) + "/" + std::to_string(den);
  }

  // accepts "a", "a/b"
  static Rat parse(const std::string& s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rat(std::stoll(s));
      return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::logic_error&) {
      throw ParseError("cannot parse rational: '" + s + "'");
    }
  }
};

// floor(c * N^(num/den)) computed exactly: equals
// floor( (c_num^den * N^num)^(1/den) ) / c_den  using floor-division identities.
inline i64 scaled_pow_floor(u64 n, const Rat& exponent, const Rat& c) {
  if (exponent.num < 0 || c.num < 0)
    throw InvalidArgumentError("scaled_pow_floor: negative exponent or scale");
  if (exponent.den > 8)
    throw InvalidArgumentError("fractional exponents limited to denominator <= 8");
  namespace mp = boost::multiprecision;
  unsigned den = static_cast<unsigned>(exponent.den);
  mp::cpp_int inner = mp::pow(mp::cpp_int(c.num), den) *
                      mp::pow(mp::cpp_int(n), static_cast<unsigned>(exponent.num));
  u64 root = kth_root_floor(inner, den);
  u64 out = root / static_cast<u64>(c.den);
  if (out > static_cast<u64>(INT64_MAX)) throw OverflowError("scaled_pow_floor overflow");
  return static_cast<i64>(out);
}

}  // namespace gapkit
