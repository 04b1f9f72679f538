#pragma once

// Arithmetic in F_p for prime p < 2^61. All products go through 128-bit
// intermediates, so no operation can overflow for moduli in range.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "gapkit/errors.hpp"
#include "gapkit/int_math.hpp"

namespace gapkit {

inline constexpr u64 kMaxModulus = (u64(1) << 61) - 1;

// Deterministic Miller-Rabin. The witness set below is known to be exact for
// all n < 3.3e24, which covers the supported modulus range with room to spare.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline u64 next_prime_at_least(u64 n) {
  if (n <= 2) return 2;
  if ((n & 1) == 0) ++n;
  while (!is_prime_u64(n)) n += 2;
  return n;
}

// Validates the modulus once; everything downstream trusts it.
class PrimeField {
 public:
  explicit PrimeField(u64 p) : p_(p) {
    if (p > kMaxModulus)
      throw InvalidArgumentError("modulus exceeds 2^61 - 1: " + std::to_string(p));
    if (!is_prime_u64(p))
      throw InvalidArgumentError("modulus is not prime: " + std::to_string(p));
  }
  u64 p() const { return p_; }

 private:
  u64 p_;
};

// A canonical residue in [0, p). Carries its modulus; mixed-modulus
// arithmetic is rejected rather than silently reduced.
class Fp {
 public:
  Fp() : v_(0), p_(2) {}
  Fp(u64 value, u64 p) : v_(value % p), p_(p) {}
  Fp(u64 value, const PrimeField& f) : v_(value % f.p()), p_(f.p()) {}

  static Fp from_int(i64 a, u64 p) { return Fp(mod_i64(a, p), p); }

  u64 value() const { return v_; }
  u64 modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }

  // min{|a| : a in Z, a = v mod p}
  u64 height() const { return v_ == 0 ? 0 : std::min(v_, p_ - v_); }

  // the height-minimal integer representative; unique for odd p
  i64 signed_lift() const {
    return v_ <= (p_ - 1) / 2 ? static_cast<i64>(v_)
                              : static_cast<i64>(v_) - static_cast<i64>(p_);
  }

  Fp operator+(const Fp& o) const { return raw(add_mod(v_, check(o), p_), p_); }
  Fp operator-(const Fp& o) const { return raw(sub_mod(v_, check(o), p_), p_); }
  Fp operator*(const Fp& o) const { return raw(mul_mod(v_, check(o), p_), p_); }
  Fp operator-() const { return raw(neg_mod(v_, p_), p_); }

  Fp inv() const { return raw(inv_mod_u64(v_, p_), p_); }
  Fp operator/(const Fp& o) const { return *this * o.inv(); }
  Fp pow(u64 e) const { return raw(pow_mod(v_, e, p_), p_); }

  friend bool operator==(const Fp& a, const Fp& b) {
    return a.v_ == b.v_ && a.p_ == b.p_;
  }
  friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }

 private:
  static Fp raw(u64 v, u64 p) {
    Fp x;
    x.v_ = v;
    x.p_ = p;
    return x;
  }
  u64 check(const Fp& o) const {
    if (o.p_ != p_) throw InvalidArgumentError("mixed moduli in Fp arithmetic");
    return o.v_;
  }
  u64 v_;
  u64 p_;
};

inline u64 height_u64(u64 v, u64 p) {
  v %= p;
  return v == 0 ? 0 : std::min(v, p - v);
}

inline i64 signed_lift_u64(u64 v, u64 p) {
  v %= p;
  return v <= (p - 1) / 2 ? static_cast<i64>(v)
                          : static_cast<i64>(v) - static_cast<i64>(p);
}

namespace detail {

// Oracle-grade search; also the production path for small p.
inline std::optional<u64> sqrt_mod_search(u64 a, u64 p) {
  for (u64 r = 0; r < p; ++r)
    if (mul_mod(r, r, p) == a) return r;
  return std::nullopt;
}

// Tonelli-Shanks with a deterministic non-residue scan.
inline std::optional<u64> sqrt_mod_tonelli(u64 a, u64 p) {
  if (a == 0) return 0;
  if (p == 2) return a;
  if (pow_mod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);

  u64 q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (pow_mod(z, (p - 1) / 2, p) != p - 1) ++z;

  u64 m = s;
  u64 c = pow_mod(z, q, p);
  u64 t = pow_mod(a, q, p);
  u64 r = pow_mod(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) {
      tt = mul_mod(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mul_mod(b, b, p);
    m = i;
    c = mul_mod(b, b, p);
    t = mul_mod(t, c, p);
    r = mul_mod(r, b, p);
  }
  return r;
}

}  // namespace detail

// Both square roots of a, smaller residue first; {0, 0} for a = 0;
// nullopt for non-residues. Exhaustive below 2^20, Tonelli-Shanks above.
inline std::optional<std::pair<Fp, Fp>> sqrt_mod(const Fp& a) {
  const u64 p = a.modulus();
  std::optional<u64> r = p < (u64(1) << 20) ? detail::sqrt_mod_search(a.value(), p)
                                            : detail::sqrt_mod_tonelli(a.value(), p);
  if (!r) return std::nullopt;
  u64 r0 = *r, r1 = (p - *r) % p;
  if (r0 > r1) std::swap(r0, r1);
  return std::make_pair(Fp(r0, p), Fp(r1, p));
}

}  // namespace gapkit
