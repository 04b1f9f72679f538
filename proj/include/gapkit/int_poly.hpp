#pragma once

// Integer polynomials with exact 64-bit coefficients (128-bit intermediates,
// overflow-checked). Height H(f) is the max absolute coefficient.

#include <numeric>
#include <string>
#include <vector>

#include "gapkit/fp.hpp"
#include "gapkit/int_math.hpp"

namespace gapkit {

class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<i64> coeffs) : c_(std::move(coeffs)) { trim(); }

  static IntPoly zero() { return IntPoly(); }
  static IntPoly monomial(i64 coeff, int power) {
    std::vector<i64> c(static_cast<size_t>(power) + 1, 0);
    c.back() = coeff;
    return IntPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero

  i64 coeff(int k) const {
    return (k < 0 || k >= static_cast<int>(c_.size())) ? 0 : c_[static_cast<size_t>(k)];
  }
  const std::vector<i64>& coeffs() const { return c_; }
  i64 leading() const { return c_.empty() ? 0 : c_.back(); }

  i64 height() const {
    i64 h = 0;
    for (i64 v : c_) h = std::max(h, v < 0 ? -v : v);
    return h;
  }

  // gcd of coefficients (0 for the zero polynomial)
  i64 content() const {
    i64 g = 0;
    for (i64 v : c_) g = std::gcd(g, v < 0 ? -v : v);
    return g;
  }

  // content-free with positive leading coefficient
  IntPoly normalized() const {
    if (is_zero()) return *this;
    i64 g = content();
    if (c_.back() < 0) g = -g;
    std::vector<i64> out(c_.size());
    for (size_t k = 0; k < c_.size(); ++k) out[k] = c_[k] / g;
    return IntPoly(std::move(out));
  }

  // f(s*x): coefficient of x^k becomes c_k * s^k
  IntPoly compose_scaled(i64 s) const {
    std::vector<i64> out(c_.size());
    i64 power = 1;
    for (size_t k = 0; k < c_.size(); ++k) {
      out[k] = checked_mul(c_[k], power);
      if (k + 1 < c_.size()) power = checked_mul(power, s);
    }
    return IntPoly(std::move(out));
  }

  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const IntPoly& a, const IntPoly& b) { return !(a == b); }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    for (int k = degree(); k >= 0; --k) {
      i64 v = coeff(k);
      if (v == 0) continue;
      if (!s.empty()) s += v > 0 ? " + " : " - ";
      else if (v < 0) s += "-";
      i64 a = v < 0 ? -v : v;
      if (a != 1 || k == 0) s += std::to_string(a);
      if (k > 0) s += k == 1 ? "x" : "x^" + std::to_string(k);
    }
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<i64> c_;
};

// Horner evaluation of the projection of f into F_p[x].
inline Fp eval_poly_mod(const IntPoly& f, const Fp& t) {
  const u64 p = t.modulus();
  u64 acc = 0;
  for (int k = f.degree(); k >= 0; --k)
    acc = add_mod(mul_mod(acc, t.value(), p), mod_i64(f.coeff(k), p), p);
  return Fp(acc, p);
}

// Coefficients of f reduced into [0, p).
inline std::vector<u64> reduce_coeffs_mod(const IntPoly& f, u64 p) {
  std::vector<u64> out(static_cast<size_t>(f.degree() + 1));
  for (int k = 0; k <= f.degree(); ++k)
    out[static_cast<size_t>(k)] = mod_i64(f.coeff(k), p);
  return out;
}

// Whether f divides g in F_p[x]. The zero polynomial divides only itself.
inline bool divides_mod(const IntPoly& f, const IntPoly& g, u64 p) {
  std::vector<u64> d = reduce_coeffs_mod(f, p);
  while (!d.empty() && d.back() == 0) d.pop_back();
  std::vector<u64> r = reduce_coeffs_mod(g, p);
  while (!r.empty() && r.back() == 0) r.pop_back();
  if (d.empty()) return r.empty();
  if (r.empty()) return true;
  const u64 lead_inv = inv_mod_u64(d.back(), p);
  while (r.size() >= d.size()) {
    u64 q = mul_mod(r.back(), lead_inv, p);
    size_t off = r.size() - d.size();
    for (size_t k = 0; k < d.size(); ++k)
      r[off + k] = sub_mod(r[off + k], mul_mod(q, d[k], p), p);
    while (!r.empty() && r.back() == 0) r.pop_back();
  }
  return r.empty();
}

}  // namespace gapkit
