#pragma once

// Independent ground-truth oracles: exhaustive bounded-height minimal
// polynomial search (meet-in-the-middle over coefficient halves) and
// multiplicative energy via product-multiset counting.

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gapkit/fp.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/int_poly.hpp"

namespace gapkit {

inline constexpr u64 kOracleCap = 1'000'000'000;

// All nonzero f with deg(f) <= d, H(f) <= H, f(t) = 0 mod p, content-free
// and positive leading coefficient; sorted by (degree, height, coefficient
// sequence from the constant term). `minimal` is the front when nonempty.
struct MinPolyResult {
  std::vector<IntPoly> polynomials;
  std::optional<IntPoly> minimal;
};

namespace detail {

// Iterates all tuples c in [-h, h]^len, passing the tuple and its dot
// product sum(c[k] * powers[k]) mod p. Recomputes the dot product per
// tuple; len is tiny so this stays linear in the number of tuples.
template <typename Fn>
void for_each_coeff_tuple(i64 h, size_t len, const std::vector<u64>& powers,
                          u64 p, WorkMeter& meter, Fn&& fn) {
  std::vector<i64> c(len, -h);
  for (;;) {
    meter.charge();
    u64 r = 0;
    for (size_t k = 0; k < len; ++k)
      r = add_mod(r, mul_mod(mod_i64(c[k], p), powers[k], p), p);
    fn(c, r);
    size_t i = 0;
    while (i < len && c[i] == h) c[i++] = -h;
    if (i == len) return;
    ++c[i];
  }
}

}  // namespace detail

// Exhaustive enumeration of the vanishing set within the degree/height box.
// Splits the d+1 coefficients into a tabled low half and a scanned high
// half so the cost is ~2*(2H+1)^ceil((d+1)/2) instead of (2H+1)^(d+1).
inline MinPolyResult minpoly_bounded(const Fp& t, size_t d, i64 h,
                                     u64 cap = kOracleCap) {
  if (d == 0) throw InvalidArgumentError("degree bound must be positive");
  if (h < 0) throw InvalidArgumentError("height bound must be nonnegative");
  const u64 p = t.modulus();
  WorkMeter meter(cap);

  std::vector<u64> powers(d + 1);
  powers[0] = 1 % p;
  for (size_t k = 1; k <= d; ++k) powers[k] = mul_mod(powers[k - 1], t.value(), p);

  const size_t low_len = (d + 2) / 2;  // ceil((d+1)/2)
  const size_t high_len = d + 1 - low_len;
  const std::vector<u64> low_powers(powers.begin(), powers.begin() + low_len);
  const std::vector<u64> high_powers(powers.begin() + low_len, powers.end());

  // residue of the low half -> list of low coefficient tuples
  std::unordered_map<u64, std::vector<std::vector<i64>>> table;
  detail::for_each_coeff_tuple(h, low_len, low_powers, p, meter,
                               [&](const std::vector<i64>& c, u64 r) {
                                 table[r].push_back(c);
                               });

  MinPolyResult out;
  detail::for_each_coeff_tuple(
      h, high_len, high_powers, p, meter, [&](const std::vector<i64>& c, u64 r) {
        auto it = table.find(neg_mod(r, p));
        if (it == table.end()) return;
        for (const auto& low : it->second) {
          meter.charge();
          std::vector<i64> coeffs = low;
          coeffs.insert(coeffs.end(), c.begin(), c.end());
          IntPoly f(coeffs);
          if (f.degree() < 0) continue;               // zero polynomial
          if (f.content() != 1 || f.leading() <= 0) continue;
          out.polynomials.push_back(std::move(f));
        }
      });

  std::sort(out.polynomials.begin(), out.polynomials.end(),
            [](const IntPoly& a, const IntPoly& b) {
              if (a.degree() != b.degree()) return a.degree() < b.degree();
              if (a.height() != b.height()) return a.height() < b.height();
              return a.coeffs() < b.coeffs();
            });
  if (!out.polynomials.empty()) out.minimal = out.polynomials.front();
  return out;
}

namespace detail {

// Deduplicates to set semantics and checks all elements share a modulus.
inline std::vector<u64> dedupe_values(const std::vector<Fp>& s) {
  std::vector<u64> vals;
  vals.reserve(s.size());
  for (const auto& a : s) {
    if (a.modulus() != s.front().modulus())
      throw InvalidArgumentError("mixed moduli in element set");
    vals.push_back(a.value());
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

}  // namespace detail

// #{(a1,a2,a3,a4) in S^4 : a1*a2 = a3*a4 mod p} as sum of squared product
// multiplicities. Input is treated as a set (duplicates dropped).
inline u64 mult_energy(const std::vector<Fp>& s, u64 cap = kOracleCap) {
  if (s.empty()) return 0;
  const u64 p = s.front().modulus();
  const std::vector<u64> vals = detail::dedupe_values(s);
  WorkMeter meter(cap);
  std::unordered_map<u64, u64> counts;
  counts.reserve(vals.size());
  for (u64 a : vals)
    for (u64 b : vals) {
      meter.charge();
      ++counts[mul_mod(a, b, p)];
    }
  u128 e = 0;
  for (const auto& [prod, m] : counts) e += static_cast<u128>(m) * m;
  if (e > static_cast<u128>(~u64{0})) throw OverflowError("energy exceeds 64 bits");
  return static_cast<u64>(e);
}

// Quartic reference implementation; test oracle only.
inline u64 mult_energy_naive(const std::vector<Fp>& s, u64 cap = kOracleCap) {
  if (s.empty()) return 0;
  const u64 p = s.front().modulus();
  const std::vector<u64> vals = detail::dedupe_values(s);
  WorkMeter meter(cap);
  u64 e = 0;
  for (u64 a1 : vals)
    for (u64 a2 : vals)
      for (u64 a3 : vals)
        for (u64 a4 : vals) {
          meter.charge();
          if (mul_mod(a1, a2, p) == mul_mod(a3, a4, p)) ++e;
        }
  return e;
}

}  // namespace gapkit
