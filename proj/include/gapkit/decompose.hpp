#pragma once

// Bounded coordinate decomposition: expressing field elements as sum a_k x_k
// with coefficients inside a GAP's box, plus the product-set containment check
// and the two-term product cover construction.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gapkit/errors.hpp"
#include "gapkit/fp.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/int_math.hpp"

namespace gapkit {

// Boxes at most this large are fully tabulated for O(log) membership queries;
// larger boxes fall back to meet-in-the-middle scans per query.
inline constexpr u64 kFullTableThreshold = u64(1) << 22;

// A product y_i y_j' (1-based pair) admits no bounded decomposition.
class NotContainedError : public Error {
 public:
  NotContainedError()
      : Error("element has no bounded decomposition"), i(0), j(0) {}
  NotContainedError(size_t i, size_t j, std::string side = "")
      : Error("product of generator pair (" + std::to_string(i) + "," +
              std::to_string(j) + ") has no bounded decomposition" +
              (side.empty() ? "" : " [" + side + "]")),
        i(i),
        j(j),
        side(std::move(side)) {}
  size_t i, j;       // 1-based generator indices; (0,0) when not pair-specific
  std::string side;  // which containment check failed, when two are run
};

struct DecomposeResult {
  std::optional<std::vector<i64>> coeffs;  // lexicographically first solution
  bool ambiguous = false;                  // a second solution exists
  bool found() const { return coeffs.has_value(); }
};

namespace detail {

// Visits coordinates [i0, i1) of b's box in lexicographic order, passing
// sum a_i x_i mod p (no base point). fn returns false to stop; the return
// value says whether the scan was stopped early.
template <class F>
bool for_each_partial(const Gap& b, size_t i0, size_t i1, F&& fn) {
  const u64 p = b.modulus();
  if (i0 == i1) return !fn(u64{0});
  const size_t d = i1 - i0;
  std::vector<i64> a(d);
  std::vector<u64> partial(d + 1, 0);
  for (size_t i = 0; i < d; ++i) {
    a[i] = b.coeff_lo(i0 + i);
    partial[i + 1] = add_mod(partial[i],
                             mul_mod(mod_i64(a[i], p), b.generators()[i0 + i], p), p);
  }
  for (;;) {
    if (!fn(partial[d])) return true;
    size_t i = d;
    while (i > 0 && a[i - 1] == b.coeff_hi(i0 + i - 1)) --i;
    if (i == 0) return false;
    --i;
    ++a[i];
    partial[i + 1] = add_mod(partial[i],
                             mul_mod(mod_i64(a[i], p), b.generators()[i0 + i], p), p);
    for (size_t j = i + 1; j < d; ++j) {
      a[j] = b.coeff_lo(i0 + j);
      partial[j + 1] = add_mod(partial[j],
                               mul_mod(mod_i64(a[j], p), b.generators()[i0 + j], p), p);
    }
  }
}

// Decodes a lexicographic index over coordinates [i0, i1) of b's box.
inline std::vector<i64> decode_lex(const Gap& b, size_t i0, size_t i1, u64 idx) {
  std::vector<i64> a(i1 - i0);
  for (size_t i = i1; i-- > i0;) {
    const u64 w = static_cast<u64>(b.coeff_hi(i) - b.coeff_lo(i) + 1);
    a[i - i0] = b.coeff_lo(i) + static_cast<i64>(idx % w);
    idx /= w;
  }
  return a;
}

}  // namespace detail

// Reusable decomposition engine over a fixed GAP. Queries share one work
// budget; the mode decides between a full residue table (small boxes) and a
// half-box table with per-query scans.
class Decomposer {
 public:
  enum class Mode { automatic, full_table, mitm };

  explicit Decomposer(const Gap& b, u64 cap = kDefaultCap,
                      Mode mode = Mode::automatic)
      : b_(b), meter_(cap), dl_((b.rank() + 1) / 2) {
    const u128 box = b_.box_size();
    if (mode == Mode::automatic)
      mode = box <= static_cast<u128>(std::min<u64>(kFullTableThreshold, cap))
                 ? Mode::full_table
                 : Mode::mitm;
    mode_ = mode;
    if (mode_ == Mode::full_table)
      build_full();
    else
      build_half();
  }

  const Gap& gap() const { return b_; }
  Mode mode() const { return mode_; }
  u64 work_used() const { return meter_.used(); }

  // Lexicographically first bounded decomposition of z (membership included),
  // with an ambiguity flag when a second solution exists.
  DecomposeResult decompose(const Fp& z) {
    check_field(z);
    const u64 target = sub_mod(z.value(), b_.base_point(), b_.modulus());
    DecomposeResult out;
    if (mode_ == Mode::full_table) {
      meter_.charge();
      auto [lo, hi] = std::equal_range(
          full_.begin(), full_.end(), std::pair<u64, u64>(target, 0),
          [](const auto& a, const auto& b) { return a.first < b.first; });
      if (lo == hi) return out;
      out.coeffs = detail::decode_lex(b_, 0, b_.rank(), lo->second);
      out.ambiguous = hi - lo > 1;
      return out;
    }
    const u64 p = b_.modulus();
    std::optional<std::pair<u64, u64>> best;  // (left idx, right idx)
    u64 count = 0, ridx = 0;
    detail::for_each_partial(b_, dl_, b_.rank(), [&](u64 right) {
      meter_.charge();
      auto it = half_.find(sub_mod(target, right, p));
      if (it != half_.end()) {
        count += it->second.size();
        std::pair<u64, u64> cand(it->second.front(), ridx);
        if (!best || cand < *best) best = cand;
      }
      ++ridx;
      return true;
    });
    if (best) {
      std::vector<i64> a = detail::decode_lex(b_, 0, dl_, best->first);
      std::vector<i64> r = detail::decode_lex(b_, dl_, b_.rank(), best->second);
      a.insert(a.end(), r.begin(), r.end());
      out.coeffs = std::move(a);
      out.ambiguous = count > 1;
    }
    return out;
  }

  // Membership only; stops at the first hit.
  bool contains(const Fp& z) {
    check_field(z);
    const u64 target = sub_mod(z.value(), b_.base_point(), b_.modulus());
    if (mode_ == Mode::full_table) {
      meter_.charge();
      return std::binary_search(
          full_.begin(), full_.end(), std::pair<u64, u64>(target, 0),
          [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    const u64 p = b_.modulus();
    bool hit = false;
    detail::for_each_partial(b_, dl_, b_.rank(), [&](u64 right) {
      meter_.charge();
      hit = half_.count(sub_mod(target, right, p)) != 0;
      return !hit;
    });
    return hit;
  }

 private:
  void check_field(const Fp& z) const {
    if (z.modulus() != b_.modulus())
      throw InvalidArgumentError("element modulus differs from GAP modulus");
  }

  void build_full() {
    const u128 box = b_.box_size();
    full_.reserve(static_cast<size_t>(box));
    u64 idx = 0;
    detail::for_each_partial(b_, 0, b_.rank(), [&](u64 res) {
      meter_.charge();
      full_.emplace_back(res, idx++);
      return true;
    });
    std::sort(full_.begin(), full_.end());
  }

  void build_half() {
    u64 idx = 0;
    detail::for_each_partial(b_, 0, dl_, [&](u64 res) {
      meter_.charge();
      half_[res].push_back(idx++);  // ascending by construction
      return true;
    });
  }

  Gap b_;
  Mode mode_;
  WorkMeter meter_;
  size_t dl_;                                  // coordinates in the table half
  std::vector<std::pair<u64, u64>> full_;      // (residue, lex index), sorted
  std::unordered_map<u64, std::vector<u64>> half_;  // residue -> left indices
};

// One-shot bounded decomposition of z over B's box.
inline DecomposeResult decompose(const Fp& z, const Gap& b, u64 cap = kDefaultCap) {
  Decomposer dec(b, cap, Decomposer::Mode::mitm);
  return dec.decompose(z);
}

// Naive full-box reference (test oracle).
inline DecomposeResult decompose_naive(const Fp& z, const Gap& b,
                                       u64 cap = kDefaultCap) {
  if (z.modulus() != b.modulus())
    throw InvalidArgumentError("element modulus differs from GAP modulus");
  DecomposeResult out;
  b.for_each_element(
      [&](const std::vector<i64>& a, Fp v) {
        if (v != z) return true;
        if (!out.coeffs) {
          out.coeffs = a;
          return true;
        }
        out.ambiguous = true;
        return false;
      },
      cap);
  return out;
}

// ---------------------------------------------------------------------------
// Product decomposition table (the a_{ij}^{(k)} grid)
// ---------------------------------------------------------------------------

struct DecompositionTable {
  size_t d = 0;
  std::vector<std::vector<std::vector<i64>>> entries;  // [i][j] -> coefficients
  i64 bound_observed = 0;                              // max |a_{ij}^{(k)}|
  std::vector<std::pair<size_t, size_t>> ambiguous_pairs;  // 1-based (i,j)
  bool ambiguous() const { return !ambiguous_pairs.empty(); }
};

// Decomposes every pairwise product y_i y_j' over B's box. Throws
// NotContainedError at the first (row-major) pair with no solution.
inline DecompositionTable decompose_products(const Gap& a, const Gap& a_prime,
                                             const Gap& b, u64 cap = kDefaultCap) {
  const size_t d = b.rank();
  if (a.modulus() != b.modulus() || a_prime.modulus() != b.modulus())
    throw InvalidArgumentError("GAPs must share one modulus");
  if (a.rank() != d || a_prime.rank() != d)
    throw InvalidArgumentError("GAPs must share one rank");
  for (u64 y : a.generators())
    if (y == 0) throw InvalidArgumentError("left factor has a zero generator");
  for (u64 y : a_prime.generators())
    if (y == 0) throw InvalidArgumentError("right factor has a zero generator");

  const u64 p = b.modulus();
  Decomposer dec(b, cap);
  DecompositionTable table;
  table.d = d;
  table.entries.assign(d, std::vector<std::vector<i64>>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      Fp z(mul_mod(a.generators()[i], a_prime.generators()[j], p), p);
      DecomposeResult r = dec.decompose(z);
      if (!r.found()) throw NotContainedError(i + 1, j + 1);
      if (r.ambiguous) table.ambiguous_pairs.emplace_back(i + 1, j + 1);
      for (i64 v : *r.coeffs)
        table.bound_observed = std::max(table.bound_observed, v < 0 ? -v : v);
      table.entries[i][j] = std::move(*r.coeffs);
    }
  return table;
}

// ---------------------------------------------------------------------------
// Product containment
// ---------------------------------------------------------------------------

struct ProductViolation {
  std::vector<i64> a_coeffs, a_prime_coeffs;
  u64 a_value = 0, a_prime_value = 0, product = 0;
};

struct ContainmentReport {
  bool contained = true;
  std::optional<ProductViolation> violation;  // lexicographically first
};

// Checks a * a' in B for every pair; the first violating pair (outer factor
// lexicographic, then inner) is reported.
inline ContainmentReport contains_product(const Gap& a, const Gap& a_prime,
                                          const Gap& b, u64 cap = kDefaultCap) {
  if (a.modulus() != b.modulus() || a_prime.modulus() != b.modulus())
    throw InvalidArgumentError("GAPs must share one modulus");
  const u64 p = b.modulus();
  Decomposer dec(b, cap);
  WorkMeter meter(cap);

  // Materialize the inner factor when small, else rescan it per outer element.
  const bool inner_cached = a_prime.box_size() <= static_cast<u128>(kFullTableThreshold);
  std::vector<u64> inner_vals;
  if (inner_cached) {
    a_prime.for_each_element(
        [&](const std::vector<i64>&, Fp v) { inner_vals.push_back(v.value()); },
        cap);
  }

  ContainmentReport report;
  a.for_each_element(
      [&](const std::vector<i64>& ac, Fp av) {
        auto probe = [&](u64 pv, u64 inner_idx) {
          meter.charge();
          const u64 prod = mul_mod(av.value(), pv, p);
          if (dec.contains(Fp(prod, p))) return true;
          report.contained = false;
          ProductViolation viol;
          viol.a_coeffs = ac;
          viol.a_prime_coeffs =
              detail::decode_lex(a_prime, 0, a_prime.rank(), inner_idx);
          viol.a_value = av.value();
          viol.a_prime_value = pv;
          viol.product = prod;
          report.violation = std::move(viol);
          return false;
        };
        if (inner_cached) {
          for (u64 k = 0; k < inner_vals.size(); ++k)
            if (!probe(inner_vals[k], k)) return false;
          return true;
        }
        u64 k = 0;
        return !detail::for_each_partial(a_prime, 0, a_prime.rank(), [&](u64 res) {
          u64 v = add_mod(res, a_prime.base_point(), p);
          return probe(v, k++);
        });
      },
      cap);
  return report;
}

// ---------------------------------------------------------------------------
// Two-term product cover (base expansion)
// ---------------------------------------------------------------------------

struct CoverWitness {
  i64 u = 0, v = 0;              // lambda = u * v
  i64 u_prime = 0, v_prime = 0;  // mu = u' * v'
  i64 w = 0;                     // u*v + u'*v' = w
};

// Writes w = u*v + u'*v' with |u|,|u'| <= c*N^(1-eps) and |v|,|v'| <= c'*N^eps
// via the base-b expansion of |w|, b = floor(c'*N^eps). Requires
// |w| <= c''*N with c'' = c*c'/2; floor-induced edge failures at tiny N are
// reported as OutOfRangeError.
inline CoverWitness cover_witness(i64 w, const Rat& c, const Rat& c_prime, i64 n,
                                  const Rat& eps) {
  if (n < 1) throw InvalidArgumentError("box size must be positive");
  if (c.num <= 0 || c_prime.num <= 0)
    throw InvalidArgumentError("cover constants must be positive");
  if (eps.num <= 0 || eps.num >= eps.den)
    throw InvalidArgumentError("exponent must lie in (0,1)");

  const Rat c2 = (c * c_prime) / Rat(2);  // c''
  const i64 wmax = c2.mul_floor(n);
  const i64 aw = w < 0 ? -w : w;
  if (aw > wmax)
    throw OutOfRangeError("target " + std::to_string(w) +
                          " exceeds the cover range " + std::to_string(wmax));
  if (w == 0) return CoverWitness{0, 0, 0, 0, 0};

  const i64 base = scaled_pow_floor(static_cast<u64>(n), eps, c_prime);
  if (base < 1) throw OutOfRangeError("cover base vanishes at this box size");
  const i64 ubound = scaled_pow_floor(static_cast<u64>(n), Rat(1) - eps, c);

  const i64 sign = w < 0 ? -1 : 1;
  CoverWitness cw;
  cw.u = sign * (aw / base);
  cw.v = base;
  cw.u_prime = sign * (aw % base);
  cw.v_prime = 1;
  cw.w = w;
  if (cw.u > ubound || cw.u < -ubound || cw.u_prime > ubound || cw.u_prime < -ubound)
    throw OutOfRangeError("cover factors exceed bounds at this box size");
  return cw;
}

}  // namespace gapkit
