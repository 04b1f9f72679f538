#pragma once

// Generalized arithmetic progressions over F_p and their predicate suite:
// enumeration, properness, kappa-isolation, dilation and differences.
//
// A Gap is x_0 + {sum a_i x_i} where the coefficient box is either symmetric
// (|a_i| <= N_i) or one-sided (a_i in [0, N_i - 1]). Symmetric boxes are the
// primary representation; the one-sided form is kept as an explicit flag so
// that even bounds round-trip exactly.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gapkit/errors.hpp"
#include "gapkit/fp.hpp"
#include "gapkit/int_math.hpp"

namespace gapkit {

inline constexpr u64 kDefaultCap = 100'000'000;

// Counts enumeration work against a cap. One unit is one visited box point
// (for meet-in-the-middle searches: table entries plus scan points), so the
// charge reflects what the call actually does, not the nominal box size.
class WorkMeter {
 public:
  explicit WorkMeter(u64 cap) : cap_(cap) {}
  void charge(u64 n = 1) {
    used_ += n;
    if (used_ > cap_) throw CapExceededError(used_, cap_);
  }
  u64 used() const { return used_; }
  u64 cap() const { return cap_; }

 private:
  u64 cap_;
  u64 used_ = 0;
};

enum class GapForm { symmetric, one_sided };

class Gap {
 public:
  Gap(u64 p, std::vector<u64> generators, std::vector<i64> bounds,
      u64 base_point = 0, GapForm form = GapForm::symmetric)
      : field_(p),
        gens_(std::move(generators)),
        bounds_(std::move(bounds)),
        base_(base_point % p),
        form_(form) {
    if (gens_.empty()) throw InvalidArgumentError("GAP rank must be at least 1");
    if (gens_.size() != bounds_.size())
      throw InvalidArgumentError("generator and bound counts differ");
    for (i64 n : bounds_)
      if (n < 1) throw InvalidArgumentError("GAP bounds must be positive");
    for (u64& g : gens_) g %= p;
  }

  size_t rank() const { return gens_.size(); }
  u64 modulus() const { return field_.p(); }
  const PrimeField& field() const { return field_; }
  const std::vector<u64>& generators() const { return gens_; }
  const std::vector<i64>& bounds() const { return bounds_; }
  u64 base_point() const { return base_; }
  GapForm form() const { return form_; }
  bool symmetric() const { return form_ == GapForm::symmetric; }

  Fp generator(size_t i) const { return Fp(gens_.at(i), modulus()); }

  // Inclusive coefficient range of coordinate i.
  i64 coeff_lo(size_t i) const { return symmetric() ? -bounds_[i] : 0; }
  i64 coeff_hi(size_t i) const { return symmetric() ? bounds_[i] : bounds_[i] - 1; }

  // Number of coefficient vectors in the box.
  u128 box_size() const {
    u128 v = 1;
    for (size_t i = 0; i < rank(); ++i)
      v = checked_mul_u128(v, static_cast<u128>(coeff_hi(i) - coeff_lo(i) + 1));
    return v;
  }

  Fp eval(const std::vector<i64>& coeffs) const {
    if (coeffs.size() != rank())
      throw InvalidArgumentError("coefficient vector has wrong length");
    const u64 p = modulus();
    u64 acc = base_;
    for (size_t i = 0; i < rank(); ++i)
      acc = add_mod(acc, mul_mod(mod_i64(coeffs[i], p), gens_[i], p), p);
    return Fp(acc, p);
  }

  // Visits every coefficient vector in lexicographic order (first coordinate
  // most significant, each ascending) with its evaluation. fn may return void
  // or bool; returning false stops early.
  template <class F>
  void for_each_element(F&& fn, u64 cap = kDefaultCap) const {
    const u128 total = box_size();
    if (total > static_cast<u128>(cap))
      throw CapExceededError(total > static_cast<u128>(UINT64_MAX)
                                 ? UINT64_MAX
                                 : static_cast<u64>(total),
                             cap);
    const u64 p = modulus();
    const size_t d = rank();
    std::vector<i64> a(d);
    std::vector<u64> partial(d + 1);  // partial[i] = base + sum_{j<i} a_j x_j
    partial[0] = base_;
    for (size_t i = 0; i < d; ++i) {
      a[i] = coeff_lo(i);
      partial[i + 1] =
          add_mod(partial[i], mul_mod(mod_i64(a[i], p), gens_[i], p), p);
    }
    for (;;) {
      if constexpr (std::is_void_v<decltype(fn(a, Fp(0, 2)))>) {
        fn(a, Fp(partial[d], p));
      } else {
        if (!fn(a, Fp(partial[d], p))) return;
      }
      size_t i = d;
      while (i > 0 && a[i - 1] == coeff_hi(i - 1)) --i;
      if (i == 0) return;
      --i;
      ++a[i];
      partial[i + 1] =
          add_mod(partial[i], mul_mod(mod_i64(a[i], p), gens_[i], p), p);
      for (size_t j = i + 1; j < d; ++j) {
        a[j] = coeff_lo(j);
        partial[j + 1] =
            add_mod(partial[j], mul_mod(mod_i64(a[j], p), gens_[j], p), p);
      }
    }
  }

 private:
  PrimeField field_;
  std::vector<u64> gens_;
  std::vector<i64> bounds_;
  u64 base_;
  GapForm form_;
};

struct GapElement {
  std::vector<i64> coeffs;
  Fp value;
};

// Materialized enumeration; prefer Gap::for_each_element for large boxes.
inline std::vector<GapElement> enumerate(const Gap& b, u64 cap = kDefaultCap) {
  std::vector<GapElement> out;
  const u128 total = b.box_size();
  if (total <= static_cast<u128>(cap)) out.reserve(static_cast<size_t>(total));
  b.for_each_element([&](const std::vector<i64>& a, Fp v) { out.push_back({a, v}); },
                     cap);
  return out;
}

// ---------------------------------------------------------------------------
// Zero-relation search: is there a nonzero integer vector a, |a_i| <= K_i,
// with sum a_i x_i ≡ 0 (mod p)? Canonical witness: smallest max-norm shell,
// lexicographically first inside that shell.
// ---------------------------------------------------------------------------

namespace detail {

// Lexicographic scan of {a : |a_i| <= K_i, max|a_i| = shell}; calls fn on each
// vector together with its residue. fn returns true to stop. Returns true if
// stopped.
template <class F>
bool for_each_on_shell(const std::vector<u64>& gens, u64 p,
                       const std::vector<i64>& clip, i64 shell, WorkMeter& meter,
                       F&& fn) {
  const size_t d = gens.size();
  std::vector<i64> a(d, 0);
  // suffix_max[i] = max clip[j] over j >= i; tells whether coordinates at or
  // after i can still reach the shell.
  std::vector<i64> suffix_max(d + 1, 0);
  for (size_t i = d; i-- > 0;) suffix_max[i] = std::max(clip[i], suffix_max[i + 1]);
  // rec(i, saturated, partial): saturated = some earlier |a_j| == shell
  auto rec = [&](auto&& self, size_t i, bool saturated, u64 partial) -> bool {
    if (i == d) {
      meter.charge();
      return fn(a, partial);
    }
    const i64 hi = std::min<i64>(clip[i], shell);
    const bool later_can = suffix_max[i + 1] >= shell;
    for (i64 v = -hi; v <= hi; ++v) {
      const bool sat = saturated || v == shell || v == -shell;
      if (!sat && !later_can) continue;  // subtree cannot reach the shell
      u64 next = add_mod(partial, mul_mod(mod_i64(v, p), gens[i], p), p);
      a[i] = v;
      if (self(self, i + 1, sat, next)) return true;
    }
    return false;
  };
  return rec(rec, 0, false, 0);
}

// Meet-in-the-middle existence test for a nonzero zero-relation inside the
// clipped box. Charges table size plus scan size.
inline bool relation_exists_mitm(const std::vector<u64>& gens, u64 p,
                                 const std::vector<i64>& clip, WorkMeter& meter) {
  const size_t d = gens.size();
  const size_t dl = (d + 1) / 2;  // first ceil(d/2) coordinates go in the table
  std::unordered_map<u64, bool> table;  // residue -> reached by a nonzero vector
  {
    u128 left = 1;
    for (size_t i = 0; i < dl; ++i)
      left = checked_mul_u128(left, static_cast<u128>(2 * clip[i] + 1));
    if (left <= static_cast<u128>(UINT64_MAX))
      table.reserve(static_cast<size_t>(std::min<u64>(
          static_cast<u64>(left), meter.cap() - std::min(meter.cap(), meter.used()))));
  }
  std::vector<i64> a(dl, 0);
  auto build = [&](auto&& self, size_t i, bool nonzero, u64 partial) -> void {
    if (i == dl) {
      meter.charge();
      auto [it, fresh] = table.emplace(partial, nonzero);
      if (!fresh && nonzero) it->second = true;
      return;
    }
    for (i64 v = -clip[i]; v <= clip[i]; ++v)
      self(self, i + 1, nonzero || v != 0,
           add_mod(partial, mul_mod(mod_i64(v, p), gens[i], p), p));
  };
  build(build, 0, false, 0);

  bool found = false;
  std::vector<i64> b(d - dl, 0);
  auto scan = [&](auto&& self, size_t i, bool nonzero, u64 partial) -> bool {
    if (i == d) {
      meter.charge();
      const u64 target = neg_mod(partial, p);
      auto it = table.find(target);
      if (it == table.end()) return false;
      if (nonzero || it->second) {
        found = true;
        return true;
      }
      return false;
    }
    for (i64 v = -clip[i]; v <= clip[i]; ++v)
      if (self(self, i + 1, nonzero || v != 0,
               add_mod(partial, mul_mod(mod_i64(v, p), gens[i], p), p)))
        return true;
    return false;
  };
  scan(scan, dl, false, 0);
  return found;
}

inline std::vector<i64> clip_bounds(const std::vector<i64>& bounds, i64 k) {
  std::vector<i64> c(bounds.size());
  for (size_t i = 0; i < bounds.size(); ++i) c[i] = std::min(bounds[i], k);
  return c;
}

// Canonical zero-relation inside |a_i| <= bounds[i], or nullopt. use_mitm
// selects the meet-in-the-middle existence probe; the naive variant walks the
// shells directly and is the reference oracle for tests.
inline std::optional<std::vector<i64>> find_zero_relation(
    const std::vector<u64>& gens, u64 p, const std::vector<i64>& bounds,
    WorkMeter& meter, bool use_mitm = true) {
  i64 kmax = 0;
  for (i64 b : bounds) {
    if (b < 0) throw InvalidArgumentError("relation bounds must be nonnegative");
    kmax = std::max(kmax, b);
  }
  if (kmax == 0) return std::nullopt;  // only the zero vector fits

  i64 shell = 0;  // smallest shell containing a relation, 0 = unknown
  if (use_mitm) {
    if (!relation_exists_mitm(gens, p, bounds, meter)) return std::nullopt;
    // Doubling then binary search on the smallest k with a relation in the
    // k-clipped box.
    i64 hi = 1;
    while (hi < kmax &&
           !relation_exists_mitm(gens, p, clip_bounds(bounds, hi), meter))
      hi = std::min<i64>(kmax, hi * 2);
    i64 lo = hi > 1 ? hi / 2 + 1 : 1;  // relation known absent below lo
    while (lo < hi) {
      i64 mid = lo + (hi - lo) / 2;
      if (relation_exists_mitm(gens, p, clip_bounds(bounds, mid), meter))
        hi = mid;
      else
        lo = mid + 1;
    }
    shell = lo;
  }

  std::optional<std::vector<i64>> witness;
  auto grab = [&](const std::vector<i64>& a, u64 residue) {
    if (residue != 0) return false;
    witness = a;
    return true;
  };
  if (shell > 0) {
    for_each_on_shell(gens, p, clip_bounds(bounds, shell), shell, meter, grab);
    return witness;  // guaranteed set: existence at this shell was verified
  }
  for (i64 k = 1; k <= kmax; ++k)
    if (for_each_on_shell(gens, p, clip_bounds(bounds, k), k, meter, grab))
      return witness;
  return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Properness and isolation
// ---------------------------------------------------------------------------

struct CollisionWitness {
  std::vector<i64> lhs, rhs;  // distinct coefficient vectors, equal evaluation
};

struct ProperReport {
  bool proper = false;
  std::optional<CollisionWitness> collision;
};

struct IsolationWitness {
  std::vector<i64> coefficients;  // nonzero, |a_i| <= kappa*N_i, sum a_i x_i ≡ 0
};

struct IsolationReport {
  bool isolated = false;
  std::optional<IsolationWitness> witness;
};

namespace detail {

// Difference box of the coefficient box: collisions in B correspond exactly to
// zero-relations in this box.
inline std::vector<i64> difference_bounds(const Gap& b) {
  std::vector<i64> k(b.rank());
  for (size_t i = 0; i < b.rank(); ++i)
    k[i] = b.symmetric() ? checked_mul(2, b.bounds()[i]) : b.bounds()[i] - 1;
  return k;
}

inline CollisionWitness split_collision(std::vector<i64> c, bool symmetric) {
  // Sign-normalize the difference vector, then split it into two box points.
  for (i64 v : c) {
    if (v == 0) continue;
    if (v < 0)
      for (i64& w : c) w = -w;
    break;
  }
  CollisionWitness w;
  w.lhs.resize(c.size());
  w.rhs.resize(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    if (symmetric)
      w.lhs[i] = c[i] >= 0 ? (c[i] + 1) / 2 : c[i] / 2;  // ceil(c/2)
    else
      w.lhs[i] = std::max<i64>(c[i], 0);
    w.rhs[i] = w.lhs[i] - c[i];
  }
  return w;
}

inline CollisionWitness split_collision(const Gap& b, std::vector<i64> c) {
  return split_collision(std::move(c), b.symmetric());
}

}  // namespace detail

// A GAP is proper when all box evaluations are distinct; equivalently, its
// difference box contains no nonzero zero-relation.
inline ProperReport is_proper(const Gap& b, u64 cap = kDefaultCap) {
  WorkMeter meter(cap);
  auto rel = detail::find_zero_relation(b.generators(), b.modulus(),
                                        detail::difference_bounds(b), meter);
  ProperReport r;
  r.proper = !rel.has_value();
  if (rel) r.collision = detail::split_collision(b, *rel);
  return r;
}

// kappa-isolation: no nonzero integer vector with |a_i| <= kappa*N_i sums to
// zero against the generators.
inline IsolationReport is_isolated(const Gap& b, const Rat& kappa,
                                   u64 cap = kDefaultCap) {
  if (kappa.num <= 0) throw InvalidArgumentError("kappa must be positive");
  std::vector<i64> k(b.rank());
  for (size_t i = 0; i < b.rank(); ++i) k[i] = kappa.mul_floor(b.bounds()[i]);
  WorkMeter meter(cap);
  auto rel = detail::find_zero_relation(b.generators(), b.modulus(), k, meter);
  IsolationReport r;
  r.isolated = !rel.has_value();
  if (rel) r.witness = IsolationWitness{*rel};
  return r;
}

// Naive full-box reference for the two predicates above (test oracle).
inline IsolationReport is_isolated_naive(const Gap& b, const Rat& kappa,
                                         u64 cap = kDefaultCap) {
  if (kappa.num <= 0) throw InvalidArgumentError("kappa must be positive");
  std::vector<i64> k(b.rank());
  for (size_t i = 0; i < b.rank(); ++i) k[i] = kappa.mul_floor(b.bounds()[i]);
  WorkMeter meter(cap);
  auto rel = detail::find_zero_relation(b.generators(), b.modulus(), k, meter,
                                        /*use_mitm=*/false);
  IsolationReport r;
  r.isolated = !rel.has_value();
  if (rel) r.witness = IsolationWitness{*rel};
  return r;
}

// ---------------------------------------------------------------------------
// Dilation and differences
// ---------------------------------------------------------------------------

// The GAP representing the n-fold iterated sumset: bounds scale, the base
// point accumulates n times.
inline Gap sumset_scale(const Gap& b, i64 n) {
  if (n < 1) throw InvalidArgumentError("sumset multiple must be positive");
  std::vector<i64> nb(b.rank());
  for (size_t i = 0; i < b.rank(); ++i)
    nb[i] = b.symmetric() ? checked_mul(n, b.bounds()[i])
                          : checked_add(checked_mul(n, b.bounds()[i] - 1), 1);
  u64 base = mul_mod(b.base_point(), mod_i64(n, b.modulus()), b.modulus());
  return Gap(b.modulus(), b.generators(), std::move(nb), base, b.form());
}

// The symmetric GAP B - B (base point zero). One-sided coordinates with a
// single coefficient value contribute nothing and are dropped; if every
// coordinate is pinned the result degenerates to the zero GAP of rank 1.
inline Gap difference_gap(const Gap& b) {
  std::vector<u64> gens;
  std::vector<i64> nb;
  for (size_t i = 0; i < b.rank(); ++i) {
    i64 w = b.symmetric() ? checked_mul(2, b.bounds()[i]) : b.bounds()[i] - 1;
    if (w == 0) continue;
    gens.push_back(b.generators()[i]);
    nb.push_back(w);
  }
  if (gens.empty()) {
    gens.push_back(0);
    nb.push_back(1);
  }
  return Gap(b.modulus(), std::move(gens), std::move(nb), 0, GapForm::symmetric);
}

}  // namespace gapkit
