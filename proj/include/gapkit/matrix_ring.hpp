#pragma once

// The M_n(F_p) analogue: GAPs of matrices, decomposition over a matrix
// basis, two-sided product containment, and recovery of polynomials
// annihilating the matrix generators.

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gapkit/decompose.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/int_matrix.hpp"
#include "gapkit/recovery.hpp"

namespace gapkit {

// Symmetric GAP of n x n matrices: {sum a_i X_i : |a_i| <= N_i}. The
// identity-generator requirement (X_1 = I) is enforced by recovery, not here.
class MatGap {
 public:
  MatGap(u64 p, size_t n, std::vector<FpMat> generators, std::vector<i64> bounds)
      : field_(p), n_(n), gens_(std::move(generators)), bounds_(std::move(bounds)) {
    if (n_ == 0) throw InvalidArgumentError("matrix dimension must be positive");
    if (gens_.empty()) throw InvalidArgumentError("gap needs at least one generator");
    if (gens_.size() != bounds_.size())
      throw InvalidArgumentError("generator/bound count mismatch");
    for (const FpMat& g : gens_) {
      if (g.order() != n_) throw InvalidArgumentError("generator dimension mismatch");
      if (g.modulus() != p) throw InvalidArgumentError("generator modulus mismatch");
    }
    for (i64 b : bounds_)
      if (b < 1) throw InvalidArgumentError("bounds must be positive");
  }

  u64 modulus() const { return field_.p(); }
  size_t dim() const { return n_; }
  size_t rank() const { return gens_.size(); }
  const std::vector<FpMat>& generators() const { return gens_; }
  const std::vector<i64>& bounds() const { return bounds_; }

  u128 box_size() const {
    u128 total = 1;
    for (i64 b : bounds_)
      total = checked_mul_u128(total, static_cast<u128>(2 * b + 1));
    return total;
  }

  FpMat eval(const std::vector<i64>& coeffs) const {
    if (coeffs.size() != rank()) throw InvalidArgumentError("coefficient count mismatch");
    FpMat m(n_, modulus());
    for (size_t i = 0; i < rank(); ++i)
      m = m + gens_[i].scaled(mod_i64(coeffs[i], modulus()));
    return m;
  }

 private:
  PrimeField field_;
  size_t n_;
  std::vector<FpMat> gens_;
  std::vector<i64> bounds_;
};

namespace detail {

// Lex odometer over coordinates [i0, i1) of the box, rightmost fastest,
// carrying the partial sum of a_i X_i. fn returns false to stop early;
// the function returns whether it was stopped.
template <typename F>
bool mat_for_each_partial(const MatGap& b, size_t i0, size_t i1, F&& fn) {
  const u64 p = b.modulus();
  if (i0 == i1) return !fn(FpMat(b.dim(), p));
  const size_t d = i1 - i0;
  std::vector<i64> a(d);
  std::vector<FpMat> partial(d + 1, FpMat(b.dim(), p));
  for (size_t i = 0; i < d; ++i) {
    a[i] = -b.bounds()[i0 + i];
    partial[i + 1] = partial[i] + b.generators()[i0 + i].scaled(mod_i64(a[i], p));
  }
  for (;;) {
    if (!fn(partial[d])) return true;
    size_t i = d;
    while (i > 0 && a[i - 1] == b.bounds()[i0 + i - 1]) --i;
    if (i == 0) return false;
    --i;
    ++a[i];
    partial[i + 1] = partial[i] + b.generators()[i0 + i].scaled(mod_i64(a[i], p));
    for (size_t j = i + 1; j < d; ++j) {
      a[j] = -b.bounds()[i0 + j];
      partial[j + 1] = partial[j] + b.generators()[i0 + j].scaled(mod_i64(a[j], p));
    }
  }
}

inline std::vector<i64> mat_decode_lex(const MatGap& b, size_t i0, size_t i1, u64 idx) {
  std::vector<i64> a(i1 - i0);
  for (size_t i = i1; i-- > i0;) {
    const u64 w = static_cast<u64>(2 * b.bounds()[i] + 1);
    a[i - i0] = -b.bounds()[i] + static_cast<i64>(idx % w);
    idx /= w;
  }
  return a;
}

// Smallest-shell, lex-first nonzero relation sum a_i X_i = 0 with
// |a_i| <= bounds[i], or nullopt. One lex pass over the box; subtrees whose
// prefix max-norm already ties the best shell cannot improve (an equal-shell
// hit there would be lex-later) and are pruned.
inline std::optional<std::vector<i64>> mat_find_zero_relation(
    const std::vector<FpMat>& gens, const std::vector<i64>& bounds, WorkMeter& meter) {
  const size_t d = gens.size();
  const u64 p = gens.front().modulus();
  const size_t n = gens.front().order();

  std::vector<i64> a(d, 0);
  std::optional<std::vector<i64>> hit;
  i64 best_shell = 0;
  for (i64 b : bounds) best_shell = std::max(best_shell, b);
  ++best_shell;

  const auto rec = [&](const auto& self, size_t i, const FpMat& acc, i64 prefix_max) -> void {
    if (prefix_max >= best_shell) return;
    if (i == d) {
      meter.charge();
      if (prefix_max > 0 && acc.is_zero()) {
        hit = a;
        best_shell = prefix_max;
      }
      return;
    }
    for (i64 v = -bounds[i]; v <= bounds[i]; ++v) {
      a[i] = v;
      const i64 m = std::max(prefix_max, v < 0 ? -v : v);
      if (m >= best_shell) continue;
      self(self, i + 1, acc + gens[i].scaled(mod_i64(v, p)), m);
    }
  };
  rec(rec, 0, FpMat(n, p), 0);
  return hit;
}

}  // namespace detail

struct MatProperReport {
  bool proper = true;
  std::optional<CollisionWitness> collision;
};

struct MatIsolationReport {
  bool isolated = true;
  std::optional<IsolationWitness> witness;
};

// Proper iff no two coefficient vectors in the box evaluate to the same
// matrix, i.e. no nonzero relation in the difference box (2 N_i).
inline MatProperReport mat_is_proper(const MatGap& b, u64 cap = kDefaultCap) {
  WorkMeter meter(cap);
  std::vector<i64> diff = b.bounds();
  for (i64& v : diff) v = checked_mul(v, 2);
  const auto rel = detail::mat_find_zero_relation(b.generators(), diff, meter);
  MatProperReport rep;
  if (rel) {
    rep.proper = false;
    rep.collision = detail::split_collision(*rel, true);
  }
  return rep;
}

inline MatIsolationReport mat_is_isolated(const MatGap& b, const Rat& kappa,
                                          u64 cap = kDefaultCap) {
  if (!kappa.positive()) throw InvalidArgumentError("kappa must be positive");
  WorkMeter meter(cap);
  std::vector<i64> lim = b.bounds();
  for (i64& v : lim) v = kappa.mul_floor(v);
  const auto rel = detail::mat_find_zero_relation(b.generators(), lim, meter);
  MatIsolationReport rep;
  if (rel) {
    rep.isolated = false;
    rep.witness = IsolationWitness{*rel};
  }
  return rep;
}

// Meet-in-the-middle decomposer over the matrix box. Left halves are stored
// flat, keyed by a 64-bit fingerprint; probes verify entries exactly, so a
// fingerprint collision costs time but never correctness.
// Boxes up to this size are tabled in full so membership probes are O(1);
// larger ones fall back to meet-in-the-middle halves.
inline constexpr u64 kMatFullTableThreshold = u64(1) << 20;

class MatDecomposer {
 public:
  explicit MatDecomposer(const MatGap& b, u64 cap = kDefaultCap)
      : b_(b),
        meter_(cap),
        dl_(b.box_size() <= kMatFullTableThreshold ? b.rank() : (b.rank() + 1) / 2) {
    detail::mat_for_each_partial(b_, 0, dl_, [&](const FpMat& m) {
      meter_.charge();
      table_[m.fingerprint()].push_back({next_index_++, m.entries()});
      return true;
    });
  }

  DecomposeResult decompose(const FpMat& z) {
    check(z);
    DecomposeResult out;
    u64 best_l = 0, best_r = 0;
    u64 count = 0, ridx = 0;
    detail::mat_for_each_partial(b_, dl_, b_.rank(), [&](const FpMat& m) {
      meter_.charge();
      const FpMat target = z - m;
      const auto it = table_.find(target.fingerprint());
      if (it != table_.end()) {
        for (const auto& [lidx, flat] : it->second) {
          if (flat != target.entries()) continue;
          ++count;
          if (count == 1 || lidx < best_l || (lidx == best_l && ridx < best_r)) {
            best_l = lidx;
            best_r = ridx;
          }
        }
      }
      ++ridx;
      return true;
    });
    if (count == 0) return out;
    std::vector<i64> coeffs = detail::mat_decode_lex(b_, 0, dl_, best_l);
    const std::vector<i64> right = detail::mat_decode_lex(b_, dl_, b_.rank(), best_r);
    coeffs.insert(coeffs.end(), right.begin(), right.end());
    out.coeffs = std::move(coeffs);
    out.ambiguous = count > 1;
    return out;
  }

  bool contains(const FpMat& z) {
    check(z);
    bool found = false;
    detail::mat_for_each_partial(b_, dl_, b_.rank(), [&](const FpMat& m) {
      meter_.charge();
      const FpMat target = z - m;
      const auto it = table_.find(target.fingerprint());
      if (it != table_.end())
        for (const auto& [lidx, flat] : it->second)
          if (flat == target.entries()) {
            found = true;
            return false;  // stop the scan
          }
      return true;
    });
    return found;
  }

 private:
  void check(const FpMat& z) const {
    if (z.modulus() != b_.modulus() || z.order() != b_.dim())
      throw InvalidArgumentError("matrix shape or modulus mismatch");
  }

  MatGap b_;
  WorkMeter meter_;
  size_t dl_;
  u64 next_index_ = 0;
  std::unordered_map<u64, std::vector<std::pair<u64, std::vector<u64>>>> table_;
};

inline DecomposeResult mat_decompose(const FpMat& z, const MatGap& b, u64 cap = kDefaultCap) {
  MatDecomposer dec(b, cap);
  return dec.decompose(z);
}

// Decomposes every product Y_i Y_j' over B's matrix basis (row-major).
// `side` labels the containment being certified in error messages.
inline DecompositionTable mat_decompose_products(const MatGap& a, const MatGap& a_prime,
                                                 const MatGap& b, u64 cap = kDefaultCap,
                                                 const std::string& side = "") {
  const size_t d = b.rank();
  if (a.rank() != d || a_prime.rank() != d)
    throw InvalidArgumentError("gaps must share a rank");
  if (a.modulus() != b.modulus() || a_prime.modulus() != b.modulus())
    throw InvalidArgumentError("gaps must share a modulus");
  if (a.dim() != b.dim() || a_prime.dim() != b.dim())
    throw InvalidArgumentError("gaps must share a matrix dimension");
  for (const FpMat& g : a.generators())
    if (g.is_zero()) throw InvalidArgumentError("zero generator on the left side");
  for (const FpMat& g : a_prime.generators())
    if (g.is_zero()) throw InvalidArgumentError("zero generator on the right side");

  MatDecomposer dec(b, cap);
  DecompositionTable table;
  table.d = d;
  table.entries.assign(d, std::vector<std::vector<i64>>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) {
      const FpMat prod = a.generators()[i] * a_prime.generators()[j];
      DecomposeResult r = dec.decompose(prod);
      if (!r.found()) throw NotContainedError(i + 1, j + 1, side);
      if (r.ambiguous) table.ambiguous_pairs.push_back({i + 1, j + 1});
      for (i64 c : *r.coeffs)
        table.bound_observed = std::max(table.bound_observed, c < 0 ? -c : c);
      table.entries[i][j] = std::move(*r.coeffs);
    }
  return table;
}

struct MatProductViolation {
  std::string side;  // "AA'" or "A'A"
  std::vector<i64> left_coeffs, right_coeffs;  // factors in product order
};

struct MatContainmentReport {
  bool contained = true;
  std::optional<MatProductViolation> violation;  // first by side, then lex
};

// Checks A A' in B and A' A in B elementwise; the first violating pair
// (AA' side first, outer factor lexicographic, then inner) is reported.
inline MatContainmentReport mat_contains_product(const MatGap& a, const MatGap& a_prime,
                                                 const MatGap& b, u64 cap = kDefaultCap) {
  if (a.modulus() != b.modulus() || a_prime.modulus() != b.modulus())
    throw InvalidArgumentError("gaps must share a modulus");
  if (a.dim() != b.dim() || a_prime.dim() != b.dim())
    throw InvalidArgumentError("gaps must share a matrix dimension");
  MatDecomposer dec(b, cap);
  WorkMeter meter(cap);

  MatContainmentReport report;
  auto check_side = [&](const MatGap& left, const MatGap& right, const char* side) {
    std::vector<FpMat> inner;
    detail::mat_for_each_partial(right, 0, right.rank(), [&](const FpMat& v) {
      meter.charge();
      inner.push_back(v);
      return true;
    });
    u64 outer_idx = 0;
    const bool stopped = detail::mat_for_each_partial(
        left, 0, left.rank(), [&](const FpMat& u) {
          for (u64 k = 0; k < inner.size(); ++k) {
            meter.charge();
            if (dec.contains(u * inner[k])) continue;
            MatProductViolation viol;
            viol.side = side;
            viol.left_coeffs = detail::mat_decode_lex(left, 0, left.rank(), outer_idx);
            viol.right_coeffs = detail::mat_decode_lex(right, 0, right.rank(), k);
            report.contained = false;
            report.violation = std::move(viol);
            return false;
          }
          ++outer_idx;
          return true;
        });
    return !stopped;
  };
  if (check_side(a, a_prime, "AA'")) check_side(a_prime, a, "A'A");
  return report;
}

// f evaluated at X mod p via Horner; true iff the result is the zero matrix.
inline bool verify_matrix_poly(const IntPoly& f, const FpMat& x) {
  const u64 p = x.modulus();
  FpMat acc(x.order(), p);
  for (size_t k = f.coeffs().size(); k-- > 0;) {
    acc = acc * x;
    acc = acc + FpMat::identity(x.order(), p).scaled(mod_i64(f.coeff(k), p));
  }
  return acc.is_zero();
}

struct MatRecoveryReport {
  size_t d = 0;
  size_t n = 0;
  size_t pivot_i = 0, pivot_j = 0;  // 1-based pair used
  DecompositionTable table;         // Y_i Y_j' over the X basis
  DecompositionTable table_rev;     // Y_i' Y_j over the X basis

  i64 eq4_observed = 0;
  Rat eq4_limit{0};
  bool eq4_exceeded = false;
  Rat c_constant{0};
  i64 search_height_cap = 0;

  std::optional<IntMatrix> T, T_prime;
  std::optional<Fp> det_t, det_t_prime;
  std::vector<IntMatrix> T_k;
  i64 det_t1 = 0;

  std::vector<IntPoly> f;  // char polys of adj(T_1)T_k
  std::vector<IntPoly> g;  // content-free rescalings; g_k(X_k) = 0
  std::vector<i64> f_heights, g_heights;
  std::vector<bool> verified;
  std::vector<bool> conj_consistent;  // conjugated evaluation agrees

  bool ambiguous = false;
  std::optional<RecoveryFailure> failure;

  bool all_verified() const {
    if (failure || verified.empty()) return false;
    for (bool v : verified)
      if (!v) return false;
    return true;
  }
};

// Corollary-style recovery over M_n(F_p). Pivot pair (i, j) is 1-based;
// passing 0 for either index switches to an auto-search over pairs with
// invertible Y_i and Y_j'. Hypothesis violations detectable up front throw;
// mid-pipeline obstructions are returned in report.failure.
inline MatRecoveryReport recover_matrix_generators(const MatGap& b, const MatGap& a,
                                                   const MatGap& a_prime, size_t pivot_i = 0,
                                                   size_t pivot_j = 0,
                                                   const RecoveryConfig& config = {}) {
  const u64 p = b.modulus();
  const size_t d = b.rank();
  const size_t n = b.dim();
  if (a.modulus() != p || a_prime.modulus() != p)
    throw InvalidArgumentError("gaps must share a modulus");
  if (a.rank() != d || a_prime.rank() != d)
    throw InvalidArgumentError("gaps must share a rank");
  if (a.dim() != n || a_prime.dim() != n)
    throw InvalidArgumentError("gaps must share a matrix dimension");
  if (!(b.generators()[0] == FpMat::identity(n, p)))
    throw InvalidArgumentError("first generator must be the identity");
  if (config.kappa < Rat(6))
    throw InvalidArgumentError("isolation parameter must be at least 6");
  if (!config.c.positive() || config.c >= Rat(1) || !config.c_prime.positive() ||
      config.c_prime >= Rat(1))
    throw InvalidArgumentError("constants c, c' must lie in (0,1)");
  if (pivot_i > d || pivot_j > d) throw InvalidArgumentError("pivot index out of range");

  const auto invertible = [&](const FpMat& m) { return m.invertible(); };

  // candidate pivot pairs: explicit first, then (on retry) every pair with
  // invertible Y_i and Y_j'
  std::vector<std::pair<size_t, size_t>> pairs;
  const bool explicit_pair = pivot_i != 0 && pivot_j != 0;
  if (explicit_pair) {
    if (!invertible(a.generators()[pivot_i - 1]))
      throw NotInvertibleError("Y_" + std::to_string(pivot_i) + " is singular");
    if (!invertible(a_prime.generators()[pivot_j - 1]))
      throw NotInvertibleError("Y'_" + std::to_string(pivot_j) + " is singular");
    pairs.push_back({pivot_i, pivot_j});
  }
  if (!explicit_pair || config.retry_pivots) {
    for (size_t i = 1; i <= d; ++i) {
      if ((pivot_i != 0 && !explicit_pair && i != pivot_i) || !invertible(a.generators()[i - 1]))
        continue;
      for (size_t j = 1; j <= d; ++j) {
        if ((pivot_j != 0 && !explicit_pair && j != pivot_j) ||
            (explicit_pair && i == pivot_i && j == pivot_j) ||
            !invertible(a_prime.generators()[j - 1]))
          continue;
        pairs.push_back({i, j});
      }
    }
  }
  if (pairs.empty())
    throw NotInvertibleError("no generator pair with invertible Y_i and Y_j'");

  const MatIsolationReport iso = mat_is_isolated(b, config.kappa, config.cap);
  if (!iso.isolated) throw NotIsolatedError(iso.witness->coefficients, config.kappa);
  const MatProperReport pa = mat_is_proper(a, config.cap);
  if (!pa.proper) throw NotProperError("A", pa.collision->lhs, pa.collision->rhs);
  const MatProperReport pap = mat_is_proper(a_prime, config.cap);
  if (!pap.proper) throw NotProperError("A_prime", pap.collision->lhs, pap.collision->rhs);

  MatRecoveryReport rep;
  rep.d = d;
  rep.n = n;
  rep.table = mat_decompose_products(a, a_prime, b, config.cap, "AA'");
  rep.table_rev = mat_decompose_products(a_prime, a, b, config.cap, "A'A");
  rep.ambiguous = rep.table.ambiguous() || rep.table_rev.ambiguous();

  const Rat c2 = config.c_second();
  rep.eq4_limit = Rat(3) / c2;
  rep.eq4_observed = rep.table.bound_observed;
  rep.eq4_exceeded = Rat(rep.eq4_observed) >= rep.eq4_limit;
  Rat cconst(1);
  for (i64 m = 1; m + 1 <= static_cast<i64>(d); ++m) cconst = cconst * Rat(m);
  for (size_t m = 1; m < d; ++m) cconst = cconst * rep.eq4_limit;
  rep.c_constant = cconst;
  rep.search_height_cap =
      config.search_height_cap > 0 ? config.search_height_cap : checked_mul(3, cconst.ceil());

  std::optional<MatDecomposer> sdec;
  const auto s_decomposer = [&]() -> MatDecomposer& {
    if (!sdec) {
      MatGap sgap(p, n, b.generators(), std::vector<i64>(d, rep.search_height_cap));
      sdec.emplace(sgap, config.cap);
    }
    return *sdec;
  };

  const auto attempt = [&](size_t pi, size_t pj) -> std::optional<RecoveryFailure> {
    IntMatrix tm(d), tpm(d);
    for (size_t m = 0; m < d; ++m)
      for (size_t k = 0; k < d; ++k) {
        tm.at(m, k) = rep.table.entries[pi - 1][m][k];
        tpm.at(m, k) = rep.table.entries[m][pj - 1][k];
      }

    const Fp det_t(tm.reduce_mod(p).det(), p);
    if (det_t.value() == 0)
      return RecoveryFailure{"not_proper", "A_prime", 0, 0,
                             bounded_left_nullvector(tm, std::max<i64>(1, tm.max_abs_entry()), p)};
    const Fp det_tp(tpm.reduce_mod(p).det(), p);
    if (det_tp.value() == 0)
      return RecoveryFailure{"not_proper", "A", 0, 0,
                             bounded_left_nullvector(tpm, std::max<i64>(1, tpm.max_abs_entry()), p)};

    const FpMat yi_inv = a.generators()[pi - 1].inverse();
    const FpMat yj_inv = a_prime.generators()[pj - 1].inverse();
    const u64 pref = (det_t * det_tp).value();

    std::vector<IntMatrix> smats(d, IntMatrix(d));
    for (size_t k = 0; k < d; ++k)
      for (size_t m = 0; m < d; ++m) {
        const FpMat z =
            (yi_inv * b.generators()[k] * b.generators()[m] * yj_inv).scaled(pref);
        const DecomposeResult dr = s_decomposer().decompose(z);
        if (!dr.found()) return RecoveryFailure{"s_not_found", "", k + 1, m + 1, {}};
        for (size_t l = 0; l < d; ++l) smats[k].at(m, l) = (*dr.coeffs)[l];
      }

    IntMatrix& t1 = smats[0];
    if (t1.reduce_mod(p).det() == 0)
      return RecoveryFailure{"not_proper", "B", 0, 0,
                             bounded_left_nullvector(t1, std::max<i64>(1, t1.max_abs_entry()), p)};

    const i64 det_t1 = t1.det();
    const IntMatrix adj_t1 = t1.adjugate();

    rep.T = std::move(tm);
    rep.T_prime = std::move(tpm);
    rep.det_t = det_t;
    rep.det_t_prime = det_tp;
    rep.det_t1 = det_t1;
    rep.f.clear();
    rep.g.clear();
    rep.f_heights.clear();
    rep.g_heights.clear();
    rep.verified.clear();
    rep.conj_consistent.clear();
    for (size_t k = 0; k < d; ++k) {
      const IntPoly fk = (adj_t1 * smats[k]).char_poly();
      const IntPoly gk = fk.compose_scaled(det_t1).normalized();
      rep.f_heights.push_back(fk.height());
      rep.g_heights.push_back(gk.height());
      const bool ok = verify_matrix_poly(gk, b.generators()[k]);
      const bool conj_ok =
          verify_matrix_poly(gk, yi_inv * b.generators()[k] * a.generators()[pi - 1]);
      rep.verified.push_back(ok);
      rep.conj_consistent.push_back(conj_ok == ok);
      rep.f.push_back(fk);
      rep.g.push_back(gk);
    }
    rep.T_k = std::move(smats);
    return std::nullopt;
  };

  std::optional<RecoveryFailure> first_failure;
  for (const auto& [pi, pj] : pairs) {
    std::optional<RecoveryFailure> outcome = attempt(pi, pj);
    if (!outcome) {
      rep.pivot_i = pi;
      rep.pivot_j = pj;
      rep.failure.reset();
      return rep;
    }
    if (!first_failure) first_failure = std::move(outcome);
  }
  rep.pivot_i = pairs.front().first;
  rep.pivot_j = pairs.front().second;
  rep.failure = std::move(first_failure);
  return rep;
}

}  // namespace gapkit
