#pragma once

// Constructive recovery pipeline: bounded left null vectors of singular
// integer matrices, rank-2 quadratic recovery, full rank-d generator
// recovery, and the symmetrization reduction for one-sided inputs.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapkit/decompose.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/int_matrix.hpp"
#include "gapkit/int_poly.hpp"

namespace gapkit {

class NotIsolatedError : public Error {
 public:
  NotIsolatedError(std::vector<i64> witness_, const Rat& kappa_)
      : Error("gap is not " + kappa_.str() + "-isolated"),
        witness(std::move(witness_)),
        kappa(kappa_) {}
  std::vector<i64> witness;  // nonzero relation with |a_i| <= floor(kappa*N_i)
  Rat kappa;
};

class NotProperError : public Error {
 public:
  NotProperError(std::string subject_, std::vector<i64> lhs_, std::vector<i64> rhs_)
      : Error("gap " + subject_ + " is not proper"),
        subject(std::move(subject_)),
        lhs(std::move(lhs_)),
        rhs(std::move(rhs_)) {}
  std::string subject;  // "A", "A_prime" or "B"
  std::vector<i64> lhs, rhs;
};

struct RecoveryConfig {
  Rat c{1, 2};        // sub-box constant for A
  Rat c_prime{1, 2};  // sub-box constant for A'
  Rat eps{1, 2};      // exponent split, only relevant for cover witnesses
  Rat kappa{6};       // isolation strength demanded of B
  size_t pivot = 1;   // 1-based generator index i used to assemble T, T'
  i64 search_height_cap = 0;  // bound for the s coefficients; 0 = derive
  u64 cap = kDefaultCap;      // enumeration work budget per search
  bool retry_pivots = true;   // try other pivots when T or T' is singular

  Rat c_second() const { return c * c_prime / Rat(2); }
};

// A mid-pipeline obstruction. kind "not_proper" carries a bounded relation
// certifying that the named gap violates properness/isolation; kind
// "s_not_found" names the product pair (1-based) whose rescaled value had
// no decomposition within the search height cap.
struct RecoveryFailure {
  std::string kind;
  std::string subject;
  size_t j = 0;
  size_t k = 0;
  std::vector<i64> witness;
};

struct RecoveryReport {
  size_t d = 0;
  size_t pivot_used = 0;  // 1-based
  DecompositionTable table;

  i64 eq4_observed = 0;    // max |a_ij^(k)| over the table
  Rat eq4_limit{0};        // 3 / c''; the bound is strict
  bool eq4_exceeded = false;
  Rat c_constant{0};       // adjugate entry bound (d-1)! * (3/c'')^(d-1)
  i64 search_height_cap = 0;

  std::optional<IntMatrix> T, T_prime;
  std::optional<Fp> det_t, det_t_prime;
  std::vector<IntMatrix> T_j;  // coefficient matrices of the rescaled products
  i64 det_t1 = 0;              // exact integer determinant of T_j[0]

  std::vector<IntPoly> f;  // char polys of adj(T_1)T_j; f_j(det(T_1) x_j) = 0
  std::vector<IntPoly> g;  // content-free rescalings; g_j(x_j) = 0
  std::vector<i64> f_heights, g_heights;
  std::vector<bool> verified;  // g_j(x_j) = 0 mod p, checked independently

  bool ambiguous = false;  // some product decomposition was not unique
  std::optional<RecoveryFailure> failure;

  bool all_verified() const {
    if (failure || verified.empty()) return false;
    for (bool v : verified)
      if (!v) return false;
    return true;
  }
};

// Nonzero integer vector a with a*T = 0 mod p and |a_i| <= d! * C^d, where
// C bounds the entries of T. Zero rows give unit vectors directly; otherwise
// take a maximal independent row prefix plus the first dependent row, restrict
// to the pivot columns plus one spare, and read the last adjugate row of that
// square submatrix. Its corner entry is a nonzero minor of independent rows,
// so the vector is nonzero, and adj(S)*S = det(S)*I = 0 mod p on the chosen
// columns; membership in the row span extends the annihilation to all columns.
inline std::vector<i64> bounded_left_nullvector(const IntMatrix& t, i64 c_bound, u64 p) {
  const size_t d = t.order();
  if (c_bound < 1) throw InvalidArgumentError("entry bound must be positive");
  if (t.max_abs_entry() > c_bound)
    throw InvalidArgumentError("matrix entries exceed the stated bound");
  if (p < 2) throw InvalidArgumentError("modulus must be at least 2");

  std::vector<std::vector<u64>> rows(d, std::vector<u64>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) rows[i][j] = mod_i64(t.at(i, j), p);

  for (size_t i = 0; i < d; ++i) {
    bool zero = true;
    for (size_t j = 0; j < d; ++j) zero = zero && rows[i][j] == 0;
    if (zero) {
      std::vector<i64> out(d, 0);
      out[i] = 1;
      return out;
    }
  }

  const RowBasis basis = greedy_row_basis(rows, p);
  if (!basis.first_dependent) throw NotSingularError();
  const size_t dep = *basis.first_dependent;

  std::vector<size_t> keep, pivots;
  for (size_t m = 0; m < basis.rows.size(); ++m) {
    if (basis.rows[m] >= dep) break;
    keep.push_back(basis.rows[m]);
    pivots.push_back(basis.pivot_cols[m]);
  }
  const size_t k = keep.size();  // >= 1: rows are nonzero, so row 0 is kept

  std::vector<size_t> cols = pivots;
  std::sort(cols.begin(), cols.end());
  for (size_t c = 0; c < d; ++c) {
    if (!std::binary_search(cols.begin(), cols.end(), c)) {
      cols.push_back(c);  // spare column goes last
      break;
    }
  }
  std::vector<size_t> sel = keep;
  sel.push_back(dep);  // dependent row goes last

  IntMatrix sub(k + 1);
  for (size_t a = 0; a <= k; ++a)
    for (size_t b = 0; b <= k; ++b) sub.at(a, b) = t.at(sel[a], cols[b]);

  const IntMatrix adj = sub.adjugate();
  std::vector<i64> out(d, 0);
  for (size_t m = 0; m <= k; ++m) out[sel[m]] = adj.at(k, m);

  for (i64& v : out) {
    if (v == 0) continue;
    if (v < 0)
      for (i64& w : out) w = -w;
    break;
  }
  return out;
}

struct Rank2Report {
  IntPoly f;  // monic: x^2 - b0*x - a0
  i64 a0 = 0;
  i64 b0 = 0;
  bool verified = false;
  bool ambiguous = false;
  bool guard_ok = true;  // |B|^3 <= p^2 size guard
  Rat height_limit{0};   // 8 / c^2
  bool height_exceeded = false;
};

// Rank-2 recovery: t^2 lies in the product set of A with itself, so it
// decomposes as a0 + b0*t in B; x^2 - b0*x - a0 then vanishes at t.
inline Rank2Report recover_rank2(const Gap& b, const Gap& a,
                                 const RecoveryConfig& config = {}) {
  const u64 p = b.modulus();
  if (b.rank() != 2 || b.form() != GapForm::symmetric || b.base_point() != 0)
    throw InvalidArgumentError("rank-2 recovery expects a symmetric rank-2 gap with zero base point");
  if (b.generators()[0] != 1 % p)
    throw InvalidArgumentError("first generator must be 1");
  if (a.modulus() != p)
    throw InvalidArgumentError("gaps must share a modulus");
  if (!config.c.positive() || config.c >= Rat(1))
    throw InvalidArgumentError("constant c must lie in (0,1)");

  const Fp t(b.generators()[1], p);
  // witness the product-set membership chain: t in A, so t^2 in AA
  if (!decompose(t, a, config.cap).found()) throw NotContainedError();
  const DecomposeResult dec = decompose(t * t, b, config.cap);
  if (!dec.found()) throw NotContainedError();

  Rank2Report rep;
  rep.a0 = (*dec.coeffs)[0];
  rep.b0 = (*dec.coeffs)[1];
  rep.ambiguous = dec.ambiguous;
  rep.f = IntPoly({-rep.a0, -rep.b0, 1});
  rep.height_limit = Rat(8) / (config.c * config.c);
  rep.height_exceeded = Rat(rep.f.height()) > rep.height_limit;

  const u128 box = b.box_size();
  const u128 psq = static_cast<u128>(p) * p;
  rep.guard_ok = box <= (u128{1} << 41) && box * box * box <= psq;

  rep.verified = eval_poly_mod(rep.f, t).value() == 0;
  return rep;
}

namespace detail {

inline void require_symmetric_zero_base(const Gap& g, const char* name) {
  if (g.form() != GapForm::symmetric || g.base_point() != 0)
    throw InvalidArgumentError(std::string(name) +
                               " must be symmetric with zero base point; symmetrize first");
}

}  // namespace detail

// Full rank-d recovery. Hypothesis violations detectable up front throw
// (NotIsolatedError, NotProperError, NotContainedError); obstructions found
// mid-pipeline are returned in report.failure together with their witness.
inline RecoveryReport recover_generators(const Gap& b, const Gap& a, const Gap& a_prime,
                                         const RecoveryConfig& config = {}) {
  const u64 p = b.modulus();
  const size_t d = b.rank();
  if (a.modulus() != p || a_prime.modulus() != p)
    throw InvalidArgumentError("gaps must share a modulus");
  if (a.rank() != d || a_prime.rank() != d)
    throw InvalidArgumentError("gaps must share a rank");
  detail::require_symmetric_zero_base(b, "B");
  detail::require_symmetric_zero_base(a, "A");
  detail::require_symmetric_zero_base(a_prime, "A'");
  if (b.generators()[0] != 1 % p)
    throw InvalidArgumentError("first generator must be 1");
  if (config.kappa < Rat(6))
    throw InvalidArgumentError("isolation parameter must be at least 6");
  if (!config.c.positive() || config.c >= Rat(1) || !config.c_prime.positive() ||
      config.c_prime >= Rat(1))
    throw InvalidArgumentError("constants c, c' must lie in (0,1)");
  if (!config.eps.positive() || config.eps >= Rat(1))
    throw InvalidArgumentError("epsilon must lie in (0,1)");
  if (config.pivot < 1 || config.pivot > d)
    throw InvalidArgumentError("pivot index out of range");

  const IsolationReport iso = is_isolated(b, config.kappa, config.cap);
  if (!iso.isolated) throw NotIsolatedError(iso.witness->coefficients, config.kappa);
  const ProperReport pa = is_proper(a, config.cap);
  if (!pa.proper) throw NotProperError("A", pa.collision->lhs, pa.collision->rhs);
  const ProperReport pap = is_proper(a_prime, config.cap);
  if (!pap.proper) throw NotProperError("A_prime", pap.collision->lhs, pap.collision->rhs);

  RecoveryReport rep;
  rep.d = d;
  rep.table = decompose_products(a, a_prime, b, config.cap);
  rep.ambiguous = rep.table.ambiguous();

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

  std::vector<Fp> x, y, yp;
  for (size_t i = 0; i < d; ++i) {
    x.emplace_back(b.generators()[i], p);
    y.emplace_back(a.generators()[i], p);
    yp.emplace_back(a_prime.generators()[i], p);
  }

  // candidate pivots: the configured one first, then the rest in order
  std::vector<size_t> pivots{config.pivot};
  if (config.retry_pivots)
    for (size_t i = 1; i <= d; ++i)
      if (i != config.pivot) pivots.push_back(i);

  std::optional<Decomposer> sdec;  // search over B's generators with widened bounds
  const auto s_decomposer = [&]() -> Decomposer& {
    if (!sdec) {
      Gap sgap(p, b.generators(), std::vector<i64>(d, rep.search_height_cap), 0,
               GapForm::symmetric);
      sdec.emplace(sgap, config.cap);
    }
    return *sdec;
  };

  const auto attempt = [&](size_t piv) -> std::optional<RecoveryFailure> {
    const size_t i = piv - 1;
    IntMatrix tm(d), tpm(d);
    for (size_t j = 0; j < d; ++j)
      for (size_t k = 0; k < d; ++k) {
        tm.at(j, k) = rep.table.entries[i][j][k];
        tpm.at(j, k) = rep.table.entries[j][i][k];
      }

    const Fp det_t = Fp(tm.reduce_mod(p).det(), p);
    if (det_t.value() == 0)
      return RecoveryFailure{"not_proper", "A_prime", 0, 0,
                             bounded_left_nullvector(tm, std::max<i64>(1, tm.max_abs_entry()), p)};
    const Fp det_tp = Fp(tpm.reduce_mod(p).det(), p);
    if (det_tp.value() == 0)
      return RecoveryFailure{"not_proper", "A", 0, 0,
                             bounded_left_nullvector(tpm, std::max<i64>(1, tpm.max_abs_entry()), p)};

    // z_jk = det(T) det(T') x_j x_k / (y_i y_i'); its coefficients over the
    // x_l form the matrix T_j, and x is a shared eigenvector of adj(T_1)T_j
    const Fp pref = det_t * det_tp * (y[i] * yp[i]).inv();
    std::vector<IntMatrix> smats(d, IntMatrix(d));
    for (size_t j = 0; j < d; ++j)
      for (size_t k = 0; k < d; ++k) {
        const Fp z = pref * x[j] * x[k];
        const DecomposeResult dr = s_decomposer().decompose(z);
        if (!dr.found()) return RecoveryFailure{"s_not_found", "", j + 1, k + 1, {}};
        for (size_t l = 0; l < d; ++l) smats[j].at(k, l) = (*dr.coeffs)[l];
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
    for (size_t j = 0; j < d; ++j) {
      const IntPoly fj = (adj_t1 * smats[j]).char_poly();
      const IntPoly gj = fj.compose_scaled(det_t1).normalized();
      rep.f_heights.push_back(fj.height());
      rep.g_heights.push_back(gj.height());
      rep.verified.push_back(eval_poly_mod(gj, x[j]).value() == 0);
      rep.f.push_back(fj);
      rep.g.push_back(gj);
    }
    rep.T_j = std::move(smats);
    return std::nullopt;
  };

  std::optional<RecoveryFailure> first_failure;
  for (size_t piv : pivots) {
    std::optional<RecoveryFailure> outcome = attempt(piv);
    if (!outcome) {
      rep.pivot_used = piv;
      rep.failure.reset();
      return rep;
    }
    if (!first_failure) first_failure = std::move(outcome);
  }
  rep.pivot_used = pivots.front();
  rep.failure = std::move(first_failure);
  return rep;
}

struct SymmetrizeResult {
  Gap b;
  Gap a;
  Gap a_prime;
};

// Reduction for non-symmetric inputs: 24-isolation of B makes 2(B-B)
// 6-isolated, and AA' in B gives (A-A)(A'-A') in 2(B-B). The containment is
// re-verified exhaustively rather than trusted.
inline SymmetrizeResult symmetrize(const Gap& b, const Gap& a, const Gap& a_prime,
                                   u64 cap = kDefaultCap) {
  const u64 p = b.modulus();
  if (a.modulus() != p || a_prime.modulus() != p)
    throw InvalidArgumentError("gaps must share a modulus");

  const IsolationReport iso = is_isolated(b, Rat(24), cap);
  if (!iso.isolated) throw NotIsolatedError(iso.witness->coefficients, Rat(24));

  Gap b2 = sumset_scale(difference_gap(b), 2);
  Gap a2 = difference_gap(a);
  Gap ap2 = difference_gap(a_prime);
  if (a2.rank() != b2.rank() || ap2.rank() != b2.rank())
    throw InvalidArgumentError("degenerate coordinate collapses rank during symmetrization");

  const ContainmentReport chk = contains_product(a2, ap2, b2, cap);
  if (!chk.contained) throw NotContainedError();
  return SymmetrizeResult{std::move(b2), std::move(a2), std::move(ap2)};
}

}  // namespace gapkit
