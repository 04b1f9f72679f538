#pragma once
// Reproducible instance generators: algebraic GAP fixtures whose hypotheses
// are re-verified before returning, a proper-but-not-isolated family, random
// boxes for negative controls, and companion-matrix analogues.

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapkit/decompose.hpp"
#include "gapkit/fp.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/int_math.hpp"
#include "gapkit/int_poly.hpp"
#include "gapkit/matrix_ring.hpp"
#include "gapkit/rng.hpp"

namespace gapkit {

// Echo of the parameters a generator was called with; serialized alongside
// every instance so runs can be replayed exactly.
struct InstanceSpec {
  std::string kind;  // quadratic | degenerate | random | matrix
  u64 p = 0;
  size_t d = 2;   // GAP rank
  size_t n = 1;   // matrix order (1 = field case)
  i64 n_bound = 0;
  Rat c{1, 2}, c_prime{1, 2}, eps{1, 2};
  std::vector<std::vector<i64>> poly_seeds;  // defining polynomial coefficients
  u64 rng_seed = 0;
};

// Largest N with (2N+1)^3 <= p: the widest box the rank-2 recovery guard
// admits at this modulus.
inline i64 quadratic_guard_max_n(u64 p) {
  const u64 r = kth_root_floor(boost::multiprecision::cpp_int(p), 3);
  return r < 3 ? 0 : static_cast<i64>((r - 1) / 2);
}

struct QuadraticInstance {
  InstanceSpec spec;
  Gap b, a;
  Fp t;                 // shared generator, a root of x^2 + c1 x + c0
  bool guard_ok;        // (2N+1)^3 <= p
  bool b_proper;
  bool containment_ok;  // A * A inside B, checked exhaustively
  std::optional<ProductViolation> violation;
};

// B = {a + b t : |a|,|b| <= N} for t a root of x^2 + c1 x + c0 mod p, with
// A the c sqrt(N) sub-box. Throws NoRootError when the discriminant is a
// non-residue; containment/properness failures are reported as flags.
inline QuadraticInstance gen_quadratic(u64 p, i64 c0, i64 c1, const Rat& c, i64 n,
                                       u64 cap = kDefaultCap) {
  PrimeField field(p);
  if (p < 3) throw InvalidArgumentError("modulus must be an odd prime");
  if (n < 1) throw InvalidArgumentError("box bound must be positive");
  if (c0 < -100 || c0 > 100 || c1 < -100 || c1 > 100)
    throw InvalidArgumentError("defining coefficients must lie in [-100, 100]");
  if (!c.positive() || Rat(1) < c)
    throw InvalidArgumentError("sub-box scale must lie in (0, 1]");

  const Fp disc = Fp::from_int(c1 * c1 - 4 * c0, p);
  const auto roots = sqrt_mod(disc);
  if (!roots)
    throw NoRootError("x^2 + c1 x + c0 has no root mod p: discriminant " +
                      std::to_string(disc.value()) + " is a non-residue");
  const Fp t = (roots->first - Fp::from_int(c1, p)) * Fp(2, p).inv();
  if (eval_poly_mod(IntPoly({c0, c1, 1}), t).value() != 0)
    throw InvalidArgumentError("internal: reconstructed root fails its polynomial");

  const i64 m = scaled_pow_floor(static_cast<u64>(n), Rat(1, 2), c);
  if (m < 1) throw InvalidArgumentError("c sqrt(N) is below 1; sub-box would be empty");

  Gap b(p, {1, t.value()}, {n, n});
  Gap a(p, {1, t.value()}, {m, m});

  QuadraticInstance inst{InstanceSpec{}, b, a, t, quadratic_guard_max_n(p) >= n,
                         is_proper(b, cap).proper, true, std::nullopt};
  ContainmentReport cont = contains_product(a, a, b, cap);
  inst.containment_ok = cont.contained;
  inst.violation = std::move(cont.violation);

  inst.spec.kind = "quadratic";
  inst.spec.p = p;
  inst.spec.d = 2;
  inst.spec.n_bound = n;
  inst.spec.c = c;
  inst.spec.poly_seeds = {{c0, c1}};
  return inst;
}

struct DegenerateInstance {
  InstanceSpec spec;
  Gap b, a;
  bool b_proper;
  std::vector<i64> isolation_witness;  // empty would mean unexpectedly isolated
};

// B = {a + b N : 0 <= a,b < N} is an interval in disguise: proper, contains
// A * A for A = [0, N-1], yet never 6-isolated (witness (-N, 1)).
inline DegenerateInstance gen_degenerate(u64 p, i64 n, u64 cap = kDefaultCap) {
  PrimeField field(p);
  if (n < 2) throw InvalidArgumentError("bound must be at least 2");
  if (!(static_cast<u128>(n) * static_cast<u128>(n) < p))
    throw InvalidArgumentError("requires N^2 < p");

  Gap b(p, {1, static_cast<u64>(n)}, {n, n}, 0, GapForm::one_sided);
  Gap a(p, {1}, {n}, 0, GapForm::one_sided);

  DegenerateInstance inst{InstanceSpec{}, b, a, is_proper(b, cap).proper, {}};
  IsolationReport iso = is_isolated(b, Rat(6), cap);
  if (!iso.isolated && iso.witness) inst.isolation_witness = iso.witness->coefficients;

  inst.spec.kind = "degenerate";
  inst.spec.p = p;
  inst.spec.d = 2;
  inst.spec.n_bound = n;
  return inst;
}

struct RandomInstance {
  InstanceSpec spec;
  Gap b;
};

// x_1 = 1, remaining generators uniform nonzero mod p; deterministic in seed.
inline RandomInstance gen_random(u64 p, size_t d, i64 n, u64 seed) {
  PrimeField field(p);
  if (d < 1) throw InvalidArgumentError("rank must be at least 1");
  if (n < 1) throw InvalidArgumentError("box bound must be positive");

  SplitMix64 rng = SplitMix64::stream(seed, 0);
  std::vector<u64> gens{1};
  for (size_t i = 1; i < d; ++i) {
    u64 v = rng.next_below(p);
    while (v == 0) v = rng.next_below(p);
    gens.push_back(v);
  }

  RandomInstance inst{InstanceSpec{}, Gap(p, std::move(gens), std::vector<i64>(d, n))};
  inst.spec.kind = "random";
  inst.spec.p = p;
  inst.spec.d = d;
  inst.spec.n_bound = n;
  inst.spec.rng_seed = seed;
  return inst;
}

namespace detail {

// Companion matrix of the monic x^n + coeffs[n-1] x^{n-1} + ... + coeffs[0]:
// subdiagonal ones, last column -coeffs. Singular exactly when coeffs[0] = 0
// mod p.
inline FpMat companion_matrix(const std::vector<i64>& coeffs, u64 p) {
  const size_t n = coeffs.size();
  FpMat m(n, p);
  for (size_t i = 0; i + 1 < n; ++i) m.at(i + 1, i) = 1;
  for (size_t i = 0; i < n; ++i) m.at(i, n - 1) = mod_i64(-coeffs[i], p);
  return m;
}

}  // namespace detail

struct MatrixInstance {
  InstanceSpec spec;
  MatGap b, a, a_prime;
  bool b_proper;
  bool b_isolated;      // 6-isolation
  bool containment_ok;  // A A' and A' A inside B
  std::optional<MatProductViolation> violation;
};

// Matrix analogue: X_1 = I and X_2..X_d companion matrices of monic degree-n
// integer polynomials with coefficients in [-coeff_height, coeff_height],
// drawn from poly_seeds (one seed per generator). A seed whose polynomial has
// a constant term divisible by p would give a singular generator; it is
// regenerated with the next seed and the retry is logged to stderr. A and A'
// are the c N^{1-eps} and c' N^eps sub-boxes; all claimed hypotheses are
// re-verified and reported as flags. n = 1 collapses to the field case.
inline MatrixInstance gen_matrix(u64 p, size_t n, size_t d, std::vector<u64> poly_seeds,
                                 i64 n_bound, const Rat& c = Rat(1, 2),
                                 const Rat& c_prime = Rat(1, 2), const Rat& eps = Rat(1, 2),
                                 i64 coeff_height = 2, u64 cap = kDefaultCap) {
  PrimeField field(p);
  if (n < 1) throw InvalidArgumentError("matrix order must be at least 1");
  if (d < 2) throw InvalidArgumentError("rank must be at least 2");
  if (n_bound < 1) throw InvalidArgumentError("box bound must be positive");
  if (coeff_height < 1) throw InvalidArgumentError("coefficient height must be positive");
  if (poly_seeds.size() != d - 1)
    throw InvalidArgumentError("need exactly one polynomial seed per generator past X_1");
  if (!c.positive() || !c_prime.positive() || !eps.positive() || !(eps < Rat(1)))
    throw InvalidArgumentError("c, c' must be positive and eps in (0, 1)");

  const i64 ma = scaled_pow_floor(static_cast<u64>(n_bound), Rat(1) - eps, c);
  const i64 ma_prime = scaled_pow_floor(static_cast<u64>(n_bound), eps, c_prime);
  if (ma < 1 || ma_prime < 1)
    throw InvalidArgumentError("sub-box bound below 1; increase N or the scales");

  std::vector<FpMat> gens{FpMat::identity(n, p)};
  std::vector<std::vector<i64>> drawn;
  for (size_t k = 0; k + 1 < d; ++k) {
    u64 seed = poly_seeds[k];
    std::vector<i64> coeffs(n);
    const auto retry = [&](const char* why) {
      std::fprintf(stderr,
                   "gapkit: seed %llu gives a %s generator %zu; retrying with seed %llu\n",
                   static_cast<unsigned long long>(seed), why, k + 2,
                   static_cast<unsigned long long>(seed + 1));
      ++seed;
    };
    if (n == 1) {
      // A degree-1 companion would be a small integer and collapse B, so the
      // 1x1 case embeds the field fixture instead: the generator is a root of
      // a small monic quadratic. Degenerate draws (no root, zero root, tiny or
      // duplicate generator) are regenerated under the same next-seed policy.
      const i64 tiny = (12 * n_bound < static_cast<i64>((p - 1) / 2)) ? 12 * n_bound : 0;
      for (int tries = 0;; ++tries) {
        SplitMix64 rng = SplitMix64::stream(seed, 0);
        const i64 q0 = rng.next_in_i64(-coeff_height, coeff_height);
        const i64 q1 = rng.next_in_i64(-coeff_height, coeff_height);
        const auto roots = sqrt_mod(Fp::from_int(q1 * q1 - 4 * q0, p));
        if (!roots) {
          retry("rootless");
          continue;
        }
        const Fp t = (roots->first - Fp::from_int(q1, p)) * Fp(2, p).inv();
        if (t.value() == 0) {
          retry("singular");
          continue;
        }
        bool dup = false;
        for (const FpMat& g : gens) dup = dup || g.at(0, 0) == t.value();
        const i64 lift = t.signed_lift();
        if (tries < 256 && (dup || (lift < tiny && -lift < tiny))) {
          retry(dup ? "duplicate" : "degenerate");
          continue;
        }
        coeffs = {q0, q1};
        gens.push_back(FpMat::identity(1, p).scaled(t.value()));
        break;
      }
    } else {
      for (;;) {
        SplitMix64 rng = SplitMix64::stream(seed, 0);
        for (size_t i = 0; i < n; ++i) coeffs[i] = rng.next_in_i64(-coeff_height, coeff_height);
        if (mod_i64(coeffs[0], p) != 0) break;
        retry("singular companion");
      }
      gens.push_back(detail::companion_matrix(coeffs, p));
    }
    drawn.push_back(std::move(coeffs));
  }

  MatGap b(p, n, gens, std::vector<i64>(d, n_bound));
  MatGap a(p, n, gens, std::vector<i64>(d, ma));
  MatGap a_prime(p, n, std::move(gens), std::vector<i64>(d, ma_prime));

  MatrixInstance inst{InstanceSpec{},
                      b,
                      a,
                      a_prime,
                      mat_is_proper(b, cap).proper,
                      mat_is_isolated(b, Rat(6), cap).isolated,
                      true,
                      std::nullopt};
  MatContainmentReport cont = mat_contains_product(a, a_prime, b, cap);
  inst.containment_ok = cont.contained;
  inst.violation = std::move(cont.violation);

  inst.spec.kind = "matrix";
  inst.spec.p = p;
  inst.spec.d = d;
  inst.spec.n = n;
  inst.spec.n_bound = n_bound;
  inst.spec.c = c;
  inst.spec.c_prime = c_prime;
  inst.spec.eps = eps;
  inst.spec.poly_seeds = std::move(drawn);
  inst.spec.rng_seed = poly_seeds.empty() ? 0 : poly_seeds[0];
  return inst;
}

// Convenience wrapper: expand one master seed into per-generator seeds.
inline MatrixInstance gen_matrix(u64 p, size_t n, size_t d, u64 seed, i64 n_bound,
                                 const Rat& c = Rat(1, 2), const Rat& c_prime = Rat(1, 2),
                                 const Rat& eps = Rat(1, 2), i64 coeff_height = 2,
                                 u64 cap = kDefaultCap) {
  std::vector<u64> poly_seeds;
  for (size_t k = 0; k + 1 < d; ++k) poly_seeds.push_back(SplitMix64::stream(seed, k + 1).next());
  MatrixInstance inst =
      gen_matrix(p, n, d, std::move(poly_seeds), n_bound, c, c_prime, eps, coeff_height, cap);
  inst.spec.rng_seed = seed;
  return inst;
}

}  // namespace gapkit
