// Recovery pipeline: bounded null vectors, rank-2 and rank-d recovery,
// symmetrization.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "gapkit/instances.hpp"
#include "gapkit/oracles.hpp"
#include "gapkit/recovery.hpp"
#include "gapkit/rng.hpp"

using namespace gapkit;

namespace {

// Singular integer matrix with entries bounded by c: rows rehearse either a
// duplicated row or a zero row, both detectable and exactly annihilatable.
IntMatrix seeded_singular(SplitMix64& rng, size_t d, i64 c) {
  IntMatrix m(d);
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) m.at(i, j) = rng.next_in_i64(-c, c);
  const size_t kind = rng.next_below(3);
  const size_t r1 = rng.next_below(d);
  if (kind == 0) {
    for (size_t j = 0; j < d; ++j) m.at(r1, j) = 0;  // zero row
  } else if (kind == 1 && d >= 2) {
    const size_t r2 = (r1 + 1 + rng.next_below(d - 1)) % d;
    for (size_t j = 0; j < d; ++j) m.at(r1, j) = m.at(r2, j);  // duplicate row
  } else if (d >= 2) {
    const size_t r2 = (r1 + 1 + rng.next_below(d - 1)) % d;
    for (size_t j = 0; j < d; ++j) m.at(r1, j) = -m.at(r2, j);  // negated row
  }
  return m;
}

}  // namespace

TEST_CASE("bounded_left_nullvector annihilates exactly within its bound") {
  const u64 p = (u64(1) << 61) - 1;
  SplitMix64 rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    const size_t d = 2 + rng.next_below(4);  // 2..5
    const i64 c = 1 + static_cast<i64>(rng.next_below(5));
    IntMatrix m = seeded_singular(rng, d, c);
    REQUIRE(mod_i64(m.det(), p) == 0);  // det bound d! c^d << p keeps it exact

    const std::vector<i64> a = bounded_left_nullvector(m, c, p);
    const u64 bound = relation_height_bound(d, c);
    bool nonzero = false;
    for (i64 v : a) {
      nonzero = nonzero || v != 0;
      CHECK(static_cast<u64>(v < 0 ? -v : v) <= bound);
    }
    CHECK(nonzero);
    for (size_t j = 0; j < d; ++j) {  // a * M = 0 mod p, column by column
      u64 acc = 0;
      for (size_t i = 0; i < d; ++i)
        acc = add_mod(acc, mul_mod(mod_i64(a[i], p), mod_i64(m.at(i, j), p), p), p);
      CHECK(acc == 0);
    }
    // sign normalization: first nonzero entry is positive
    for (i64 v : a) {
      if (v == 0) continue;
      CHECK(v > 0);
      break;
    }
  }
}

TEST_CASE("bounded_left_nullvector shortcuts zero rows and rejects bad input") {
  const u64 p = 1'000'003;
  IntMatrix z(3);
  z.at(0, 0) = 5;
  z.at(0, 2) = -3;
  z.at(2, 1) = 4;  // row 1 is zero
  CHECK(bounded_left_nullvector(z, 5, p) == std::vector<i64>{0, 1, 0});

  CHECK_THROWS_AS(bounded_left_nullvector(IntMatrix::identity(3), 1, p), NotSingularError);
  CHECK_THROWS_AS(bounded_left_nullvector(z, 2, p), InvalidArgumentError);  // bound too low
  CHECK_THROWS_AS(bounded_left_nullvector(z, 0, p), InvalidArgumentError);
}

TEST_CASE("rank-2 recovery finds x^2 - 2") {
  const u64 p = 1'000'033;
  const u64 t = 95'913;
  REQUIRE(mul_mod(t, t, p) == 2);
  // N = 49 is the guard-maximal box at this modulus: 99^6 <= p^2.
  Gap b(p, {1, t}, {49, 49});
  Gap a(p, {1, t}, {10, 10});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  Rank2Report r = recover_rank2(b, a, cfg);
  CHECK(r.f.coeffs() == std::vector<i64>{-2, 0, 1});
  CHECK(r.a0 == 2);
  CHECK(r.b0 == 0);
  CHECK(r.verified);
  CHECK_FALSE(r.height_exceeded);
  CHECK(r.height_limit == Rat(32));
  CHECK(r.guard_ok);
  CHECK_FALSE(r.ambiguous);
}

TEST_CASE("rank-2 recovery on the golden ratio") {
  // t^2 = t + 1: discriminant 5 must be a residue
  const u64 p = 1'000'081;
  const auto roots = sqrt_mod(Fp(5, p));
  REQUIRE(roots.has_value());
  const Fp t = (roots->first + Fp(1, p)) * Fp(2, p).inv();
  Gap b(p, {1, t.value()}, {400, 400});
  Gap a(p, {1, t.value()}, {10, 10});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  Rank2Report r = recover_rank2(b, a, cfg);
  CHECK(r.f.coeffs() == std::vector<i64>{-1, -1, 1});  // x^2 - x - 1
  CHECK(r.verified);
  CHECK_FALSE(r.height_exceeded);
}

TEST_CASE("rank-2 recovery rejects bad shapes and random boxes") {
  const u64 p = 1'000'033;
  const u64 t = 95'913;
  Gap good(p, {1, t}, {400, 400});
  Gap a(p, {1, t}, {10, 10});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  CHECK_THROWS_AS(recover_rank2(Gap(p, {1, t, 7}, {4, 4, 4}), a, cfg), InvalidArgumentError);
  CHECK_THROWS_AS(recover_rank2(Gap(p, {2, t}, {400, 400}), a, cfg), InvalidArgumentError);
  CHECK_THROWS_AS(recover_rank2(Gap(p, {1, t}, {4, 4}, 9), a, cfg), InvalidArgumentError);
  RecoveryConfig bad = cfg;
  bad.c = Rat(1);
  CHECK_THROWS_AS(recover_rank2(good, a, bad), InvalidArgumentError);

  // a generic generator has no bounded square decomposition
  Gap rand_b(p, {1, 123'457}, {40, 40});
  Gap rand_a(p, {1, 123'457}, {3, 3});
  CHECK_THROWS_AS(recover_rank2(rand_b, rand_a, cfg), NotContainedError);
}

TEST_CASE("rank-2 height flag trips past 8/c^2") {
  // t = sqrt(40): f = x^2 - 40 has height 40 > 32 but still verifies
  const u64 pp = 1'000'003;
  const u64 t = 211'573;
  REQUIRE(mul_mod(t, t, pp) == 40);
  Gap b(pp, {1, t}, {60, 60});
  Gap a(pp, {1, t}, {3, 3});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  Rank2Report r = recover_rank2(b, a, cfg);
  CHECK(r.f.coeffs() == std::vector<i64>{-40, 0, 1});
  CHECK(r.verified);
  CHECK(r.height_exceeded);
}

TEST_CASE("rank-2 guard flag reflects the box-cube bound") {
  // p too small for the box: (2*400+1)^3 > p^2
  const u64 p = 100'049;
  const u64 t = 10'948;
  REQUIRE(mul_mod(t, t, p) == 2);
  Gap b(p, {1, t}, {400, 400});
  Gap a(p, {1, t}, {10, 10});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  Rank2Report r = recover_rank2(b, a, cfg);
  CHECK_FALSE(r.guard_ok);
}

// Shared large-modulus fixture: p big enough that bounded relations against
// (1, sqrt(2)) would force an exact integer identity a^2 = 2 b^2, so the
// gap is provably 6- and 24-isolated at N = 400.
namespace {
constexpr u64 kBigP = 400'000'009;
constexpr u64 kSqrt2 = 58'719'626;   // kSqrt2^2 = 2 mod kBigP
constexpr u64 kSqrt8 = 117'439'252;  // kSqrt8^2 = 8 mod kBigP
}  // namespace

TEST_CASE("general recovery on a quadratic fixture") {
  const u64 p = kBigP;
  const u64 t = kSqrt2;
  REQUIRE(mul_mod(t, t, p) == 2);
  Gap b(p, {1, t}, {400, 400});
  Gap a(p, {1, t}, {10, 10});
  Gap ap(p, {1, t}, {10, 10});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  cfg.c_prime = Rat(1, 2);
  RecoveryReport r = recover_generators(b, a, ap, cfg);
  REQUIRE_FALSE(r.failure.has_value());
  CHECK(r.pivot_used == 1);
  CHECK(r.all_verified());
  CHECK(r.d == 2);
  REQUIRE(r.g.size() == 2);
  // g_1 annihilates x_1 = 1, g_2 annihilates t; the minimal polynomial of t
  // divides g_2 mod p
  CHECK(eval_poly_mod(r.g[0], Fp(1, p)).is_zero());
  CHECK(eval_poly_mod(r.g[1], Fp(t, p)).is_zero());
  CHECK(divides_mod(IntPoly({-2, 0, 1}), r.g[1], p));
  CHECK(r.eq4_observed == 2);
  CHECK(r.eq4_limit == Rat(24));  // 3 / (c c'/2)
  CHECK_FALSE(r.eq4_exceeded);
  CHECK(r.c_constant == Rat(24));  // (d-1)! (3/c'')^(d-1)
  CHECK(r.search_height_cap == 72);
  // T matrices are the table rows/columns at the pivot
  REQUIRE(r.T.has_value());
  CHECK(r.T->at(0, 0) == 1);

  // a different pivot also succeeds
  RecoveryConfig cfg2 = cfg;
  cfg2.pivot = 2;
  RecoveryReport r2 = recover_generators(b, a, ap, cfg2);
  CHECK(r2.pivot_used == 2);
  CHECK(r2.all_verified());
  CHECK(eval_poly_mod(r2.g[1], Fp(t, p)).is_zero());
}

TEST_CASE("general recovery throws on hypothesis violations") {
  const u64 p = kBigP;
  const u64 t = kSqrt2;
  Gap b(p, {1, t}, {400, 400});
  Gap a(p, {1, t}, {10, 10});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  cfg.c_prime = Rat(1, 2);

  // B not isolated: a tiny-generator gap has the relation (-5, 1)
  Gap flat(p, {1, 5}, {400, 400});
  try {
    recover_generators(flat, a, a, cfg);
    FAIL("expected NotIsolatedError");
  } catch (const NotIsolatedError& e) {
    CHECK(e.kappa == Rat(6));
    CHECK(e.witness == std::vector<i64>{-5, 1});
  }

  // A improper: bounds too wide for its generators
  Gap wide(p, {1, 5}, {40, 40});
  try {
    recover_generators(b, wide, a, cfg);
    FAIL("expected NotProperError");
  } catch (const NotProperError& e) {
    CHECK(e.subject == "A");
    CHECK(wide.eval(e.lhs) == wide.eval(e.rhs));
  }

  // A' improper reports the other subject
  try {
    recover_generators(b, a, wide, cfg);
    FAIL("expected NotProperError");
  } catch (const NotProperError& e) {
    CHECK(e.subject == "A_prime");
  }

  // config validation
  RecoveryConfig bad = cfg;
  bad.kappa = Rat(5);
  CHECK_THROWS_AS(recover_generators(b, a, a, bad), InvalidArgumentError);
  bad = cfg;
  bad.pivot = 3;
  CHECK_THROWS_AS(recover_generators(b, a, a, bad), InvalidArgumentError);
  bad = cfg;
  bad.eps = Rat(1);
  CHECK_THROWS_AS(recover_generators(b, a, a, bad), InvalidArgumentError);
  CHECK_THROWS_AS(
      recover_generators(Gap(p, {1, t}, {4, 4}, 0, GapForm::one_sided), a, a, cfg),
      InvalidArgumentError);
}

TEST_CASE("general recovery reports s_not_found under a tiny height cap") {
  const u64 p = kBigP;
  const u64 t = kSqrt2;
  Gap b(p, {1, t}, {400, 400});
  Gap a(p, {1, t}, {10, 10});
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  cfg.c_prime = Rat(1, 2);
  cfg.search_height_cap = 1;
  RecoveryReport r = recover_generators(b, a, a, cfg);
  REQUIRE(r.failure.has_value());
  CHECK(r.failure->kind == "s_not_found");
  CHECK(r.failure->j >= 1);
  CHECK_FALSE(r.all_verified());
}

TEST_CASE("symmetrize turns a one-sided instance into a symmetric one") {
  // one-sided quadratic-style gap: generators 1, t with boxes [0, N)
  const u64 p = kBigP;
  const u64 t = kSqrt2;
  const i64 n = 400;
  Gap b(p, {1, t}, {n, n}, 0, GapForm::one_sided);
  Gap a(p, {1, t}, {10, 10}, 0, GapForm::one_sided);
  SymmetrizeResult s = symmetrize(b, a, a);
  CHECK(s.b.symmetric());
  CHECK(s.b.base_point() == 0);
  CHECK(s.b.bounds() == std::vector<i64>{2 * (n - 1), 2 * (n - 1)});
  CHECK(s.a.bounds() == std::vector<i64>{9, 9});
  CHECK(contains_product(s.a, s.a_prime, s.b).contained);

  // the symmetrized triple feeds straight into recovery
  RecoveryConfig cfg;
  cfg.c = Rat(1, 2);
  cfg.c_prime = Rat(1, 2);
  RecoveryReport r = recover_generators(s.b, s.a, s.a_prime, cfg);
  CHECK(r.all_verified());
  CHECK(divides_mod(IntPoly({-2, 0, 1}), r.g[1], p));
}

TEST_CASE("symmetrize demands 24-isolation first") {
  const u64 p = 1'000'003;
  Gap b(p, {1, 30}, {60, 60});  // relation (-30, 1) within 24 * 60
  Gap a(p, {1, 30}, {3, 3});
  try {
    symmetrize(b, a, a);
    FAIL("expected NotIsolatedError");
  } catch (const NotIsolatedError& e) {
    CHECK(e.kappa == Rat(24));
    CHECK(e.witness == std::vector<i64>{-30, 1});
  }
}

TEST_CASE("symmetrize rejects rank collapse and broken containment") {
  const u64 p = kBigP;
  const u64 t = kSqrt2;
  // pinned one-sided coordinate (bound 1) loses a rank in B - B
  Gap pinned(p, {1, t}, {400, 1}, 0, GapForm::one_sided);
  Gap a(p, {1, t}, {10, 10}, 0, GapForm::one_sided);
  CHECK_THROWS_AS(symmetrize(pinned, a, a), InvalidArgumentError);

  // B too tight to hold (A-A)(A'-A') products
  Gap tight(p, {1, t}, {20, 20});
  CHECK_THROWS_AS(symmetrize(tight, a, a), NotContainedError);
}

TEST_CASE("eq4 flag trips when the table outgrows 3/c''") {
  // t = sqrt(8): the product t*t decomposes as (8, 0), so the observed table
  // bound is 8. With c = c' = 999/1000 the strict limit 3/c'' is just above
  // 6, so the flag trips; recovery itself still succeeds and verifies.
  const u64 p = kBigP;
  const u64 t8 = kSqrt8;
  REQUIRE(mul_mod(t8, t8, p) == 8);
  Gap b8(p, {1, t8}, {400, 400});
  Gap a8(p, {1, t8}, {10, 10});

  RecoveryConfig lax;
  lax.c = Rat(1, 10);
  lax.c_prime = Rat(1, 10);  // limit 600
  RecoveryReport ok = recover_generators(b8, a8, a8, lax);
  CHECK(ok.eq4_observed == 8);
  CHECK_FALSE(ok.eq4_exceeded);

  RecoveryConfig strict;
  strict.c = Rat(999, 1000);
  strict.c_prime = Rat(999, 1000);
  RecoveryReport r = recover_generators(b8, a8, a8, strict);
  CHECK(r.eq4_observed == 8);
  CHECK(r.eq4_exceeded);    // 8 >= 3/c'' = 6.012...
  CHECK(r.all_verified());  // the flag does not abort recovery
}
