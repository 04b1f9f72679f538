// Exact integer arithmetic: checked ops, modular helpers, rationals and the
// exact floor(c * N^e) evaluator.

#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include "gapkit/errors.hpp"
#include "gapkit/int_math.hpp"
#include "gapkit/rng.hpp"

using namespace gapkit;

TEST_CASE("checked arithmetic flags overflow") {
  CHECK(checked_add(INT64_MAX - 1, 1) == INT64_MAX);
  CHECK_THROWS_AS(checked_add(INT64_MAX, 1), OverflowError);
  CHECK_THROWS_AS(checked_add(INT64_MIN, -1), OverflowError);
  CHECK(checked_mul(3, -7) == -21);
  CHECK_THROWS_AS(checked_mul(INT64_MAX / 2 + 1, 2), OverflowError);
  CHECK_THROWS_AS(checked_mul128(i128(1) << 100, i128(1) << 100), OverflowError);
  CHECK_THROWS_AS(checked_mul_u128(u128(1) << 64, u128(1) << 64), OverflowError);
  CHECK(narrow_i64(i128(-5)) == -5);
  CHECK_THROWS_AS(narrow_i64(i128(INT64_MAX) + 1), OverflowError);
}

TEST_CASE("128-bit decimal printing") {
  CHECK(to_string_i128(0) == "0");
  CHECK(to_string_i128(-1) == "-1");
  CHECK(to_string_u128((u128(1) << 64)) == "18446744073709551616");
  i128 big = i128(INT64_MIN) * 3;
  CHECK(to_string_i128(big) == "-27670116110564327424");
}

TEST_CASE("modular primitives") {
  const u64 p = 1'000'000'007;
  CHECK(mod_i64(-1, p) == p - 1);
  CHECK(mod_i64(-(i64)p - 3, p) == p - 3);
  CHECK(mod_i128(-(i128(p) * p) - 7, p) == p - 7);
  CHECK(add_mod(p - 1, 5, p) == 4);
  CHECK(sub_mod(3, 8, p) == p - 5);
  CHECK(neg_mod(0, p) == 0);
  CHECK(mul_mod(p - 1, p - 1, p) == 1);
  CHECK(pow_mod(3, p - 1, p) == 1);  // Fermat

  SplitMix64 rng(7);
  for (int k = 0; k < 200; ++k) {
    u64 a = rng.next_below(p - 1) + 1;
    u64 inv = inv_mod_u64(a, p);
    CHECK(mul_mod(a, inv, p) == 1);
  }
  CHECK_THROWS_AS(inv_mod_u64(0, p), ZeroInverseError);
  CHECK_THROWS_AS(inv_mod_u64(p, p), ZeroInverseError);
}

TEST_CASE("integer roots") {
  CHECK(isqrt_u64(0) == 0);
  CHECK(isqrt_u64(15) == 3);
  CHECK(isqrt_u64(16) == 4);
  CHECK(isqrt_u64(UINT64_MAX) == 4294967295ull);
  namespace mp = boost::multiprecision;
  CHECK(kth_root_floor(mp::cpp_int(26), 3) == 2);
  CHECK(kth_root_floor(mp::cpp_int(27), 3) == 3);
  CHECK(kth_root_floor(mp::pow(mp::cpp_int(10), 18), 6) == 1000);
  CHECK_THROWS_AS(kth_root_floor(mp::cpp_int(4), 0), InvalidArgumentError);
}

TEST_CASE("rationals normalize and compare exactly") {
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(1, -2) == Rat(-1, 2));
  CHECK_THROWS_AS(Rat(1, 0), InvalidArgumentError);
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(-1, 2) < Rat(-1, 3));
  CHECK(Rat(1, 2) * Rat(2, 3) == Rat(1, 3));
  CHECK(Rat(1, 2) + Rat(1, 3) == Rat(5, 6));
  CHECK(Rat(1, 2) - Rat(1, 3) == Rat(1, 6));
  CHECK(Rat(3, 4) / Rat(3, 2) == Rat(1, 2));
  CHECK_THROWS_AS(Rat(1) / Rat(0), InvalidArgumentError);

  CHECK(Rat(7, 2).floor() == 3);
  CHECK(Rat(-7, 2).floor() == -4);
  CHECK(Rat(7, 2).ceil() == 4);
  CHECK(Rat(-7, 2).ceil() == -3);
  CHECK(Rat(1, 3).mul_floor(10) == 3);
  CHECK(Rat(-1, 3).mul_floor(10) == -4);
  CHECK(Rat(1, 2).mul_floor(-5) == -3);
}

TEST_CASE("rational text round trip") {
  CHECK(Rat(5).str() == "5");
  CHECK(Rat(-3, 6).str() == "-1/2");
  CHECK(Rat::parse("5") == Rat(5));
  CHECK(Rat::parse("-3/6") == Rat(-1, 2));
  CHECK(Rat::parse(Rat(22, 7).str()) == Rat(22, 7));
  CHECK_THROWS_AS(Rat::parse("abc"), ParseError);
  CHECK_THROWS_AS(Rat::parse(""), ParseError);
}

TEST_CASE("scaled_pow_floor known values") {
  CHECK(scaled_pow_floor(400, Rat(1, 2), Rat(1, 2)) == 10);
  CHECK(scaled_pow_floor(40, Rat(1, 2), Rat(1, 2)) == 3);
  CHECK(scaled_pow_floor(2500, Rat(1, 2), Rat(1)) == 50);
  CHECK(scaled_pow_floor(100, Rat(1), Rat(1, 3)) == 33);
  CHECK(scaled_pow_floor(100, Rat(3, 2), Rat(1)) == 1000);
  CHECK(scaled_pow_floor(0, Rat(1, 2), Rat(1)) == 0);
  CHECK_THROWS_AS(scaled_pow_floor(10, Rat(1, 9), Rat(1)), InvalidArgumentError);
  CHECK_THROWS_AS(scaled_pow_floor(10, Rat(-1, 2), Rat(1)), InvalidArgumentError);
}

TEST_CASE("scaled_pow_floor is the exact floor") {
  // r = floor(c * n^(num/den))  <=>  (r*c_den)^den <= c_num^den * n^num
  //                                  < ((r+1)*c_den)^den
  namespace mp = boost::multiprecision;
  SplitMix64 rng(11);
  for (int k = 0; k < 300; ++k) {
    const u64 n = rng.next_below(1'000'000) + 1;
    const i64 den = static_cast<i64>(rng.next_in(1, 8));
    const Rat e(static_cast<i64>(rng.next_in(1, static_cast<u64>(den))), den);
    const Rat c(static_cast<i64>(rng.next_in(1, 9)), static_cast<i64>(rng.next_in(1, 9)));
    const i64 r = scaled_pow_floor(n, e, c);
    const unsigned ed = static_cast<unsigned>(e.den);
    const mp::cpp_int inner =
        mp::pow(mp::cpp_int(c.num), ed) * mp::pow(mp::cpp_int(n), static_cast<unsigned>(e.num));
    CHECK(mp::pow(mp::cpp_int(r) * c.den, ed) <= inner);
    CHECK(inner < mp::pow(mp::cpp_int(r + 1) * c.den, ed));
  }
}
