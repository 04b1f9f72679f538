#pragma once
// Deterministic batch experiments: seeded instance streams mapped through the
// recovery pipelines onto fixed-column CSV rows. Rows are computed in parallel
// but every row is a pure function of (config, id) and aggregation is by
// index, so the bytes never depend on thread scheduling. Per-row wall times
// are kept in the row struct for stderr diagnostics only; putting them in the
// CSV would break byte-stable output.

#include <atomic>
#include <chrono>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gapkit/decompose.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/instances.hpp"
#include "gapkit/int_math.hpp"
#include "gapkit/matrix_ring.hpp"
#include "gapkit/oracles.hpp"
#include "gapkit/recovery.hpp"

namespace gapkit {

struct ExperimentConfig {
  std::string kind = "quadratic";  // quadratic | matrix
  std::string pipeline = "rank2";  // rank2 | general (quadratic only)
  size_t count = 10;
  u64 seed = 0;
  u64 p_min = 100000;
  u64 p_max = 1000000000;
  i64 n_bound = 0;  // 0 = maximal under the cube guard
  size_t n = 2;     // matrix order for kind = matrix
  Rat c{1, 2}, c_prime{1, 2}, eps{1, 2};
  size_t parallel = 1;
  u64 cap = kDefaultCap;
};

struct ExperimentRow {
  size_t id = 0;
  InstanceSpec spec;
  bool guard_ok = false;
  bool b_proper = false;
  bool containment_ok = false;
  std::string pipeline;
  bool recovered = false;
  bool verified = false;
  i64 f_height = 0;
  bool height_flag = false;  // rank2 height bound or general Eq4 bound tripped
  i64 eq4_observed = 0;
  bool eq4_flag = false;
  bool oracle_checked = false;
  bool oracle_agree = false;
  std::string failure;
  double wall_ms = 0;  // excluded from the CSV: not deterministic
};

namespace detail {

inline std::string failure_label(const std::exception& e) {
  if (dynamic_cast<const NotProperError*>(&e)) return "not_proper";
  if (dynamic_cast<const NotIsolatedError*>(&e)) return "not_isolated";
  if (dynamic_cast<const NotContainedError*>(&e)) return "not_contained";
  if (dynamic_cast<const NotInvertibleError*>(&e)) return "not_invertible";
  if (dynamic_cast<const CapExceededError*>(&e)) return "cap_exceeded";
  if (dynamic_cast<const NoRootError*>(&e)) return "no_root";
  if (dynamic_cast<const OverflowError*>(&e)) return "overflow";
  return "error";
}

// True when f equals g up to sign (the only units in Z[x]).
inline bool associate_equal(const IntPoly& f, const IntPoly& g) {
  if (f == g) return true;
  std::vector<i64> neg = g.coeffs();
  for (i64& c : neg) c = -c;
  return f == IntPoly(neg);
}

inline ExperimentRow quadratic_row(const ExperimentConfig& cfg, size_t id) {
  ExperimentRow row;
  row.id = id;
  row.pipeline = cfg.pipeline;
  SplitMix64 rng = SplitMix64::stream(cfg.seed, id);
  const u64 p = next_prime_at_least(cfg.p_min + rng.next_below(cfg.p_max - cfg.p_min + 1));

  // draw small defining coefficients until the discriminant is a residue
  i64 c0 = 0, c1 = 0;
  bool found = false;
  for (int tries = 0; tries < 64 && !found; ++tries) {
    c0 = rng.next_in_i64(-3, 3);
    c1 = rng.next_in_i64(-3, 3);
    found = sqrt_mod(Fp::from_int(c1 * c1 - 4 * c0, p)).has_value();
  }
  row.spec.kind = "quadratic";
  row.spec.p = p;
  row.spec.rng_seed = cfg.seed;
  if (!found) {
    row.failure = "no_root";
    return row;
  }

  const i64 n = cfg.n_bound > 0 ? cfg.n_bound : quadratic_guard_max_n(p);
  QuadraticInstance inst = gen_quadratic(p, c0, c1, cfg.c, n, cfg.cap);
  row.spec = inst.spec;
  row.spec.rng_seed = cfg.seed;
  row.guard_ok = inst.guard_ok;
  row.b_proper = inst.b_proper;
  row.containment_ok = inst.containment_ok;

  RecoveryConfig rc;
  rc.c = cfg.c;
  rc.c_prime = cfg.c_prime;
  rc.eps = cfg.eps;
  rc.cap = cfg.cap;

  const i64 oracle_height = (Rat(8) / (cfg.c * cfg.c)).floor();
  if (cfg.pipeline == "rank2") {
    Rank2Report rep = recover_rank2(inst.b, inst.a, rc);
    row.recovered = true;
    row.verified = rep.verified;
    row.f_height = rep.f.height();
    row.height_flag = rep.height_exceeded;
    MinPolyResult oracle = minpoly_bounded(inst.t, 2, oracle_height, cfg.cap);
    row.oracle_checked = true;
    row.oracle_agree = false;
    for (const IntPoly& m : oracle.polynomials)
      row.oracle_agree = row.oracle_agree || associate_equal(rep.f, m);
  } else {
    const i64 m_prime = scaled_pow_floor(static_cast<u64>(n), cfg.eps, cfg.c_prime);
    if (m_prime < 1) throw InvalidArgumentError("c' N^eps below 1");
    Gap a_prime(p, inst.b.generators(), {m_prime, m_prime});
    RecoveryReport rep = recover_generators(inst.b, inst.a, a_prime, rc);
    if (rep.failure) {
      row.failure = rep.failure->kind;
      return row;
    }
    row.recovered = true;
    row.verified = rep.all_verified();
    row.f_height = 0;
    for (i64 h : rep.g_heights) row.f_height = std::max(row.f_height, h);
    row.eq4_observed = rep.eq4_observed;
    row.eq4_flag = rep.eq4_exceeded;
    row.height_flag = rep.eq4_exceeded;
    MinPolyResult oracle = minpoly_bounded(inst.t, 2, oracle_height, cfg.cap);
    row.oracle_checked = true;
    row.oracle_agree =
        oracle.minimal && rep.g.size() >= 2 && divides_mod(*oracle.minimal, rep.g[1], p);
  }
  return row;
}

inline ExperimentRow matrix_row(const ExperimentConfig& cfg, size_t id) {
  ExperimentRow row;
  row.id = id;
  row.pipeline = "matrix";
  SplitMix64 rng = SplitMix64::stream(cfg.seed, id);
  const u64 p = next_prime_at_least(cfg.p_min + rng.next_below(cfg.p_max - cfg.p_min + 1));
  const i64 n_bound = cfg.n_bound > 0 ? cfg.n_bound : 100;

  MatrixInstance inst = gen_matrix(p, cfg.n, 2, rng.next(), n_bound, cfg.c, cfg.c_prime,
                                   cfg.eps, 2, cfg.cap);
  row.spec = inst.spec;
  row.spec.rng_seed = cfg.seed;
  row.guard_ok = true;
  row.b_proper = inst.b_proper;
  row.containment_ok = inst.containment_ok;

  RecoveryConfig rc;
  rc.c = cfg.c;
  rc.c_prime = cfg.c_prime;
  rc.eps = cfg.eps;
  rc.cap = cfg.cap;
  MatRecoveryReport rep = recover_matrix_generators(inst.b, inst.a, inst.a_prime, 0, 0, rc);
  if (rep.failure) {
    row.failure = rep.failure->kind;
    return row;
  }
  row.recovered = true;
  row.verified = rep.all_verified();
  for (i64 h : rep.g_heights) row.f_height = std::max(row.f_height, h);
  row.eq4_observed = rep.eq4_observed;
  row.eq4_flag = rep.eq4_exceeded;
  row.height_flag = rep.eq4_exceeded;
  return row;
}

}  // namespace detail

// One row, computed independently of every other row.
inline ExperimentRow experiment_row(const ExperimentConfig& cfg, size_t id) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRow row;
  try {
    row = cfg.kind == "matrix" ? detail::matrix_row(cfg, id) : detail::quadratic_row(cfg, id);
  } catch (const std::exception& e) {
    row.id = id;
    row.pipeline = cfg.kind == "matrix" ? "matrix" : cfg.pipeline;
    row.failure = detail::failure_label(e);
  }
  row.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  return row;
}

// Runs the batch with up to cfg.parallel workers; the result vector is
// ordered by id no matter how the work was scheduled.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.kind != "quadratic" && cfg.kind != "matrix")
    throw InvalidArgumentError("experiment kind must be quadratic or matrix");
  if (cfg.pipeline != "rank2" && cfg.pipeline != "general")
    throw InvalidArgumentError("pipeline must be rank2 or general");
  if (cfg.p_min < 3 || cfg.p_max < cfg.p_min)
    throw InvalidArgumentError("need 3 <= p_min <= p_max");

  std::vector<ExperimentRow> rows(cfg.count);
  const size_t workers =
      std::max<size_t>(1, std::min(cfg.parallel, cfg.count == 0 ? 1 : cfg.count));
  if (workers == 1) {
    for (size_t i = 0; i < cfg.count; ++i) rows[i] = experiment_row(cfg, i);
    return rows;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= cfg.count) return;
        rows[i] = experiment_row(cfg, i);
      }
    });
  for (std::thread& t : pool) t.join();
  return rows;
}

// Fixed, versioned column set; booleans as 0/1, rationals as num/den text.
inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "# gapkit-experiment-csv/1\n";
  out << "id,kind,p,d,n,n_bound,c,c_prime,eps,c0,c1,rng_seed,guard_ok,b_proper,"
         "containment_ok,pipeline,recovered,verified,f_height,height_flag,"
         "eq4_observed,eq4_flag,oracle_checked,oracle_agree,failure\n";
  for (const ExperimentRow& r : rows) {
    const bool has_poly = !r.spec.poly_seeds.empty() && r.spec.poly_seeds[0].size() >= 2;
    out << r.id << ',' << r.spec.kind << ',' << r.spec.p << ',' << r.spec.d << ','
        << r.spec.n << ',' << r.spec.n_bound << ',' << r.spec.c.str() << ','
        << r.spec.c_prime.str() << ',' << r.spec.eps.str() << ',';
    if (has_poly)
      out << r.spec.poly_seeds[0][0] << ',' << r.spec.poly_seeds[0][1];
    else
      out << ',';
    out << ',' << r.spec.rng_seed << ',' << int(r.guard_ok) << ',' << int(r.b_proper) << ','
        << int(r.containment_ok) << ',' << r.pipeline << ',' << int(r.recovered) << ','
        << int(r.verified) << ',' << r.f_height << ',' << int(r.height_flag) << ','
        << r.eq4_observed << ',' << int(r.eq4_flag) << ',' << int(r.oracle_checked) << ','
        << int(r.oracle_agree) << ',' << r.failure << '\n';
  }
  return out.str();
}

}  // namespace gapkit
