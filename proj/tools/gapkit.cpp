// gapkit: GAP hypothesis checking, polynomial recovery, oracle runs, and
// deterministic experiment batches over F_p and M_n(F_p).
//
// Exit codes: 0 all requested properties hold / output written;
//             2 a structural hypothesis failed (witness in the report);
//             3 pipeline verified but a bound flag was raised;
//             4 an enumeration cap was exceeded;
//             1 anything else (bad arguments, unreadable files).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gapkit/experiment.hpp"
#include "gapkit/gapkit.hpp"
#include "gapkit/json_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kGenericError = 1;
constexpr int kHypothesisFailed = 2;
constexpr int kBoundFlagged = 3;
constexpr int kCapExceeded = 4;

using gapkit::Json;
using gapkit::Rat;
using gapkit::i64;
using gapkit::u64;

u64 env_cap() {
  if (const char* env = std::getenv("GAPKIT_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<u64>(v);
    std::cerr << "gapkit: ignoring malformed GAPKIT_CAP='" << env << "'\n";
  }
  return gapkit::kDefaultCap;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gapkit::ParseError("cannot open output file: " + path);
  out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gapkit::ParseError("cannot open input file: " + path);
  return Json::parse(in);
}

Rat rat_flag(const std::string& text, const char* what) {
  try {
    return Rat::parse(text);
  } catch (const std::exception&) {
    throw CLI::ValidationError(std::string(what) + ": expected a rational like 1/2, got '" +
                               text + "'");
  }
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  u64 p = 0;
  i64 c0 = -2, c1 = 0;
  std::string c = "1/2", c_prime = "1/2", eps = "1/2";
  bool c_prime_given = false;
  i64 n_bound = 0;
  size_t d = 2, n = 2;
  u64 seed = 0;
  i64 coeff_height = 2;
  u64 cap = 0;
  std::string out;
};

int run_gen(const GenArgs& args) {
  const Rat c = rat_flag(args.c, "--c");
  const Rat c_prime = rat_flag(args.c_prime, "--c-prime");
  const Rat eps = rat_flag(args.eps, "--epsilon");
  Json j;
  if (args.kind == "quadratic") {
    const i64 n = args.n_bound > 0 ? args.n_bound : gapkit::quadratic_guard_max_n(args.p);
    gapkit::QuadraticInstance inst =
        gapkit::gen_quadratic(args.p, args.c0, args.c1, c, n, args.cap);
    if (args.c_prime_given) inst.spec.c_prime = c_prime;
    j = gapkit::instance_to_json(inst);
    if (args.c_prime_given) {
      // attach the second sub-box so the instance feeds the general pipeline
      const i64 mp = gapkit::scaled_pow_floor(static_cast<u64>(n), eps, c_prime);
      if (mp < 1) throw gapkit::InvalidArgumentError("c' N^eps is below 1");
      j["a_prime"] = gapkit::gap_to_json(gapkit::Gap(args.p, inst.b.generators(), {mp, mp}));
    }
  } else if (args.kind == "degenerate") {
    i64 n = args.n_bound;
    if (n <= 0)
      n = std::max<i64>(2, static_cast<i64>(gapkit::kth_root_floor(
                               boost::multiprecision::cpp_int(args.p), 4)));
    j = gapkit::instance_to_json(gapkit::gen_degenerate(args.p, n, args.cap));
  } else if (args.kind == "random") {
    const i64 n = args.n_bound > 0 ? args.n_bound : 100;
    j = gapkit::instance_to_json(gapkit::gen_random(args.p, args.d, n, args.seed));
  } else if (args.kind == "matrix") {
    const i64 n = args.n_bound > 0 ? args.n_bound : 100;
    j = gapkit::instance_to_json(gapkit::gen_matrix(args.p, args.n, args.d, args.seed, n, c,
                                                    c_prime, eps, args.coeff_height, args.cap));
  } else {
    throw CLI::ValidationError("--kind must be quadratic, degenerate, random, or matrix");
  }
  write_json(args.out, j);
  return kOk;
}

// ---- check -----------------------------------------------------------------

struct CheckArgs {
  std::string in;
  std::string kappa = "6";
  u64 cap = 0;
  std::string out;
};

int run_check(const CheckArgs& args) {
  const Rat kappa = rat_flag(args.kappa, "--kappa");
  const gapkit::InstanceFile inst = gapkit::instance_from_json(read_json(args.in));
  Json j;
  j["schema"] = "gapkit-check/1";
  j["kappa"] = kappa.str();
  bool all_ok = true;

  if (inst.is_matrix()) {
    const gapkit::MatGap& b = *inst.mat_b;
    gapkit::MatProperReport pr = gapkit::mat_is_proper(b, args.cap);
    Json jp;
    jp["ok"] = pr.proper;
    if (pr.collision) jp["witness"] = {{"lhs", pr.collision->lhs}, {"rhs", pr.collision->rhs}};
    j["proper"] = std::move(jp);
    all_ok = all_ok && pr.proper;

    gapkit::MatIsolationReport ir = gapkit::mat_is_isolated(b, kappa, args.cap);
    Json ji;
    ji["ok"] = ir.isolated;
    if (ir.witness) ji["witness"] = ir.witness->coefficients;
    j["isolated"] = std::move(ji);
    all_ok = all_ok && ir.isolated;

    Json jc;
    if (inst.mat_a) {
      const gapkit::MatGap& ap = inst.mat_a_prime ? *inst.mat_a_prime : *inst.mat_a;
      gapkit::MatContainmentReport cr = gapkit::mat_contains_product(*inst.mat_a, ap, b, args.cap);
      jc["checked"] = true;
      jc["ok"] = cr.contained;
      if (cr.violation) jc["violation"] = gapkit::mat_violation_to_json(*cr.violation);
      all_ok = all_ok && cr.contained;
    } else {
      jc["checked"] = false;
      jc["ok"] = true;
    }
    j["containment"] = std::move(jc);
  } else {
    const gapkit::Gap& b = *inst.b;
    gapkit::ProperReport pr = gapkit::is_proper(b, args.cap);
    Json jp;
    jp["ok"] = pr.proper;
    if (pr.collision) jp["witness"] = {{"lhs", pr.collision->lhs}, {"rhs", pr.collision->rhs}};
    j["proper"] = std::move(jp);
    all_ok = all_ok && pr.proper;

    gapkit::IsolationReport ir = gapkit::is_isolated(b, kappa, args.cap);
    Json ji;
    ji["ok"] = ir.isolated;
    if (ir.witness) ji["witness"] = ir.witness->coefficients;
    j["isolated"] = std::move(ji);
    all_ok = all_ok && ir.isolated;

    Json jc;
    if (inst.a) {
      const gapkit::Gap& ap = inst.a_prime ? *inst.a_prime : *inst.a;
      gapkit::ContainmentReport cr = gapkit::contains_product(*inst.a, ap, b, args.cap);
      jc["checked"] = true;
      jc["ok"] = cr.contained;
      if (cr.violation) jc["violation"] = gapkit::violation_to_json(*cr.violation);
      all_ok = all_ok && cr.contained;
    } else {
      jc["checked"] = false;
      jc["ok"] = true;
    }
    j["containment"] = std::move(jc);
  }

  j["all_ok"] = all_ok;
  write_json(args.out, j);
  return all_ok ? kOk : kHypothesisFailed;
}

// ---- recover ----------------------------------------------------------------

struct RecoverArgs {
  std::string in;
  std::string pipeline = "auto";
  std::string c, c_prime, eps, kappa;
  size_t pivot = 1;
  i64 search_height_cap = 0;
  bool no_retry = false;
  u64 cap = 0;
  std::string out;
};

gapkit::RecoveryConfig build_config(const gapkit::InstanceSpec& spec, const std::string& c,
                                    const std::string& c_prime, const std::string& eps,
                                    const std::string& kappa, size_t pivot, i64 shc,
                                    bool no_retry, u64 cap) {
  gapkit::RecoveryConfig cfg;
  cfg.c = c.empty() ? spec.c : rat_flag(c, "--c");
  cfg.c_prime = c_prime.empty() ? spec.c_prime : rat_flag(c_prime, "--c-prime");
  cfg.eps = eps.empty() ? spec.eps : rat_flag(eps, "--epsilon");
  if (!kappa.empty()) cfg.kappa = rat_flag(kappa, "--kappa");
  cfg.pivot = pivot;
  cfg.search_height_cap = shc;
  cfg.retry_pivots = !no_retry;
  cfg.cap = cap;
  return cfg;
}

Json hypothesis_error_json(const std::exception& e) {
  Json j;
  j["schema"] = "gapkit-recovery/1";
  Json err;
  err["message"] = e.what();
  if (const auto* iso = dynamic_cast<const gapkit::NotIsolatedError*>(&e)) {
    err["kind"] = "not_isolated";
    err["witness"] = iso->witness;
    err["kappa"] = iso->kappa.str();
  } else if (const auto* np = dynamic_cast<const gapkit::NotProperError*>(&e)) {
    err["kind"] = "not_proper";
    err["subject"] = np->subject;
    err["lhs"] = np->lhs;
    err["rhs"] = np->rhs;
  } else if (const auto* nc = dynamic_cast<const gapkit::NotContainedError*>(&e)) {
    err["kind"] = "not_contained";
    err["i"] = nc->i;
    err["j"] = nc->j;
    if (!nc->side.empty()) err["side"] = nc->side;
  } else if (dynamic_cast<const gapkit::NotInvertibleError*>(&e)) {
    err["kind"] = "not_invertible";
  } else {
    err["kind"] = "error";
  }
  j["error"] = std::move(err);
  return j;
}

// Sub-box of b with bounds floor(scale * N_i^expo), in b's own form.
gapkit::Gap derived_subbox(const gapkit::Gap& b, const Rat& scale, const Rat& expo) {
  std::vector<i64> bounds;
  for (i64 n : b.bounds())
    bounds.push_back(gapkit::scaled_pow_floor(static_cast<u64>(n), expo, scale));
  return gapkit::Gap(b.modulus(), b.generators(), std::move(bounds), b.base_point(), b.form());
}

int run_recover(const RecoverArgs& args) {
  const gapkit::InstanceFile inst = gapkit::instance_from_json(read_json(args.in));
  if (inst.is_matrix())
    throw CLI::ValidationError("matrix instances go through `gapkit matrix-recover`");

  const gapkit::RecoveryConfig cfg =
      build_config(inst.spec, args.c, args.c_prime, args.eps, args.kappa, args.pivot,
                   args.search_height_cap, args.no_retry, args.cap);

  gapkit::Gap b = *inst.b;
  std::string pipeline = args.pipeline;
  if (pipeline == "auto")
    pipeline = !inst.a_prime && b.rank() == 2 ? "rank2" : "general";
  if (pipeline != "rank2" && pipeline != "general")
    throw CLI::ValidationError("--pipeline must be auto, rank2, or general");

  const Rat one_minus_eps = Rat(1) - cfg.eps;
  gapkit::Gap a = inst.a ? *inst.a : derived_subbox(b, cfg.c, one_minus_eps);
  gapkit::Gap a_prime = inst.a_prime ? *inst.a_prime
                                     : derived_subbox(b, cfg.c_prime, cfg.eps);

  try {
    // one-sided or shifted boxes reduce to the symmetric zero-base setting
    if (b.form() == gapkit::GapForm::one_sided || b.base_point() != 0) {
      gapkit::SymmetrizeResult sym = gapkit::symmetrize(b, a, a_prime, cfg.cap);
      b = std::move(sym.b);
      a = std::move(sym.a);
      a_prime = std::move(sym.a_prime);
    }
    if (pipeline == "rank2") {
      gapkit::Rank2Report rep = gapkit::recover_rank2(b, a, cfg);
      write_json(args.out, gapkit::rank2_report_to_json(rep));
      if (!rep.verified) return kHypothesisFailed;
      if (rep.height_exceeded || !rep.guard_ok) return kBoundFlagged;
      return kOk;
    }
    gapkit::RecoveryReport rep = gapkit::recover_generators(b, a, a_prime, cfg);
    write_json(args.out, gapkit::recovery_report_to_json(rep));
    if (rep.failure || !rep.all_verified()) return kHypothesisFailed;
    if (rep.eq4_exceeded) return kBoundFlagged;
    return kOk;
  } catch (const gapkit::NotIsolatedError& e) {
    write_json(args.out, hypothesis_error_json(e));
    return kHypothesisFailed;
  } catch (const gapkit::NotProperError& e) {
    write_json(args.out, hypothesis_error_json(e));
    return kHypothesisFailed;
  } catch (const gapkit::NotContainedError& e) {
    write_json(args.out, hypothesis_error_json(e));
    return kHypothesisFailed;
  }
}

// ---- matrix-recover ----------------------------------------------------------

struct MatRecoverArgs {
  std::string in;
  std::string c, c_prime, eps, kappa;
  size_t pivot_i = 0, pivot_j = 0;
  i64 search_height_cap = 0;
  bool no_retry = false;
  u64 cap = 0;
  std::string out;
};

gapkit::MatGap derived_mat_subbox(const gapkit::MatGap& b, const Rat& scale, const Rat& expo) {
  std::vector<i64> bounds;
  for (i64 n : b.bounds())
    bounds.push_back(gapkit::scaled_pow_floor(static_cast<u64>(n), expo, scale));
  return gapkit::MatGap(b.modulus(), b.dim(), b.generators(), std::move(bounds));
}

int run_matrix_recover(const MatRecoverArgs& args) {
  const gapkit::InstanceFile inst = gapkit::instance_from_json(read_json(args.in));
  if (!inst.is_matrix())
    throw CLI::ValidationError("scalar instances go through `gapkit recover`");

  const gapkit::RecoveryConfig cfg =
      build_config(inst.spec, args.c, args.c_prime, args.eps, args.kappa, 1,
                   args.search_height_cap, args.no_retry, args.cap);
  const gapkit::MatGap& b = *inst.mat_b;
  const gapkit::MatGap a =
      inst.mat_a ? *inst.mat_a : derived_mat_subbox(b, cfg.c, Rat(1) - cfg.eps);
  const gapkit::MatGap a_prime =
      inst.mat_a_prime ? *inst.mat_a_prime : derived_mat_subbox(b, cfg.c_prime, cfg.eps);
  try {
    gapkit::MatRecoveryReport rep =
        gapkit::recover_matrix_generators(b, a, a_prime, args.pivot_i, args.pivot_j, cfg);
    write_json(args.out, gapkit::mat_recovery_report_to_json(rep));
    if (rep.failure || !rep.all_verified()) return kHypothesisFailed;
    if (rep.eq4_exceeded) return kBoundFlagged;
    return kOk;
  } catch (const gapkit::NotIsolatedError& e) {
    write_json(args.out, hypothesis_error_json(e));
    return kHypothesisFailed;
  } catch (const gapkit::NotProperError& e) {
    write_json(args.out, hypothesis_error_json(e));
    return kHypothesisFailed;
  } catch (const gapkit::NotContainedError& e) {
    write_json(args.out, hypothesis_error_json(e));
    return kHypothesisFailed;
  } catch (const gapkit::NotInvertibleError& e) {
    write_json(args.out, hypothesis_error_json(e));
    return kHypothesisFailed;
  }
}

// ---- minpoly / energy ---------------------------------------------------------

struct MinPolyArgs {
  u64 p = 0;
  std::string t;
  size_t d = 2;
  i64 height = 10;
  u64 cap = 0;
  std::string out;
};

int run_minpoly(const MinPolyArgs& args) {
  const u64 tv = gapkit::detail::json_u64(Json(args.t), "--t");
  gapkit::MinPolyResult res =
      gapkit::minpoly_bounded(gapkit::Fp(tv, args.p), args.d, args.height, args.cap);
  Json j = gapkit::minpoly_result_to_json(res);
  j["p"] = std::to_string(args.p);
  j["t"] = std::to_string(tv % args.p);
  j["d"] = args.d;
  j["height"] = args.height;
  write_json(args.out, j);
  return kOk;
}

struct EnergyArgs {
  u64 p = 0;
  std::string set;
  std::string in;
  bool naive = false;
  u64 cap = 0;
  std::string out;
};

int run_energy(const EnergyArgs& args) {
  u64 p = args.p;
  std::vector<gapkit::Fp> set;
  if (!args.in.empty()) {
    const Json j = read_json(args.in);
    p = gapkit::detail::json_u64(gapkit::detail::json_field(j, "p"), "p");
    for (const Json& e : gapkit::detail::json_field(j, "set"))
      set.emplace_back(gapkit::detail::json_u64(e, "set element"), p);
  } else {
    if (p == 0) throw CLI::ValidationError("--p is required unless --in is given");
    std::stringstream ss(args.set);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) set.emplace_back(gapkit::detail::json_u64(Json(tok), "--set"), p);
    if (set.empty()) throw CLI::ValidationError("--set must list at least one residue");
  }

  const gapkit::u128 e = gapkit::mult_energy(set, args.cap);
  Json j;
  j["schema"] = "gapkit-energy/1";
  j["p"] = std::to_string(p);
  j["size"] = set.size();
  j["energy"] = gapkit::to_string_u128(e);
  if (args.naive) {
    const gapkit::u128 brute = gapkit::mult_energy_naive(set, args.cap);
    j["naive"] = gapkit::to_string_u128(brute);
    j["agree"] = brute == e;
  }
  write_json(args.out, j);
  return kOk;
}

// ---- experiment ----------------------------------------------------------------

int run_experiment_cmd(const gapkit::ExperimentConfig& cfg, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<gapkit::ExperimentRow> rows = gapkit::run_experiment(cfg);
  write_text(out, gapkit::experiment_csv(rows));
  double total = 0;
  for (const gapkit::ExperimentRow& r : rows) total += r.wall_ms;
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  std::fprintf(stderr, "gapkit: %zu rows, %.1f ms wall, %.1f ms cpu-row total\n", rows.size(),
               wall, total);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAP structure toolkit: hypothesis checks, generator recovery, oracles"};
  app.require_subcommand(1);
  const u64 cap_default = env_cap();

  GenArgs gen;
  gen.cap = cap_default;
  CLI::App* cgen = app.add_subcommand("gen", "Generate an instance file");
  cgen->add_option("--kind", gen.kind, "quadratic | degenerate | random | matrix")->required();
  cgen->add_option("--p", gen.p, "prime modulus")->required();
  cgen->add_option("--c0", gen.c0, "constant term of the defining quadratic");
  cgen->add_option("--c1", gen.c1, "linear term of the defining quadratic");
  cgen->add_option("--c", gen.c, "sub-box scale (rational)");
  auto* cp_opt = cgen->add_option("--c-prime", gen.c_prime, "second sub-box scale (rational)");
  cgen->add_option("--epsilon", gen.eps, "exponent split (rational)");
  cgen->add_option("--n-bound", gen.n_bound, "box bound N (0 = kind default)");
  cgen->add_option("--d", gen.d, "rank (random/matrix kinds)");
  cgen->add_option("--n", gen.n, "matrix order (matrix kind)");
  cgen->add_option("--seed", gen.seed, "rng seed (random/matrix kinds)");
  cgen->add_option("--coeff-height", gen.coeff_height, "companion coefficient height");
  cgen->add_option("--cap", gen.cap, "enumeration work cap");
  cgen->add_option("--out", gen.out, "output path (default stdout)");

  CheckArgs check;
  check.cap = cap_default;
  CLI::App* ccheck = app.add_subcommand("check", "Verify properness/isolation/containment");
  ccheck->add_option("--in", check.in, "instance file")->required();
  ccheck->add_option("--kappa", check.kappa, "isolation strength (rational)");
  ccheck->add_option("--cap", check.cap, "enumeration work cap");
  ccheck->add_option("--out", check.out, "output path (default stdout)");

  RecoverArgs rec;
  rec.cap = cap_default;
  CLI::App* crec = app.add_subcommand("recover", "Recover vanishing polynomials");
  crec->add_option("--in", rec.in, "instance file")->required();
  crec->add_option("--pipeline", rec.pipeline, "auto | rank2 | general");
  crec->add_option("--c", rec.c, "sub-box scale (rational; default from instance)");
  crec->add_option("--c-prime", rec.c_prime, "second sub-box scale (rational)");
  crec->add_option("--epsilon", rec.eps, "exponent split (rational)");
  crec->add_option("--kappa", rec.kappa, "isolation strength (rational)");
  crec->add_option("--pivot", rec.pivot, "1-based pivot generator index");
  crec->add_option("--search-height-cap", rec.search_height_cap,
                   "s-coefficient bound (0 = derive)");
  crec->add_flag("--no-retry-pivots", rec.no_retry, "fail instead of trying other pivots");
  crec->add_option("--cap", rec.cap, "enumeration work cap");
  crec->add_option("--out", rec.out, "output path (default stdout)");

  MatRecoverArgs mrec;
  mrec.cap = cap_default;
  CLI::App* cmrec = app.add_subcommand("matrix-recover", "Recover matrix vanishing polynomials");
  cmrec->add_option("--in", mrec.in, "matrix instance file")->required();
  cmrec->add_option("--c", mrec.c, "sub-box scale (rational; default from instance)");
  cmrec->add_option("--c-prime", mrec.c_prime, "second sub-box scale (rational)");
  cmrec->add_option("--epsilon", mrec.eps, "exponent split (rational)");
  cmrec->add_option("--kappa", mrec.kappa, "isolation strength (rational)");
  cmrec->add_option("--pivot-i", mrec.pivot_i, "1-based left pivot (0 = search)");
  cmrec->add_option("--pivot-j", mrec.pivot_j, "1-based right pivot (0 = search)");
  cmrec->add_option("--search-height-cap", mrec.search_height_cap,
                    "s-coefficient bound (0 = derive)");
  cmrec->add_flag("--no-retry-pivots", mrec.no_retry, "fail instead of trying other pivot pairs");
  cmrec->add_option("--cap", mrec.cap, "enumeration work cap");
  cmrec->add_option("--out", mrec.out, "output path (default stdout)");

  MinPolyArgs mp;
  mp.cap = gapkit::kOracleCap;
  CLI::App* cmp = app.add_subcommand("minpoly", "Brute-force bounded minimal polynomials");
  cmp->add_option("--p", mp.p, "prime modulus")->required();
  cmp->add_option("--t", mp.t, "residue whose polynomials are sought")->required();
  cmp->add_option("--d", mp.d, "degree bound");
  cmp->add_option("--height", mp.height, "height bound");
  cmp->add_option("--cap", mp.cap, "enumeration work cap");
  cmp->add_option("--out", mp.out, "output path (default stdout)");

  EnergyArgs en;
  en.cap = gapkit::kOracleCap;
  CLI::App* cen = app.add_subcommand("energy", "Multiplicative energy of a residue set");
  cen->add_option("--p", en.p, "prime modulus");
  cen->add_option("--set", en.set, "comma-separated residues");
  cen->add_option("--in", en.in, "JSON file with {p, set}");
  cen->add_flag("--naive", en.naive, "cross-check against the quadruple brute force");
  cen->add_option("--cap", en.cap, "enumeration work cap");
  cen->add_option("--out", en.out, "output path (default stdout)");

  gapkit::ExperimentConfig ex;
  ex.cap = cap_default;
  std::string ex_c = "1/2", ex_cp = "1/2", ex_eps = "1/2", ex_out;
  CLI::App* cex = app.add_subcommand("experiment", "Deterministic batch runs to CSV");
  cex->add_option("--kind", ex.kind, "quadratic | matrix");
  cex->add_option("--pipeline", ex.pipeline, "rank2 | general");
  cex->add_option("--count", ex.count, "number of rows");
  cex->add_option("--seed", ex.seed, "master seed");
  cex->add_option("--p-min", ex.p_min, "low end of the prime range");
  cex->add_option("--p-max", ex.p_max, "high end of the prime range");
  cex->add_option("--n-bound", ex.n_bound, "box bound N (0 = maximal under guard)");
  cex->add_option("--n", ex.n, "matrix order (matrix kind)");
  cex->add_option("--c", ex_c, "sub-box scale (rational)");
  cex->add_option("--c-prime", ex_cp, "second sub-box scale (rational)");
  cex->add_option("--epsilon", ex_eps, "exponent split (rational)");
  cex->add_option("--parallel", ex.parallel, "worker threads");
  cex->add_option("--cap", ex.cap, "enumeration work cap");
  cex->add_option("--out", ex_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help/usage text
    return rc == 0 ? kOk : kGenericError;
  }

  try {
    gen.c_prime_given = cp_opt->count() > 0;
    if (cgen->parsed()) return run_gen(gen);
    if (ccheck->parsed()) return run_check(check);
    if (crec->parsed()) return run_recover(rec);
    if (cmrec->parsed()) return run_matrix_recover(mrec);
    if (cmp->parsed()) return run_minpoly(mp);
    if (cen->parsed()) return run_energy(en);
    if (cex->parsed()) {
      ex.c = rat_flag(ex_c, "--c");
      ex.c_prime = rat_flag(ex_cp, "--c-prime");
      ex.eps = rat_flag(ex_eps, "--epsilon");
      return run_experiment_cmd(ex, ex_out);
    }
    return kGenericError;
  } catch (const gapkit::CapExceededError& e) {
    std::cerr << "gapkit: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const CLI::Error& e) {
    std::cerr << "gapkit: " << e.what() << "\n";
    return kGenericError;
  } catch (const std::exception& e) {
    std::cerr << "gapkit: " << e.what() << "\n";
    return kGenericError;
  }
}
