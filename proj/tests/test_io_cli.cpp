// Tests for the JSON layer (round trips, parse errors, report shapes) and for
// the CLI binary end to end: exit codes, report files, env cap handling, and
// byte-stable experiment CSVs. The binary path comes in via GAPKIT_CLI_PATH.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gapkit/gapkit.hpp"
#include "gapkit/json_io.hpp"

using namespace gapkit;

namespace {

namespace fs = std::filesystem;

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("gapkit-io-cli-" + std::to_string(static_cast<long>(::getpid())));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string tpath(const char* name) { return (work_dir() / name).string(); }

// Runs the CLI through the shell; stderr is dropped so retry/diagnostic chatter
// stays out of the test log. Returns the process exit code.
int run_cli(const std::string& args, const std::string& env_prefix = "") {
  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += std::string(GAPKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Json read_file_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return Json::parse(in);
}

std::string read_file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << j.dump(2) << "\n";
}

// Proper rank-2 gap around sqrt(40) at p = 1000003; recovery succeeds but the
// recovered height 40 exceeds the 8/c^2 = 32 budget and the cube guard fails,
// so `recover` must exit with the bound-flag code.
Json sqrt40_instance() {
  const u64 p = 1'000'003;
  const u64 t = 211'573;  // t^2 = 40 mod p
  Json spec;
  spec["kind"] = "quadratic";
  spec["p"] = std::to_string(p);
  Json j;
  j["schema"] = "gapkit-instance/1";
  j["spec"] = std::move(spec);
  j["b"] = gap_to_json(Gap(p, {1, t}, {60, 60}));
  j["a"] = gap_to_json(Gap(p, {1, t}, {5, 5}));
  j["t"] = std::to_string(t);
  return j;
}

// Matrix instance whose first sub-box generator Y_1 = X - I is singular: pivot
// (1,1) must be rejected while the auto-search lands on (2,1). X = [[0,1],[1,0]].
Json singular_pivot_instance() {
  const u64 p = 1009;
  const FpMat id = FpMat::identity(2, p);
  FpMat x(2, p);
  x.at(0, 1) = 1;
  x.at(1, 0) = 1;
  FpMat x_minus_i(2, p);
  x_minus_i.at(0, 0) = p - 1;
  x_minus_i.at(0, 1) = 1;
  x_minus_i.at(1, 0) = 1;
  x_minus_i.at(1, 1) = p - 1;
  Json spec;
  spec["kind"] = "matrix";
  spec["p"] = std::to_string(p);
  spec["d"] = 2;
  spec["n"] = 2;
  Json j;
  j["schema"] = "gapkit-instance/1";
  j["spec"] = std::move(spec);
  j["b"] = matgap_to_json(MatGap(p, 2, {id, x}, {12, 12}));
  j["a"] = matgap_to_json(MatGap(p, 2, {x_minus_i, x}, {2, 2}));
  j["a_prime"] = matgap_to_json(MatGap(p, 2, {id, x}, {2, 2}));
  return j;
}

}  // namespace

TEST_CASE("gap and matrix gap json round trips") {
  const u64 p = 1'000'033;
  const Gap g(p, {1, 95'913}, {4, 5}, 17, GapForm::one_sided);
  Json j = gap_to_json(g);
  CHECK(j["p"] == "1000033");
  CHECK(j["p"].is_string());
  CHECK(j["generators"] == Json::array({"1", "95913"}));
  CHECK(j["bounds"] == Json::array({4, 5}));
  CHECK(j["bounds"][0].is_number_integer());
  CHECK(j["base_point"] == "17");
  CHECK(j["form"] == "one_sided");

  const Gap back = gap_from_json(j);
  CHECK(back.modulus() == p);
  CHECK(back.generators() == g.generators());
  CHECK(back.bounds() == g.bounds());
  CHECK(back.base_point() == 17);
  CHECK(back.form() == GapForm::one_sided);

  // base_point and form default when absent
  j.erase("base_point");
  j.erase("form");
  const Gap bare = gap_from_json(j);
  CHECK(bare.base_point() == 0);
  CHECK(bare.form() == GapForm::symmetric);

  FpMat x(2, 97);
  x.at(0, 1) = 2;
  x.at(1, 0) = 1;
  const MatGap mg(97, 2, {FpMat::identity(2, 97), x}, {3, 4});
  Json mj = matgap_to_json(mg);
  CHECK(mj["n"] == 2);
  CHECK(mj["generators"][0] == Json::array({"1", "0", "0", "1"}));
  CHECK(mj["generators"][1] == Json::array({"0", "2", "1", "0"}));

  const MatGap mback = matgap_from_json(mj);
  CHECK(mback.modulus() == 97);
  CHECK(mback.dim() == 2);
  CHECK(mback.bounds() == mg.bounds());
  CHECK(mback.generators()[1] == x);
}

TEST_CASE("spec, polynomial, and rational json round trips") {
  InstanceSpec s;
  s.kind = "quadratic";
  s.p = 400'000'009;
  s.d = 2;
  s.n = 1;
  s.n_bound = 367;
  s.c = Rat(1, 2);
  s.c_prime = Rat(1, 4);
  s.eps = Rat(1, 2);
  s.poly_seeds = {{-2, 0}};
  s.rng_seed = 42;

  Json j = spec_to_json(s);
  CHECK(j["p"] == "400000009");
  CHECK(j["rng_seed"] == "42");
  CHECK(j["n_bound"] == 367);
  CHECK(j["c_prime"] == "1/4");

  const InstanceSpec back = spec_from_json(j);
  CHECK(back.kind == s.kind);
  CHECK(back.p == s.p);
  CHECK(back.d == s.d);
  CHECK(back.n == s.n);
  CHECK(back.n_bound == s.n_bound);
  CHECK(back.c == s.c);
  CHECK(back.c_prime == s.c_prime);
  CHECK(back.eps == s.eps);
  CHECK(back.poly_seeds == s.poly_seeds);
  CHECK(back.rng_seed == s.rng_seed);

  const IntPoly f({-2, 0, 1});
  CHECK(poly_to_json(f) == Json::array({"-2", "0", "1"}));
  CHECK(poly_from_json(poly_to_json(f)) == f);

  CHECK(rat_to_json(Rat(3, 4)) == "3/4");
  CHECK(rat_to_json(Rat(32)) == "32");
  CHECK(rat_from_json(Json("3/4"), "x") == Rat(3, 4));
  CHECK(rat_from_json(Json(5), "x") == Rat(5));
}

TEST_CASE("instance files round trip for every kind") {
  const QuadraticInstance q = gen_quadratic(400'000'009, -2, 0, Rat(1, 2), 367);
  Json jq = instance_to_json(q);
  CHECK(jq["schema"] == "gapkit-instance/1");
  CHECK(jq.begin().key() == "schema");
  CHECK(jq["flags"]["guard_ok"] == true);
  CHECK(jq["flags"]["b_proper"] == true);
  CHECK(jq["flags"]["containment_ok"] == true);
  const InstanceFile fq = instance_from_json(jq);
  CHECK_FALSE(fq.is_matrix());
  CHECK(fq.spec.kind == "quadratic");
  CHECK(fq.b->generators() == q.b.generators());
  CHECK(fq.b->bounds() == std::vector<i64>{367, 367});
  CHECK(fq.a->bounds() == std::vector<i64>{9, 9});
  CHECK_FALSE(fq.a_prime.has_value());
  CHECK(fq.t == q.t.value());

  const DegenerateInstance d = gen_degenerate(1'000'003, 50);
  Json jd = instance_to_json(d);
  CHECK(jd["isolation_witness"] == Json::array({-50, 1}));
  const InstanceFile fd = instance_from_json(jd);
  CHECK(fd.b->form() == GapForm::one_sided);
  CHECK(fd.a.has_value());
  CHECK_FALSE(fd.t.has_value());

  const RandomInstance r = gen_random(1'000'003, 3, 30, 1);
  Json jr = instance_to_json(r);
  CHECK_FALSE(jr.contains("a"));
  const InstanceFile fr = instance_from_json(jr);
  CHECK(fr.b->rank() == 3);
  CHECK_FALSE(fr.a.has_value());

  const MatrixInstance m = gen_matrix(1'000'003, 2, 2, 42, 100);
  Json jm = instance_to_json(m);
  const InstanceFile fm = instance_from_json(jm);
  CHECK(fm.is_matrix());
  CHECK(fm.mat_b->dim() == 2);
  CHECK(fm.mat_b->generators()[1] == m.b.generators()[1]);
  CHECK(fm.mat_a->bounds() == std::vector<i64>{5, 5});
  CHECK(fm.mat_a_prime.has_value());
  CHECK(fm.spec.poly_seeds == m.spec.poly_seeds);
}

TEST_CASE("malformed json is rejected with parse errors") {
  Json good = gap_to_json(Gap(97, {1, 5}, {2, 2}));

  Json no_p = good;
  no_p.erase("p");
  CHECK_THROWS_AS(gap_from_json(no_p), ParseError);

  Json bad_form = good;
  bad_form["form"] = "diagonal";
  CHECK_THROWS_AS(gap_from_json(bad_form), ParseError);

  Json bad_p = good;
  bad_p["p"] = "12x";
  CHECK_THROWS_AS(gap_from_json(bad_p), ParseError);

  CHECK_THROWS_AS(detail::json_u64(Json(-3), "x"), ParseError);
  CHECK_THROWS_AS(detail::json_i64(Json("abc"), "x"), ParseError);
  CHECK_THROWS_AS(detail::json_i64_vec(Json("not-an-array"), "x"), ParseError);
  CHECK_THROWS_AS(rat_from_json(Json("x/y"), "x"), ParseError);
  CHECK_THROWS_AS(rat_from_json(Json(1.5), "x"), ParseError);

  Json mg = matgap_to_json(MatGap(97, 2, {FpMat::identity(2, 97)}, {2}));
  mg["generators"][0] = Json::array({"1", "0", "0"});  // 3 entries for n = 2
  CHECK_THROWS_AS(matgap_from_json(mg), ParseError);

  Json inst;
  inst["schema"] = "gapkit-instance/1";
  CHECK_THROWS_AS(instance_from_json(inst), ParseError);  // missing spec

  Json spec;
  spec["p"] = "97";
  CHECK_THROWS_AS(spec_from_json(spec), ParseError);  // missing kind
}

TEST_CASE("report json carries the full shape") {
  // rank-2 report: verified but over budget on height and outside the guard
  const u64 p = 1'000'003;
  const Gap b40(p, {1, 211'573}, {60, 60});  // gens[1]^2 = 40 mod p
  const Gap a40(p, {1, 211'573}, {5, 5});
  const Rank2Report r2 = recover_rank2(b40, a40, RecoveryConfig{});
  Json j2 = rank2_report_to_json(r2);
  CHECK(j2["schema"] == "gapkit-recovery/1");
  CHECK(j2["pipeline"] == "rank2");
  CHECK(j2["f"] == Json::array({"-40", "0", "1"}));
  CHECK(j2["a0"] == "40");
  CHECK(j2["b0"] == "0");
  CHECK(j2["f_height"] == "40");
  CHECK(j2["height_limit"] == "32");
  CHECK(j2["height_exceeded"] == true);
  CHECK(j2["guard_ok"] == false);
  CHECK(j2["verified"] == true);
  CHECK(j2["ambiguous"] == false);

  // general report on a healthy sqrt(2) instance
  const u64 bp = 400'000'009;
  const u64 t = 58'719'626;  // t^2 = 2 mod bp
  const Gap b(bp, {1, t}, {367, 367});
  const Gap a(bp, {1, t}, {9, 9});
  const RecoveryReport rg = recover_generators(b, a, a);
  Json jg = recovery_report_to_json(rg);
  for (const char* k :
       {"schema", "pipeline", "d", "pivot_used", "table", "eq4_observed", "eq4_limit",
        "eq4_exceeded", "c_constant", "search_height_cap", "T_j", "det_t1", "f", "g",
        "f_heights", "g_heights", "verified", "ambiguous", "failure", "all_verified"})
    CHECK(jg.contains(k));
  CHECK(jg["pipeline"] == "general");
  CHECK(jg["d"] == 2);
  CHECK(jg["pivot_used"] == 1);
  CHECK(jg["eq4_observed"] == 2);
  CHECK(jg["eq4_limit"] == "24");
  CHECK(jg["eq4_exceeded"] == false);
  CHECK(jg["table"]["d"] == 2);
  CHECK(jg["table"]["bound_observed"] == 2);
  CHECK(jg["det_t1"] == "1");
  CHECK(jg["g"][1] == Json::array({"-2", "0", "1"}));
  CHECK(jg["g_heights"][1] == "2");
  CHECK(jg["failure"].is_null());
  CHECK(jg["all_verified"] == true);

  // matrix report via the singular-pivot fixture's auto-search
  const InstanceFile sf = instance_from_json(singular_pivot_instance());
  const MatRecoveryReport mr =
      recover_matrix_generators(*sf.mat_b, *sf.mat_a, *sf.mat_a_prime);
  Json jm = mat_recovery_report_to_json(mr);
  CHECK(jm["schema"] == "gapkit-matrix-recovery/1");
  CHECK(jm["pipeline"] == "matrix");
  CHECK(jm["pivot_i"] == 2);
  CHECK(jm["pivot_j"] == 1);
  CHECK(jm["det_t1"] == "-1");
  CHECK(jm["conj_consistent"] == Json::array({true, true}));
  CHECK(jm["g"][0] == Json::array({"1", "-2", "1"}));
  CHECK(jm["g"][1] == Json::array({"-1", "0", "1"}));
  CHECK(jm["table_rev"].contains("entries"));
  CHECK(jm["failure"].is_null());
  CHECK(jm["all_verified"] == true);

  // minpoly report
  Json jp = minpoly_result_to_json(minpoly_bounded(Fp(95'913, 1'000'033), 2, 10));
  CHECK(jp["schema"] == "gapkit-minpoly/1");
  CHECK(jp["minimal"] == Json::array({"-2", "0", "1"}));
  CHECK(jp["polynomials"].size() >= 1);

  // failure objects keep only the fields their kind defines
  RecoveryFailure f1;
  f1.kind = "s_not_found";
  f1.j = 2;
  f1.k = 1;
  Json jf1 = failure_to_json(f1);
  CHECK(jf1["kind"] == "s_not_found");
  CHECK(jf1["j"] == 2);
  CHECK(jf1["k"] == 1);
  CHECK_FALSE(jf1.contains("subject"));
  CHECK_FALSE(jf1.contains("witness"));

  RecoveryFailure f2;
  f2.kind = "not_proper";
  f2.subject = "A";
  f2.witness = {1, 0, -1};
  Json jf2 = failure_to_json(f2);
  CHECK(jf2["subject"] == "A");
  CHECK(jf2["witness"] == Json::array({1, 0, -1}));
  CHECK_FALSE(jf2.contains("j"));
}

TEST_CASE("cli generates, checks, and recovers a quadratic instance") {
  const std::string q = tpath("q.json");
  REQUIRE(run_cli("gen --kind quadratic --p 400000009 --out " + q) == 0);
  Json jq = read_file_json(q);
  CHECK(jq["schema"] == "gapkit-instance/1");
  CHECK(jq["b"]["bounds"] == Json::array({367, 367}));  // guard-maximal default
  CHECK(jq["t"] == "58719626");
  CHECK_FALSE(jq.contains("a_prime"));

  const std::string c = tpath("q_check.json");
  CHECK(run_cli("check --in " + q + " --out " + c) == 0);
  Json jc = read_file_json(c);
  CHECK(jc["schema"] == "gapkit-check/1");
  CHECK(jc["kappa"] == "6");
  CHECK(jc["proper"]["ok"] == true);
  CHECK_FALSE(jc["proper"].contains("witness"));
  CHECK(jc["isolated"]["ok"] == true);
  CHECK(jc["containment"]["checked"] == true);
  CHECK(jc["containment"]["ok"] == true);
  CHECK(jc["all_ok"] == true);

  const std::string r = tpath("q_rank2.json");
  CHECK(run_cli("recover --in " + q + " --out " + r) == 0);
  Json jr = read_file_json(r);
  CHECK(jr["pipeline"] == "rank2");  // auto: rank 2, no second sub-box
  CHECK(jr["f"] == Json::array({"-2", "0", "1"}));
  CHECK(jr["a0"] == "2");
  CHECK(jr["b0"] == "0");
  CHECK(jr["guard_ok"] == true);
  CHECK(jr["height_exceeded"] == false);
  CHECK(jr["verified"] == true);

  const std::string g = tpath("q_general.json");
  CHECK(run_cli("recover --in " + q + " --pipeline general --out " + g) == 0);
  Json jgen = read_file_json(g);
  CHECK(jgen["pipeline"] == "general");
  CHECK(jgen["g"][1] == Json::array({"-2", "0", "1"}));
  CHECK(jgen["eq4_observed"] == 2);
  CHECK(jgen["failure"].is_null());
  CHECK(jgen["all_verified"] == true);

  // --c-prime attaches the second sub-box and flips auto onto general
  const std::string q2 = tpath("q2.json");
  REQUIRE(run_cli("gen --kind quadratic --p 400000009 --c-prime 1/4 --out " + q2) == 0);
  Json jq2 = read_file_json(q2);
  REQUIRE(jq2.contains("a_prime"));
  CHECK(jq2["a_prime"]["bounds"] == Json::array({4, 4}));
  CHECK(jq2["spec"]["c_prime"] == "1/4");

  const std::string r2 = tpath("q2_auto.json");
  CHECK(run_cli("recover --in " + q2 + " --out " + r2) == 0);
  Json jr2 = read_file_json(r2);
  CHECK(jr2["pipeline"] == "general");
  CHECK(jr2["eq4_limit"] == "48");  // 3 / (c c'/2) with c = 1/2, c' = 1/4
  CHECK(jr2["g"][1] == Json::array({"-2", "0", "1"}));
}

TEST_CASE("cli surfaces hypothesis failures with exit code 2") {
  const std::string d = tpath("d.json");
  REQUIRE(run_cli("gen --kind degenerate --p 1000003 --n-bound 50 --out " + d) == 0);

  const std::string c = tpath("d_check.json");
  CHECK(run_cli("check --in " + d + " --out " + c) == 2);
  Json jc = read_file_json(c);
  CHECK(jc["proper"]["ok"] == true);
  CHECK(jc["isolated"]["ok"] == false);
  CHECK(jc["isolated"]["witness"] == Json::array({-50, 1}));
  CHECK(jc["containment"]["ok"] == true);
  CHECK(jc["all_ok"] == false);

  // weaker kappa shrinks the window below the witness, so the check passes
  CHECK(run_cli("check --in " + d + " --kappa 1/2 --out " + tpath("d_weak.json")) == 0);

  // recover symmetrizes the one-sided box first and trips the kappa = 24 gate
  const std::string r = tpath("d_recover.json");
  CHECK(run_cli("recover --in " + d + " --out " + r) == 2);
  Json jr = read_file_json(r);
  CHECK(jr["schema"] == "gapkit-recovery/1");
  CHECK(jr["error"]["kind"] == "not_isolated");
  CHECK(jr["error"]["witness"] == Json::array({-50, 1}));
  CHECK(jr["error"]["kappa"] == "24");

  // explicit singular pivots are a hypothesis failure, not a crash
  const std::string s = tpath("sing.json");
  write_file_json(s, singular_pivot_instance());
  const std::string m = tpath("sing_fail.json");
  CHECK(run_cli("matrix-recover --in " + s + " --pivot-i 1 --pivot-j 1 --out " + m) == 2);
  Json jm = read_file_json(m);
  CHECK(jm["error"]["kind"] == "not_invertible");

  // auto-search skips the singular pivot and verifies
  const std::string ok = tpath("sing_ok.json");
  CHECK(run_cli("matrix-recover --in " + s + " --out " + ok) == 0);
  Json jok = read_file_json(ok);
  CHECK(jok["pivot_i"] == 2);
  CHECK(jok["pivot_j"] == 1);
  CHECK(jok["g"][1] == Json::array({"-1", "0", "1"}));
  CHECK(jok["all_verified"] == true);
}

TEST_CASE("cli distinguishes caps, bound flags, and bad arguments") {
  const std::string rnd = tpath("rnd.json");
  REQUIRE(run_cli("gen --kind random --p 1000003 --d 4 --n-bound 40 --seed 5 --out " + rnd) ==
          0);

  // rank-4 box at p ~ 1e6: scans blow a tiny cap, and with room to run the
  // box has more points than the field so properness fails
  CHECK(run_cli("check --in " + rnd + " --cap 1000 --out /dev/null") == 4);
  CHECK(run_cli("check --in " + rnd + " --out /dev/null", "GAPKIT_CAP=1000") == 4);
  CHECK(run_cli("check --in " + rnd + " --cap 100000000 --out /dev/null",
                "GAPKIT_CAP=1000") == 2);  // explicit flag beats the env default
  CHECK(run_cli("check --in " + rnd + " --out /dev/null", "GAPKIT_CAP=banana") == 2);

  // verified recovery with tripped bounds reports, then exits with code 3
  const std::string h = tpath("h.json");
  write_file_json(h, sqrt40_instance());
  const std::string hr = tpath("h_rank2.json");
  CHECK(run_cli("recover --in " + h + " --out " + hr) == 3);
  Json jh = read_file_json(hr);
  CHECK(jh["f"] == Json::array({"-40", "0", "1"}));
  CHECK(jh["verified"] == true);
  CHECK(jh["height_exceeded"] == true);
  CHECK(jh["guard_ok"] == false);

  // argument and routing errors all land on exit code 1
  CHECK(run_cli(">/dev/null") == 1);  // missing subcommand
  CHECK(run_cli("--help >/dev/null") == 0);
  const std::string s = tpath("sing2.json");
  write_file_json(s, singular_pivot_instance());
  CHECK(run_cli("recover --in " + s + " --out /dev/null") == 1);         // matrix file
  CHECK(run_cli("matrix-recover --in " + h + " --out /dev/null") == 1);  // scalar file
  CHECK(run_cli("gen --kind quadratic --p 1000035 --out /dev/null") == 1);  // composite
  CHECK(run_cli("check --in " + tpath("missing.json") + " --out /dev/null") == 1);
  CHECK(run_cli("experiment --pipeline bogus --count 1 --out /dev/null") == 1);
}

TEST_CASE("cli minpoly and energy oracles emit reports") {
  const std::string m = tpath("minpoly.json");
  CHECK(run_cli("minpoly --p 1000033 --t 95913 --d 2 --height 32 --out " + m) == 0);
  Json jm = read_file_json(m);
  CHECK(jm["schema"] == "gapkit-minpoly/1");
  CHECK(jm["minimal"] == Json::array({"-2", "0", "1"}));
  CHECK(jm["p"] == "1000033");
  CHECK(jm["t"] == "95913");
  CHECK(jm["d"] == 2);
  CHECK(jm["height"] == 32);

  const std::string e = tpath("energy.json");
  CHECK(run_cli("energy --p 1000003 --set 1,2,4 --naive --out " + e) == 0);
  Json je = read_file_json(e);
  CHECK(je["schema"] == "gapkit-energy/1");
  CHECK(je["size"] == 3);
  CHECK(je["energy"] == "19");
  CHECK(je["naive"] == "19");
  CHECK(je["agree"] == true);

  // same set through a file, report on stdout
  const std::string in = tpath("energy_in.json");
  Json jin;
  jin["p"] = "1000003";
  jin["set"] = Json::array({"1", "2", "4"});
  write_file_json(in, jin);
  const std::string out = tpath("energy_stdout.json");
  CHECK(run_cli("energy --in " + in + " > " + out) == 0);
  CHECK(read_file_json(out)["energy"] == "19");

  CHECK(run_cli("energy --set 1,2 --out /dev/null") == 1);  // --p required
}

TEST_CASE("cli experiment output is byte-stable across parallelism") {
  const std::string base =
      "experiment --kind quadratic --pipeline rank2 --count 6 --seed 11 "
      "--p-min 100000 --p-max 1000000";
  const std::string x1 = tpath("x1.csv");
  const std::string x4 = tpath("x4.csv");
  REQUIRE(run_cli(base + " --parallel 1 --out " + x1) == 0);
  REQUIRE(run_cli(base + " --parallel 4 --out " + x4) == 0);

  const std::string csv1 = read_file_text(x1);
  CHECK(csv1 == read_file_text(x4));

  std::istringstream lines(csv1);
  std::string schema_line, header, row0;
  REQUIRE(std::getline(lines, schema_line));
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, row0));
  CHECK(schema_line == "# gapkit-experiment-csv/1");
  CHECK(header.rfind("id,kind,p,", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == 24);  // 25 columns
  CHECK(std::count(row0.begin(), row0.end(), ',') == 24);
  CHECK(row0.rfind("0,quadratic,", 0) == 0);
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 8);  // 2 headers + 6 rows
}

TEST_CASE("cli matrix instances round trip end to end") {
  const std::string mi = tpath("mi.json");
  REQUIRE(run_cli("gen --kind matrix --p 1000003 --n 2 --d 2 --seed 42 --n-bound 100 --out " +
                  mi) == 0);
  Json jmi = read_file_json(mi);
  CHECK(jmi["b"]["n"] == 2);
  CHECK(jmi["flags"]["b_proper"] == true);
  CHECK(jmi["flags"]["b_isolated"] == true);
  CHECK(jmi["flags"]["containment_ok"] == true);

  CHECK(run_cli("check --in " + mi + " --out " + tpath("mi_check.json")) == 0);
  CHECK(read_file_json(tpath("mi_check.json"))["all_ok"] == true);

  const std::string mr = tpath("mi_recover.json");
  CHECK(run_cli("matrix-recover --in " + mi + " --out " + mr) == 0);
  Json jmr = read_file_json(mr);
  CHECK(jmr["schema"] == "gapkit-matrix-recovery/1");
  CHECK(jmr["pivot_i"] == 1);
  CHECK(jmr["pivot_j"] == 1);
  CHECK(jmr["g"][0] == Json::array({"1", "-2", "1"}));
  CHECK(jmr["conj_consistent"] == Json::array({true, true}));
  CHECK(jmr["failure"].is_null());
  CHECK(jmr["all_verified"] == true);

  // explicit pivots reproduce the auto run
  const std::string mr2 = tpath("mi_recover2.json");
  CHECK(run_cli("matrix-recover --in " + mi + " --pivot-i 1 --pivot-j 1 --out " + mr2) == 0);
  CHECK(read_file_json(mr2)["g"] == jmr["g"]);
}
