#pragma once
// JSON (de)serialization for gaps, instances, and reports. Residues,
// polynomial coefficients, and other values that can exceed 2^53 travel as
// decimal strings; structural integers (ranks, bounds, box coefficients)
// stay JSON numbers. Keys keep insertion order so output is byte-stable.

#include <charconv>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gapkit/decompose.hpp"
#include "gapkit/gap.hpp"
#include "gapkit/instances.hpp"
#include "gapkit/int_math.hpp"
#include "gapkit/int_matrix.hpp"
#include "gapkit/int_poly.hpp"
#include "gapkit/matrix_ring.hpp"
#include "gapkit/oracles.hpp"
#include "gapkit/recovery.hpp"

namespace gapkit {

using Json = nlohmann::ordered_json;

namespace detail {

inline u64 json_u64(const Json& j, const char* what) {
  if (j.is_number_unsigned()) return j.get<u64>();
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    u64 v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  throw ParseError(std::string(what) + ": expected an unsigned decimal");
}

inline i64 json_i64(const Json& j, const char* what) {
  if (j.is_number_integer()) return j.get<i64>();
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    i64 v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  throw ParseError(std::string(what) + ": expected a signed decimal");
}

inline const Json& json_field(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

inline std::vector<i64> json_i64_vec(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  std::vector<i64> out;
  for (const Json& e : j) out.push_back(json_i64(e, what));
  return out;
}

}  // namespace detail

// ---- core pieces ----------------------------------------------------------

inline Json rat_to_json(const Rat& r) { return r.str(); }

inline Rat rat_from_json(const Json& j, const char* what) {
  if (j.is_number_integer()) return Rat(j.get<i64>());
  if (j.is_string()) return Rat::parse(j.get_ref<const std::string&>());
  throw ParseError(std::string(what) + ": expected a rational like \"1/2\"");
}

inline Json poly_to_json(const IntPoly& f) {
  Json a = Json::array();
  for (i64 c : f.coeffs()) a.push_back(std::to_string(c));
  return a;
}

inline IntPoly poly_from_json(const Json& j) {
  return IntPoly(detail::json_i64_vec(j, "polynomial"));
}

inline Json gap_to_json(const Gap& b) {
  Json j;
  j["p"] = std::to_string(b.modulus());
  Json gens = Json::array();
  for (u64 g : b.generators()) gens.push_back(std::to_string(g));
  j["generators"] = std::move(gens);
  j["bounds"] = b.bounds();
  j["base_point"] = std::to_string(b.base_point());
  j["form"] = b.form() == GapForm::symmetric ? "symmetric" : "one_sided";
  return j;
}

inline Gap gap_from_json(const Json& j) {
  const u64 p = detail::json_u64(detail::json_field(j, "p"), "p");
  std::vector<u64> gens;
  for (const Json& g : detail::json_field(j, "generators"))
    gens.push_back(detail::json_u64(g, "generator"));
  std::vector<i64> bounds = detail::json_i64_vec(detail::json_field(j, "bounds"), "bounds");
  u64 base = 0;
  if (j.contains("base_point")) base = detail::json_u64(j["base_point"], "base_point");
  GapForm form = GapForm::symmetric;
  if (j.contains("form")) {
    const std::string f = j["form"].get<std::string>();
    if (f == "one_sided")
      form = GapForm::one_sided;
    else if (f != "symmetric")
      throw ParseError("form must be \"symmetric\" or \"one_sided\"");
  }
  return Gap(p, std::move(gens), std::move(bounds), base, form);
}

inline Json fpmat_to_json(const FpMat& m) {
  Json a = Json::array();
  for (size_t i = 0; i < m.order(); ++i)
    for (size_t j = 0; j < m.order(); ++j) a.push_back(std::to_string(m.at(i, j)));
  return a;
}

inline Json matgap_to_json(const MatGap& b) {
  Json j;
  j["p"] = std::to_string(b.modulus());
  j["n"] = b.dim();
  Json gens = Json::array();
  for (const FpMat& g : b.generators()) gens.push_back(fpmat_to_json(g));
  j["generators"] = std::move(gens);
  j["bounds"] = b.bounds();
  return j;
}

inline MatGap matgap_from_json(const Json& j) {
  const u64 p = detail::json_u64(detail::json_field(j, "p"), "p");
  const size_t n = detail::json_field(j, "n").get<size_t>();
  std::vector<FpMat> gens;
  for (const Json& g : detail::json_field(j, "generators")) {
    if (!g.is_array() || g.size() != n * n)
      throw ParseError("generator must hold n*n row-major entries");
    FpMat m(n, p);
    size_t k = 0;
    for (const Json& e : g) {
      m.at(k / n, k % n) = detail::json_u64(e, "entry") % p;
      ++k;
    }
    gens.push_back(std::move(m));
  }
  return MatGap(p, n, std::move(gens),
                detail::json_i64_vec(detail::json_field(j, "bounds"), "bounds"));
}

inline Json int_matrix_to_json(const IntMatrix& m) {
  Json a = Json::array();
  for (size_t i = 0; i < m.order(); ++i)
    for (size_t j = 0; j < m.order(); ++j) a.push_back(std::to_string(m.at(i, j)));
  return a;
}

// ---- instance specs and files ---------------------------------------------

inline Json spec_to_json(const InstanceSpec& s) {
  Json j;
  j["kind"] = s.kind;
  j["p"] = std::to_string(s.p);
  j["d"] = s.d;
  j["n"] = s.n;
  j["n_bound"] = s.n_bound;
  j["c"] = rat_to_json(s.c);
  j["c_prime"] = rat_to_json(s.c_prime);
  j["eps"] = rat_to_json(s.eps);
  j["poly_seeds"] = s.poly_seeds;
  j["rng_seed"] = std::to_string(s.rng_seed);
  return j;
}

inline InstanceSpec spec_from_json(const Json& j) {
  InstanceSpec s;
  s.kind = detail::json_field(j, "kind").get<std::string>();
  s.p = detail::json_u64(detail::json_field(j, "p"), "p");
  if (j.contains("d")) s.d = j["d"].get<size_t>();
  if (j.contains("n")) s.n = j["n"].get<size_t>();
  if (j.contains("n_bound")) s.n_bound = detail::json_i64(j["n_bound"], "n_bound");
  if (j.contains("c")) s.c = rat_from_json(j["c"], "c");
  if (j.contains("c_prime")) s.c_prime = rat_from_json(j["c_prime"], "c_prime");
  if (j.contains("eps")) s.eps = rat_from_json(j["eps"], "eps");
  if (j.contains("poly_seeds"))
    for (const Json& row : j["poly_seeds"])
      s.poly_seeds.push_back(detail::json_i64_vec(row, "poly_seeds"));
  if (j.contains("rng_seed")) s.rng_seed = detail::json_u64(j["rng_seed"], "rng_seed");
  return s;
}

inline Json violation_to_json(const ProductViolation& v) {
  Json j;
  j["a_coeffs"] = v.a_coeffs;
  j["a_prime_coeffs"] = v.a_prime_coeffs;
  j["a_value"] = std::to_string(v.a_value);
  j["a_prime_value"] = std::to_string(v.a_prime_value);
  j["product"] = std::to_string(v.product);
  return j;
}

inline Json mat_violation_to_json(const MatProductViolation& v) {
  Json j;
  j["side"] = v.side;
  j["left_coeffs"] = v.left_coeffs;
  j["right_coeffs"] = v.right_coeffs;
  return j;
}

inline Json instance_to_json(const QuadraticInstance& q) {
  Json j;
  j["schema"] = "gapkit-instance/1";
  j["spec"] = spec_to_json(q.spec);
  j["b"] = gap_to_json(q.b);
  j["a"] = gap_to_json(q.a);
  j["t"] = std::to_string(q.t.value());
  j["flags"] = {{"guard_ok", q.guard_ok},
                {"b_proper", q.b_proper},
                {"containment_ok", q.containment_ok}};
  if (q.violation) j["violation"] = violation_to_json(*q.violation);
  return j;
}

inline Json instance_to_json(const DegenerateInstance& g) {
  Json j;
  j["schema"] = "gapkit-instance/1";
  j["spec"] = spec_to_json(g.spec);
  j["b"] = gap_to_json(g.b);
  j["a"] = gap_to_json(g.a);
  j["flags"] = {{"b_proper", g.b_proper}};
  j["isolation_witness"] = g.isolation_witness;
  return j;
}

inline Json instance_to_json(const RandomInstance& r) {
  Json j;
  j["schema"] = "gapkit-instance/1";
  j["spec"] = spec_to_json(r.spec);
  j["b"] = gap_to_json(r.b);
  return j;
}

inline Json instance_to_json(const MatrixInstance& m) {
  Json j;
  j["schema"] = "gapkit-instance/1";
  j["spec"] = spec_to_json(m.spec);
  j["b"] = matgap_to_json(m.b);
  j["a"] = matgap_to_json(m.a);
  j["a_prime"] = matgap_to_json(m.a_prime);
  j["flags"] = {{"b_proper", m.b_proper},
                {"b_isolated", m.b_isolated},
                {"containment_ok", m.containment_ok}};
  if (m.violation) j["violation"] = mat_violation_to_json(*m.violation);
  return j;
}

// A parsed instance file; scalar and matrix instances share the container.
struct InstanceFile {
  InstanceSpec spec;
  std::optional<Gap> b, a, a_prime;
  std::optional<MatGap> mat_b, mat_a, mat_a_prime;
  std::optional<u64> t;

  bool is_matrix() const { return mat_b.has_value(); }
};

inline InstanceFile instance_from_json(const Json& j) {
  InstanceFile f;
  f.spec = spec_from_json(detail::json_field(j, "spec"));
  const bool matrix = detail::json_field(j, "b").contains("n");
  if (matrix) {
    f.mat_b = matgap_from_json(j["b"]);
    if (j.contains("a")) f.mat_a = matgap_from_json(j["a"]);
    if (j.contains("a_prime")) f.mat_a_prime = matgap_from_json(j["a_prime"]);
  } else {
    f.b = gap_from_json(j["b"]);
    if (j.contains("a")) f.a = gap_from_json(j["a"]);
    if (j.contains("a_prime")) f.a_prime = gap_from_json(j["a_prime"]);
  }
  if (j.contains("t")) f.t = detail::json_u64(j["t"], "t");
  return f;
}

// ---- reports ---------------------------------------------------------------

inline Json table_to_json(const DecompositionTable& t) {
  Json j;
  j["d"] = t.d;
  j["entries"] = t.entries;
  j["bound_observed"] = t.bound_observed;
  Json amb = Json::array();
  for (const auto& [i, k] : t.ambiguous_pairs) amb.push_back(Json::array({i, k}));
  j["ambiguous_pairs"] = std::move(amb);
  return j;
}

inline Json failure_to_json(const RecoveryFailure& f) {
  Json j;
  j["kind"] = f.kind;
  if (!f.subject.empty()) j["subject"] = f.subject;
  if (f.kind == "s_not_found") {
    j["j"] = f.j;
    j["k"] = f.k;
  }
  if (!f.witness.empty()) j["witness"] = f.witness;
  return j;
}

inline Json rank2_report_to_json(const Rank2Report& r) {
  Json j;
  j["schema"] = "gapkit-recovery/1";
  j["pipeline"] = "rank2";
  j["f"] = poly_to_json(r.f);
  j["a0"] = std::to_string(r.a0);
  j["b0"] = std::to_string(r.b0);
  j["f_height"] = std::to_string(r.f.height());
  j["height_limit"] = rat_to_json(r.height_limit);
  j["height_exceeded"] = r.height_exceeded;
  j["guard_ok"] = r.guard_ok;
  j["verified"] = r.verified;
  j["ambiguous"] = r.ambiguous;
  return j;
}

inline Json recovery_report_to_json(const RecoveryReport& r) {
  Json j;
  j["schema"] = "gapkit-recovery/1";
  j["pipeline"] = "general";
  j["d"] = r.d;
  j["pivot_used"] = r.pivot_used;
  j["table"] = table_to_json(r.table);
  j["eq4_observed"] = r.eq4_observed;
  j["eq4_limit"] = rat_to_json(r.eq4_limit);
  j["eq4_exceeded"] = r.eq4_exceeded;
  j["c_constant"] = rat_to_json(r.c_constant);
  j["search_height_cap"] = r.search_height_cap;
  if (r.T) j["T"] = int_matrix_to_json(*r.T);
  if (r.T_prime) j["T_prime"] = int_matrix_to_json(*r.T_prime);
  if (r.det_t) j["det_t"] = std::to_string(r.det_t->value());
  if (r.det_t_prime) j["det_t_prime"] = std::to_string(r.det_t_prime->value());
  Json tj = Json::array();
  for (const IntMatrix& m : r.T_j) tj.push_back(int_matrix_to_json(m));
  j["T_j"] = std::move(tj);
  j["det_t1"] = std::to_string(r.det_t1);
  Json fs = Json::array(), gs = Json::array(), fh = Json::array(), gh = Json::array();
  for (const IntPoly& f : r.f) fs.push_back(poly_to_json(f));
  for (const IntPoly& g : r.g) gs.push_back(poly_to_json(g));
  for (i64 h : r.f_heights) fh.push_back(std::to_string(h));
  for (i64 h : r.g_heights) gh.push_back(std::to_string(h));
  j["f"] = std::move(fs);
  j["g"] = std::move(gs);
  j["f_heights"] = std::move(fh);
  j["g_heights"] = std::move(gh);
  j["verified"] = r.verified;
  j["ambiguous"] = r.ambiguous;
  j["failure"] = r.failure ? failure_to_json(*r.failure) : Json();
  j["all_verified"] = r.all_verified();
  return j;
}

inline Json mat_recovery_report_to_json(const MatRecoveryReport& r) {
  Json j;
  j["schema"] = "gapkit-matrix-recovery/1";
  j["pipeline"] = "matrix";
  j["d"] = r.d;
  j["n"] = r.n;
  j["pivot_i"] = r.pivot_i;
  j["pivot_j"] = r.pivot_j;
  j["table"] = table_to_json(r.table);
  j["table_rev"] = table_to_json(r.table_rev);
  j["eq4_observed"] = r.eq4_observed;
  j["eq4_limit"] = rat_to_json(r.eq4_limit);
  j["eq4_exceeded"] = r.eq4_exceeded;
  j["c_constant"] = rat_to_json(r.c_constant);
  j["search_height_cap"] = r.search_height_cap;
  if (r.T) j["T"] = int_matrix_to_json(*r.T);
  if (r.T_prime) j["T_prime"] = int_matrix_to_json(*r.T_prime);
  if (r.det_t) j["det_t"] = std::to_string(r.det_t->value());
  if (r.det_t_prime) j["det_t_prime"] = std::to_string(r.det_t_prime->value());
  Json tk = Json::array();
  for (const IntMatrix& m : r.T_k) tk.push_back(int_matrix_to_json(m));
  j["T_k"] = std::move(tk);
  j["det_t1"] = std::to_string(r.det_t1);
  Json fs = Json::array(), gs = Json::array(), fh = Json::array(), gh = Json::array();
  for (const IntPoly& f : r.f) fs.push_back(poly_to_json(f));
  for (const IntPoly& g : r.g) gs.push_back(poly_to_json(g));
  for (i64 h : r.f_heights) fh.push_back(std::to_string(h));
  for (i64 h : r.g_heights) gh.push_back(std::to_string(h));
  j["f"] = std::move(fs);
  j["g"] = std::move(gs);
  j["f_heights"] = std::move(fh);
  j["g_heights"] = std::move(gh);
  j["verified"] = r.verified;
  j["conj_consistent"] = r.conj_consistent;
  j["ambiguous"] = r.ambiguous;
  j["failure"] = r.failure ? failure_to_json(*r.failure) : Json();
  j["all_verified"] = r.all_verified();
  return j;
}

inline Json minpoly_result_to_json(const MinPolyResult& r) {
  Json j;
  j["schema"] = "gapkit-minpoly/1";
  Json ps = Json::array();
  for (const IntPoly& f : r.polynomials) ps.push_back(poly_to_json(f));
  j["polynomials"] = std::move(ps);
  j["minimal"] = r.minimal ? poly_to_json(*r.minimal) : Json();
  return j;
}

}  // namespace gapkit
