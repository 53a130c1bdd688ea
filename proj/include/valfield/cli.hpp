// Scenario configs, the run pipeline, emitted artifacts and the catalog listing.
#pragma once

#include <valfield/verify.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace valfield {

struct RunConfig {
  ScenarioDesc scenario;
  unsigned i_max = 1;
  std::optional<SweepKind> sweep;
  unsigned D = 2, coeff_deg = 3;
  std::uint64_t n = 100;
  std::optional<std::uint64_t> seed;
  std::optional<Integer> max_candidates = Integer(200000);
  int samples = 64;
  std::string out;
  std::string format = "json";
  bool timings = true;
};

// ---------------------------------------------------------------------------
// JSON configs. Every error names the offending field.

namespace detail {

[[noreturn]] inline void bad_field(const std::string& path, const std::string& msg) {
  fail(ErrorKind::config, path + ": " + msg);
}

inline std::uint64_t get_uint(const json& j, const std::string& path, std::uint64_t lo = 0,
                              std::uint64_t hi = std::numeric_limits<std::uint64_t>::max()) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
    bad_field(path, "expected a non-negative integer");
  std::uint64_t v = j.get<std::uint64_t>();
  if (v < lo || v > hi) bad_field(path, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

inline Rational get_rational(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(Integer(j.get<long>()));
  if (!j.is_string()) bad_field(path, "expected a rational as an integer or a string such as \"1/2\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error&) {
    bad_field(path, "not a rational: '" + j.get<std::string>() + "'");
  }
}

inline std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad_field(path, "expected a string");
  return j.get<std::string>();
}

inline void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad_field(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) bad_field(path.empty() ? k : path + "." + k, "unknown field");
  }
}

}  // namespace detail

// {"rank": n, "order": "lex"|"real", "weights": [d_1, ...]}
inline GroupBasis basis_from_json(const json& j, const std::string& path = "basis") {
  detail::only_keys(j, path, {"rank", "order", "weights"});
  std::string order = j.contains("order") ? detail::get_string(j["order"], path + ".order") : "lex";
  std::optional<std::uint64_t> rank;
  if (j.contains("rank")) rank = detail::get_uint(j["rank"], path + ".rank", 1, 64);
  if (order == "lex") {
    if (!rank) detail::bad_field(path + ".rank", "required for a lex basis");
    if (j.contains("weights")) detail::bad_field(path + ".weights", "only real bases take weights");
    return GroupBasis::lex(*rank);
  }
  if (order != "real") detail::bad_field(path + ".order", "expected \"lex\" or \"real\"");
  if (!j.contains("weights") || !j["weights"].is_array()) detail::bad_field(path + ".weights", "required array");
  std::vector<std::uint64_t> w;
  for (std::size_t i = 0; i < j["weights"].size(); ++i)
    w.push_back(detail::get_uint(j["weights"][i], path + ".weights[" + std::to_string(i) + "]", 1));
  if (rank && *rank != w.size()) detail::bad_field(path + ".rank", "does not match the number of weights");
  try {
    return GroupBasis::real(w);
  } catch (const Error& e) {
    detail::bad_field(path + ".weights", e.what());
  }
}

inline json basis_to_json(const GroupBasis& b) {
  json j = {{"rank", b.rank()}, {"order", b.mode() == OrderMode::lexicographic ? "lex" : "real"}};
  if (b.mode() == OrderMode::real_embedded) j["weights"] = b.weights();
  return j;
}

// A scenario is an id string or an object; "case" names the construction case
// instead of the id.
inline ScenarioDesc scenario_from_json(const json& j, const std::string& path = "scenario") {
  ScenarioDesc s;
  if (j.is_string()) {
    s.id = j.get<std::string>();
    return s;
  }
  detail::only_keys(j, path, {"id", "case", "p", "basis", "generator_value", "coeff_field", "depth", "n_families",
                              "gamma", "cofinal", "seed"});
  if (j.contains("id")) s.id = detail::get_string(j["id"], path + ".id");
  if (j.contains("case")) {
    std::string id = scenario_for_case(detail::get_string(j["case"], path + ".case"));
    if (!s.id.empty() && s.id != id) detail::bad_field(path + ".case", "names '" + id + "' but id is '" + s.id + "'");
    s.id = id;
  }
  if (s.id.empty()) detail::bad_field(path + ".id", "required");
  if (j.contains("p")) s.p = detail::get_uint(j["p"], path + ".p", 2, 1u << 20);
  if (j.contains("basis")) s.basis = basis_from_json(j["basis"], path + ".basis");
  if (j.contains("generator_value")) {
    const json& g = j["generator_value"];
    if (!g.is_array()) detail::bad_field(path + ".generator_value", "expected an array of rationals");
    std::vector<Rational> v;
    for (std::size_t i = 0; i < g.size(); ++i)
      v.push_back(detail::get_rational(g[i], path + ".generator_value[" + std::to_string(i) + "]"));
    s.generator_value = v;
  }
  if (j.contains("coeff_field")) s.coeff_field = detail::get_string(j["coeff_field"], path + ".coeff_field");
  if (j.contains("depth")) s.depth = static_cast<unsigned>(detail::get_uint(j["depth"], path + ".depth", 1, 16));
  if (j.contains("n_families"))
    s.n_families = static_cast<unsigned>(detail::get_uint(j["n_families"], path + ".n_families", 1, 16));
  if (j.contains("gamma")) s.gamma = detail::get_rational(j["gamma"], path + ".gamma");
  if (j.contains("cofinal")) {
    if (!j["cofinal"].is_boolean()) detail::bad_field(path + ".cofinal", "expected a boolean");
    s.cofinal = j["cofinal"].get<bool>();
  }
  if (j.contains("seed")) s.seed = detail::get_uint(j["seed"], path + ".seed");
  return s;
}

inline json scenario_to_json(const ScenarioDesc& s) {
  json j = {{"id", s.id}};
  if (s.p) j["p"] = *s.p;
  if (s.basis) j["basis"] = basis_to_json(*s.basis);
  if (s.generator_value) {
    json g = json::array();
    for (const auto& q : *s.generator_value) g.push_back(q.get_str());
    j["generator_value"] = g;
  }
  if (s.coeff_field) j["coeff_field"] = *s.coeff_field;
  j["depth"] = s.depth;
  if (s.n_families) j["n_families"] = *s.n_families;
  if (s.gamma) j["gamma"] = s.gamma->get_str();
  j["cofinal"] = s.cofinal;
  j["seed"] = s.seed;
  return j;
}

inline SweepKind sweep_kind(const std::string& s, const std::string& path) {
  if (s == "exhaustive") return SweepKind::exhaustive;
  if (s == "random") return SweepKind::random;
  detail::bad_field(path, "expected \"exhaustive\" or \"random\"");
}

// Top level: {"scenario": ..., "i": n, "sweep": {"mode", "D", "coeff_deg", "n", "seed",
// "max_candidates"}, "samples": n, "format": "json"|"text", "out": path}.
inline RunConfig config_from_json(const json& j) {
  detail::only_keys(j, "", {"scenario", "i", "sweep", "samples", "format", "out", "timings"});
  RunConfig c;
  if (!j.contains("scenario")) detail::bad_field("scenario", "required");
  c.scenario = scenario_from_json(j["scenario"]);
  if (j.contains("i")) c.i_max = static_cast<unsigned>(detail::get_uint(j["i"], "i", 1, 8));
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    detail::only_keys(s, "sweep", {"mode", "D", "coeff_deg", "n", "seed", "max_candidates"});
    c.sweep = sweep_kind(s.contains("mode") ? detail::get_string(s["mode"], "sweep.mode") : "exhaustive", "sweep.mode");
    if (s.contains("D")) c.D = static_cast<unsigned>(detail::get_uint(s["D"], "sweep.D", 0, 16));
    if (s.contains("coeff_deg"))
      c.coeff_deg = static_cast<unsigned>(detail::get_uint(s["coeff_deg"], "sweep.coeff_deg", 0, 32));
    if (s.contains("n")) c.n = detail::get_uint(s["n"], "sweep.n", 1);
    if (s.contains("seed")) c.seed = detail::get_uint(s["seed"], "sweep.seed");
    if (s.contains("max_candidates")) c.max_candidates = Integer(detail::get_uint(s["max_candidates"], "sweep.max_candidates", 1));
  }
  if (j.contains("samples")) c.samples = static_cast<int>(detail::get_uint(j["samples"], "samples", 1, 100000));
  if (j.contains("format")) c.format = detail::get_string(j["format"], "format");
  if (j.contains("out")) c.out = detail::get_string(j["out"], "out");
  if (j.contains("timings")) {
    if (!j["timings"].is_boolean()) detail::bad_field("timings", "expected a boolean");
    c.timings = j["timings"].get<bool>();
  }
  return c;
}

// Reads a config file; parse errors report line and column.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') ++line, col = 1;
      else ++col;
    }
    fail(ErrorKind::config, path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
  return config_from_json(j);
}

inline void validate(const RunConfig& c) {
  if (c.format != "json" && c.format != "text") detail::bad_field("format", "expected \"json\" or \"text\"");
  if (c.sweep == SweepKind::random && !c.seed) detail::bad_field("seed", "required for random sweeps");
  if (c.i_max < 1 || c.i_max > 8) detail::bad_field("i", "must be in [1, 8]");
  if (c.scenario.depth < 1 || c.scenario.depth > 16) detail::bad_field("depth", "must be in [1, 16]");
}

inline json params_json(const RunConfig& c) {
  json p = {{"scenario", scenario_to_json(c.scenario)}, {"i", c.i_max}, {"samples", c.samples}};
  if (c.sweep) {
    json s = {{"mode", *c.sweep == SweepKind::exhaustive ? "exhaustive" : "random"}, {"D", c.D}, {"coeff_deg", c.coeff_deg}};
    if (*c.sweep == SweepKind::random) s["n"] = c.n;
    if (c.max_candidates) s["max_candidates"] = c.max_candidates->get_str();
    p["sweep"] = s;
  }
  if (c.seed) p["seed"] = *c.seed;
  return p;
}

// ---------------------------------------------------------------------------
// The run pipeline.

namespace detail {

inline std::optional<LawScenario> law_for(const std::string& id) {
  if (id == "va") return LawScenario::va;
  if (id == "ra") return LawScenario::ra;
  if (id == "vt-sqrt2") return LawScenario::sqrt2;
  return std::nullopt;
}

// Deepest prefix y_{i,k}, k <= k_max, whose table entries exist.
inline Check witness_check(const Plan& pl, const ETable& E, unsigned i, unsigned long k_max) {
  std::string name = "witness i=" + std::to_string(i);
  for (unsigned long k = k_max; k >= 1; --k) {
    try {
      Series y = build_witness(pl, E, i, k);
      return make_check(name, Status::pass, {{"k", k}, {"y", y.to_string()}});
    } catch (const Error& e) {
      if (!skippable(e)) throw;
    }
  }
  return make_check(name, Status::skipped, {{"reason", "no prefix fits the table limits"}});
}

inline Check partial_sums_check(const Plan& pl, const ETable& E, unsigned i, unsigned long k_max) {
  std::string name = "pseudo-cauchy i=" + std::to_string(i);
  return guarded(name, [&] {
    std::vector<Series> ys;
    Series acc = Series::zero(pl.basis, pl.field);
    for (unsigned long k = 1; k <= k_max; ++k) {
      try {
        acc = acc + pl.a(E(i, Integer(k)));
      } catch (const Error& e) {
        if (!skippable(e)) throw;
        break;
      }
      ys.push_back(acc);
    }
    return pseudo_cauchy_check(name, ys);
  });
}

inline void run_plan(const RunConfig& c, Report& r) {
  Plan pl = build_plan(c.scenario);
  ETable E = make_E(pl.phi);
  unsigned depth = c.scenario.depth;
  std::uint64_t seed = c.seed.value_or(c.scenario.seed);
  for (auto& ch : check_conditions(pl, E, depth, c.samples, seed, c.i_max)) r.add(std::move(ch));
  for (unsigned i = 1; i <= c.i_max; ++i) {
    r.add(timed([&] { return witness_check(pl, E, i, depth); }));
    r.add(timed([&] { return partial_sums_check(pl, E, i, depth); }));
  }
  SweepMode mode;
  if (c.sweep == SweepKind::random) mode = SweepMode{SweepKind::random, c.n, seed};
  for (unsigned i = 1; i <= c.i_max; ++i)
    for (unsigned long k = 2; k <= 3; ++k)
      r.add(timed([&] {
        return guarded("btl i=" + std::to_string(i) + " k=" + std::to_string(k),
                       [&] { return btl_suite(pl, E, i, k, mode, c.max_candidates); });
      }));
  if (c.sweep) {
    SweepOptions opt;
    opt.D = c.D;
    opt.coeff_deg = c.coeff_deg;
    opt.mode = mode;
    opt.max_candidates = c.max_candidates;
    for (unsigned i = 1; i <= c.i_max; ++i) r.add(timed([&] { return independence_sweep(pl, E, i, opt); }));
  }
  if (auto law = law_for(pl.id)) {
    r.add(timed([&] { return monomial_min_value_check(*law, c.samples, seed); }));
    r.add(timed([&] { return polvspaces_check(*law, c.samples, seed); }));
  }
  if (pl.id == "va" || pl.id == "ra" || pl.id == "sa")
    r.add(timed([&] { return fundamental_inequality_check(catalog_extensions()); }));
  if (pl.id == "sa") r.add(timed([&] { return krasner_alpha_check(pl); }));
}

inline void run_infpdeg(const RunConfig& c, Report& r) {
  InfPDegPlan pl = build_infpdeg(c.scenario);
  std::uint64_t seed = c.seed.value_or(c.scenario.seed);
  for (auto& ch : infpdeg_sequence_checks(pl)) r.add(std::move(ch));
  if (pl.id == "ip-val" || pl.id == "ip-res") {
    unsigned long blocks = z_blocks(pl);
    unsigned long n_max = blocks >= 3 ? std::min<unsigned long>(3, blocks - 2) : 0;
    for (unsigned tau = 0; tau < pl.n_families; ++tau) {
      if (n_max) r.add(timed([&] { return infpdeg_eta_check(pl, tau, n_max); }));
      r.add(timed([&] { return infpdeg_z_support_check(pl, tau); }));
    }
    return;
  }
  if (!pl.gamma) fail(ErrorKind::config, "gamma is required for " + pl.id);
  for (unsigned N = 0; N < pl.n_families; ++N)
    r.add(timed([&] {
      return guarded(pl.id + " distance family " + std::to_string(N),
                     [&] { return completion_distance_check(pl, N, c.samples, seed); });
    }));
  Value pi(GroupElement::scalar(pl.basis, 8));
  r.add(timed([&] { return distinct_max_tower_check(pl, pl.n_families, pi); }));
}

}  // namespace detail

inline Report run(const RunConfig& c) {
  validate(c);
  Report r;
  r.scenario = c.scenario.id;
  r.params = params_json(c);
  if (is_infpdeg(c.scenario.id)) detail::run_infpdeg(c, r);
  else detail::run_plan(c, r);
  return r;
}

inline std::string render(const Report& r, const RunConfig& c) {
  if (c.format == "text") return render_text(r);
  return to_json(r, c.timings).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Emitted artifacts.

namespace detail {

inline json integer_json(const Integer& z) {
  if (z.fits_ulong_p()) return z.get_ui();
  return z.get_str();
}

}  // namespace detail

// y_{i,k} with i = c.i_max, k = depth.
inline json emit_witness(const RunConfig& c) {
  Plan pl = build_plan(c.scenario);
  ETable E = make_E(pl.phi);
  unsigned long k = c.scenario.depth;
  Series y = build_witness(pl, E, c.i_max, k);
  json exps = json::array();
  for (const auto& t : y.terms()) exps.push_back(t.exp.pretty());
  json idx = json::array();
  for (unsigned long j = 1; j <= k; ++j) idx.push_back(detail::integer_json(E(c.i_max, Integer(j))));
  return {{"scenario", pl.id}, {"i", c.i_max}, {"k", k}, {"indices", idx}, {"exponents", exps},
          {"precision", y.precision().pretty()}, {"series", to_json(y)}};
}

// Rows E_1 .. E_{i_max}, entries k = 1 .. depth; "overflow" past the table limits.
inline json emit_etable(const RunConfig& c) {
  Plan pl = build_plan(c.scenario);
  ETable E = make_E(pl.phi);
  json rows = json::array();
  for (unsigned i = 1; i <= c.i_max; ++i) {
    json row = json::array();
    for (unsigned long k = 1; k <= c.scenario.depth; ++k) {
      try {
        row.push_back(detail::integer_json(E(i, Integer(k))));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::overflow) throw;
        row.push_back("overflow");
      }
    }
    rows.push_back(row);
  }
  return {{"scenario", pl.id}, {"phi", pl.phi.name()}, {"rows", rows}};
}

inline json emit_plan(const RunConfig& c) {
  if (is_infpdeg(c.scenario.id)) {
    InfPDegPlan pl = build_infpdeg(c.scenario);
    json fams = json::array();
    for (unsigned tau = 0; tau < pl.n_families; ++tau) {
      json gens = json::array(), cv = json::array(), dv = json::array();
      for (const auto& g : pl.gen[tau]) gens.push_back(g.to_string());
      for (const auto& x : pl.c[tau]) cv.push_back(x.valuation().pretty());
      for (const auto& x : pl.d[tau]) dv.push_back(x.valuation().pretty());
      fams.push_back({{"generators", gens}, {"c_values", cv}, {"d_values", dv}});
    }
    json j = {{"id", pl.id},
              {"side", pl.side == Side::value ? "value" : "residue"},
              {"p", pl.p},
              {"basis", basis_to_json(pl.basis)},
              {"field", pl.field.to_string()},
              {"n_families", pl.n_families},
              {"length", pl.length},
              {"cofinal", pl.cofinal}};
    if (pl.gamma) j["gamma"] = pl.gamma->get_str();
    j["families"] = fams;
    return j;
  }
  Plan pl = build_plan(c.scenario);
  json terms = json::array();
  for (unsigned long k = 1; k <= c.scenario.depth; ++k) {
    try {
      PlanTerm t = pl.term(Integer(k));
      terms.push_back({{"k", k},
                       {"a", pl.a(Integer(k)).to_string()},
                       {"value", pl.value(Integer(k)).pretty()},
                       {"alpha", pl.alpha(Integer(k)).pretty()},
                       {"b", t.b.to_string()},
                       {"c", t.c.to_string()}});
    } catch (const Error& e) {
      if (!detail::skippable(e)) throw;
      break;
    }
  }
  return {{"id", pl.id},
          {"case", case_name(pl.tag)},
          {"phi", pl.phi.name()},
          {"basis", basis_to_json(pl.basis)},
          {"field", pl.field.to_string()},
          {"cofinal", pl.cofinal},
          {"terms", terms}};
}

inline json emit(const std::string& what, const RunConfig& c) {
  validate(c);
  if (what == "witness") return emit_witness(c);
  if (what == "etable") return emit_etable(c);
  if (what == "plan") return emit_plan(c);
  fail(ErrorKind::config, "emit: unknown artifact '" + what + "' (witness, plan, etable)");
}

// ---------------------------------------------------------------------------
// Catalog listing.

inline json list_json() {
  json a = json::array();
  for (const auto& e : catalog()) a.push_back({{"id", e.id}, {"tag", e.tag}, {"description", e.description}});
  return a;
}

inline std::string list_text() {
  std::size_t w_id = 2, w_tag = 3;
  for (const auto& e : catalog()) w_id = std::max(w_id, e.id.size()), w_tag = std::max(w_tag, e.tag.size());
  auto pad = [](std::string s, std::size_t w) { return s + std::string(w - s.size() + 2, ' '); };
  std::string out = pad("id", w_id) + pad("tag", w_tag) + "description\n";
  for (const auto& e : catalog()) out += pad(e.id, w_id) + pad(e.tag, w_tag) + e.description + "\n";
  return out;
}

inline json error_json(const Error& e) {
  return {{"error", {{"kind", std::string(error_kind_name(e.kind()))}, {"message", e.what()}}}};
}

inline void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) fail(ErrorKind::io, "cannot write '" + path + "'");
  f << text;
  if (!f) fail(ErrorKind::io, "write to '" + path + "' failed");
}

}  // namespace valfield
