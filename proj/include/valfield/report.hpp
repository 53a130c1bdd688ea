// Verification outcomes and their JSON form.
#pragma once

#include <valfield/series.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>

namespace valfield {

using json = nlohmann::ordered_json;

enum class Status { pass, fail, skipped };

inline std::string status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
  }
  return "?";
}

struct Check {
  std::string name;
  Status status = Status::pass;
  json witness;  // null when there is nothing to show
  double ms = 0;
};

struct Report {
  std::string scenario;
  json params = json::object();
  std::vector<Check> checks;

  void add(Check c) { checks.push_back(std::move(c)); }
  void add(std::vector<Check> cs) {
    for (auto& c : cs) checks.push_back(std::move(c));
  }
  bool any_fail() const {
    return std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == Status::fail; });
  }
};

// Runs f, which returns a Check, and records its wall time.
template <class F>
Check timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  Check c = f();
  c.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

inline Check make_check(std::string name, Status s, json witness = nullptr) {
  return Check{std::move(name), s, std::move(witness), 0};
}

// ---- JSON forms ----

inline json to_json(const Rational& q) { return q.get_str(); }

inline json to_json(const GroupElement& g) {
  json a = json::array();
  for (const auto& c : g.coords()) a.push_back(c.get_str());
  return a;
}

inline json to_json(const Value& v) { return v.is_inf() ? json("inf") : to_json(v.finite()); }

inline json to_json(const Series& s) {
  json terms = json::array();
  for (const auto& t : s.terms()) terms.push_back({{"exp", to_json(t.exp)}, {"coeff", t.coeff.to_string()}});
  return {{"terms", terms}, {"prec", to_json(s.precision())}};
}

inline json to_json(const Check& c, bool timings = true) {
  json j = {{"name", c.name}, {"status", status_name(c.status)}};
  if (!c.witness.is_null()) j["witness"] = c.witness;
  if (timings) j["ms"] = std::round(c.ms * 1000) / 1000;
  return j;
}

inline json to_json(const Report& r, bool timings = true) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c, timings));
  return {{"scenario", r.scenario}, {"params", r.params}, {"checks", checks}};
}

inline std::string render_text(const Report& r) {
  std::string out = "scenario " + r.scenario + "\n";
  for (const auto& c : r.checks) {
    out += "  " + status_name(c.status) + "  " + c.name;
    if (!c.witness.is_null()) out += "  " + c.witness.dump();
    out += "\n";
  }
  return out;
}

}  // namespace valfield
