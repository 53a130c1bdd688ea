// valfield: build scenarios, run their checks and emit artifacts.
#include <valfield/cli.hpp>

#include <CLI11.hpp>

#include <cstring>
#include <iostream>

using namespace valfield;

namespace {

struct Flags {
  std::string scenario, config, sweep, out, format;
  std::optional<unsigned> depth, i, D, coeff_deg;
  std::optional<std::uint64_t> n, seed, max_candidates;
  bool no_timings = false;
};

void add_common(CLI::App* c, Flags& f) {
  c->add_option("--scenario", f.scenario, "catalog id (see `valfield list`)");
  c->add_option("--config", f.config, "JSON config file");
  c->add_option("--depth", f.depth, "prefix depth");
  c->add_option("--i", f.i, "largest witness index i");
  c->add_option("--out", f.out, "output file (default stdout)");
  c->add_option("--format", f.format, "json or text");
}

RunConfig merge(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_config(f.config);
  if (!f.scenario.empty()) {
    if (!f.config.empty() && f.scenario != c.scenario.id) c.scenario = ScenarioDesc{};
    c.scenario.id = f.scenario;
  }
  if (c.scenario.id.empty()) fail(ErrorKind::config, "scenario: give --scenario or --config");
  if (f.depth) c.scenario.depth = *f.depth;
  if (f.i) c.i_max = *f.i;
  if (!f.sweep.empty()) c.sweep = sweep_kind(f.sweep, "sweep");
  if (f.D) c.D = *f.D;
  if (f.coeff_deg) c.coeff_deg = *f.coeff_deg;
  if (f.n) c.n = *f.n;
  if (f.seed) c.seed = *f.seed;
  if (f.max_candidates) c.max_candidates = Integer(static_cast<unsigned long>(*f.max_candidates));
  if (!f.out.empty()) c.out = f.out;
  if (!f.format.empty()) c.format = f.format;
  if (f.no_timings) c.timings = false;
  return c;
}

bool wants_json(int argc, char** argv) {
  for (int k = 1; k < argc; ++k) {
    if (!std::strcmp(argv[k], "--format=text")) return false;
    if (!std::strcmp(argv[k], "--format") && k + 1 < argc && !std::strcmp(argv[k + 1], "text")) return false;
  }
  return true;
}

int report_error(const Error& e, bool json_out) {
  if (json_out) std::cout << error_json(e).dump(2) << "\n";
  std::cerr << "valfield: " << e.what() << "\n";
  return e.kind() == ErrorKind::config ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Valued field constructions and their checks"};
  app.require_subcommand(1);
  Flags f;
  std::string what;

  CLI::App* run_cmd = app.add_subcommand("run", "build a scenario and run its checks");
  add_common(run_cmd, f);
  run_cmd->add_option("--sweep", f.sweep, "independence sweep: exhaustive or random");
  run_cmd->add_option("--D", f.D, "sweep degree bound per variable");
  run_cmd->add_option("--coeff-deg", f.coeff_deg, "sweep coefficient degree bound");
  run_cmd->add_option("--n", f.n, "random sweep size");
  run_cmd->add_option("--seed", f.seed, "seed for random sweeps and sampling");
  run_cmd->add_option("--max-candidates", f.max_candidates, "skip exhaustive sweeps larger than this");
  run_cmd->add_flag("--no-timings", f.no_timings, "omit per-check timings from the JSON report");

  CLI::App* emit_cmd = app.add_subcommand("emit", "write a witness, plan or E-table as JSON");
  emit_cmd->add_option("what", what, "witness, plan or etable")->required();
  add_common(emit_cmd, f);

  CLI::App* list_cmd = app.add_subcommand("list", "list catalog scenarios");
  list_cmd->add_option("--format", f.format, "json or text");

  bool json_out = wants_json(argc, argv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    if (json_out) {
      std::cout << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump(2) << "\n";
      std::cerr << "valfield: " << e.what() << "\n";
      return 2;
    }
    app.exit(e);
    return 2;
  }

  try {
    if (*list_cmd) {
      if (!f.format.empty() && f.format != "json" && f.format != "text")
        fail(ErrorKind::config, "format: expected \"json\" or \"text\"");
      std::cout << (f.format == "json" ? list_json().dump(2) + "\n" : list_text());
      return 0;
    }
    RunConfig c = merge(f);
    json_out = c.format == "json";
    if (*emit_cmd) {
      validate(c);
      write_output(emit(what, c).dump(2) + "\n", c.out);
      return 0;
    }
    Report r = run(c);
    write_output(render(r, c), c.out);
    return r.any_fail() ? 1 : 0;
  } catch (const Error& e) {
    return report_error(e, json_out);
  } catch (const std::exception& e) {
    return report_error(Error(ErrorKind::io, e.what()), json_out);
  }
}
