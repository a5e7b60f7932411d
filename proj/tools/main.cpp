// geolab: one static binary exposing the library experiments. Subcommands
// mirror the operations; every option doubles as a config file key, with
// command line values laid over the file so a run is reproducible from
// either direction. Failures print a machine readable error document.

#include "artifact.hpp"
#include "config.hpp"
#include "ops.hpp"
#include "report.hpp"

#include "geolab/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using geocli::CliError;
using geocli::ExperimentConfig;
using geocli::Json;
using geocli::KeyValues;
using geocli::Operation;

int fail(const std::string& category, const std::string& detail) {
  Json e;
  e["schema"] = "geolab.error.v1";
  e["error"] = category;
  e["detail"] = detail;
  std::cout << geocli::dump_json(e);
  return category == "usage" ? 2 : 1;
}

struct OpCommand {
  Operation op = Operation::Enumerate;
  CLI::App* cmd = nullptr;
  std::string space_file;
  KeyValues given;  // only flags that were actually passed
};

// Registers a value flag that lands in the config overlay under `key`.
void overlay_option(OpCommand& oc, const std::string& flag, const std::string& key,
                    const std::string& help) {
  oc.cmd->add_option_function<std::string>(
      flag, [&oc, key](const std::string& v) { oc.given[key] = v; }, help);
}

void add_pair_options(OpCommand& oc) {
  overlay_option(oc, "--x", "x", "first point");
  overlay_option(oc, "--y", "y", "second point");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "geolab: light ray enumeration and blocking experiments on flat tori,\n"
      "edge graphs, folded apartments, and surfaces of revolution"};
  app.get_formatter()->column_width(30);

  bool want_schema = false;
  app.add_flag("--schema", want_schema, "print the artifact JSON schema and exit");
  unsigned long long workers = 0;
  app.add_option("--workers", workers, "cap worker threads (default: all cores)")
      ->check(CLI::Range(1ull, 1024ull));

  std::vector<OpCommand> ops(7);
  auto add_op = [&](std::size_t i, Operation op, const char* name, const char* help) {
    ops[i].op = op;
    ops[i].cmd = app.add_subcommand(name, help);
    ops[i].cmd->fallthrough();
    ops[i].cmd->add_option("--space", ops[i].space_file, "space config file")
        ->required();
    overlay_option(ops[i], "--out", "out", "artifact output path");
  };

  add_op(0, Operation::Enumerate, "enumerate",
         "list the light rays between two points");
  add_pair_options(ops[0]);
  overlay_option(ops[0], "--T", "t", "horizon");
  overlay_option(ops[0], "--resolution", "resolution",
                 "angular scan resolution (revolution)");

  add_op(1, Operation::Block, "block",
         "build and certify a midpoint blocking set for one pair");
  add_pair_options(ops[1]);
  overlay_option(ops[1], "--T", "t", "horizon");
  overlay_option(ops[1], "--tol", "tol", "hit tolerance for numeric spaces");

  add_op(2, Operation::Verify, "verify",
         "certify a user supplied blocking set for one pair");
  add_pair_options(ops[2]);
  overlay_option(ops[2], "--T", "t", "horizon");
  overlay_option(ops[2], "--blockers", "blockers",
                 "candidate blockers, ';' separated");
  overlay_option(ops[2], "--tol", "tol", "hit tolerance for numeric spaces");
  overlay_option(ops[2], "--loops", "loops",
                 "sampled loop count when x equals y (revolution)");
  overlay_option(ops[2], "--resolution", "resolution",
                 "angular scan resolution (revolution)");

  add_op(3, Operation::Classify, "classify",
         "classify one pair against the blocking dichotomy");
  add_pair_options(ops[3]);
  overlay_option(ops[3], "--T", "t", "horizon");
  overlay_option(ops[3], "--tol", "tol", "hit tolerance for numeric spaces");
  overlay_option(ops[3], "--resolution", "resolution",
                 "angular scan resolution (revolution)");
  overlay_option(ops[3], "--diam-grid", "diam_grid",
                 "diameter probe grid (revolution)");

  add_op(4, Operation::Growth, "growth",
         "tabulate geodesic and light ray counts up to a horizon");
  add_pair_options(ops[4]);
  overlay_option(ops[4], "--Tmax", "tmax", "largest horizon");
  overlay_option(ops[4], "--step", "step", "horizon step (torus)");

  add_op(5, Operation::Entropy, "entropy",
         "estimate growth entropy and run the counting check");
  add_pair_options(ops[5]);
  overlay_option(ops[5], "--Tmax", "tmax", "largest horizon");
  overlay_option(ops[5], "--step", "step", "horizon step (torus)");

  add_op(6, Operation::Scan, "scan",
         "sweep point pairs for cross blocking violations (revolution)");
  overlay_option(ops[6], "--T", "t", "horizon");
  overlay_option(ops[6], "--grid", "grid", "deterministic grid size");
  overlay_option(ops[6], "--samples", "samples", "extra seeded random pairs");
  overlay_option(ops[6], "--max-violations", "max_violations",
                 "stop after this many violations (0 = no cap)");
  overlay_option(ops[6], "--diam-grid", "diam_grid", "diameter probe grid");
  overlay_option(ops[6], "--seed", "seed", "random seed for sampled pairs");

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config file");
  run_cmd->fallthrough();
  std::string run_path;
  run_cmd->add_option("config", run_path, "experiment config file")->required();

  CLI::App* report_cmd =
      app.add_subcommand("report", "summarize artifacts as an aligned table");
  report_cmd->fallthrough();
  std::vector<std::string> report_paths;
  report_cmd->add_option("paths", report_paths, "artifact files")
      ->required()
      ->expected(-1);

  CLI::App* schema_cmd =
      app.add_subcommand("schema", "print the artifact JSON schema");
  schema_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what());
  }

  if (want_schema || app.got_subcommand(schema_cmd)) {
    std::cout << geocli::artifact_schema_text();
    return 0;
  }
  if (workers != 0) geolab::set_worker_count(static_cast<unsigned>(workers));

  try {
    if (app.got_subcommand(report_cmd))
      return geocli::run_report(report_paths, std::cout);

    KeyValues raw;
    if (app.got_subcommand(run_cmd)) {
      raw = geocli::load_config_file(run_path);
      if (raw.find("operation") == raw.end())
        throw CliError("config", run_path + ": config file names no operation");
    } else {
      const OpCommand* oc = nullptr;
      for (const OpCommand& c : ops)
        if (app.got_subcommand(c.cmd)) oc = &c;
      if (!oc) {
        std::cout << app.help();
        return 2;
      }
      raw = geocli::load_config_file(oc->space_file);
      KeyValues over = oc->given;
      over["operation"] = geocli::operation_str(oc->op);
      raw = geocli::merge(std::move(raw), over);
    }

    ExperimentConfig cfg = geocli::build_config(raw);
    geocli::RunArtifact art = geocli::run_experiment(cfg);
    geocli::write_text_file(art.out_path, art.bytes);
    std::cout << geocli::operation_str(*cfg.op) << " "
              << geocli::space_kind_str(cfg.space) << ": " << art.summary << " -> "
              << art.out_path << "\n";
    return art.checks_pass ? 0 : 1;  // failed embedded checks gate the exit code
  } catch (const CliError& e) {
    return fail(e.category, e.what());
  } catch (const std::exception& e) {
    return fail("module", e.what());
  }
}
