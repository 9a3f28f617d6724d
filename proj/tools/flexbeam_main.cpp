// flexbeam: flatness-based motion planning for a moving cantilever beam
// with tip mass, plus an independent finite-difference validator.
//
// Exit codes: 0 success, 2 validation-threshold failure, 3 numeric blow-up,
// 4 I/O or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flexbeam/errors.hpp"
#include "flexbeam/genfun.hpp"
#include "flexbeam/pipeline.hpp"
#include "flexbeam/simulator.hpp"

using namespace flexbeam;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteState:
    case ErrorCode::SolverDivergence:
      return 3;
    case ErrorCode::BoundViolation:
      return 2;
    default:
      return 4;
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FileNotFound, path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  return doc;
}

void save_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FileNotFound, "cannot write " + path);
  out << doc.dump(2) << "\n";
}

struct CommonOpts {
  std::string config_path;
  std::string problem_path;
  std::string preset_name;
  std::string out_dir = "out";
  int series_order = -1;
  double gevrey_order = -1.0;
  double horizon = -1.0;
  std::size_t sim_intervals = 0;
  double sim_dt = 0.0;
  bool sign_flip = false;
};

// Preset resolution: --preset gives the named experiment; --problem overlays
// a JSON file; --config swaps the beam description; remaining flags override
// individual knobs.
ExperimentPreset resolve_preset(const CommonOpts& opts) {
  ExperimentPreset preset =
      opts.preset_name.empty() ? ExperimentPreset::named("problem2")
                               : ExperimentPreset::named(opts.preset_name);
  if (!opts.problem_path.empty()) {
    json doc = load_json(opts.problem_path);
    if (!doc.contains("beam")) doc["beam"] = preset.beam.to_json();
    preset = ExperimentPreset::from_json(doc);
  }
  if (!opts.config_path.empty()) {
    preset.beam = BeamConfig::from_json_file(opts.config_path);
  }
  if (opts.series_order > 0) preset.series_order = opts.series_order;
  if (opts.gevrey_order > 0) preset.gevrey_order = opts.gevrey_order;
  if (opts.horizon > 0) preset.horizon = opts.horizon;
  if (opts.sim_intervals > 0) preset.sim_intervals = opts.sim_intervals;
  if (opts.sim_dt > 0) preset.sim_dt = opts.sim_dt;
  if (opts.sign_flip) preset.sign_flip = true;
  return preset;
}

void add_common_flags(CLI::App* cmd, CommonOpts* opts, bool with_problem) {
  cmd->add_option("--config", opts->config_path, "beam config JSON");
  if (with_problem) {
    cmd->add_option("--preset", opts->preset_name,
                    "named experiment: problem1, problem2, steady");
    cmd->add_option("--problem", opts->problem_path,
                    "experiment description JSON");
    cmd->add_option("--N", opts->series_order, "series truncation order");
    cmd->add_option("--s", opts->gevrey_order, "Gevrey order in (1,2)");
    cmd->add_option("--T", opts->horizon, "transfer horizon [s]");
    cmd->add_flag("--sign-flip", opts->sign_flip,
                  "flip the sign between the two boundary-series products");
  }
  cmd->add_option("--nx", opts->sim_intervals, "simulator intervals");
  cmd->add_option("--dt", opts->sim_dt, "simulator time step [s]");
  cmd->add_option("--out", opts->out_dir, "output directory");
}

int cmd_genfun(const CommonOpts& opts, int order, std::size_t intervals) {
  const BeamConfig beam = opts.config_path.empty()
                              ? reference_beam()
                              : BeamConfig::from_json_file(opts.config_path);
  const GenFunTable table = compute_gen_fun_table(
      beam, SpatialGrid::uniform(beam.length(), intervals), order);
  fs::create_directories(opts.out_dir);
  save_json(opts.out_dir + "/genfun.json", table.to_json(true));
  table.write_family_csv(opts.out_dir + "/genfun_g.csv",
                         GenFunTable::Family::Disp);
  table.write_family_csv(opts.out_dir + "/genfun_h.csv",
                         GenFunTable::Family::Slope);
  std::printf("wrote %s/genfun.json with %d levels (R1 = %.6f, R2 = %.6f)\n",
              opts.out_dir.c_str(), order + 1, table.decay_r1(),
              table.decay_r2());
  return 0;
}

int cmd_synthesize(const CommonOpts& opts, const std::string& table_path,
                   std::size_t samples) {
  const ExperimentPreset preset = resolve_preset(opts);
  const TrajectorySpec spec(preset.horizon, preset.gevrey_order,
                            preset.start_param, preset.end_param);
  SynthesisParams params;
  params.order = preset.series_order;
  params.times = SynthesisParams::uniform_times(
      preset.horizon, samples ? samples : preset.time_samples);
  params.field_grid =
      SpatialGrid::uniform(preset.beam.length(), preset.sim_intervals);
  params.sign_flip = preset.sign_flip;

  const GenFunTable table =
      table_path.empty()
          ? compute_gen_fun_table(
                preset.beam,
                SpatialGrid::uniform(preset.beam.length(),
                                     preset.table_intervals),
                preset.series_order)
          : GenFunTable::from_json(load_json(table_path));
  const FlatTrajectory traj = synthesize_field(table, spec, params);
  const BeamState z0 =
      initial_state_from_p(table, spec, params, StateEndpoint::Start);
  const BeamState zT =
      initial_state_from_p(table, spec, params, StateEndpoint::End);

  // dense input for the simulator stage
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(preset.horizon / preset.sim_dt));
  SynthesisParams fine = params;
  fine.times = SynthesisParams::uniform_times(preset.horizon, steps + 1);
  const InputSamples input = synthesize_input(table, spec, fine);

  fs::create_directories(opts.out_dir);
  InputSamples coarse{traj.times, traj.input, traj.input_d1, traj.input_d2};
  write_input_csv(opts.out_dir + "/input.csv", coarse);
  write_input_derivs_csv(opts.out_dir + "/input_derivs.csv", input);
  write_field_csv(opts.out_dir + "/field.csv", traj);
  write_ytables_csv(opts.out_dir + "/ytables.csv", traj);
  write_state_json(opts.out_dir + "/state0.json", z0, params.field_grid.nodes);
  write_state_json(opts.out_dir + "/stateT.json", zT, params.field_grid.nodes);
  const ResidualReport rep = residuals(traj, preset.beam);
  save_json(opts.out_dir + "/traj_summary.json",
            json{{"pde_sup", rep.pde_sup},
                 {"tip_force_sup", rep.tip_force_sup},
                 {"tip_moment_sup", rep.tip_moment_sup},
                 {"slope_sup", rep.slope_sup},
                 {"input_initial", traj.input.front()},
                 {"input_final", traj.input.back()}});
  std::printf("wrote trajectory artifacts to %s (f(0) = %.6g, f(T) = %.6g)\n",
              opts.out_dir.c_str(), traj.input.front(), traj.input.back());
  return 0;
}

int cmd_simulate(const CommonOpts& opts, const std::string& input_path,
                 const std::string& state_path) {
  const BeamConfig beam = opts.config_path.empty()
                              ? reference_beam()
                              : BeamConfig::from_json_file(opts.config_path);
  const InputSamples samples = read_input_csv(input_path);
  const BeamState z0 = read_state_json(state_path);
  const std::size_t nx = opts.sim_intervals ? opts.sim_intervals : 150;
  const double dt = opts.sim_dt > 0 ? opts.sim_dt : 1e-4;
  const double horizon = samples.times.back();
  const SimOperator op = discretize(beam, nx);
  const SimResult res =
      simulate(op, z0, InputSignal::from_samples(samples), dt, horizon);
  fs::create_directories(opts.out_dir);
  write_sim_csv(opts.out_dir, res);
  save_json(opts.out_dir + "/sim_summary.json",
            json{{"dt", dt},
                 {"intervals", nx},
                 {"integrator", "average-acceleration"},
                 {"tip_final", res.tip_disp.back()},
                 {"tip_speed_final", res.final_state.alpha},
                 {"energy_initial", res.energy.front()},
                 {"energy_final", res.energy.back()}});
  std::printf("simulated %zu steps; final tip position %.6g m\n",
              res.times.size() - 1, res.tip_disp.back());
  return 0;
}

int cmd_validate(const std::string& series_path, const std::string& sim_path,
                 double max_rel, const std::string& out_path) {
  const FieldTable series = read_field_csv(series_path);
  const FieldTable sim = read_field_csv(sim_path);
  ValidationThresholds thresholds;
  thresholds.field_agreement_rel = max_rel;
  const ValidationSummary summary = validate_tables(series, sim, thresholds);
  json checks = json::array();
  for (const auto& c : summary.checks) {
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"passed", c.passed}});
    std::printf("%s: %.3e (threshold %.3e) -> %s\n", c.name.c_str(), c.value,
                c.threshold, c.passed ? "pass" : "FAIL");
  }
  if (!out_path.empty()) {
    save_json(out_path,
              json{{"passed", summary.passed()}, {"checks", checks}});
  }
  return summary.passed() ? 0 : 2;
}

int cmd_run(const CommonOpts& opts) {
  const ExperimentPreset preset = resolve_preset(opts);
  const PipelineResult result = run_pipeline(preset, opts.out_dir);
  std::printf("pipeline '%s' finished in %.1f s\n", preset.name.c_str(),
              result.runtime_seconds);
  for (const auto& c : result.validation.checks) {
    std::printf("  %-28s %.3e (threshold %.3e) -> %s\n", c.name.c_str(),
                c.value, c.threshold, c.passed ? "pass" : "FAIL");
  }
  return result.validation.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatness-based motion planning for a moving cantilever beam"};
  app.require_subcommand(1);

  CommonOpts opts;
  int genfun_order = 20;
  std::size_t genfun_intervals = 512;
  std::string table_path, input_path, state_path;
  std::size_t samples = 0;
  std::string series_path, sim_path, validate_out;
  double max_rel = 0.02;

  auto* run = app.add_subcommand("run", "full pipeline with validation");
  add_common_flags(run, &opts, true);

  auto* genfun = app.add_subcommand("genfun", "generating-function table");
  add_common_flags(genfun, &opts, false);
  genfun->add_option("--N", genfun_order, "recursion order");
  genfun->add_option("--table-intervals", genfun_intervals, "grid intervals");

  auto* synth = app.add_subcommand("synthesize", "trajectory synthesis");
  add_common_flags(synth, &opts, true);
  synth->add_option("--table", table_path, "reuse a genfun.json with samples");
  synth->add_option("--samples", samples, "trajectory time samples");

  auto* sim = app.add_subcommand("simulate", "finite-difference run");
  add_common_flags(sim, &opts, false);
  sim->add_option("--input", input_path, "input CSV (t,f[,fdot,fddot])")
      ->required();
  sim->add_option("--state", state_path, "initial state JSON")->required();

  auto* val = app.add_subcommand("validate", "compare two field tables");
  val->add_option("--series", series_path, "series field.csv")->required();
  val->add_option("--sim", sim_path, "simulation sim_field.csv")->required();
  val->add_option("--max-rel", max_rel, "sup-norm agreement threshold");
  val->add_option("--out", validate_out, "validation JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opts);
    if (genfun->parsed()) return cmd_genfun(opts, genfun_order, genfun_intervals);
    if (synth->parsed()) return cmd_synthesize(opts, table_path, samples);
    if (sim->parsed()) return cmd_simulate(opts, input_path, state_path);
    if (val->parsed()) {
      return cmd_validate(series_path, sim_path, max_rel, validate_out);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
