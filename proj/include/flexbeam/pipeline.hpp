#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flexbeam/simulator.hpp"
#include "flexbeam/synthesis.hpp"

namespace flexbeam {

// Validation thresholds applied by the pipeline; defaults follow the two
// reference experiments (settling within 1% of the 0.4 m travel, 2% field
// agreement).
struct ValidationThresholds {
  double endpoint_input_tol = 1e-9;
  double settle_disp = 0.004;
  double settle_vel = 0.004;
  double field_agreement_rel = 0.02;
  double final_field_rel = 0.02;
};

struct ExperimentPreset {
  std::string name;
  BeamConfig beam;
  double horizon = 3.0;
  double gevrey_order = 1.5;
  int series_order = 20;
  ClosedFormSpec start_param = ClosedFormSpec::constant(0.0);
  ClosedFormSpec end_param = ClosedFormSpec::constant(0.0);
  std::size_t table_intervals = 512;
  std::size_t sim_intervals = 150;
  double sim_dt = 1e-4;
  std::size_t time_samples = 601;
  bool sign_flip = false;
  ValidationThresholds thresholds;

  static ExperimentPreset named(const std::string& name);
  static ExperimentPreset from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// The paper-model beam: L = 0.5 m, m = 0.402 kg, J = 1.9e-4 kg m^2, affine
// density and rigidity profiles.
BeamConfig reference_beam();

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct ValidationSummary {
  std::vector<ValidationCheck> checks;
  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

struct PipelineResult {
  ExperimentPreset preset;
  FlatTrajectory trajectory;
  InputSamples input_fine;
  BeamState state_start, state_end;
  SimResult sim;
  ErrorReport errors;
  ResidualReport residual;
  CompatibilityTail tail;
  ValidationSummary validation;
  double table_r1 = 0.0, table_r2 = 0.0;
  double gevrey_constant = 0.0;
  double runtime_seconds = 0.0;
};

// Full pipeline: generating functions -> synthesis -> simulation ->
// cross-validation. When `out_dir` is nonempty every artifact (CSV, JSON,
// SVG, manifest) is written there.
PipelineResult run_pipeline(const ExperimentPreset& preset,
                            const std::string& out_dir);

ValidationSummary validate_result(const ExperimentPreset& preset,
                                  const FlatTrajectory& traj,
                                  const SimResult& sim,
                                  const ErrorReport& errors);

// ---- stage-wise artifact I/O (CLI entry points operate on these) ----

void write_input_csv(const std::string& path, const InputSamples& input);
void write_input_derivs_csv(const std::string& path,
                            const InputSamples& input);
InputSamples read_input_csv(const std::string& path);

void write_field_csv(const std::string& path, const FlatTrajectory& traj);

// Long-format field table (t, x, w [, w_t]); used by both trajectory and
// simulation field artifacts.
struct FieldTable {
  std::vector<double> times;
  std::vector<double> nodes;
  std::vector<std::vector<double>> w;    // [time][node]
  std::vector<std::vector<double>> w_t;  // empty when absent
};
FieldTable read_field_csv(const std::string& path);

void write_sim_csv(const std::string& dir, const SimResult& sim);
void write_state_json(const std::string& path, const BeamState& state,
                      const std::vector<double>& nodes);
BeamState read_state_json(const std::string& path,
                          std::vector<double>* nodes = nullptr);

void write_ytables_csv(const std::string& path, const FlatTrajectory& traj);

// Validation of two field tables (series vs simulation) read back from CSV.
ValidationSummary validate_tables(const FieldTable& series,
                                  const FieldTable& sim,
                                  const ValidationThresholds& thresholds);

}  // namespace flexbeam
