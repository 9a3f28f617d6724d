#pragma once

#include <vector>

#include "flexbeam/genfun.hpp"
#include "flexbeam/gevrey.hpp"
#include "flexbeam/jet.hpp"

namespace flexbeam {

// Truncation and sampling choices for one synthesis run. The series is cut
// by total order l = j + k <= order, matching the boundary-input series; the
// time grid must live in [0, T] and contain both endpoints.
struct SynthesisParams {
  int order = 20;
  std::vector<double> times;
  SpatialGrid field_grid;
  bool sign_flip = false;  // A/B switch for the boundary-series sign question
  bool with_residual_tables = true;
  int jet_order = 0;  // 0 -> 2 * order + 4

  static std::vector<double> uniform_times(double horizon, std::size_t samples);
};

// Beam state snapshot: displacement and velocity profiles plus the two tip
// rates that make the state a point of the coupled PDE-ODE phase space.
struct BeamState {
  std::vector<double> u;
  std::vector<double> v;
  double alpha = 0.0;  // w_t(0)
  double beta = 0.0;   // w_xt(0)
};

struct FlatTrajectory {
  int order = 0;
  bool sign_flip = false;
  std::vector<double> times;
  SpatialGrid grid;

  // boundary input trace and its first two time derivatives
  std::vector<double> input, input_d1, input_d2;

  // field snapshots indexed [time][node]
  std::vector<std::vector<double>> w, w_t;

  // residual tables (optional): second time derivative and spatial
  // derivatives up to order four
  bool has_residual_tables = false;
  std::vector<std::vector<double>> w_tt, w_x1, w_x2, w_x3, w_x4;

  // tip slope trace w_x(0, t) and its first two time derivatives
  std::vector<double> tip_slope, tip_slope_t, tip_slope_tt;

  // flat-output derivative tables, [time][k]: the order-2k derivatives of
  // the two flat outputs, truncated consistently with the field series
  std::vector<std::vector<double>> y_disp, y_slope;

  std::vector<BeamState> states;
};

struct ResidualReport {
  double pde_sup = 0.0;
  double tip_force_sup = 0.0;
  double tip_moment_sup = 0.0;
  double slope_sup = 0.0;
};

struct CompatibilityTail {
  double residual_sup = 0.0;
  double bound_sup = 0.0;
};

// Flat outputs from a parameter jet, truncating each operator at `order`:
//   y_disp^(n) = sum_{k<=order} h_k'(L) p^(2k+n)
//   y_slope^(n) = -sum_{k<=order} g_k'(L) p^(2k+n)
// Factorial pairing happens in log space with separate sign tracking.
struct FlatOutputs {
  double y_disp;
  double y_slope;
};
FlatOutputs flat_outputs_from_p(const GenFunTable& table, const Jet& p,
                                int order, int deriv);

// Boundary input samples (value and first two derivatives) on an arbitrary
// time grid; the series truncated by total order.
struct InputSamples {
  std::vector<double> times, value, d1, d2;
};
InputSamples synthesize_input(const GenFunTable& table,
                              const TrajectorySpec& spec,
                              const SynthesisParams& params);

FlatTrajectory synthesize_field(const GenFunTable& table,
                                const TrajectorySpec& spec,
                                const SynthesisParams& params);

enum class StateEndpoint { Start, End };
BeamState initial_state_from_p(const GenFunTable& table,
                               const TrajectorySpec& spec,
                               const SynthesisParams& params,
                               StateEndpoint which);

// Truncated commutation check of the two boundary operators: the double sum
// over j, k <= order evaluated with both nesting orders and identical term
// pairing. Needs a parameter jet of order >= 4 * order.
double check_commutation(const GenFunTable& table, const Jet& p, int order);

ResidualReport residuals(const FlatTrajectory& traj, const BeamConfig& config);

// Compatibility residual of the truncated flat outputs against the full
// boundary-slope identity. Terms with both indices <= order cancel exactly
// in pairs, so only the genuinely omitted shell (outer index above the
// truncation, up to the table order) is summed; the bound accumulates the
// factorial decay estimates against the actual parameter derivatives.
CompatibilityTail compatibility_tail(const GenFunTable& table,
                                     const TrajectorySpec& spec,
                                     const std::vector<double>& times,
                                     int order);

}  // namespace flexbeam
