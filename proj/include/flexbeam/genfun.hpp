#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flexbeam/beam_config.hpp"

namespace flexbeam {

// One generating function sampled on the table grid, with spatial
// derivatives up to order four.
struct SampledLevel {
  std::vector<double> value, d1, d2, d3, d4;
};

// A family of generating functions: level 0 is the analytic seed (the
// constant profile for the tip-displacement family, the linear profile for
// the tip-slope family); level k >= 1 solves
//   (EI u_k'')'' = -rho * u_{k-1}
// with the family's initial data at x = 0.
struct GenFunFamily {
  std::vector<SampledLevel> levels;   // size N + 1
  std::vector<double> end_value;      // u_k(L)
  std::vector<double> end_d1;        // u_k'(L)
};

// Endpoint quadruple for one recursion level; these are the coefficients of
// the boundary series, so they get their own accessor.
struct EndpointRow {
  double disp_value;   // g_k(L)
  double disp_slope;   // g_k'(L)
  double slope_value;  // h_k(L)
  double slope_slope;  // h_k'(L)
};

struct BoundReport {
  bool ok = true;
  // log-space margin: max over all checks of log|value| - log(bound);
  // negative means the bound holds with room.
  double worst_margin_disp = -1e300;
  double worst_margin_slope = -1e300;
  int worst_level_disp = -1;
  int worst_level_slope = -1;
};

class GenFunTable {
 public:
  GenFunTable(BeamConfig config, SpatialGrid grid, int order,
              GenFunFamily disp, GenFunFamily slope, double decay_r1,
              double decay_r2);

  int order() const { return order_; }
  const SpatialGrid& grid() const { return grid_; }
  const BeamConfig& config() const { return config_; }
  const GenFunFamily& disp() const { return disp_; }
  const GenFunFamily& slope() const { return slope_; }
  double decay_r1() const { return r1_; }
  double decay_r2() const { return r2_; }

  EndpointRow endpoint_row(int level) const;

  // Log-magnitude + sign view of an endpoint coefficient, used by the
  // series synthesis to pair tiny coefficients with huge derivatives.
  struct LogValue {
    double log_abs;  // -inf for exact zero
    int sign;        // -1, 0, +1
  };
  LogValue log_end_disp_slope(int level) const;   // g_k'(L)
  LogValue log_end_slope_slope(int level) const;  // h_k'(L)
  LogValue log_end_disp_value(int level) const;   // g_k(L)
  LogValue log_end_slope_value(int level) const;  // h_k(L)

  // Evaluate a stored level (or one of its first four derivatives) at an
  // arbitrary abscissa by piecewise quintic Hermite reconstruction from the
  // sampled derivative records.
  enum class Family { Disp, Slope };
  double eval(Family family, int level, int deriv, double x) const;

  nlohmann::json to_json(bool include_samples = true) const;
  // Reload from a JSON export that carries samples.
  static GenFunTable from_json(const nlohmann::json& doc);
  void write_family_csv(const std::string& path, Family family) const;

 private:
  BeamConfig config_;
  SpatialGrid grid_;
  int order_;
  GenFunFamily disp_, slope_;
  double r1_, r2_;
};

// Builds both families by integrating the coupled first-order recursion with
// a classical fourth-order one-step method on the fixed grid. The table is
// integrated on the requested grid and on its half-step refinement; endpoint
// disagreement beyond `agreement_tol` (relative, scale-aware) raises
// GridTooCoarse. The returned samples come from the refined run restricted
// to the requested grid. Grid-convergence studies pass a loose tolerance to
// keep deliberately coarse runs alive.
GenFunTable compute_gen_fun_table(const BeamConfig& config,
                                  const SpatialGrid& grid, int order,
                                  double agreement_tol = 1e-10);

// Checks the factorial decay estimates at every grid node for every level
// k >= 1 (in log space) and throws BoundViolation on failure beyond the
// solver-error allowance.
BoundReport verify_decay_bounds(const GenFunTable& table);

}  // namespace flexbeam
