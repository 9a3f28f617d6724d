#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flexbeam/coefficient.hpp"

namespace flexbeam {

// Uniform spatial grid on [0, L]. The first node is exactly 0 and the last
// exactly L; interior nodes are i * (L / M).
struct SpatialGrid {
  std::vector<double> nodes;
  double spacing = 0.0;

  static SpatialGrid uniform(double length, std::size_t intervals);
  std::size_t intervals() const { return nodes.size() - 1; }
  double length() const { return nodes.back(); }
};

// Physical description of the beam: length, tip-mass inertia, and the two
// strictly positive coefficient profiles (mass per unit length and flexural
// rigidity). Immutable after construction and safe to share across threads.
class BeamConfig {
 public:
  BeamConfig(double length, double tip_mass, double tip_inertia,
             CoefficientPtr density, CoefficientPtr rigidity);

  static BeamConfig from_json(const nlohmann::json& doc);
  static BeamConfig from_json_file(const std::string& path);
  nlohmann::json to_json() const;

  double length() const { return length_; }
  double tip_mass() const { return tip_mass_; }
  double tip_inertia() const { return tip_inertia_; }

  // (rho(x), EI(x)); throws OutOfDomain for x outside [0, L].
  std::pair<double, double> coefficients(double x) const;

  double density(double x) const;
  double rigidity(double x) const;
  double rigidity_d1(double x) const;
  double rigidity_d2(double x) const;

  // Extrema over the positivity probe grid, used by the decay constants.
  double max_density() const { return max_density_; }
  double min_rigidity() const { return min_rigidity_; }

  const CoefficientFunction& density_profile() const { return *density_; }
  const CoefficientFunction& rigidity_profile() const { return *rigidity_; }

 private:
  void check_domain(double x) const;

  double length_, tip_mass_, tip_inertia_;
  CoefficientPtr density_, rigidity_;
  double max_density_ = 0.0;
  double min_rigidity_ = 0.0;
};

BeamConfig make_beam_config(double length, double tip_mass, double tip_inertia,
                            CoefficientPtr density, CoefficientPtr rigidity);

}  // namespace flexbeam
