#include "flexbeam/beam_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flexbeam/errors.hpp"

namespace flexbeam {

using nlohmann::json;

SpatialGrid SpatialGrid::uniform(double length, std::size_t intervals) {
  if (!(length > 0.0)) {
    fail(ErrorCode::NonPositiveParameter, "grid length must be positive");
  }
  if (intervals < 16) {
    fail(ErrorCode::GridTooCoarse, "spatial grid needs at least 16 intervals");
  }
  SpatialGrid g;
  g.spacing = length / static_cast<double>(intervals);
  g.nodes.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    g.nodes[i] = static_cast<double>(i) * g.spacing;
  }
  g.nodes.front() = 0.0;
  g.nodes.back() = length;
  return g;
}

namespace {

// Positivity is probed on 1000 uniform interior points plus both endpoints.
constexpr int kProbePoints = 1001;

void probe_positive(const CoefficientFunction& f, double length,
                    const char* name, double* min_out, double* max_out) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kProbePoints; ++i) {
    const double x = length * static_cast<double>(i) / (kProbePoints - 1);
    const double v = f.value(x);
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream os;
      os << name << "(" << x << ") = " << v << " is not strictly positive";
      fail(ErrorCode::NonPositiveCoefficient, os.str());
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  *min_out = lo;
  *max_out = hi;
}

}  // namespace

BeamConfig::BeamConfig(double length, double tip_mass, double tip_inertia,
                       CoefficientPtr density, CoefficientPtr rigidity)
    : length_(length),
      tip_mass_(tip_mass),
      tip_inertia_(tip_inertia),
      density_(std::move(density)),
      rigidity_(std::move(rigidity)) {
  if (!(length_ > 0.0)) {
    fail(ErrorCode::NonPositiveParameter, "beam length must be positive");
  }
  if (!(tip_mass_ > 0.0)) {
    fail(ErrorCode::NonPositiveParameter, "tip mass must be positive");
  }
  if (!(tip_inertia_ > 0.0)) {
    fail(ErrorCode::NonPositiveParameter, "tip inertia must be positive");
  }
  if (!density_ || !rigidity_) {
    fail(ErrorCode::MalformedSpec, "missing coefficient profile");
  }
  double unused_min, unused_max;
  probe_positive(*density_, length_, "rho", &unused_min, &max_density_);
  probe_positive(*rigidity_, length_, "EI", &min_rigidity_, &unused_max);
}

BeamConfig make_beam_config(double length, double tip_mass, double tip_inertia,
                            CoefficientPtr density, CoefficientPtr rigidity) {
  return BeamConfig(length, tip_mass, tip_inertia, std::move(density),
                    std::move(rigidity));
}

void BeamConfig::check_domain(double x) const {
  if (x < 0.0 || x > length_) {
    std::ostringstream os;
    os << "x = " << x << " outside [0, " << length_ << "]";
    fail(ErrorCode::OutOfDomain, os.str());
  }
}

std::pair<double, double> BeamConfig::coefficients(double x) const {
  check_domain(x);
  return {density_->value(x), rigidity_->value(x)};
}

double BeamConfig::density(double x) const {
  check_domain(x);
  return density_->value(x);
}

double BeamConfig::rigidity(double x) const {
  check_domain(x);
  return rigidity_->value(x);
}

double BeamConfig::rigidity_d1(double x) const {
  check_domain(x);
  return rigidity_->deriv1(x);
}

double BeamConfig::rigidity_d2(double x) const {
  check_domain(x);
  return rigidity_->deriv2(x);
}

BeamConfig BeamConfig::from_json(const json& doc) {
  try {
    return BeamConfig(doc.at("L").get<double>(), doc.at("m").get<double>(),
                      doc.at("J").get<double>(),
                      CoefficientFunction::from_json(doc.at("rho")),
                      CoefficientFunction::from_json(doc.at("ei")));
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedSpec, std::string("beam config: ") + e.what());
  }
}

BeamConfig BeamConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FileNotFound, path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  return from_json(doc);
}

json BeamConfig::to_json() const {
  return json{{"L", length_},
              {"m", tip_mass_},
              {"J", tip_inertia_},
              {"rho", density_->to_json()},
              {"ei", rigidity_->to_json()}};
}

}  // namespace flexbeam
