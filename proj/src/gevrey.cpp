#include "flexbeam/gevrey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flexbeam/logfact.hpp"
#include "flexbeam/quadrature.hpp"

namespace flexbeam {

using nlohmann::json;

namespace {

// exp(-x) underflows to zero beyond this argument.
constexpr double kExpUnderflow = 708.0;

double binomial(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) {
    acc *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return acc;
}

// Jet of a polynomial (ascending coefficients) recentred at t.
Jet polynomial_jet(const std::vector<double>& coeffs, double t, int order) {
  Jet out = Jet::constant(t, order, 0.0);
  const int deg = static_cast<int>(coeffs.size()) - 1;
  for (int k = 0; k <= std::min(order, deg); ++k) {
    double acc = 0.0;
    for (int i = deg; i >= k; --i) {
      acc = acc * t + coeffs[i] * binomial(i, k);
    }
    out.c[k] = acc;
  }
  return out;
}

}  // namespace

ClosedFormSpec ClosedFormSpec::constant(double value) {
  ClosedFormSpec s;
  s.kind_ = Kind::Constant;
  s.base_ = {value};
  return s;
}

ClosedFormSpec ClosedFormSpec::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) {
    fail(ErrorCode::MalformedSpec, "polynomial spec needs coefficients");
  }
  ClosedFormSpec s;
  s.kind_ = Kind::Polynomial;
  s.base_ = std::move(coeffs);
  return s;
}

ClosedFormSpec ClosedFormSpec::poly_times_exponential(std::vector<double> base,
                                                      std::vector<double> gain,
                                                      double rate) {
  if (gain.empty()) {
    fail(ErrorCode::MalformedSpec, "poly-times-exponential spec needs a gain");
  }
  ClosedFormSpec s;
  s.kind_ = Kind::PolyExp;
  s.base_ = base.empty() ? std::vector<double>{0.0} : std::move(base);
  s.gain_ = std::move(gain);
  s.rate_ = rate;
  return s;
}

Jet ClosedFormSpec::jet(double t, int order) const {
  switch (kind_) {
    case Kind::Constant:
      return Jet::constant(t, order, base_[0]);
    case Kind::Polynomial:
      return polynomial_jet(base_, t, order);
    case Kind::PolyExp: {
      Jet lin = Jet::variable(t, order);
      Jet expo = jet_exp(jet_scale(lin, rate_));
      Jet prod = jet_mul(polynomial_jet(gain_, t, order), expo);
      return jet_add(polynomial_jet(base_, t, order), prod);
    }
  }
  fail(ErrorCode::UnknownSpec, "corrupt closed-form spec");
}

std::string ClosedFormSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant:
      os << "constant " << base_[0];
      break;
    case Kind::Polynomial:
      os << "polynomial, degree " << base_.size() - 1;
      break;
    case Kind::PolyExp:
      os << "poly + poly*exp(" << rate_ << " t)";
      break;
  }
  return os.str();
}

json ClosedFormSpec::to_json() const {
  switch (kind_) {
    case Kind::Constant:
      return json{{"kind", "constant"}, {"value", base_[0]}};
    case Kind::Polynomial:
      return json{{"kind", "polynomial"}, {"coeffs", base_}};
    case Kind::PolyExp:
      return json{{"kind", "poly-times-exponential"},
                  {"poly", base_},
                  {"gain", gain_},
                  {"rate", rate_}};
  }
  return json{};
}

ClosedFormSpec ClosedFormSpec::from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) {
    fail(ErrorCode::MalformedSpec, "parameter spec needs a \"kind\"");
  }
  const std::string kind = doc.at("kind").get<std::string>();
  try {
    if (kind == "constant") return constant(doc.at("value").get<double>());
    if (kind == "polynomial") {
      return polynomial(doc.at("coeffs").get<std::vector<double>>());
    }
    if (kind == "poly-times-exponential") {
      std::vector<double> base;
      if (doc.contains("poly")) base = doc.at("poly").get<std::vector<double>>();
      return poly_times_exponential(base,
                                    doc.at("gain").get<std::vector<double>>(),
                                    doc.at("rate").get<double>());
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedSpec, std::string("parameter spec: ") + e.what());
  }
  fail(ErrorCode::UnknownSpec, "unknown parameter spec kind \"" + kind + "\"");
}

Jet closed_form_jet(const std::string& spec_id, const json& params, double t,
                    int order) {
  json doc = params.is_object() ? params : json::object();
  doc["kind"] = spec_id;
  if (spec_id != "constant" && spec_id != "polynomial" &&
      spec_id != "poly-times-exponential") {
    fail(ErrorCode::UnknownSpec, "unknown spec id \"" + spec_id + "\"");
  }
  return ClosedFormSpec::from_json(doc).jet(t, order);
}

double bump_normalizer(double horizon, double gevrey_order) {
  TrajectorySpec spec(horizon, gevrey_order, ClosedFormSpec::constant(0.0),
                      ClosedFormSpec::constant(0.0));
  return spec.normalizer();
}

TrajectorySpec::TrajectorySpec(double horizon, double gevrey_order,
                               ClosedFormSpec start, ClosedFormSpec end)
    : horizon_(horizon),
      s_(gevrey_order),
      start_(std::move(start)),
      end_(std::move(end)) {
  if (!(horizon_ > 0.0)) {
    fail(ErrorCode::NonPositiveParameter, "transfer horizon must be positive");
  }
  if (!(s_ > 1.0 && s_ < 2.0)) {
    fail(ErrorCode::MalformedSpec, "Gevrey order must lie in (1, 2)");
  }
  // Scale-aware absolute tolerance: the integral is at least a ~0.1 T wide
  // plateau of the kernel maximum.
  const double peak = kernel(0.5 * horizon_);
  const double tol = std::max(1e-13 * peak * horizon_, 1e-300);
  c_norm_ = integrate_adaptive_simpson([this](double t) { return kernel(t); },
                                       0.0, horizon_, tol);
  if (!(c_norm_ > 0.0)) {
    fail(ErrorCode::QuadratureFailure, "bump normalizer came out non-positive");
  }
}

void TrajectorySpec::check_domain(double t) const {
  if (t < 0.0 || t > horizon_) {
    std::ostringstream os;
    os << "t = " << t << " outside [0, " << horizon_ << "]";
    fail(ErrorCode::OutOfDomain, os.str());
  }
}

double TrajectorySpec::kernel(double t) const {
  if (t <= 0.0 || t >= horizon_) return 0.0;
  const double u = (t / horizon_) * (1.0 - t / horizon_);
  const double expo = std::pow(u, -1.0 / (s_ - 1.0));
  if (expo >= kExpUnderflow) return 0.0;
  return std::exp(-expo);
}

double TrajectorySpec::kernel_prefix(double t) const {
  check_domain(t);
  if (t == 0.0) return 0.0;
  const double tol = std::max(1e-14 * c_norm_, 1e-300);
  return integrate_adaptive_simpson([this](double x) { return kernel(x); }, 0.0,
                                    t, tol);
}

std::vector<double> TrajectorySpec::kernel_prefix_grid(
    const std::vector<double>& times) const {
  std::vector<double> prefix(times.size(), 0.0);
  const double tol = std::max(1e-15 * c_norm_, 1e-300);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    check_domain(times[i]);
    if (times[i] < prev) {
      fail(ErrorCode::MalformedSpec, "time grid must be nondecreasing");
    }
    if (times[i] > prev) {
      acc += integrate_adaptive_simpson(
          [this](double x) { return kernel(x); }, prev, times[i], tol);
    }
    prefix[i] = acc;
    prev = times[i];
  }
  return prefix;
}

bool TrajectorySpec::at_flat_end(double t, bool* near_start) const {
  const double u = (t / horizon_) * (1.0 - t / horizon_);
  if (u <= 0.0 || std::pow(u, -1.0 / (s_ - 1.0)) >= kExpUnderflow) {
    *near_start = t < 0.5 * horizon_;
    return true;
  }
  return false;
}

Jet TrajectorySpec::kernel_jet(double t, int order) const {
  // phi(t) = (t/T)(1 - t/T) is an exact quadratic jet.
  Jet phi = Jet::constant(t, order, (t / horizon_) * (1.0 - t / horizon_));
  if (order >= 1) phi.c[1] = (1.0 - 2.0 * t / horizon_) / horizon_;
  if (order >= 2) phi.c[2] = -1.0 / (horizon_ * horizon_);
  const Jet expo = jet_rpow(phi, -1.0 / (s_ - 1.0));
  return jet_exp(jet_scale(expo, -1.0));
}

Jet TrajectorySpec::bump_jet_with_prefix(double t, int order,
                                         double prefix) const {
  check_domain(t);
  bool near_start = false;
  if (at_flat_end(t, &near_start)) {
    return Jet::constant(t, order, near_start ? 1.0 : 0.0);
  }
  Jet out = Jet::constant(t, order, 1.0 - prefix / c_norm_);
  if (order >= 1) {
    const Jet k = kernel_jet(t, order - 1);
    for (int j = 1; j <= order; ++j) {
      out.c[j] = -k.c[j - 1] / (static_cast<double>(j) * c_norm_);
    }
  }
  return out;
}

Jet TrajectorySpec::bump_jet(double t, int order) const {
  check_domain(t);
  bool near_start = false;
  if (at_flat_end(t, &near_start)) {
    return Jet::constant(t, order, near_start ? 1.0 : 0.0);
  }
  return bump_jet_with_prefix(t, order, kernel_prefix(t));
}

Jet TrajectorySpec::parameter_jet_with_prefix(double t, int order,
                                              double prefix) const {
  check_domain(t);
  // Splicing two copies of the same constant is analytically the identity;
  // returning the exact constant jet keeps steady-state outputs exact.
  if (start_.is_constant() && end_.is_constant() &&
      start_.constant_value() == end_.constant_value()) {
    return Jet::constant(t, order, start_.constant_value());
  }
  const Jet bump_fwd = bump_jet_with_prefix(t, order, prefix);
  const Jet fwd = jet_mul(start_.jet(t, order), bump_fwd);
  // Reversed side: psi(T - t) uses the mirrored prefix C - I(t) so that the
  // two order-0 coefficients always sum to one.
  const double tr = horizon_ - t;
  const Jet bump_rev = bump_jet_with_prefix(tr, order, c_norm_ - prefix);
  const Jet rev = jet_mul(end_.jet(tr, order), bump_rev);
  return jet_add(fwd, jet_reverse(rev, t));
}

Jet TrajectorySpec::parameter_jet(double t, int order) const {
  check_domain(t);
  if (start_.is_constant() && end_.is_constant() &&
      start_.constant_value() == end_.constant_value()) {
    return Jet::constant(t, order, start_.constant_value());
  }
  return parameter_jet_with_prefix(t, order, kernel_prefix(t));
}

double TrajectorySpec::fitted_gevrey_constant(int max_order,
                                              int time_samples) const {
  std::vector<double> sup_log(max_order + 1,
                              -std::numeric_limits<double>::infinity());
  const auto times = [&] {
    std::vector<double> t(time_samples);
    for (int i = 0; i < time_samples; ++i) {
      t[i] = horizon_ * static_cast<double>(i) / (time_samples - 1);
    }
    return t;
  }();
  const auto prefix = kernel_prefix_grid(times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Jet j = bump_jet_with_prefix(times[i], max_order, prefix[i]);
    for (int k = 0; k <= max_order; ++k) {
      if (j.c[k] == 0.0) continue;
      const double raw_log = std::log(std::abs(j.c[k])) + log_factorial(k);
      sup_log[k] = std::max(sup_log[k], raw_log);
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_order; ++k) {
    if (!std::isfinite(sup_log[k])) continue;
    const double log_d =
        (sup_log[k] - s_ * log_factorial(k)) / static_cast<double>(k + 1);
    best = std::max(best, log_d);
  }
  return std::exp(best);
}

json TrajectorySpec::to_json() const {
  return json{{"T", horizon_},
              {"s", s_},
              {"C_norm", c_norm_},
              {"p0", start_.to_json()},
              {"pT", end_.to_json()}};
}

}  // namespace flexbeam
