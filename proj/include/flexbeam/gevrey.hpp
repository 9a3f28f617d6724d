#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flexbeam/jet.hpp"

namespace flexbeam {

// Jet-evaluable closed-form time functions: constants, polynomials, and
// polynomial-times-exponential profiles (enough for every preset in scope).
class ClosedFormSpec {
 public:
  static ClosedFormSpec constant(double value);
  static ClosedFormSpec polynomial(std::vector<double> coeffs);
  // base(t) + gain(t) * exp(rate * t)
  static ClosedFormSpec poly_times_exponential(std::vector<double> base,
                                               std::vector<double> gain,
                                               double rate);
  static ClosedFormSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  Jet jet(double t, int order) const;
  double value(double t) const { return jet(t, 0).c[0]; }

  bool is_constant() const { return kind_ == Kind::Constant; }
  double constant_value() const { return base_[0]; }
  std::string describe() const;

 private:
  enum class Kind { Constant, Polynomial, PolyExp };
  Kind kind_ = Kind::Constant;
  std::vector<double> base_;  // polynomial coefficients (ascending)
  std::vector<double> gain_;  // PolyExp only
  double rate_ = 0.0;

  ClosedFormSpec() = default;
};

// closed_form_jet by spec id: "constant", "polynomial",
// "poly-times-exponential". Unknown ids raise UnknownSpec.
Jet closed_form_jet(const std::string& spec_id, const nlohmann::json& params,
                    double t, int order);

// Transfer description: horizon, Gevrey order, and the two closed-form
// parameter functions spliced by the bump. The normalizer integral is
// computed once at construction; the object is immutable afterwards.
class TrajectorySpec {
 public:
  TrajectorySpec(double horizon, double gevrey_order, ClosedFormSpec start,
                 ClosedFormSpec end);

  double horizon() const { return horizon_; }
  double gevrey_order() const { return s_; }
  double normalizer() const { return c_norm_; }
  const ClosedFormSpec& start_param() const { return start_; }
  const ClosedFormSpec& end_param() const { return end_; }

  // Bump kernel psi0; exactly zero once the exponent argument underflows.
  double kernel(double t) const;

  // Prefix integral of the kernel from 0 to t (adaptive quadrature).
  double kernel_prefix(double t) const;

  // Prefix integrals on a sorted time grid, accumulated incrementally.
  std::vector<double> kernel_prefix_grid(const std::vector<double>& times) const;

  // Jet of the bump at t. Order-0 comes from quadrature (or from a caller
  // supplied prefix integral); higher orders from psi' = -psi0 / C.
  Jet bump_jet(double t, int order) const;
  Jet bump_jet_with_prefix(double t, int order, double prefix) const;

  // Jet of the spliced parameter p(t) = p0(t) psi(t) + pT(T-t) psi(T-t).
  // When both parameter functions are the same constant the splice is the
  // identity and the exact constant jet is returned.
  Jet parameter_jet(double t, int order) const;
  Jet parameter_jet_with_prefix(double t, int order, double prefix) const;

  // Fitted Gevrey constant of the bump over derivative orders <= max_order
  // (diagnostic; the estimate D in |psi^(k)| <= D^(k+1) (k!)^s).
  double fitted_gevrey_constant(int max_order, int time_samples = 201) const;

  nlohmann::json to_json() const;

 private:
  bool at_flat_end(double t, bool* near_start) const;
  Jet kernel_jet(double t, int order) const;
  void check_domain(double t) const;

  double horizon_;
  double s_;
  ClosedFormSpec start_, end_;
  double c_norm_ = 0.0;
};

double bump_normalizer(double horizon, double gevrey_order);

}  // namespace flexbeam
