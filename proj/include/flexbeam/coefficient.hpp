#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace flexbeam {

// A spatial coefficient profile (mass density or flexural rigidity) with two
// derivatives available everywhere on its domain. Profiles come in three
// kinds:
//   affine  a*(1 + b*x)
//   poly    c0 + c1 x + ... + cn x^n
//   table   samples (x_i, y_i) interpolated by a natural quintic spline,
//           which keeps four continuous derivatives across the knots
class CoefficientFunction {
 public:
  virtual ~CoefficientFunction() = default;

  virtual double value(double x) const = 0;
  virtual double deriv1(double x) const = 0;
  virtual double deriv2(double x) const = 0;
  virtual std::string describe() const = 0;
  virtual nlohmann::json to_json() const = 0;

  static std::shared_ptr<const CoefficientFunction> from_json(
      const nlohmann::json& spec);
  static std::shared_ptr<const CoefficientFunction> affine(double a, double b);
  static std::shared_ptr<const CoefficientFunction> polynomial(
      std::vector<double> coeffs);
  static std::shared_ptr<const CoefficientFunction> table(
      std::vector<double> x, std::vector<double> y);
};

using CoefficientPtr = std::shared_ptr<const CoefficientFunction>;

}  // namespace flexbeam
