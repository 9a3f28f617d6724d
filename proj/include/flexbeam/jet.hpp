#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "flexbeam/errors.hpp"

namespace flexbeam {

// Truncated Taylor jet in the scaled convention: c[k] = f^(k)(t0) / k!.
// Scaled coefficients of Gevrey-class functions grow only like (k!)^(s-1),
// which keeps every intermediate of the series synthesis in double range;
// consumers that need raw derivatives multiply by k! in log space.
struct Jet {
  double t0 = 0.0;
  std::vector<double> c;

  int order() const { return static_cast<int>(c.size()) - 1; }

  static Jet constant(double t0, int order, double value) {
    Jet j;
    j.t0 = t0;
    j.c.assign(order + 1, 0.0);
    j.c[0] = value;
    return j;
  }

  // The identity function t evaluated at t0.
  static Jet variable(double t0, int order) {
    Jet j = constant(t0, order, t0);
    if (order >= 1) j.c[1] = 1.0;
    return j;
  }

  bool finite() const {
    for (double v : c) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

inline void require_compatible(const Jet& a, const Jet& b) {
  if (a.t0 != b.t0 || a.c.size() != b.c.size()) {
    fail(ErrorCode::MismatchedJets,
         "jet operands must share expansion point and order");
  }
}

inline Jet jet_add(const Jet& a, const Jet& b) {
  require_compatible(a, b);
  Jet out = a;
  for (std::size_t k = 0; k < out.c.size(); ++k) out.c[k] += b.c[k];
  return out;
}

inline Jet jet_scale(const Jet& a, double factor) {
  Jet out = a;
  for (double& v : out.c) v *= factor;
  return out;
}

// Cauchy product of scaled coefficients.
inline Jet jet_mul(const Jet& a, const Jet& b) {
  require_compatible(a, b);
  Jet out = Jet::constant(a.t0, a.order(), 0.0);
  const std::size_t n = a.c.size();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= k; ++i) acc += a.c[i] * b.c[k - i];
    out.c[k] = acc;
  }
  return out;
}

// e = exp(a) via k e_k = sum_{j=1..k} j a_j e_{k-j}.
inline Jet jet_exp(const Jet& a) {
  Jet out = Jet::constant(a.t0, a.order(), std::exp(a.c[0]));
  const std::size_t n = a.c.size();
  for (std::size_t k = 1; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      acc += static_cast<double>(j) * a.c[j] * out.c[k - j];
    }
    out.c[k] = acc / static_cast<double>(k);
  }
  return out;
}

// c = a^r via the differential recurrence a c' = r a' c.
inline Jet jet_rpow(const Jet& a, double r) {
  const double a0 = a.c[0];
  const bool integral = r == std::floor(r);
  if ((!integral && !(a0 > 0.0)) || (integral && a0 == 0.0)) {
    fail(ErrorCode::NonPositiveBase,
         "jet_rpow needs a positive leading coefficient");
  }
  Jet out = Jet::constant(a.t0, a.order(), std::pow(a0, r));
  const std::size_t n = a.c.size();
  for (std::size_t k = 1; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t m = 1; m <= k; ++m) {
      acc += (r * static_cast<double>(m) - static_cast<double>(k - m)) *
             a.c[m] * out.c[k - m];
    }
    out.c[k] = acc / (static_cast<double>(k) * a0);
  }
  return out;
}

// Bookkeeping for q(t) = f(T - t): the jet of q at t equals the jet of f at
// T - t with every odd coefficient negated.
inline Jet jet_reverse(const Jet& a, double new_t0) {
  Jet out = a;
  out.t0 = new_t0;
  for (std::size_t k = 1; k < out.c.size(); k += 2) out.c[k] = -out.c[k];
  return out;
}

}  // namespace flexbeam
