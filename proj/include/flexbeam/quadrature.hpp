#pragma once

#include <functional>

namespace flexbeam {

// Adaptive Simpson integration of a smooth scalar integrand.
//
// `abs_tol` is the absolute error target for the whole interval; recursion
// stops early on panels whose contribution falls below an absolute floor of
// 1e-300, which keeps the scheme well-behaved for integrands that are flat
// zero over most of the domain (the Gevrey bump kernel is the motivating
// case). Throws Error(QuadratureFailure) when the recursion depth limit is
// reached before the tolerance.
double integrate_adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol);

}  // namespace flexbeam
