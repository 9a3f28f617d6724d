#include "flexbeam/quadrature.hpp"

#include <cmath>

#include "flexbeam/errors.hpp"

namespace flexbeam {
namespace {

struct Panel {
  double a, b, fa, fm, fb, whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, const Panel& p,
                double tol, int depth) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m);
  const double rm = 0.5 * (m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, m, p.fa, flm, p.fm);
  const double right = simpson(m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  // 1/15 Richardson factor for composite Simpson halving.
  if (std::abs(delta) <= 15.0 * tol || std::abs(left + right) < 1e-300) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    fail(ErrorCode::QuadratureFailure, "adaptive Simpson depth exhausted");
  }
  Panel pl{p.a, m, p.fa, flm, p.fm, left};
  Panel pr{m, p.b, p.fm, frm, p.fb, right};
  return adaptive(f, pl, 0.5 * tol, depth - 1) +
         adaptive(f, pr, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  Panel p{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb)};
  if (abs_tol < 1e-300) abs_tol = 1e-300;
  return adaptive(f, p, abs_tol, 60);
}

}  // namespace flexbeam
