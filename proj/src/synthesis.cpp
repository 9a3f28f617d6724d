#include "flexbeam/synthesis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "flexbeam/logfact.hpp"
#include "flexbeam/parallel.hpp"

namespace flexbeam {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LogVal {
  double log_abs = kNegInf;
  int sign = 0;
};

LogVal log_of(double v) {
  if (v == 0.0) return {kNegInf, 0};
  return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

// n! as a double for n <= 170 (the largest factorial below the overflow
// threshold).
double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171, 1.0);
    for (int i = 2; i <= 170; ++i) t[i] = t[i - 1] * static_cast<double>(i);
    return t;
  }();
  return table[n];
}

// Raw derivative p^(m) from a scaled jet, in log representation.
LogVal raw_derivative(const Jet& p, int m) {
  const double c = p.c[static_cast<std::size_t>(m)];
  if (c == 0.0) return {kNegInf, 0};
  return {std::log(std::abs(c)) + log_factorial(m), c > 0.0 ? 1 : -1};
}

double signed_exp(double log_abs, int sign) {
  if (sign == 0 || log_abs == kNegInf) return 0.0;
  if (log_abs > 690.0) {
    fail(ErrorCode::SolverDivergence, "series term overflows double range");
  }
  return sign * std::exp(log_abs);
}

double signed_exp(const LogVal& a, const LogVal& b) {
  return signed_exp(a.log_abs + b.log_abs, a.sign * b.sign);
}

// p^(m) as a double. The plain product is used whenever it stays finite (it
// keeps low-order terms bit-exact, which the steady-state fixed point
// depends on); the log route only handles magnitudes the product cannot.
double materialize(const Jet& p, int m) {
  const double c = p.c[static_cast<std::size_t>(m)];
  if (c == 0.0) return 0.0;
  if (m <= 170) {
    const double pd = c * factorial(m);
    if (std::isfinite(pd)) return pd;
  }
  const LogVal v = raw_derivative(p, m);
  return signed_exp(v.log_abs, v.sign);
}

// One series term coef * p^(m), falling back to the log-space factorial
// pairing when the raw derivative alone would overflow even though the
// paired product does not.
double series_term(double coef, const Jet& p, int m) {
  const double c = p.c[static_cast<std::size_t>(m)];
  if (c == 0.0 || coef == 0.0) return 0.0;
  if (m <= 170) {
    const double pd = c * factorial(m);
    if (std::isfinite(pd)) {
      const double term = coef * pd;
      if (std::isfinite(term)) return term;
    }
  }
  const int sign = (coef > 0.0 ? 1 : -1) * (c > 0.0 ? 1 : -1);
  return signed_exp(std::log(std::abs(coef)) + std::log(std::abs(c)) +
                        log_factorial(m),
                    sign);
}

void require_jet_order(const Jet& p, int needed, const char* where) {
  if (p.order() < needed) {
    std::ostringstream os;
    os << where << " needs a parameter jet of order >= " << needed << ", got "
       << p.order();
    fail(ErrorCode::JetTooShort, os.str());
  }
}

// Per-node shell coefficients of the total-order series
//   w(x, t) = sum_l A_l(x) p^(2l)(t),
//   A_l(x) = sum_{j+k=l} ( g_k(x) h_j'(L) -/+ h_k(x) g_j'(L) )
// together with spatial derivatives of A_l up to `max_deriv`.
struct ShellTables {
  // values[r][l][node]
  std::array<std::vector<std::vector<double>>, 5> values;
  // A_l at the clamped end (coefficients of the boundary input series)
  std::vector<double> boundary;
  int order = 0;
  int max_deriv = 0;
};

ShellTables build_shells(const GenFunTable& table,
                         const std::vector<double>& nodes, int order,
                         int max_deriv, bool sign_flip) {
  ShellTables sh;
  sh.order = order;
  sh.max_deriv = max_deriv;
  const double sign = sign_flip ? 1.0 : -1.0;

  // sampled generating functions: fam[r][k][node]
  auto sample = [&](GenFunTable::Family family) {
    std::array<std::vector<std::vector<double>>, 5> out;
    for (int r = 0; r <= max_deriv; ++r) {
      out[r].assign(order + 1, std::vector<double>(nodes.size()));
      for (int k = 0; k <= order; ++k) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          out[r][k][j] = table.eval(family, k, r, nodes[j]);
        }
      }
    }
    return out;
  };
  const auto g = sample(GenFunTable::Family::Disp);
  const auto h = sample(GenFunTable::Family::Slope);

  // Terms are accumulated in symmetric (k, l-k) pairs: the slope shell at
  // the clamped end is antisymmetric under the swap, so pairing makes its
  // analytic zero exact instead of leaving rounding residue.
  for (int r = 0; r <= max_deriv; ++r) {
    sh.values[r].assign(order + 1, std::vector<double>(nodes.size(), 0.0));
    for (int l = 0; l <= order; ++l) {
      auto& dst = sh.values[r][l];
      for (int k = 0; 2 * k <= l; ++k) {
        const int j = l - k;
        const double hx_j = table.endpoint_row(j).slope_slope;
        const double gx_j = table.endpoint_row(j).disp_slope;
        const auto& g_k = g[r][k];
        const auto& h_k = h[r][k];
        if (k == j) {
          for (std::size_t node = 0; node < nodes.size(); ++node) {
            dst[node] += g_k[node] * hx_j + sign * h_k[node] * gx_j;
          }
          continue;
        }
        const double hx_k = table.endpoint_row(k).slope_slope;
        const double gx_k = table.endpoint_row(k).disp_slope;
        const auto& g_j = g[r][j];
        const auto& h_j = h[r][j];
        for (std::size_t node = 0; node < nodes.size(); ++node) {
          const double t_kj = g_k[node] * hx_j + sign * h_k[node] * gx_j;
          const double t_jk = g_j[node] * hx_k + sign * h_j[node] * gx_k;
          dst[node] += t_kj + t_jk;
        }
      }
    }
  }
  sh.boundary.resize(order + 1);
  for (int l = 0; l <= order; ++l) {
    sh.boundary[l] = sh.values[0][l].back();
  }
  return sh;
}

void validate_params(const GenFunTable& table, const TrajectorySpec& spec,
                     const SynthesisParams& params) {
  if (params.order < 1) {
    fail(ErrorCode::MalformedSpec, "series order must be at least 1");
  }
  if (params.order > table.order()) {
    fail(ErrorCode::MalformedSpec,
         "series order exceeds the generating-function table order");
  }
  if (params.times.size() < 2) {
    fail(ErrorCode::MalformedSpec, "time grid needs at least two samples");
  }
  const double t_first = params.times.front();
  const double t_last = params.times.back();
  if (t_first != 0.0 || std::abs(t_last - spec.horizon()) > 1e-12) {
    fail(ErrorCode::MalformedSpec, "time grid must span [0, T]");
  }
  for (double t : params.times) {
    if (t < 0.0 || t > spec.horizon()) {
      fail(ErrorCode::OutOfDomain, "time sample outside [0, T]");
    }
  }
}

int effective_jet_order(const SynthesisParams& params) {
  const int needed = 2 * params.order + 4;
  return std::max(params.jet_order, needed);
}

}  // namespace

std::vector<double> SynthesisParams::uniform_times(double horizon,
                                                   std::size_t samples) {
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  t.front() = 0.0;
  t.back() = horizon;
  return t;
}

FlatOutputs flat_outputs_from_p(const GenFunTable& table, const Jet& p,
                                int order, int deriv) {
  require_jet_order(p, 2 * order + deriv, "flat_outputs_from_p");
  if (order > table.order()) {
    fail(ErrorCode::IndexOutOfRange, "operator truncation exceeds table order");
  }
  double y_disp = 0.0;
  double y_slope = 0.0;
  for (int k = 0; k <= order; ++k) {
    const EndpointRow row = table.endpoint_row(k);
    y_disp += series_term(row.slope_slope, p, 2 * k + deriv);
    y_slope -= series_term(row.disp_slope, p, 2 * k + deriv);
  }
  return {y_disp, y_slope};
}

InputSamples synthesize_input(const GenFunTable& table,
                              const TrajectorySpec& spec,
                              const SynthesisParams& params) {
  validate_params(table, spec, params);
  const int n_order = params.order;
  const int jet_order = effective_jet_order(params);
  const std::vector<double> boundary_node = {table.grid().length()};
  const ShellTables sh =
      build_shells(table, boundary_node, n_order, 0, params.sign_flip);
  const auto prefix = spec.kernel_prefix_grid(params.times);

  InputSamples out;
  out.times = params.times;
  out.value.resize(params.times.size());
  out.d1.resize(params.times.size());
  out.d2.resize(params.times.size());
  parallel_for(params.times.size(), [&](std::size_t i) {
    const Jet p = spec.parameter_jet_with_prefix(params.times[i], jet_order,
                                                 prefix[i]);
    double f = 0.0, f1 = 0.0, f2 = 0.0;
    for (int l = 0; l <= n_order; ++l) {
      const double coef = sh.boundary[l];
      f += series_term(coef, p, 2 * l);
      f1 += series_term(coef, p, 2 * l + 1);
      f2 += series_term(coef, p, 2 * l + 2);
    }
    out.value[i] = f;
    out.d1[i] = f1;
    out.d2[i] = f2;
  });
  return out;
}

FlatTrajectory synthesize_field(const GenFunTable& table,
                                const TrajectorySpec& spec,
                                const SynthesisParams& params) {
  validate_params(table, spec, params);
  const int n_order = params.order;
  const int jet_order = effective_jet_order(params);
  const int max_deriv = params.with_residual_tables ? 4 : 1;
  const ShellTables sh = build_shells(table, params.field_grid.nodes, n_order,
                                      max_deriv, params.sign_flip);
  const auto prefix = spec.kernel_prefix_grid(params.times);
  const std::size_t nt = params.times.size();
  const std::size_t nx = params.field_grid.nodes.size();

  FlatTrajectory traj;
  traj.order = n_order;
  traj.sign_flip = params.sign_flip;
  traj.times = params.times;
  traj.grid = params.field_grid;
  traj.has_residual_tables = params.with_residual_tables;
  traj.input.resize(nt);
  traj.input_d1.resize(nt);
  traj.input_d2.resize(nt);
  traj.w.assign(nt, std::vector<double>(nx, 0.0));
  traj.w_t.assign(nt, std::vector<double>(nx, 0.0));
  if (params.with_residual_tables) {
    traj.w_tt.assign(nt, std::vector<double>(nx, 0.0));
    traj.w_x1.assign(nt, std::vector<double>(nx, 0.0));
    traj.w_x2.assign(nt, std::vector<double>(nx, 0.0));
    traj.w_x3.assign(nt, std::vector<double>(nx, 0.0));
    traj.w_x4.assign(nt, std::vector<double>(nx, 0.0));
  }
  traj.tip_slope.resize(nt);
  traj.tip_slope_t.resize(nt);
  traj.tip_slope_tt.resize(nt);
  traj.y_disp.assign(nt, std::vector<double>(n_order + 1, 0.0));
  traj.y_slope.assign(nt, std::vector<double>(n_order + 1, 0.0));
  traj.states.resize(nt);

  parallel_for(nt, [&](std::size_t i) {
    const Jet p = spec.parameter_jet_with_prefix(params.times[i], jet_order,
                                                 prefix[i]);
    // materialized derivative shells p^(2l), p^(2l+1), p^(2l+2)
    std::vector<double> p0(n_order + 1), p1(n_order + 1), p2(n_order + 1);
    for (int l = 0; l <= n_order; ++l) {
      p0[l] = materialize(p, 2 * l);
      p1[l] = materialize(p, 2 * l + 1);
      p2[l] = materialize(p, 2 * l + 2);
    }
    for (std::size_t node = 0; node < nx; ++node) {
      double w = 0.0, wt = 0.0;
      for (int l = 0; l <= n_order; ++l) {
        w += sh.values[0][l][node] * p0[l];
        wt += sh.values[0][l][node] * p1[l];
      }
      traj.w[i][node] = w;
      traj.w_t[i][node] = wt;
    }
    if (params.with_residual_tables) {
      for (std::size_t node = 0; node < nx; ++node) {
        double wtt = 0.0, w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0;
        for (int l = 0; l <= n_order; ++l) {
          wtt += sh.values[0][l][node] * p2[l];
          w1 += sh.values[1][l][node] * p0[l];
          w2 += sh.values[2][l][node] * p0[l];
          w3 += sh.values[3][l][node] * p0[l];
          w4 += sh.values[4][l][node] * p0[l];
        }
        traj.w_tt[i][node] = wtt;
        traj.w_x1[i][node] = w1;
        traj.w_x2[i][node] = w2;
        traj.w_x3[i][node] = w3;
        traj.w_x4[i][node] = w4;
      }
    }
    // tip slope trace w_x(0, t) = -sum_l g_l'(L) p^(2l); the only surviving
    // level-0 slope at x = 0 is the linear seed of the slope family
    {
      double s0 = 0.0, s1 = 0.0, s2 = 0.0;
      for (int l = 0; l <= n_order; ++l) {
        const double gx = table.endpoint_row(l).disp_slope;
        s0 -= series_term(gx, p, 2 * l);
        s1 -= series_term(gx, p, 2 * l + 1);
        s2 -= series_term(gx, p, 2 * l + 2);
      }
      traj.tip_slope[i] = s0;
      traj.tip_slope_t[i] = s1;
      traj.tip_slope_tt[i] = s2;
    }
    // boundary input: exactly the clamped-end trace of the field
    traj.input[i] = traj.w[i].back();
    {
      double f1 = 0.0, f2 = 0.0;
      for (int l = 0; l <= n_order; ++l) {
        f1 += series_term(sh.boundary[l], p, 2 * l + 1);
        f2 += series_term(sh.boundary[l], p, 2 * l + 2);
      }
      traj.input_d1[i] = f1;
      traj.input_d2[i] = f2;
    }
    // flat-output tables, truncated consistently with the total-order field
    for (int k = 0; k <= n_order; ++k) {
      const FlatOutputs y = flat_outputs_from_p(table, p, n_order - k, 2 * k);
      traj.y_disp[i][k] = y.y_disp;
      traj.y_slope[i][k] = y.y_slope;
    }
    BeamState& st = traj.states[i];
    st.u = traj.w[i];
    st.v = traj.w_t[i];
    st.alpha = traj.w_t[i][0];
    st.beta = traj.tip_slope_t[i];
  });
  return traj;
}

BeamState initial_state_from_p(const GenFunTable& table,
                               const TrajectorySpec& spec,
                               const SynthesisParams& params,
                               StateEndpoint which) {
  validate_params(table, spec, params);
  const int n_order = params.order;
  const int jet_order = effective_jet_order(params);
  const ShellTables sh =
      build_shells(table, params.field_grid.nodes, n_order, 1, params.sign_flip);

  // The start state is generated by the start parameter's jet at time zero;
  // the end state by the end parameter's jet with reversal bookkeeping (the
  // transfer runs through the time-mirrored copy of the end parameter).
  Jet p = which == StateEndpoint::Start
              ? spec.start_param().jet(0.0, jet_order)
              : jet_reverse(spec.end_param().jet(0.0, jet_order), 0.0);

  const std::size_t nx = params.field_grid.nodes.size();
  BeamState st;
  st.u.assign(nx, 0.0);
  st.v.assign(nx, 0.0);
  std::vector<double> p0(n_order + 1), p1(n_order + 1);
  for (int l = 0; l <= n_order; ++l) {
    p0[l] = materialize(p, 2 * l);
    p1[l] = materialize(p, 2 * l + 1);
  }
  for (std::size_t node = 0; node < nx; ++node) {
    double u = 0.0, v = 0.0;
    for (int l = 0; l <= n_order; ++l) {
      u += sh.values[0][l][node] * p0[l];
      v += sh.values[0][l][node] * p1[l];
    }
    st.u[node] = u;
    st.v[node] = v;
  }
  st.alpha = st.v[0];
  double beta = 0.0;
  for (int l = 0; l <= n_order; ++l) {
    beta -= series_term(table.endpoint_row(l).disp_slope, p, 2 * l + 1);
  }
  st.beta = beta;
  return st;
}

double check_commutation(const GenFunTable& table, const Jet& p, int order) {
  require_jet_order(p, 4 * order, "check_commutation");
  if (order > table.order()) {
    fail(ErrorCode::IndexOutOfRange, "operator truncation exceeds table order");
  }
  auto term = [&](int j, int k) {
    const auto gx = table.log_end_disp_slope(k);
    const auto hx = table.log_end_slope_slope(j);
    const LogVal pd = raw_derivative(p, 2 * (j + k));
    return signed_exp(gx.log_abs + hx.log_abs + pd.log_abs,
                      gx.sign * hx.sign * pd.sign);
  };
  double outer_k = 0.0;
  for (int k = 0; k <= order; ++k) {
    double inner = 0.0;
    for (int j = 0; j <= order; ++j) inner += term(j, k);
    outer_k += inner;
  }
  double outer_j = 0.0;
  for (int j = 0; j <= order; ++j) {
    double inner = 0.0;
    for (int k = 0; k <= order; ++k) inner += term(j, k);
    outer_j += inner;
  }
  return std::abs(outer_k - outer_j);
}

ResidualReport residuals(const FlatTrajectory& traj, const BeamConfig& config) {
  if (!traj.has_residual_tables) {
    fail(ErrorCode::MissingDerivatives,
         "trajectory was synthesized without residual tables");
  }
  ResidualReport rep;
  const auto& nodes = traj.grid.nodes;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double x = nodes[j];
      const double rho = config.density(x);
      const double ei = config.rigidity(x);
      const double ei1 = config.rigidity_d1(x);
      const double ei2 = config.rigidity_d2(x);
      const double pde = rho * traj.w_tt[i][j] + ei2 * traj.w_x2[i][j] +
                         2.0 * ei1 * traj.w_x3[i][j] + ei * traj.w_x4[i][j];
      rep.pde_sup = std::max(rep.pde_sup, std::abs(pde));
    }
    const double ei0 = config.rigidity(0.0);
    const double ei1_0 = config.rigidity_d1(0.0);
    const double force = config.tip_mass() * traj.w_tt[i][0] +
                         ei1_0 * traj.w_x2[i][0] + ei0 * traj.w_x3[i][0];
    const double moment =
        config.tip_inertia() * traj.tip_slope_tt[i] - ei0 * traj.w_x2[i][0];
    rep.tip_force_sup = std::max(rep.tip_force_sup, std::abs(force));
    rep.tip_moment_sup = std::max(rep.tip_moment_sup, std::abs(moment));
    rep.slope_sup = std::max(rep.slope_sup, std::abs(traj.w_x1[i].back()));
  }
  return rep;
}

CompatibilityTail compatibility_tail(const GenFunTable& table,
                                     const TrajectorySpec& spec,
                                     const std::vector<double>& times,
                                     int order) {
  if (order >= table.order()) {
    fail(ErrorCode::IndexOutOfRange,
         "compatibility tail needs table levels above the truncation order");
  }
  const int outer_max = table.order();
  const int jet_order = 2 * outer_max + 2 * order;
  const double log_l = std::log(table.grid().length());
  const double log_r1 = std::log(table.decay_r1());
  const double log_r2 = std::log(table.decay_r2());

  // decay-estimate logs for the endpoint slopes; level 0 values are exact
  auto bound_disp_slope = [&](int k) {
    if (k == 0) return kNegInf;  // g_0'(L) = 0
    return k * log_r1 + (4 * k - 2) * log_l - log_factorial(4 * k - 2);
  };
  auto bound_slope_slope = [&](int j) {
    if (j == 0) return 0.0;  // h_0'(L) = 1
    return j * log_r2 + (4 * j - 3) * log_l - log_factorial(4 * j - 3);
  };

  const auto prefix = spec.kernel_prefix_grid(times);
  CompatibilityTail out;
  std::vector<double> resid(times.size(), 0.0), bound(times.size(), 0.0);
  parallel_for(times.size(), [&](std::size_t i) {
    const Jet p = spec.parameter_jet_with_prefix(times[i], jet_order, prefix[i]);
    double r = 0.0;
    double b = 0.0;
    for (int k = order + 1; k <= outer_max; ++k) {
      const auto gx_k = table.log_end_disp_slope(k);
      const auto hx_k = table.log_end_slope_slope(k);
      for (int j = 0; j <= order; ++j) {
        const auto hx_j = table.log_end_slope_slope(j);
        const auto gx_j = table.log_end_disp_slope(j);
        const LogVal pd = raw_derivative(p, 2 * (j + k));
        r += signed_exp(gx_k.log_abs + hx_j.log_abs + pd.log_abs,
                        gx_k.sign * hx_j.sign * pd.sign);
        r -= signed_exp(hx_k.log_abs + gx_j.log_abs + pd.log_abs,
                        hx_k.sign * gx_j.sign * pd.sign);
        const double pd_abs = pd.sign == 0 ? kNegInf : pd.log_abs;
        b += signed_exp(bound_disp_slope(k) + bound_slope_slope(j) + pd_abs, 1);
        b += signed_exp(bound_slope_slope(k) + bound_disp_slope(j) + pd_abs, 1);
      }
    }
    resid[i] = std::abs(r);
    bound[i] = b;
  });
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.residual_sup = std::max(out.residual_sup, resid[i]);
    out.bound_sup = std::max(out.bound_sup, bound[i]);
  }
  return out;
}

}  // namespace flexbeam
