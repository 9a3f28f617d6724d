// Acceptance suite: end-to-end checks of the two reference transfer
// experiments plus the structural guarantees of the series machinery and the
// finite-difference validator. Prints one line per criterion and exits with
// the number of failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "flexbeam/logfact.hpp"
#include "flexbeam/pipeline.hpp"
#include "flexbeam/simulator.hpp"
#include "flexbeam/synthesis.hpp"

using namespace flexbeam;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

double elapsed_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  // ---- criterion 1: rest-to-rest transfer (0.4 m travel) -----------------
  {
    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult problem2 =
        run_pipeline(ExperimentPreset::named("problem2"), "");
    const double wall = elapsed_since(t0);
    const double f0_err = std::abs(problem2.trajectory.input.front() - 0.4);
    const double ft_err = std::abs(problem2.trajectory.input.back());
    const double tip = std::abs(problem2.sim.tip_disp.back());
    const double speed = std::abs(problem2.sim.final_state.alpha);
    const bool ok = f0_err <= 1e-9 && ft_err <= 1e-9 && tip <= 0.004 &&
                    speed <= 0.004 && wall <= 60.0;
    report(1, "rest-to-rest transfer endpoints and settling", ok,
           fmt("|f(0)-0.4| = %.2e, |f(3)| = %.2e, |w(0,3)| = %.2e m, "
               "|w_t(0,3)| = %.2e m/s, runtime %.1f s",
               f0_err, ft_err, tip, speed, wall));
  }

  // ---- criterion 2: problem 1 field settles and matches the simulation ---
  PipelineResult problem1 = run_pipeline(ExperimentPreset::named("problem1"), "");
  {
    double dev0 = 0.0, devT_series = 0.0, devT_sim = 0.0;
    for (double v : problem1.trajectory.w.front()) {
      dev0 = std::max(dev0, std::abs(v));
    }
    for (double v : problem1.trajectory.w.back()) {
      devT_series = std::max(devT_series, std::abs(v));
    }
    for (double v : problem1.sim.field.back()) {
      devT_sim = std::max(devT_sim, std::abs(v));
    }
    const double agreement = problem1.errors.rel_sup_field();
    const bool ok = devT_series <= 0.02 * dev0 && devT_sim <= 0.02 * dev0 &&
                    agreement <= 0.02;
    report(2, "problem-1 field settling and series/simulation agreement", ok,
           fmt("series ratio %.2e, sim ratio %.2e, agreement %.2e",
               devT_series / dev0, devT_sim / dev0, agreement));
  }

  // ---- criterion 3: factorial decay bounds at every node, k <= 20 --------
  {
    const auto t0 = std::chrono::steady_clock::now();
    const BeamConfig cfg = reference_beam();
    const GenFunTable table = compute_gen_fun_table(
        cfg, SpatialGrid::uniform(cfg.length(), 512), 20);
    bool ok = true;
    std::string detail;
    try {
      const BoundReport rep = verify_decay_bounds(table);
      const double wall = elapsed_since(t0);
      ok = rep.ok && wall <= 5.0;
      detail = fmt("worst log-margins %.1f (disp), %.1f (slope), R1 = %.6f, "
                   "R2 = %.6f, runtime %.2f s",
                   rep.worst_margin_disp, rep.worst_margin_slope,
                   table.decay_r1(), table.decay_r2(), wall);
    } catch (const Error& e) {
      ok = false;
      detail = e.what();
    }
    report(3, "decay estimates hold at every grid node", ok, detail);
  }

  // ---- criterion 4: closed-form oracle and integrator order --------------
  {
    const double rho = 0.11, ei = 0.297, m = 0.402, j = 1.9e-4, len = 0.5;
    const BeamConfig uniform(len, m, j, CoefficientFunction::affine(rho, 0.0),
                             CoefficientFunction::affine(ei, 0.0));
    const GenFunTable table = compute_gen_fun_table(
        uniform, SpatialGrid::uniform(len, 512), 2);
    const double g1_expect =
        -rho * std::pow(len, 4) / (24.0 * ei) - m * std::pow(len, 3) / (6.0 * ei);
    const double h1_expect = -rho * std::pow(len, 5) / (120.0 * ei) +
                             j * len * len / (2.0 * ei);
    const double g1_err =
        std::abs(table.endpoint_row(1).disp_value - g1_expect) /
        std::abs(g1_expect);
    const double h1_err =
        std::abs(table.endpoint_row(1).slope_value - h1_expect) /
        std::abs(h1_expect);

    // observed order on the varying-coefficient beam, certification gate off
    const BeamConfig cfg = reference_beam();
    const GenFunTable t16 =
        compute_gen_fun_table(cfg, SpatialGrid::uniform(len, 16), 4, 1.0);
    const GenFunTable t32 =
        compute_gen_fun_table(cfg, SpatialGrid::uniform(len, 32), 4, 1.0);
    const GenFunTable t64 =
        compute_gen_fun_table(cfg, SpatialGrid::uniform(len, 64), 4, 1.0);
    double worst_order = 1e9;
    for (int k = 1; k <= 4; ++k) {
      const double c16 = t16.endpoint_row(k).disp_slope;
      const double c32 = t32.endpoint_row(k).disp_slope;
      const double c64 = t64.endpoint_row(k).disp_slope;
      if (c32 == c64) continue;
      worst_order =
          std::min(worst_order, std::log2(std::abs(c16 - c32) /
                                          std::abs(c32 - c64)));
    }
    const bool ok = g1_err <= 1e-9 && h1_err <= 1e-9 && worst_order >= 3.5;
    report(4, "closed-form oracle and integrator convergence order", ok,
           fmt("g1(L) rel err %.2e, h1(L) rel err %.2e, observed order %.2f",
               g1_err, h1_err, worst_order));
  }

  // ---- criterion 5: operator commutation on the problem-1 jets -----------
  {
    const BeamConfig cfg = reference_beam();
    const GenFunTable table = compute_gen_fun_table(
        cfg, SpatialGrid::uniform(cfg.length(), 512), 20);
    const TrajectorySpec spec(3.0, 1.5,
                              ClosedFormSpec::poly_times_exponential(
                                  {1.0}, {0.0, 0.0, 10.0}, -2.0),
                              ClosedFormSpec::constant(0.0));
    const auto times = SynthesisParams::uniform_times(3.0, 601);
    const auto prefix = spec.kernel_prefix_grid(times);
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Jet p = spec.parameter_jet_with_prefix(times[i], 80, prefix[i]);
      const double diff = check_commutation(table, p, 20);
      const double scale = std::max(
          1.0, std::abs(flat_outputs_from_p(table, p, 20, 0).y_disp));
      worst_rel = std::max(worst_rel, diff / scale);
    }
    report(5, "truncated operator products commute", worst_rel <= 1e-12,
           fmt("max relative difference %.2e over 601 samples", worst_rel));
  }

  // ---- criterion 6: compatibility residual against the analytic tail ----
  {
    const BeamConfig cfg = reference_beam();
    const GenFunTable table = compute_gen_fun_table(
        cfg, SpatialGrid::uniform(cfg.length(), 512), 25);
    const TrajectorySpec spec(3.0, 1.5,
                              ClosedFormSpec::poly_times_exponential(
                                  {1.0}, {0.0, 0.0, 10.0}, -2.0),
                              ClosedFormSpec::constant(0.0));
    const auto times = SynthesisParams::uniform_times(3.0, 121);
    std::vector<double> resid;
    bool bounded = true;
    for (int order : {5, 10, 15, 20}) {
      const CompatibilityTail tail =
          compatibility_tail(table, spec, times, order);
      bounded = bounded && tail.residual_sup <= tail.bound_sup;
      resid.push_back(tail.residual_sup);
    }
    bool decays = true;
    for (std::size_t i = 1; i < resid.size(); ++i) {
      decays = decays && resid[i] <= 0.1 * resid[i - 1];
    }
    report(6, "compatibility residual below tail bound, 10x per 5 orders",
           bounded && decays,
           fmt("residuals %.2e, %.2e, %.2e, %.2e", resid[0], resid[1],
               resid[2], resid[3]));
  }

  // ---- criterion 7: steady-state fixed point, exact ----------------------
  {
    const PipelineResult steady =
        run_pipeline(ExperimentPreset::named("steady"), "");
    bool exact = true;
    for (double v : steady.trajectory.input) exact = exact && v == 0.4;
    for (const auto& row : steady.trajectory.w) {
      for (double v : row) exact = exact && v == 0.4;
    }
    exact = exact && steady.residual.pde_sup == 0.0 &&
            steady.residual.tip_force_sup == 0.0 &&
            steady.residual.tip_moment_sup == 0.0 &&
            steady.residual.slope_sup == 0.0;
    report(7, "constant parameter is an exact fixed point", exact,
           fmt("pde residual %.1e, input deviation %.1e",
               steady.residual.pde_sup,
               std::abs(steady.trajectory.input.front() - 0.4)));
  }

  // ---- criterion 8: jet machinery -----------------------------------------
  {
    const ClosedFormSpec p0 = ClosedFormSpec::poly_times_exponential(
        {1.0}, {0.0, 0.0, 10.0}, -2.0);
    double worst = 0.0;
    for (double t : {0.0, 0.7, 1.3}) {
      const Jet jet = p0.jet(t, 12);
      for (int m = 0; m <= 12; ++m) {
        double expect = 10.0 * std::exp(-2.0 * t) *
                        (std::pow(-2.0, m) * t * t +
                         2.0 * m * t * std::pow(-2.0, m - 1) +
                         m * (m - 1) * std::pow(-2.0, m - 2));
        if (m == 0) expect += 1.0;
        const double got = jet.c[m] * std::exp(log_factorial(m));
        worst = std::max(worst,
                         std::abs(got - expect) / std::max(1.0, std::abs(expect)));
      }
    }
    const TrajectorySpec bump(3.0, 1.5, ClosedFormSpec::constant(0.0),
                              ClosedFormSpec::constant(0.0));
    const Jet at0 = bump.bump_jet(0.0, 12);
    const Jet atT = bump.bump_jet(3.0, 12);
    bool endpoints = at0.c[0] == 1.0 && atT.c[0] == 0.0;
    for (int k = 1; k <= 12; ++k) {
      endpoints = endpoints && at0.c[k] == 0.0 && atT.c[k] == 0.0;
    }
    double unity = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double t = 3.0 * i / 100.0;
      unity = std::max(unity, std::abs(bump.bump_jet(t, 0).c[0] +
                                       bump.bump_jet(3.0 - t, 0).c[0] - 1.0));
    }
    const bool ok = worst <= 1e-10 && endpoints && unity <= 1e-12;
    report(8, "jet derivatives, bump endpoints, partition of unity", ok,
           fmt("symbolic rel err %.2e, unity defect %.2e", worst, unity));
  }

  // ---- criterion 9: simulator physics -------------------------------------
  {
    // energy drift under constant input from a curved compatible state
    const BeamConfig cfg = reference_beam();
    const GenFunTable table = compute_gen_fun_table(
        cfg, SpatialGrid::uniform(cfg.length(), 512), 12);
    const TrajectorySpec curved(3.0, 1.5,
                                ClosedFormSpec::polynomial({0.3, 0.0, 0.2}),
                                ClosedFormSpec::constant(0.0));
    SynthesisParams params;
    params.order = 12;
    params.times = SynthesisParams::uniform_times(3.0, 11);
    params.field_grid = SpatialGrid::uniform(cfg.length(), 150);
    const BeamState z0 =
        initial_state_from_p(table, curved, params, StateEndpoint::Start);
    InputSignal constant;
    constant.times = {0.0, 3.0};
    constant.value = {z0.u.back(), z0.u.back()};
    constant.d1 = {0.0, 0.0};
    constant.d2 = {0.0, 0.0};
    const SimOperator op = discretize(cfg, 150);
    const SimResult free_run = simulate(op, z0, constant, 1e-4, 3.0);
    double drift = 0.0;
    for (double e : free_run.energy) {
      drift = std::max(drift, std::abs(e - free_run.energy.front()));
    }
    const double rel_drift = drift / free_run.energy.front();

    // stiffness symmetry through the scatter route
    const std::size_t n = op.dof_count();
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      e[c] = 1.0;
      const auto col = op.stiffness_action(e, 0.0);
      for (std::size_t r = 0; r < n; ++r) dense[r][c] = col[r];
      e[c] = 0.0;
    }
    double max_abs = 0.0, asym = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        max_abs = std::max(max_abs, std::abs(dense[r][c]));
        asym = std::max(asym, std::abs(dense[r][c] - dense[c][r]));
      }
    }

    // observed space-time order against the series solution (problem 1)
    ExperimentPreset coarse = ExperimentPreset::named("problem1");
    coarse.sim_intervals = 75;
    coarse.sim_dt = 2e-4;
    const PipelineResult coarse_run = run_pipeline(coarse, "");
    const double e_coarse = coarse_run.errors.sup_field;
    const double e_fine = problem1.errors.sup_field;
    const double order = std::log2(e_coarse / e_fine);

    const bool ok =
        rel_drift <= 1e-3 && asym <= 1e-12 * max_abs && order >= 1.8;
    report(9, "energy conservation, symmetry, convergence order", ok,
           fmt("energy drift %.2e, asymmetry %.2e, observed order %.2f",
               rel_drift, asym / max_abs, order));
  }

  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
