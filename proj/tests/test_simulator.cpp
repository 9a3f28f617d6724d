#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "flexbeam/pipeline.hpp"
#include "flexbeam/simulator.hpp"

using namespace flexbeam;

namespace {

bool fails_with(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

InputSignal constant_input(double value, double horizon) {
  InputSignal sig;
  sig.times = {0.0, horizon};
  sig.value = {value, value};
  sig.d1 = {0.0, 0.0};
  sig.d2 = {0.0, 0.0};
  return sig;
}

BeamState rest_state(std::size_t intervals, double value) {
  BeamState st;
  st.u.assign(intervals + 1, value);
  st.v.assign(intervals + 1, 0.0);
  st.alpha = 0.0;
  st.beta = 0.0;
  return st;
}

}  // namespace

TEST_CASE("interior rows reduce to the classical biharmonic stencil") {
  const double ei = 0.297;
  const BeamConfig cfg(0.5, 0.402, 1.9e-4,
                       CoefficientFunction::affine(0.11, 0.0),
                       CoefficientFunction::affine(ei, 0.0));
  const SimOperator op = discretize(cfg, 64);
  const double dx = op.spacing();
  const double unit = ei * dx / (dx * dx * dx * dx);
  // rows far from both ends: EI (1, -4, 6, -4, 1) / dx^4 scaled by dx
  for (std::size_t row = 10; row <= 50; ++row) {
    CHECK(op.stiffness().get(row, row) == doctest::Approx(6.0 * unit));
    CHECK(op.stiffness().get(row, row - 1) == doctest::Approx(-4.0 * unit));
    CHECK(op.stiffness().get(row, row + 1) == doctest::Approx(-4.0 * unit));
    CHECK(op.stiffness().get(row, row - 2) == doctest::Approx(unit));
    CHECK(op.stiffness().get(row, row + 2) == doctest::Approx(unit));
  }
}

TEST_CASE("assembled stiffness is symmetric and positive semidefinite") {
  const SimOperator op = discretize(reference_beam(), 96);
  const std::size_t n = op.dof_count();
  // assemble densely through the scatter route, column by column
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const std::vector<double> col = op.stiffness_action(e, 0.0);
    for (std::size_t r = 0; r < n; ++r) dense[r][c] = col[r];
    e[c] = 0.0;
  }
  double max_abs = 0.0, max_asym = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      max_abs = std::max(max_abs, std::abs(dense[r][c]));
      max_asym = std::max(max_asym, std::abs(dense[r][c] - dense[c][r]));
    }
  }
  CHECK(max_asym <= 1e-12 * max_abs);
  // scatter route and banded assembly agree
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      CHECK(dense[r][c] ==
            doctest::Approx(op.stiffness().get(r, c)).epsilon(1e-12));
    }
  }
  // quadratic form nonnegative on a few directions
  std::vector<double> probe(n);
  for (std::size_t i = 0; i < n; ++i) probe[i] = std::sin(0.37 * i + 0.2);
  const std::vector<double> kp = op.stiffness().multiply(probe);
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) quad += probe[i] * kp[i];
  CHECK(quad >= 0.0);
}

TEST_CASE("too coarse simulator grids are rejected") {
  CHECK(fails_with(ErrorCode::GridTooCoarse,
                   [] { discretize(reference_beam(), 8); }));
}

TEST_CASE("constant state under matching constant input is an equilibrium") {
  const SimOperator op = discretize(reference_beam(), 64);
  const BeamState z0 = rest_state(64, 0.4);
  const SimResult res =
      simulate(op, z0, constant_input(0.4, 0.5), 1e-3, 0.5);
  for (double v : res.tip_disp) CHECK(v == 0.4);
  for (double e : res.energy) CHECK(e == res.energy.front());
  CHECK(res.energy.front() == 0.0);
  for (double v : res.final_state.v) CHECK(v == 0.0);
}

TEST_CASE("energy is a positive quadratic form with tip contributions") {
  const SimOperator op = discretize(reference_beam(), 64);
  const std::size_t n = op.dof_count();
  std::vector<double> zero(n, 0.0);
  CHECK(op.energy(zero, zero, 0.0, 0.0) == 0.0);

  // rigid offset stores nothing
  std::vector<double> offset(n, 0.7);
  CHECK(op.energy(offset, zero, 0.7, 0.0) == 0.0);

  // quadratic scaling
  std::vector<double> q(n), qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = std::sin(0.1 * i);
    qd[i] = std::cos(0.2 * i);
  }
  const double e1 = op.energy(q, qd, 0.3, 0.1);
  std::vector<double> q2 = q, qd2 = qd;
  for (auto& v : q2) v *= 2.0;
  for (auto& v : qd2) v *= 2.0;
  const double e2 = op.energy(q2, qd2, 0.6, 0.2);
  CHECK(e2 == doctest::Approx(4.0 * e1).epsilon(1e-12));
  CHECK(e1 > 0.0);

  CHECK(fails_with(ErrorCode::DimensionMismatch, [&] {
    op.energy(std::vector<double>(3, 0.0), qd, 0.0, 0.0);
  }));
}

TEST_CASE("fundamental frequency is positive and grid-stable to 3 digits") {
  const double f150 = fundamental_frequency(discretize(reference_beam(), 150));
  const double f300 = fundamental_frequency(discretize(reference_beam(), 300));
  CHECK(f150 > 0.0);
  CHECK(std::abs(f150 - f300) <= 1e-3 * f300);
  MESSAGE("fundamental frequency [Hz]: ", f150);
}

TEST_CASE("energy drift under constant input stays below 0.1% over 3 s") {
  // a curved-at-rest compatible state: even polynomial parameter
  const BeamConfig cfg = reference_beam();
  const GenFunTable table =
      compute_gen_fun_table(cfg, SpatialGrid::uniform(cfg.length(), 512), 12);
  const TrajectorySpec spec(3.0, 1.5,
                            ClosedFormSpec::polynomial({0.3, 0.0, 0.2}),
                            ClosedFormSpec::constant(0.0));
  SynthesisParams params;
  params.order = 12;
  params.times = SynthesisParams::uniform_times(3.0, 11);
  params.field_grid = SpatialGrid::uniform(cfg.length(), 150);
  const BeamState z0 =
      initial_state_from_p(table, spec, params, StateEndpoint::Start);
  const SimOperator op = discretize(cfg, 150);
  const SimResult res =
      simulate(op, z0, constant_input(z0.u.back(), 3.0), 1e-4, 3.0);
  const double e0 = res.energy.front();
  CHECK(e0 > 0.0);
  double worst = 0.0;
  for (double e : res.energy) worst = std::max(worst, std::abs(e - e0));
  CHECK(worst <= 1e-3 * e0);
  MESSAGE("relative energy drift: ", worst / e0);
}

TEST_CASE("incompatible initial data is rejected") {
  const SimOperator op = discretize(reference_beam(), 64);
  const BeamState z0 = rest_state(64, 0.4);
  CHECK(fails_with(ErrorCode::IncompatibleInitialData, [&] {
    simulate(op, z0, constant_input(0.1, 1.0), 1e-3, 1.0);
  }));
}

TEST_CASE("non-finite inputs surface as NonFiniteState") {
  const SimOperator op = discretize(reference_beam(), 64);
  const BeamState z0 = rest_state(64, 0.0);
  InputSignal sig;
  sig.times = {0.0, 0.5, 1.0};
  sig.value = {0.0, std::numeric_limits<double>::quiet_NaN(), 0.0};
  sig.d1 = {0.0, 0.0, 0.0};
  sig.d2 = {0.0, 0.0, 0.0};
  CHECK(fails_with(ErrorCode::NonFiniteState,
                   [&] { simulate(op, z0, sig, 1e-3, 1.0); }));
}

TEST_CASE("input signal Hermite interpolation reproduces cubics") {
  // samples of t^3 - t with exact derivatives
  InputSignal sig;
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    sig.times.push_back(t);
    sig.value.push_back(t * t * t - t);
    sig.d1.push_back(3.0 * t * t - 1.0);
    sig.d2.push_back(6.0 * t);
  }
  for (double t : {0.05, 0.17, 0.33, 0.61, 0.99}) {
    CHECK(sig.eval(t, 0) == doctest::Approx(t * t * t - t).epsilon(1e-12));
    CHECK(sig.eval(t, 1) == doctest::Approx(3 * t * t - 1).epsilon(1e-10));
  }
}
