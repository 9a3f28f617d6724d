#include "flexbeam/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flexbeam/errors.hpp"
#include "flexbeam/hermite.hpp"
#include "flexbeam/logfact.hpp"
#include "flexbeam/parallel.hpp"

namespace flexbeam {

using nlohmann::json;

namespace {

// Seed profiles for recursion level 0.
double disp_seed(double) { return 1.0; }
double slope_seed(double x) { return x; }

// The level-k ODE (EI u'')'' = -rho u_{k-1} as a first-order system in
// (u, u', M, S) with M = EI u'' and S = M'. All N levels are integrated as
// one coupled triangular system so that each Runge-Kutta stage sees the
// previous level at the stage abscissa instead of an interpolated sample.
class FamilyIntegrator {
 public:
  FamilyIntegrator(const BeamConfig& config, int levels,
                   std::function<double(double)> seed, double seed_d1,
                   double init_moment, double init_shear)
      : config_(config),
        levels_(levels),
        seed_(std::move(seed)),
        seed_d1_(seed_d1),
        init_moment_(init_moment),
        init_shear_(init_shear) {}

  GenFunFamily run(const std::vector<double>& nodes) const {
    const std::size_t n = nodes.size();
    const std::size_t dim = 4 * static_cast<std::size_t>(levels_);
    std::vector<double> state(dim, 0.0);
    state[2] = init_moment_;  // level 1: M(0) = EI(0) u''(0)
    state[3] = init_shear_;   // level 1: S(0) = (EI u'')'(0)

    GenFunFamily fam;
    fam.levels.resize(levels_ + 1);
    for (auto& lvl : fam.levels) {
      lvl.value.resize(n);
      lvl.d1.resize(n);
      lvl.d2.resize(n);
      lvl.d3.resize(n);
      lvl.d4.resize(n);
    }
    record(fam, 0, nodes[0], state);

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double x0 = nodes[i];
      const double h = nodes[i + 1] - nodes[i];
      const double xm = x0 + 0.5 * h;
      const double x1 = nodes[i + 1];

      derivative(x0, state, k1);
      axpy(state, 0.5 * h, k1, tmp);
      derivative(xm, tmp, k2);
      axpy(state, 0.5 * h, k2, tmp);
      derivative(xm, tmp, k3);
      axpy(state, h, k3, tmp);
      derivative(x1, tmp, k4);
      for (std::size_t d = 0; d < dim; ++d) {
        state[d] += h / 6.0 * (k1[d] + 2.0 * (k2[d] + k3[d]) + k4[d]);
        if (!std::isfinite(state[d])) {
          fail(ErrorCode::SolverDivergence,
               "non-finite value in generating-function recursion");
        }
      }
      record(fam, i + 1, x1, state);
    }

    fam.end_value.resize(levels_ + 1);
    fam.end_d1.resize(levels_ + 1);
    for (int k = 0; k <= levels_; ++k) {
      fam.end_value[k] = fam.levels[k].value.back();
      fam.end_d1[k] = fam.levels[k].d1.back();
    }
    return fam;
  }

 private:
  static void axpy(const std::vector<double>& base, double a,
                   const std::vector<double>& dir, std::vector<double>& out) {
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + a * dir[i];
  }

  void derivative(double x, const std::vector<double>& s,
                  std::vector<double>& out) const {
    const double rho = config_.density(x);
    const double ei = config_.rigidity(x);
    for (int l = 0; l < levels_; ++l) {
      const std::size_t b = 4 * static_cast<std::size_t>(l);
      const double prev = (l == 0) ? seed_(x) : s[b - 4];
      out[b] = s[b + 1];
      out[b + 1] = s[b + 2] / ei;
      out[b + 2] = s[b + 3];
      out[b + 3] = -rho * prev;
    }
  }

  void record(GenFunFamily& fam, std::size_t node, double x,
              const std::vector<double>& s) const {
    const double rho = config_.density(x);
    const double ei = config_.rigidity(x);
    const double ei1 = config_.rigidity_d1(x);
    const double ei2 = config_.rigidity_d2(x);
    // level 0 is analytic
    auto& l0 = fam.levels[0];
    l0.value[node] = seed_(x);
    l0.d1[node] = seed_d1_;
    l0.d2[node] = 0.0;
    l0.d3[node] = 0.0;
    l0.d4[node] = 0.0;
    for (int l = 0; l < levels_; ++l) {
      const std::size_t b = 4 * static_cast<std::size_t>(l);
      auto& lvl = fam.levels[l + 1];
      const double prev = (l == 0) ? seed_(x) : s[b - 4];
      const double uxx = s[b + 2] / ei;
      const double uxxx = (s[b + 3] - ei1 * uxx) / ei;
      lvl.value[node] = s[b];
      lvl.d1[node] = s[b + 1];
      lvl.d2[node] = uxx;
      lvl.d3[node] = uxxx;
      lvl.d4[node] = (-rho * prev - ei2 * uxx - 2.0 * ei1 * uxxx) / ei;
    }
  }

  const BeamConfig& config_;
  int levels_;
  std::function<double(double)> seed_;
  double seed_d1_;
  double init_moment_;
  double init_shear_;
};

GenFunFamily restrict_to_coarse(const GenFunFamily& fine, std::size_t stride) {
  GenFunFamily out;
  out.levels.resize(fine.levels.size());
  const std::size_t n = (fine.levels[0].value.size() - 1) / stride + 1;
  for (std::size_t k = 0; k < fine.levels.size(); ++k) {
    auto& dst = out.levels[k];
    const auto& src = fine.levels[k];
    dst.value.resize(n);
    dst.d1.resize(n);
    dst.d2.resize(n);
    dst.d3.resize(n);
    dst.d4.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      dst.value[i] = src.value[i * stride];
      dst.d1[i] = src.d1[i * stride];
      dst.d2[i] = src.d2[i * stride];
      dst.d3[i] = src.d3[i * stride];
      dst.d4[i] = src.d4[i * stride];
    }
  }
  out.end_value = fine.end_value;
  out.end_d1 = fine.end_d1;
  return out;
}

// Endpoint certification. The error of level k is inherited from the much
// larger level k-1, so agreement is measured against the level's factorial
// decay envelope (the natural magnitude of the coefficient), not against the
// coefficient itself: |delta| <= tol * max(|value|, envelope).
void check_endpoint_agreement(const GenFunFamily& coarse,
                              const GenFunFamily& fine, double length,
                              double decay_r, int value_exp_shift,
                              const char* family_name, double tol) {
  const double log_r = std::log(decay_r);
  const double log_l = std::log(length);
  for (std::size_t k = 1; k < fine.end_value.size(); ++k) {
    const int e_value = 4 * static_cast<int>(k) - value_exp_shift;
    const double envelope =
        std::exp(k * log_r + e_value * log_l - log_factorial(e_value));
    const double scale =
        std::max({std::abs(fine.end_value[k]),
                  length * std::abs(fine.end_d1[k]), envelope, 1e-280});
    // Richardson estimate of the returned (half-step) table's error for a
    // fourth-order one-step method.
    const double dv =
        std::abs(coarse.end_value[k] - fine.end_value[k]) / 15.0;
    const double dd =
        length * std::abs(coarse.end_d1[k] - fine.end_d1[k]) / 15.0;
    if (dv > tol * scale || dd > tol * scale) {
      std::ostringstream os;
      os << family_name << " endpoint level " << k
         << " disagrees between grid and half-step grid (rel "
         << std::max(dv, dd) / scale << ")";
      fail(ErrorCode::GridTooCoarse, os.str());
    }
  }
}

GenFunTable::LogValue log_of(double v) {
  if (v == 0.0) {
    return {-std::numeric_limits<double>::infinity(), 0};
  }
  return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

}  // namespace

GenFunTable::GenFunTable(BeamConfig config, SpatialGrid grid, int order,
                         GenFunFamily disp, GenFunFamily slope, double decay_r1,
                         double decay_r2)
    : config_(std::move(config)),
      grid_(std::move(grid)),
      order_(order),
      disp_(std::move(disp)),
      slope_(std::move(slope)),
      r1_(decay_r1),
      r2_(decay_r2) {}

EndpointRow GenFunTable::endpoint_row(int level) const {
  if (level < 0 || level > order_) {
    std::ostringstream os;
    os << "endpoint level " << level << " not in [0, " << order_ << "]";
    fail(ErrorCode::IndexOutOfRange, os.str());
  }
  return {disp_.end_value[level], disp_.end_d1[level], slope_.end_value[level],
          slope_.end_d1[level]};
}

GenFunTable::LogValue GenFunTable::log_end_disp_slope(int level) const {
  return log_of(endpoint_row(level).disp_slope);
}
GenFunTable::LogValue GenFunTable::log_end_slope_slope(int level) const {
  return log_of(endpoint_row(level).slope_slope);
}
GenFunTable::LogValue GenFunTable::log_end_disp_value(int level) const {
  return log_of(endpoint_row(level).disp_value);
}
GenFunTable::LogValue GenFunTable::log_end_slope_value(int level) const {
  return log_of(endpoint_row(level).slope_value);
}

double GenFunTable::eval(Family family, int level, int deriv, double x) const {
  if (level < 0 || level > order_) {
    fail(ErrorCode::IndexOutOfRange, "generating-function level out of range");
  }
  if (deriv < 0 || deriv > 4) {
    fail(ErrorCode::IndexOutOfRange, "derivative order must be 0..4");
  }
  if (x < 0.0 || x > grid_.length()) {
    fail(ErrorCode::OutOfDomain, "evaluation point outside the beam");
  }
  const auto& lvl = (family == Family::Disp ? disp_ : slope_).levels[level];
  const auto& nodes = grid_.nodes;
  std::size_t i = static_cast<std::size_t>(x / grid_.spacing);
  if (i >= nodes.size() - 1) i = nodes.size() - 2;
  const double t = x - nodes[i];
  const double h = nodes[i + 1] - nodes[i];
  if (deriv <= 2) {
    const auto piece =
        QuinticPiece::fit(h, lvl.value[i], lvl.d1[i], lvl.d2[i],
                          lvl.value[i + 1], lvl.d1[i + 1], lvl.d2[i + 1]);
    return piece.eval(t, deriv);
  }
  const auto piece = QuinticPiece::fit(h, lvl.d2[i], lvl.d3[i], lvl.d4[i],
                                       lvl.d2[i + 1], lvl.d3[i + 1],
                                       lvl.d4[i + 1]);
  return piece.eval(t, deriv - 2);
}

GenFunTable compute_gen_fun_table(const BeamConfig& config,
                                  const SpatialGrid& grid, int order,
                                  double agreement_tol) {
  if (order < 1) {
    fail(ErrorCode::MalformedSpec, "recursion order must be at least 1");
  }
  if (std::abs(grid.length() - config.length()) >
      1e-12 * std::max(1.0, config.length())) {
    fail(ErrorCode::GridMismatch, "grid length differs from beam length");
  }

  const SpatialGrid fine_grid =
      SpatialGrid::uniform(config.length(), 2 * grid.intervals());

  FamilyIntegrator disp_int(config, order, disp_seed, 0.0, 0.0,
                            -config.tip_mass());
  FamilyIntegrator slope_int(config, order, slope_seed, 1.0,
                             config.tip_inertia(), 0.0);

  // The two family recursions are independent; run them side by side when a
  // thread budget allows.
  GenFunFamily disp_coarse, disp_fine, slope_coarse, slope_fine;
  if (thread_budget() > 1) {
    auto disp_task = std::async(std::launch::async, [&] {
      return std::pair{disp_int.run(grid.nodes), disp_int.run(fine_grid.nodes)};
    });
    slope_coarse = slope_int.run(grid.nodes);
    slope_fine = slope_int.run(fine_grid.nodes);
    auto pair = disp_task.get();
    disp_coarse = std::move(pair.first);
    disp_fine = std::move(pair.second);
  } else {
    disp_coarse = disp_int.run(grid.nodes);
    disp_fine = disp_int.run(fine_grid.nodes);
    slope_coarse = slope_int.run(grid.nodes);
    slope_fine = slope_int.run(fine_grid.nodes);
  }

  const double l = config.length();
  const double r1 = (config.max_density() + config.tip_mass()) /
                    config.min_rigidity() * std::max(1.0, l);
  const double r2 = (config.max_density() + config.tip_inertia()) /
                    config.min_rigidity() * std::max(1.0, l * l * l);

  check_endpoint_agreement(disp_coarse, disp_fine, l, r1, 1, "disp",
                           agreement_tol);
  check_endpoint_agreement(slope_coarse, slope_fine, l, r2, 2, "slope",
                           agreement_tol);

  return GenFunTable(config, grid, order, restrict_to_coarse(disp_fine, 2),
                     restrict_to_coarse(slope_fine, 2), r1, r2);
}

BoundReport verify_decay_bounds(const GenFunTable& table) {
  BoundReport report;
  const auto& nodes = table.grid().nodes;
  const double log_r1 = std::log(table.decay_r1());
  const double log_r2 = std::log(table.decay_r2());

  auto run_checks = [&](GenFunTable::Family family, double log_r,
                        double* worst, int* worst_level) {
    const auto& fam = family == GenFunTable::Family::Disp ? table.disp()
                                                          : table.slope();
    const int value_shift = family == GenFunTable::Family::Disp ? 1 : 2;
    for (int k = 1; k <= table.order(); ++k) {
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double x = nodes[j];
        const double vals[2] = {fam.levels[k].value[j], fam.levels[k].d1[j]};
        for (int which = 0; which < 2; ++which) {
          const int exponent = 4 * k - value_shift - which;
          const double v = vals[which];
          if (x == 0.0) {
            // initial data is imposed, not integrated
            if (std::abs(v) > 1e-12) {
              fail(ErrorCode::BoundViolation,
                   "generating function violates its initial condition");
            }
            continue;
          }
          if (v == 0.0 || std::abs(v) < 1e-300) continue;
          const double log_bound = k * log_r + exponent * std::log(x) -
                                   log_factorial(exponent);
          const double margin = std::log(std::abs(v)) - log_bound;
          if (margin > *worst) {
            *worst = margin;
            *worst_level = k;
          }
          // solver-error allowance on top of the analytic bound
          if (margin > 1e-9) {
            std::ostringstream os;
            os << "decay bound violated at level " << k << ", x = " << x
               << " (log-margin " << margin << ")";
            fail(ErrorCode::BoundViolation, os.str());
          }
        }
      }
    }
  };

  run_checks(GenFunTable::Family::Disp, log_r1, &report.worst_margin_disp,
             &report.worst_level_disp);
  run_checks(GenFunTable::Family::Slope, log_r2, &report.worst_margin_slope,
             &report.worst_level_slope);
  report.ok = true;
  return report;
}

json GenFunTable::to_json(bool include_samples) const {
  json doc;
  doc["N"] = order_;
  doc["grid"] = {{"M", grid_.intervals()}, {"L", grid_.length()}};
  doc["R1"] = r1_;
  doc["R2"] = r2_;
  doc["config"] = config_.to_json();
  json rows = json::array();
  for (int k = 0; k <= order_; ++k) {
    const auto row = endpoint_row(k);
    rows.push_back(
        {row.disp_value, row.disp_slope, row.slope_value, row.slope_slope});
  }
  doc["endpoints"] = rows;
  if (include_samples) {
    auto family_json = [](const GenFunFamily& fam) {
      json levels = json::array();
      for (const auto& lvl : fam.levels) {
        levels.push_back({{"value", lvl.value},
                          {"d1", lvl.d1},
                          {"d2", lvl.d2},
                          {"d3", lvl.d3},
                          {"d4", lvl.d4}});
      }
      return levels;
    };
    doc["samples"] = {{"x", grid_.nodes},
                      {"disp", family_json(disp_)},
                      {"slope", family_json(slope_)}};
  }
  return doc;
}

GenFunTable GenFunTable::from_json(const json& doc) {
  try {
    if (!doc.contains("samples")) {
      fail(ErrorCode::MalformedSpec,
           "table JSON lacks samples; re-export with samples included");
    }
    BeamConfig config = BeamConfig::from_json(doc.at("config"));
    const int order = doc.at("N").get<int>();
    SpatialGrid grid = SpatialGrid::uniform(
        doc.at("grid").at("L").get<double>(),
        doc.at("grid").at("M").get<std::size_t>());
    auto family_from = [&](const json& levels) {
      GenFunFamily fam;
      for (const auto& lvl : levels) {
        SampledLevel s;
        s.value = lvl.at("value").get<std::vector<double>>();
        s.d1 = lvl.at("d1").get<std::vector<double>>();
        s.d2 = lvl.at("d2").get<std::vector<double>>();
        s.d3 = lvl.at("d3").get<std::vector<double>>();
        s.d4 = lvl.at("d4").get<std::vector<double>>();
        if (s.value.size() != grid.nodes.size()) {
          fail(ErrorCode::MalformedSpec, "sample arrays do not match the grid");
        }
        fam.levels.push_back(std::move(s));
      }
      if (static_cast<int>(fam.levels.size()) != order + 1) {
        fail(ErrorCode::MalformedSpec, "level count does not match N");
      }
      for (const auto& lvl : fam.levels) {
        fam.end_value.push_back(lvl.value.back());
        fam.end_d1.push_back(lvl.d1.back());
      }
      return fam;
    };
    GenFunFamily disp = family_from(doc.at("samples").at("disp"));
    GenFunFamily slope = family_from(doc.at("samples").at("slope"));
    return GenFunTable(std::move(config), std::move(grid), order,
                       std::move(disp), std::move(slope),
                       doc.at("R1").get<double>(), doc.at("R2").get<double>());
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("table JSON: ") + e.what());
  }
}

void GenFunTable::write_family_csv(const std::string& path,
                                   Family family) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FileNotFound, "cannot write " + path);
  const auto& fam = family == Family::Disp ? disp_ : slope_;
  const char* base = family == Family::Disp ? "g" : "h";
  out << "x";
  for (int k = 0; k <= order_; ++k) {
    out << "," << base << k << "," << base << k << "_x," << base << k << "_xx,"
        << base << k << "_xxx," << base << k << "_xxxx";
  }
  out << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << "," << buf;
  };
  for (std::size_t j = 0; j < grid_.nodes.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", grid_.nodes[j]);
    out << buf;
    for (int k = 0; k <= order_; ++k) {
      const auto& lvl = fam.levels[k];
      put(lvl.value[j]);
      put(lvl.d1[j]);
      put(lvl.d2[j]);
      put(lvl.d3[j]);
      put(lvl.d4[j]);
    }
    out << "\n";
  }
}

}  // namespace flexbeam
