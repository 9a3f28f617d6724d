#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "flexbeam/genfun.hpp"
#include "flexbeam/gevrey.hpp"
#include "flexbeam/pipeline.hpp"
#include "flexbeam/simulator.hpp"
#include "flexbeam/synthesis.hpp"

namespace py = pybind11;
using namespace flexbeam;
using nlohmann::json;

namespace {

BeamConfig config_from_json_str(const std::string& text) {
  return BeamConfig::from_json(json::parse(text));
}

ClosedFormSpec spec_from_json_str(const std::string& text) {
  return ClosedFormSpec::from_json(json::parse(text));
}

SynthesisParams make_params(int order, std::vector<double> times,
                            double length, std::size_t field_intervals,
                            bool sign_flip) {
  SynthesisParams p;
  p.order = order;
  p.times = std::move(times);
  p.field_grid = SpatialGrid::uniform(length, field_intervals);
  p.sign_flip = sign_flip;
  return p;
}

py::dict trajectory_dict(const FlatTrajectory& traj) {
  py::dict d;
  d["times"] = traj.times;
  d["nodes"] = traj.grid.nodes;
  d["input"] = traj.input;
  d["input_d1"] = traj.input_d1;
  d["w"] = traj.w;
  d["w_t"] = traj.w_t;
  d["tip_slope"] = traj.tip_slope;
  d["y_disp"] = traj.y_disp;
  d["y_slope"] = traj.y_slope;
  return d;
}

py::dict sim_dict(const SimResult& sim) {
  py::dict d;
  d["times"] = sim.times;
  d["tip_disp"] = sim.tip_disp;
  d["tip_slope"] = sim.tip_slope;
  d["energy"] = sim.energy;
  d["field_times"] = sim.field_times;
  d["field"] = sim.field;
  d["final_u"] = sim.final_state.u;
  d["final_v"] = sim.final_state.v;
  d["final_alpha"] = sim.final_state.alpha;
  d["final_beta"] = sim.final_state.beta;
  return d;
}

}  // namespace

PYBIND11_MODULE(flexbeam, m) {
  m.doc() = "flatness-based motion planning for a moving cantilever beam";

  py::register_exception<Error>(m, "FlexbeamError");

  py::class_<BeamConfig>(m, "BeamConfig")
      .def_static("from_json", &config_from_json_str, py::arg("text"))
      .def_property_readonly("length", &BeamConfig::length)
      .def_property_readonly("tip_mass", &BeamConfig::tip_mass)
      .def_property_readonly("tip_inertia", &BeamConfig::tip_inertia)
      .def("coefficients", &BeamConfig::coefficients, py::arg("x"))
      .def("to_json", [](const BeamConfig& c) { return c.to_json().dump(); });

  m.def("reference_beam", &reference_beam);

  py::class_<GenFunTable>(m, "GenFunTable")
      .def_property_readonly("order", &GenFunTable::order)
      .def_property_readonly("r1", &GenFunTable::decay_r1)
      .def_property_readonly("r2", &GenFunTable::decay_r2)
      .def("endpoint_row",
           [](const GenFunTable& t, int level) {
             const EndpointRow row = t.endpoint_row(level);
             return py::make_tuple(row.disp_value, row.disp_slope,
                                   row.slope_value, row.slope_slope);
           },
           py::arg("level"))
      .def("eval",
           [](const GenFunTable& t, const std::string& family, int level,
              int deriv, double x) {
             return t.eval(family == "disp" ? GenFunTable::Family::Disp
                                            : GenFunTable::Family::Slope,
                           level, deriv, x);
           },
           py::arg("family"), py::arg("level"), py::arg("deriv"), py::arg("x"))
      .def("verify_decay_bounds", [](const GenFunTable& t) {
        const BoundReport rep = verify_decay_bounds(t);
        py::dict d;
        d["ok"] = rep.ok;
        d["worst_margin_disp"] = rep.worst_margin_disp;
        d["worst_margin_slope"] = rep.worst_margin_slope;
        return d;
      });

  m.def(
      "compute_gen_fun_table",
      [](const BeamConfig& config, std::size_t intervals, int order) {
        return compute_gen_fun_table(
            config, SpatialGrid::uniform(config.length(), intervals), order);
      },
      py::arg("config"), py::arg("intervals"), py::arg("order"));

  py::class_<ClosedFormSpec>(m, "ClosedFormSpec")
      .def_static("from_json", &spec_from_json_str, py::arg("text"))
      .def_static("constant", &ClosedFormSpec::constant, py::arg("value"))
      .def("jet", [](const ClosedFormSpec& s, double t, int order) {
        return s.jet(t, order).c;
      });

  py::class_<TrajectorySpec>(m, "TrajectorySpec")
      .def(py::init<double, double, ClosedFormSpec, ClosedFormSpec>(),
           py::arg("horizon"), py::arg("gevrey_order"), py::arg("start"),
           py::arg("end"))
      .def_property_readonly("normalizer", &TrajectorySpec::normalizer)
      .def("bump_jet",
           [](const TrajectorySpec& s, double t, int order) {
             return s.bump_jet(t, order).c;
           })
      .def("parameter_jet", [](const TrajectorySpec& s, double t, int order) {
        return s.parameter_jet(t, order).c;
      });

  m.def("bump_normalizer", &bump_normalizer, py::arg("horizon"),
        py::arg("gevrey_order"));

  m.def(
      "synthesize_input",
      [](const GenFunTable& table, const TrajectorySpec& spec, int order,
         std::vector<double> times, std::size_t field_intervals,
         bool sign_flip) {
        const SynthesisParams params =
            make_params(order, std::move(times), table.config().length(),
                        field_intervals, sign_flip);
        const InputSamples input = synthesize_input(table, spec, params);
        py::dict d;
        d["times"] = input.times;
        d["value"] = input.value;
        d["d1"] = input.d1;
        d["d2"] = input.d2;
        return d;
      },
      py::arg("table"), py::arg("spec"), py::arg("order"), py::arg("times"),
      py::arg("field_intervals") = 150, py::arg("sign_flip") = false);

  m.def(
      "synthesize_field",
      [](const GenFunTable& table, const TrajectorySpec& spec, int order,
         std::vector<double> times, std::size_t field_intervals,
         bool sign_flip) {
        const SynthesisParams params =
            make_params(order, std::move(times), table.config().length(),
                        field_intervals, sign_flip);
        return trajectory_dict(synthesize_field(table, spec, params));
      },
      py::arg("table"), py::arg("spec"), py::arg("order"), py::arg("times"),
      py::arg("field_intervals") = 150, py::arg("sign_flip") = false);

  m.def(
      "simulate",
      [](const BeamConfig& config, std::size_t intervals,
         std::vector<double> u0, std::vector<double> v0, double alpha,
         double beta, std::vector<double> times, std::vector<double> f,
         std::vector<double> fdot, std::vector<double> fddot, double dt,
         double horizon) {
        const SimOperator op = discretize(config, intervals);
        BeamState z0;
        z0.u = std::move(u0);
        z0.v = std::move(v0);
        z0.alpha = alpha;
        z0.beta = beta;
        InputSignal sig{std::move(times), std::move(f), std::move(fdot),
                        std::move(fddot)};
        return sim_dict(simulate(op, z0, sig, dt, horizon));
      },
      py::arg("config"), py::arg("intervals"), py::arg("u0"), py::arg("v0"),
      py::arg("alpha"), py::arg("beta"), py::arg("times"), py::arg("f"),
      py::arg("fdot"), py::arg("fddot"), py::arg("dt"), py::arg("horizon"));

  m.def("fundamental_frequency",
        [](const BeamConfig& config, std::size_t intervals) {
          return fundamental_frequency(discretize(config, intervals));
        },
        py::arg("config"), py::arg("intervals") = 150);

  m.def(
      "run_pipeline",
      [](const std::string& preset_name, const std::string& out_dir) {
        const PipelineResult r =
            run_pipeline(ExperimentPreset::named(preset_name), out_dir);
        py::dict d;
        d["passed"] = r.validation.passed();
        d["input_initial"] = r.trajectory.input.front();
        d["input_final"] = r.trajectory.input.back();
        d["sim_tip_final"] = r.sim.tip_disp.back();
        d["sup_field_error"] = r.errors.sup_field;
        d["runtime_seconds"] = r.runtime_seconds;
        py::list checks;
        for (const auto& c : r.validation.checks) {
          py::dict cd;
          cd["name"] = c.name;
          cd["value"] = c.value;
          cd["threshold"] = c.threshold;
          cd["passed"] = c.passed;
          checks.append(cd);
        }
        d["checks"] = checks;
        return d;
      },
      py::arg("preset"), py::arg("out_dir") = "");
}
