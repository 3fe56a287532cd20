#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prism/eval.hpp"
#include "prism/oracle.hpp"
#include "prism/prism.hpp"

namespace py = pybind11;
using namespace prism;

namespace {

py::dict metrics_dict(const IterationMetrics& m) {
  py::dict d;
  d["iter"] = m.iter;
  d["total_data"] = m.total_data;
  d["unsafe_ratio"] = m.unsafe_ratio;
  d["num_traj"] = m.num_traj;
  d["safe_acc"] = m.safe_acc;
  d["unsafe_acc"] = m.unsafe_acc;
  d["quantile"] = m.quantile;
  d["band_lo"] = m.band_lo;
  d["band_hi"] = m.band_hi;
  d["band_degenerate"] = m.band_degenerate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "safe-stoppability monitor core";

  py::class_<EnvParams>(m, "EnvParams")
      .def(py::init<>())
      .def_readwrite("damping_scale", &EnvParams::damping_scale)
      .def_readwrite("gain_scale", &EnvParams::gain_scale)
      .def_readwrite("friction_scale", &EnvParams::friction_scale)
      .def_readwrite("disturbance_sigma", &EnvParams::disturbance_sigma)
      .def_readwrite("dt", &EnvParams::dt);

  py::class_<TrainHyper>(m, "TrainHyper")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainHyper::learning_rate)
      .def_readwrite("batch_size", &TrainHyper::batch_size)
      .def_readwrite("epochs", &TrainHyper::epochs)
      .def_readwrite("momentum", &TrainHyper::momentum);

  py::class_<StrideConfig>(m, "StrideConfig")
      .def(py::init<>())
      .def_readwrite("coarse", &StrideConfig::coarse)
      .def_readwrite("fine", &StrideConfig::fine);

  py::class_<PrismConfig>(m, "PrismConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &PrismConfig::alpha)
      .def_readwrite("beta", &PrismConfig::beta)
      .def_readwrite("delta", &PrismConfig::delta)
      .def_readwrite("n0", &PrismConfig::n0)
      .def_readwrite("n_i", &PrismConfig::n_i)
      .def_readwrite("k_iters", &PrismConfig::k_iters)
      .def_readwrite("n_val", &PrismConfig::n_val)
      .def_readwrite("strides", &PrismConfig::strides)
      .def_readwrite("t_max", &PrismConfig::t_max)
      .def_readwrite("horizon", &PrismConfig::horizon)
      .def_readwrite("train", &PrismConfig::train)
      .def_readwrite("hidden", &PrismConfig::hidden);

  py::class_<MonitorParams>(m, "Monitor")
      .def("forward", [](const MonitorParams& p, const State& x) { return forward(p, x); })
      .def("save",
           [](const MonitorParams& p, const std::string& path) { save_monitor(p, path); })
      .def_static("load", &load_monitor)
      .def_property_readonly("layer_sizes",
                             [](const MonitorParams& p) { return p.layer_sizes; });

  py::class_<PrismResult>(m, "PrismResult")
      .def_readonly("monitor", &PrismResult::monitor)
      .def_property_readonly("history",
                             [](const PrismResult& r) {
                               py::list out;
                               for (const auto& m : r.history) out.append(metrics_dict(m));
                               return out;
                             })
      .def_property_readonly("total_data",
                             [](const PrismResult& r) { return r.buffer.size(); });

  m.def(
      "run_prism",
      [](const std::string& env, const EnvParams& params, const PrismConfig& cfg,
         std::uint64_t seed) { return run_prism(make_spec(env), params, cfg, seed); },
      py::arg("env"), py::arg("params"), py::arg("config"), py::arg("seed"));

  m.def(
      "label_trigger",
      [](const std::string& env, const State& x, const EnvParams& params, int t_max,
         std::uint64_t seed) { return label_trigger(x, make_spec(env), params, t_max, Rng(seed)); },
      py::arg("env"), py::arg("state"), py::arg("params"), py::arg("t_max") = 500,
      py::arg("seed") = 0);

  m.def(
      "estimate_vstop",
      [](const std::string& env, const State& x, const EnvParams& params, int t_max, int m_,
         std::uint64_t seed) {
        return estimate_vstop(x, make_spec(env), params, t_max, m_, Rng(seed));
      },
      py::arg("env"), py::arg("state"), py::arg("params"), py::arg("t_max") = 500,
      py::arg("m") = 20, py::arg("seed") = 0);

  m.def(
      "decide",
      [](double v_hat, double alpha) { return decide(v_hat, alpha) == Decision::Stoppable; },
      py::arg("v_hat"), py::arg("alpha") = 0.5,
      "True when the monitor value clears the stoppability threshold");

  m.def(
      "is_safe",
      [](const std::string& env, const State& x) { return is_safe(x, make_spec(env)); },
      py::arg("env"), py::arg("state"));
  m.def(
      "is_terminal",
      [](const std::string& env, const State& x) { return is_terminal(x, make_spec(env)); },
      py::arg("env"), py::arg("state"));
}
