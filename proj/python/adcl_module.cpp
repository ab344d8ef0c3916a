#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adcl/driver.hpp"

namespace py = pybind11;

namespace {

py::dict solve(const std::string& text, double timeout, std::uint64_t seed, std::uint64_t restart_scale,
               bool restarts, bool claim_sat, const std::string& smt_cmd) {
  adcl::EngineConfig cfg;
  cfg.timeout_s = timeout;
  cfg.seed = seed;
  cfg.restart_scale = restart_scale;
  cfg.restarts = restarts;
  cfg.claim_sat = claim_sat;
  cfg.smt_cmd = smt_cmd;
  adcl::SolveOutcome out;
  {
    py::gil_scoped_release nogil;
    out = adcl::solve_text(text, cfg);
  }
  py::dict d;
  d["answer"] = adcl::answer_name(out.answer);
  d["reason"] = out.reason;
  d["witness"] = out.witness.empty() ? py::object(py::none()) : py::object(py::str(out.witness));
  d["ground_steps"] = out.ground_steps;
  d["transitions"] = std::string(out.transitions.begin(), out.transitions.end());
  d["approximations"] = out.approximations;
  py::dict stats;
  stats["steps"] = out.stats.steps;
  stats["accelerations"] = out.stats.accelerations;
  stats["covered"] = out.stats.covered;
  stats["backtracks"] = out.stats.backtracks;
  stats["restarts"] = out.stats.restarts;
  stats["refusals"] = out.stats.refusals;
  d["stats"] = stats;
  return d;
}

}  // namespace

PYBIND11_MODULE(_adcl, m) {
  m.doc() = "ADCL solver bindings";
  py::register_exception<adcl::Error>(m, "AdclError");
  m.def("solve", &solve, py::arg("text"), py::arg("timeout") = 300.0, py::arg("seed") = 0,
        py::arg("restart_scale") = 10, py::arg("restarts") = true, py::arg("claim_sat") = true,
        py::arg("smt_cmd") = "");
  m.def("instrument", &adcl::instrument_text, py::arg("text"));
  m.def(
      "check_witness",
      [](const std::string& problem, const std::string& witness, std::uint64_t seed) {
        auto r = adcl::check_witness_text(problem, witness, seed);
        return py::make_tuple(r.ok, r.reason, r.ground_steps);
      },
      py::arg("problem"), py::arg("witness"), py::arg("seed") = 0);
  m.def("expand_witness", &adcl::expand_witness_text, py::arg("problem"), py::arg("witness"), py::arg("seed") = 0);
  m.def("luby", &adcl::luby, py::arg("i"));
}
