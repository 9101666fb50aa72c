#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spatzsim/cli.hpp"

namespace py = pybind11;
using namespace spatzsim;

namespace {

py::tuple dispatch(const std::string& config_json,
                   int (*body)(const CliConfig&, std::ostream&, std::ostream&)) {
    CliConfig cfg;
    try {
        cfg = parse_config(config_json);
    } catch (const std::invalid_argument& e) {
        throw py::value_error(e.what());
    }
    std::ostringstream out, err;
    int rc = body(cfg, out, err);
    return py::make_tuple(rc, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "dual-core scalar+vector cluster simulator";

    m.def("run", [](const std::string& cfg) { return dispatch(cfg, cmd_run); },
          py::arg("config_json"),
          "Run one experiment; returns (exit_code, report_text, log_text).");
    m.def("sweep", [](const std::string& cfg) { return dispatch(cfg, cmd_sweep); },
          py::arg("config_json"),
          "Run the kernel x mode sweep; returns (exit_code, report_text, log_text).");
    m.def("mixed", [](const std::string& cfg) { return dispatch(cfg, cmd_mixed); },
          py::arg("config_json"),
          "Run the mixed kernel+scalar comparison; returns (exit_code, report_text, log_text).");

    m.def("assemble_check", [](const std::string& source) {
              try {
                  return assemble(source).instrs.size();
              } catch (const AsmError& e) {
                  throw py::value_error(e.what());
              }
          },
          py::arg("source"),
          "Assemble source text; returns the instruction count or raises ValueError.");

    m.def("disassemble", [](const std::string& source) {
              try {
                  return disassemble(assemble(source));
              } catch (const AsmError& e) {
                  throw py::value_error(e.what());
              }
          },
          py::arg("source"), "Assemble then disassemble, returning the canonical text.");

    m.def("run_asm", [](const std::string& source, uint64_t max_cycles) {
              Program prog;
              try {
                  prog = assemble(source);
              } catch (const AsmError& e) {
                  throw py::value_error(e.what());
              }
              RunRequest req;
              req.max_cycles = max_cycles;
              RunStats st = run_program(prog, req, Mode::split(), {}, "asm", "", "", 0);
              return emit_report(st, ReportFormat::Json);
          },
          py::arg("source"), py::arg("max_cycles") = 10000000,
          "Assemble and run a program from source; returns the JSON report text.");
}
