#include "hqm/api.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using hqm::api::json;

namespace {

std::string run(const std::string& command, const std::string& request, unsigned precision, double tol,
                std::optional<std::string> trunc, unsigned workers) {
    hqm::api::Options opt;
    opt.precision = precision;
    opt.tol = tol;
    opt.workers = workers;
    if (trunc) opt.trunc = hqm::io::rat_from_json(json(*trunc));
    json req = json::parse(request);
    json out;
    {
        py::gil_scoped_release release;
        out = hqm::api::run(command, req, opt);
    }
    return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hermitian theta series and special cycle toolkit";

    py::register_exception<hqm::io::ValidationError>(m, "ValidationError", PyExc_ValueError);

    m.def("run", &run, py::arg("command"), py::arg("request"), py::arg("precision") = 128, py::arg("tol") = 1e-8,
          py::arg("trunc") = py::none(), py::arg("workers") = 1,
          "Run one command on a JSON request string; returns the JSON result string.");
    m.def("commands", &hqm::api::commands);
    m.def("fspace_dim", [](int n, int g) {
        return hqm::api::run("fspace dim", json{{"n", n}, {"g", g}})["dim"].get<std::size_t>();
    });
    m.def("default_truncation", [](int g) { return hqm::api::default_truncation(g).get_str(); });
}
