#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nfbdd/fpras.hpp"
#include "nfbdd/io.hpp"
#include "nfbdd/report.hpp"
#include "nfbdd/transform.hpp"

namespace py = pybind11;
using namespace nfbdd;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_nfbdd, m) {
  m.doc() = "Model counting for non-deterministic read-once branching programs";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_OverflowError);

  py::class_<Nfbdd>(m, "Nfbdd")
      .def_property_readonly("n_vars", &Nfbdd::n_vars)
      .def_property_readonly("size", &Nfbdd::size)
      .def_property_readonly("node_count", &Nfbdd::node_count)
      .def("serialize", &serialize_nfbdd)
      .def("evaluate",
           [](const Nfbdd& b, std::uint64_t bits) {
             if (b.n_vars() > 64) throw Error("evaluate takes packed bits, so at most 64 variables");
             return evaluate(b, b.source(), Assignment::from_bits(b.n_vars(), bits));
           },
           py::arg("bits"), "Value on the total assignment packed in `bits` (bit i-1 is x_i).")
      .def("__repr__", [](const Nfbdd& b) {
        return "<Nfbdd n_vars=" + std::to_string(b.n_vars()) + " size=" + std::to_string(b.size()) + ">";
      });

  m.def("parse", &parse_any, py::arg("text"), "Parse nFBDD or DNF text.");
  m.def("parse_dnf", [](std::string_view text) { return dnf_to_nfbdd(parse_dnf(text)); }, py::arg("text"));
  m.def("gen_random", &gen_random, py::arg("n"), py::arg("target_edges"), py::arg("seed"));
  m.def("count_exact", &count_exact, py::arg("diagram"), py::arg("cap") = kDefaultBruteForceCap);

  m.def(
      "normalize",
      [](const Nfbdd& b) -> py::object {
        auto nf = normalize(b);
        if (auto* n = std::get_if<Normalized>(&nf)) return py::cast(std::move(n->diagram));
        return py::none();
      },
      py::arg("diagram"), "Layered normal form, or None for a function without models.");

  m.def(
      "params",
      [](double epsilon, double delta, std::size_t n, std::size_t size, std::uint64_t seed) {
        return to_python(to_json(params_from(epsilon, delta, n, size, seed)));
      },
      py::arg("epsilon"), py::arg("delta"), py::arg("n"), py::arg("size"), py::arg("seed") = 0);

  m.def(
      "approx_count",
      [](const Nfbdd& b, double epsilon, double delta, std::uint64_t seed, unsigned threads, bool no_theta,
         int exact_threshold) {
        CountOptions opts;
        opts.threads = threads;
        opts.no_theta = no_theta;
        opts.exact_threshold = exact_threshold;
        CountReport rep;
        {
          py::gil_scoped_release release;
          rep = approx_count(b, epsilon, delta, seed, opts);
        }
        return to_python(to_json(rep));
      },
      py::arg("diagram"), py::arg("epsilon") = 0.5, py::arg("delta") = 0.25, py::arg("seed") = 0,
      py::arg("threads") = 1, py::arg("no_theta") = false, py::arg("exact_threshold") = -1,
      "Run the estimator and return the report as a dict.");
}
