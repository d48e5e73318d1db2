#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ubacheck/engine.hpp"
#include "ubacheck/families.hpp"

namespace py = pybind11;
using namespace ubacheck;

namespace {

engine::MeasureOptions options(const std::string& method, double epsilon, std::size_t max_iter,
                               bool trust_unambiguous, unsigned workers) {
  engine::MeasureOptions o;
  o.method = engine::parse_method(method);
  o.epsilon = epsilon;
  o.max_iter = max_iter;
  o.trust_unambiguous = trust_unambiguous;
  o.workers = workers;
  return o;
}

py::dict to_dict(const engine::MeasureResult& r) {
  py::dict d;
  d["probability"] = r.probability;
  d["method"] = r.method;
  d["residual_max"] = r.residual_max;
  d["wall_ms"] = r.wall_ms;
  d["product_nodes"] = r.product.num_nodes();
  py::list sccs;
  for (const auto& s : r.sccs) {
    py::dict e;
    e["id"] = s.id;
    e["size"] = s.size;
    e["positive"] = s.positive;
    e["cut_size"] = s.cut_size;
    e["iterations"] = s.iterations;
    sccs.append(e);
  }
  d["sccs"] = sccs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Measure omega-regular properties of Markov chains given as unambiguous Buchi automata";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<engine::AmbiguityError>(m, "AmbiguityError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<automata::Nba>(m, "Nba")
      .def_property_readonly("num_states", &automata::Nba::num_states)
      .def_property_readonly("num_transitions", &automata::Nba::num_transitions)
      .def_property_readonly("alphabet_size", [](const automata::Nba& n) { return n.alphabet().size(); })
      .def_property_readonly("initial", [](const automata::Nba& n) { return members(n.initial()); })
      .def_property_readonly("final", [](const automata::Nba& n) { return members(n.final()); })
      .def("to_hoa", [](const automata::Nba& n) {
        std::ostringstream os;
        automata::write_hoa(n, os);
        return os.str();
      })
      .def("with_initial", [](const automata::Nba& n, const std::vector<std::uint32_t>& states) {
        return automata::with_initial(n, make_set(n.num_states(), states));
      })
      .def("__repr__", [](const automata::Nba& n) {
        return "<Nba states=" + std::to_string(n.num_states()) + " transitions=" +
               std::to_string(n.num_transitions()) + ">";
      });

  py::class_<markov::Dtmc>(m, "Dtmc")
      .def_property_readonly("num_states", &markov::Dtmc::num_states)
      .def("to_text", &markov::serialize_dtmc);

  m.def("parse_hoa", py::overload_cast<std::string_view>(&automata::parse_hoa), py::arg("text"));
  m.def("parse_dtmc", py::overload_cast<std::string_view>(&markov::parse_dtmc), py::arg("text"));
  m.def("uniform_chain", [](const automata::Nba& n) { return markov::uniform_chain(n.alphabet()); });

  m.def("is_unambiguous", [](const automata::Nba& n) { return automata::verify_unambiguous(n).unambiguous; });

  m.def(
      "measure",
      [](const markov::Dtmc& dtmc, const automata::Nba& nba, const std::string& method, double epsilon,
         std::size_t max_iter, bool trust_unambiguous, unsigned workers) {
        auto opts = options(method, epsilon, max_iter, trust_unambiguous, workers);
        engine::MeasureResult r;
        {
          py::gil_scoped_release nogil;
          r = engine::measure(dtmc, nba, opts);
        }
        return to_dict(r);
      },
      py::arg("dtmc"), py::arg("nba"), py::arg("method") = "power", py::arg("epsilon") = 1e-10,
      py::arg("max_iter") = 1000000, py::arg("trust_unambiguous") = false, py::arg("workers") = 1);

  m.def(
      "measure_uniform",
      [](const automata::Nba& nba, const std::string& method, double epsilon, std::size_t max_iter,
         bool trust_unambiguous, unsigned workers) {
        auto opts = options(method, epsilon, max_iter, trust_unambiguous, workers);
        engine::MeasureResult r;
        {
          py::gil_scoped_release nogil;
          r = engine::measure_uniform(nba, opts);
        }
        return to_dict(r);
      },
      py::arg("nba"), py::arg("method") = "power", py::arg("epsilon") = 1e-10, py::arg("max_iter") = 1000000,
      py::arg("trust_unambiguous") = false, py::arg("workers") = 1);

  m.def("almost_universal", [](const automata::Nba& nba) { return engine::almost_universal(nba); });

  m.def("oracle", [](const automata::Nba& nba, const markov::Dtmc& dtmc) {
    auto r = engine::powerset_absorption_oracle(nba, dtmc);
    py::object exact = py::none();
    if (r.exact) {
      auto fractions = py::module_::import("fractions");
      exact = fractions.attr("Fraction")(r.exact->get_str());
    }
    return py::make_tuple(r.value, exact);
  });

  m.def("generate", [](const std::string& family, unsigned k) {
    auto f = families::generate(family, k);
    return py::make_tuple(f.nba, f.dtmc ? py::cast(*f.dtmc) : py::object(py::none()));
  }, py::arg("family"), py::arg("k") = 1);
}
