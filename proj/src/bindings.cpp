#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "tinfer/contraction_order.hpp"
#include "tinfer/tasks.hpp"
#include "tinfer/uai.hpp"

namespace py = pybind11;

namespace {

struct Model {
  tinfer::ModelSpec spec;
  tinfer::TensorNetwork net;
};

Model load_model(const std::string& text) {
  Model m;
  m.spec = tinfer::parse_model(text);
  m.net = tinfer::build_network(m.spec);
  return m;
}

tinfer::Assignment to_assignment(const std::map<tinfer::VarId, std::int64_t>& evidence) {
  tinfer::Assignment a;
  for (const auto& [v, val] : evidence) a.set(v, val);
  return a;
}

tinfer::TaskOptions to_options(const std::string& order, double space_cap) {
  tinfer::TaskOptions opts;
  opts.order = order == "exhaustive" ? tinfer::OrderStrategy::exhaustive
                                     : tinfer::OrderStrategy::greedy;
  opts.space_cap = space_cap;
  return opts;
}

std::map<tinfer::VarId, std::int64_t> to_dict(const tinfer::Assignment& a) {
  std::map<tinfer::VarId, std::int64_t> out;
  for (const auto& [v, val] : a) out[v] = val;
  return out;
}

constexpr double kNoCap = std::numeric_limits<double>::infinity();

}  // namespace

PYBIND11_MODULE(_tinfer, m) {
  m.doc() = "Exact inference on discrete graphical models by tensor network contraction";

  static py::exception<tinfer::InferenceError> exc(m, "InferenceError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const tinfer::InferenceError& e) {
      std::string msg = std::string(tinfer::category_name(e.category())) + ": " + e.what();
      PyErr_SetString(exc.ptr(), msg.c_str());
    }
  });

  py::class_<Model>(m, "Model")
      .def_property_readonly("num_vars", [](const Model& m) { return m.spec.num_vars; })
      .def_property_readonly("cards", [](const Model& m) { return m.spec.cards; })
      .def_property_readonly("num_factors",
                             [](const Model& m) { return m.spec.scopes.size(); })
      .def("serialize", [](const Model& m) { return tinfer::serialize_model(m.spec); })
      .def("__repr__", [](const Model& m) {
        return "<Model vars=" + std::to_string(m.spec.num_vars) +
               " factors=" + std::to_string(m.spec.scopes.size()) + ">";
      });

  m.def("load_model", &load_model, py::arg("text"),
        "Parse a UAI-format model from text.");

  m.def(
      "pr",
      [](const Model& m, const std::map<tinfer::VarId, std::int64_t>& evidence,
         const std::string& order, double space_cap) {
        return tinfer::compute_pr(m.net, to_assignment(evidence), to_options(order, space_cap))
            .log10();
      },
      py::arg("model"), py::arg("evidence") = std::map<tinfer::VarId, std::int64_t>{},
      py::arg("order") = "greedy", py::arg("space_cap") = kNoCap,
      "log10 probability of the evidence.");

  m.def(
      "marginals",
      [](const Model& m, const std::map<tinfer::VarId, std::int64_t>& evidence,
         const std::string& order, double space_cap) {
        tinfer::MarginalTable table = tinfer::compute_mar(
            m.net, to_assignment(evidence), {}, to_options(order, space_cap));
        std::map<tinfer::VarId, std::vector<double>> out;
        for (std::size_t i = 0; i < table.queries.size(); ++i)
          out[table.queries[i][0]] = table.probs[i].data;
        return out;
      },
      py::arg("model"), py::arg("evidence") = std::map<tinfer::VarId, std::int64_t>{},
      py::arg("order") = "greedy", py::arg("space_cap") = kNoCap,
      "Posterior marginal of every unobserved variable.");

  m.def(
      "mpe",
      [](const Model& m, const std::map<tinfer::VarId, std::int64_t>& evidence,
         const std::string& order, double space_cap) {
        tinfer::MpeSolution sol =
            tinfer::compute_mpe(m.net, to_assignment(evidence), to_options(order, space_cap));
        return py::make_tuple(to_dict(sol.assignment), sol.log_prob);
      },
      py::arg("model"), py::arg("evidence") = std::map<tinfer::VarId, std::int64_t>{},
      py::arg("order") = "greedy", py::arg("space_cap") = kNoCap,
      "Most probable explanation: (assignment, natural-log probability).");

  m.def(
      "mmap",
      [](const Model& m, const std::vector<tinfer::VarId>& query,
         const std::map<tinfer::VarId, std::int64_t>& evidence, const std::string& order,
         double space_cap) {
        tinfer::MpeSolution sol = tinfer::compute_mmap(m.net, to_assignment(evidence), query,
                                                       to_options(order, space_cap));
        return py::make_tuple(to_dict(sol.assignment), sol.log_prob);
      },
      py::arg("model"), py::arg("query"),
      py::arg("evidence") = std::map<tinfer::VarId, std::int64_t>{},
      py::arg("order") = "greedy", py::arg("space_cap") = kNoCap,
      "Marginal MAP over the query set: (assignment, natural-log score).");

  m.def(
      "sample",
      [](const Model& m, std::int64_t n, std::uint64_t seed,
         const std::map<tinfer::VarId, std::int64_t>& evidence, const std::string& order,
         double space_cap) {
        tinfer::SampleBatch batch = tinfer::draw_samples(m.net, to_assignment(evidence), n, seed,
                                                         to_options(order, space_cap));
        return py::make_tuple(batch.vars, batch.rows);
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 0,
      py::arg("evidence") = std::map<tinfer::VarId, std::int64_t>{},
      py::arg("order") = "greedy", py::arg("space_cap") = kNoCap,
      "Exact posterior samples: (variable ids, rows).");

  m.def(
      "stats",
      [](const Model& m, const std::string& order) {
        tinfer::ContractionTree tree = order == "exhaustive" ? tinfer::exhaustive_order(m.net)
                                                             : tinfer::greedy_order(m.net);
        tinfer::ComplexityReport rep = tinfer::complexity_report(m.net, tree);
        std::map<std::string, double> out;
        out["space"] = rep.space;
        out["time"] = rep.time;
        out["rw"] = rep.rw;
        return out;
      },
      py::arg("model"), py::arg("order") = "greedy",
      "log2 complexity estimates of the planned contraction.");
}
