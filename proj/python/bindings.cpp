#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcfs/analytic.hpp"
#include "fcfs/chains.hpp"
#include "fcfs/fcfs_core.hpp"
#include "fcfs/loynes.hpp"
#include "fcfs/model.hpp"
#include "fcfs/reversibility.hpp"
#include "fcfs/sim.hpp"

namespace py = pybind11;
using namespace fcfs;

namespace {

py::dict estimate(const Estimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["se"] = e.se;
  return d;
}

ConditionalForm parse_form(const std::string& f) {
  if (f == "derived") return ConditionalForm::Derived;
  if (f == "printed") return ConditionalForm::Printed;
  throw std::invalid_argument("form must be 'derived' or 'printed'");
}

std::optional<int> customer_of(const MatchingModel& m, const std::optional<std::string>& label) {
  if (!label) return std::nullopt;
  auto i = m.customer_index(*label);
  if (!i) throw std::invalid_argument("unknown customer type '" + *label + "'");
  return i;
}

int server_of(const MatchingModel& m, const std::string& label) {
  auto j = m.server_index(label);
  if (!j) throw std::invalid_argument("unknown server type '" + label + "'");
  return *j;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "FCFS infinite bipartite matching";
  py::register_exception<ModelError>(mod, "ModelError", PyExc_ValueError);
  py::register_exception<PermutationCapError>(mod, "PermutationCapError", PyExc_RuntimeError);

  py::class_<MatchingModel>(mod, "Model")
      .def_property_readonly("alpha", &MatchingModel::alphas)
      .def_property_readonly("beta", &MatchingModel::betas)
      .def_property_readonly("customers", &MatchingModel::customer_names)
      .def_property_readonly("servers", &MatchingModel::server_names)
      .def_property_readonly("edges",
                             [](const MatchingModel& m) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (auto [i, j] : m.edges()) out.emplace_back(m.customer_name(i), m.server_name(j));
                               return out;
                             })
      .def("compatible", &MatchingModel::compatible)
      .def("to_json", [](const MatchingModel& m) { return model_to_json(m); });

  mod.def("load_model", &load_model_file, py::arg("path"));
  mod.def("load_model_json", &load_model_json, py::arg("text"));

  mod.def("check_crp", [](const MatchingModel& m) {
    CrpReport r = check_crp(m);
    py::dict d;
    d["holds"] = r.holds;
    d["margin"] = r.margin;
    d["tightest"] = subset_labels(m, r.tightest);
    py::list v;
    for (const auto& x : r.violations) v.append(subset_labels(m, x.subset));
    d["violations"] = v;
    return d;
  });

  mod.def(
      "fcfs_match",
      [](const MatchingModel& m, std::vector<int> customers, std::vector<int> servers) {
        ItemSequence seq{std::move(customers), std::move(servers), 0};
        Matching mt = fcfs_match_finite(m, seq);
        std::vector<std::pair<Pos, Pos>> links;
        for (const Link& l : mt.links) links.emplace_back(l.customer, l.server);
        return links;
      },
      py::arg("model"), py::arg("customers"), py::arg("servers"));

  py::class_<StationaryEvaluator>(mod, "Evaluator")
      .def(py::init([](const MatchingModel& m, int threads) {
             EvaluatorOptions o;
             o.threads = threads;
             return StationaryEvaluator(m, o);
           }),
           py::arg("model"), py::arg("threads") = 0)
      .def_property_readonly("finite", &StationaryEvaluator::finite)
      .def_property_readonly("B", &StationaryEvaluator::B)
      .def_property_readonly("Bs", &StationaryEvaluator::Bs)
      .def(
          "pi",
          [](const StationaryEvaluator& ev, const std::string& kind, const std::string& state) {
            ChainKind k = parse_chain_kind(kind);
            ChainState s = parse_state(ev.model(), k, state);
            return pi_detailed(ev, k, s);
          },
          py::arg("kind"), py::arg("state"))
      .def("rates",
           [](const StationaryEvaluator& ev) {
             RateMatrix r = matching_rates(ev);
             std::vector<std::vector<double>> out(r.customers, std::vector<double>(r.servers));
             for (int i = 0; i < r.customers; ++i)
               for (int j = 0; j < r.servers; ++j) out[i][j] = r.at(i, j);
             return out;
           })
      .def(
          "link_length_pmf",
          [](const StationaryEvaluator& ev, const std::string& server, std::optional<std::string> customer,
             const std::string& form) {
            const MatchingModel& m = ev.model();
            auto mix = link_length_distribution(ev, server_of(m, server), customer_of(m, customer), parse_form(form))
                           .normalized();
            PmfTable t = mix.pmf_table();
            return std::make_pair(t.lo, t.values);
          },
          py::arg("server"), py::arg("customer") = py::none(), py::arg("form") = "derived")
      .def(
          "link_length_mass",
          [](const StationaryEvaluator& ev, const std::string& server, std::optional<std::string> customer) {
            const MatchingModel& m = ev.model();
            return link_length_distribution(ev, server_of(m, server), customer_of(m, customer)).total_mass();
          },
          py::arg("server"), py::arg("customer") = py::none())
      .def(
          "pgf",
          [](const StationaryEvaluator& ev, const std::string& server, std::complex<double> z,
             std::optional<std::string> customer) {
            const MatchingModel& m = ev.model();
            return pgf_eval(ev, server_of(m, server), customer_of(m, customer), z);
          },
          py::arg("server"), py::arg("z"), py::arg("customer") = py::none());

  mod.def(
      "simulate_matches",
      [](const MatchingModel& m, std::uint64_t seed, Pos pairs) {
        std::vector<std::tuple<Pos, Pos, int, int, long>> out;
        for (const auto& r : simulate_matches(m, seed, pairs))
          out.emplace_back(r.customer_pos, r.server_pos, r.customer, r.server, r.length());
        return out;
      },
      py::arg("model"), py::arg("seed"), py::arg("pairs"));

  mod.def(
      "regeneration_estimates",
      [](const MatchingModel& m, std::uint64_t seed, long cycles) {
        RegenerationReport rep = regeneration_estimates(m, seed, cycles);
        py::dict d;
        d["cycles"] = rep.cycles;
        d["pairs"] = rep.pairs;
        d["pi_empty"] = estimate(rep.pi_empty);
        d["mean_cycle_length"] = estimate(rep.mean_cycle_length);
        py::list rates;
        for (int i = 0; i < rep.customers; ++i) {
          py::list row;
          for (int j = 0; j < rep.servers; ++j) row.append(estimate(rep.rate(i, j)));
          rates.append(row);
        }
        d["rates"] = rates;
        return d;
      },
      py::arg("model"), py::arg("seed"), py::arg("cycles"));

  mod.def(
      "reversibility_suite",
      [](const MatchingModel& m, std::uint64_t seed, long blocks) {
        ReversibilityReport rep = reversibility_suite(m, seed, blocks);
        py::dict d;
        d["blocks"] = rep.blocks;
        d["link_checks"] = rep.link_checks;
        py::dict p;
        for (const auto& t : rep.tests) p[py::str(t.name)] = t.p_value;
        d["p_values"] = p;
        d["passed"] = rep.passed();
        return d;
      },
      py::arg("model"), py::arg("seed"), py::arg("blocks"));

  mod.def(
      "loynes_window",
      [](const MatchingModel& m, std::uint64_t seed, Pos begin, Pos end, Pos k0) {
        LoynesOptions o;
        o.window_begin = begin;
        o.window_end = end;
        o.k0 = k0;
        LoynesResult r = loynes_window(m, seed, o);
        std::vector<std::pair<Pos, Pos>> links;
        for (const Link& l : r.links) links.emplace_back(l.customer, l.server);
        py::dict d;
        d["links"] = links;
        d["k"] = r.k;
        d["regeneration"] = r.regeneration;
        return d;
      },
      py::arg("model"), py::arg("seed"), py::arg("begin") = 0, py::arg("end") = 100, py::arg("k0") = 64);
}
