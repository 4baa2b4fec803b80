#include "fcfs/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcfs/analytic.hpp"
#include "fcfs/chains.hpp"
#include "fcfs/model.hpp"
#include "fcfs/rng.hpp"
#include "fcfs/sim.hpp"

namespace fcfs {

namespace {

using nlohmann::json;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Exit 1. A report, when present, is still written out.
struct Failure : std::runtime_error {
  explicit Failure(const std::string& msg, std::string report = {})
      : std::runtime_error(msg), report(std::move(report)) {}
  std::string report;
};

struct Options {
  std::string model;
  std::string what = "B";
  std::string chain;
  std::string server;
  std::string customer;
  std::string out;
  std::string format = "csv";
  std::string form = "derived";
  long cycles = 10000;
  long steps = 0;
  std::uint64_t seed = 1;
  int max_len = 4;
  int threads = 0;
};

std::string num(double x) { return fmt::format("{}", x); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string seed_header(std::uint64_t seed) {
  return fmt::format("# seed={} generator={}\n", seed, kGeneratorName);
}

MatchingModel load(const Options& o) {
  try {
    return load_model_file(o.model);
  } catch (const ModelError& e) {
    throw InputError(e.what());
  }
}

int server_arg(const MatchingModel& m, const std::string& label) {
  auto j = m.server_index(label);
  if (!j) throw InputError("unknown server type '" + label + "'");
  return *j;
}

std::optional<int> customer_arg(const MatchingModel& m, const std::string& label) {
  if (label.empty()) return std::nullopt;
  auto i = m.customer_index(label);
  if (!i) throw InputError("unknown customer type '" + label + "'");
  return *i;
}

std::string subset_text(const MatchingModel& m, const TypeSubset& s) {
  std::string t = "{";
  auto labels = subset_labels(m, s);
  for (std::size_t k = 0; k < labels.size(); ++k) t += (k ? "," : "") + labels[k];
  return t + "}";
}

void require_crp(const MatchingModel& m) {
  CrpReport r = check_crp(m);
  if (!r.holds)
    throw Failure("complete resource pooling fails at " + subset_text(m, r.violations.front().subset));
}

StationaryEvaluator evaluator(const MatchingModel& m, const Options& o) {
  require_crp(m);
  EvaluatorOptions eo;
  eo.threads = o.threads;
  try {
    StationaryEvaluator ev(m, eo);
    if (!ev.finite()) throw Failure("normalizing constant diverges");
    return ev;
  } catch (const PermutationCapError& e) {
    throw Failure(e.what());
  }
}

std::string cmd_check(const Options& o) {
  MatchingModel m = load(o);
  CrpReport r = check_crp(m);
  std::string text;
  if (o.format == "json") {
    json doc;
    doc["customers"] = m.num_customers();
    doc["servers"] = m.num_servers();
    doc["edges"] = m.edges().size();
    doc["crp"] = r.holds;
    doc["margin"] = r.margin;
    doc["tightest"] = subset_labels(m, r.tightest);
    doc["violations"] = json::array();
    for (const auto& v : r.violations)
      doc["violations"].push_back({{"subset", subset_labels(m, v.subset)}, {"beta", v.lhs}, {"alpha_unique", v.rhs}});
    text = doc.dump(2) + "\n";
  } else {
    text += fmt::format("model: {} customer types, {} server types, {} edges\n", m.num_customers(),
                        m.num_servers(), m.edges().size());
    text += fmt::format("crp: {}\n", r.holds ? "holds" : "violated");
    text += fmt::format("margin: {} at {}\n", num(r.margin), subset_text(m, r.tightest));
    for (const auto& v : r.violations)
      text += fmt::format("violation: {} beta={} alpha_unique={}\n", subset_text(m, v.subset), num(v.lhs),
                          num(v.rhs));
  }
  if (!r.holds) throw Failure("complete resource pooling fails", text);
  return text;
}

std::string solve_b(const StationaryEvaluator& ev, const Options& o) {
  if (o.format == "json") return json{{"B", ev.B()}, {"Bs", ev.Bs()}}.dump(2) + "\n";
  return fmt::format("quantity,value\nB,{}\nBs,{}\n", num(ev.B()), num(ev.Bs()));
}

std::string solve_pi(const StationaryEvaluator& ev, const Options& o) {
  const MatchingModel& m = ev.model();
  ChainKind kind;
  try {
    kind = parse_chain_kind(o.chain.empty() ? "zs" : o.chain);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::vector<ChainState> states;
  try {
    states = enumerate_states(m, kind, o.max_len);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const bool natural = kind == ChainKind::Qs || kind == ChainKind::Qc || kind == ChainKind::O;
  json rows = json::array();
  std::string text = "state,length,probability\n";
  for (const ChainState& s : states) {
    double p = natural ? pi_natural(ev, kind, s) : pi_detailed(ev, kind, s);
    std::string label = format_state(m, kind, s);
    if (o.format == "json")
      rows.push_back({{"state", label}, {"length", s.length()}, {"probability", p}});
    else
      text += fmt::format("{},{},{}\n", csv_quote(label), s.length(), num(p));
  }
  if (o.format == "json")
    return json{{"chain", chain_kind_name(kind)}, {"max_len", o.max_len}, {"states", rows}}.dump(2) + "\n";
  return text;
}

std::string solve_rates(const StationaryEvaluator& ev, const Options& o) {
  const MatchingModel& m = ev.model();
  RateMatrix r = matching_rates(ev);
  if (o.format == "json") {
    json doc;
    doc["customers"] = m.customer_names();
    doc["servers"] = m.server_names();
    json rows = json::array();
    for (int i = 0; i < r.customers; ++i) {
      json row = json::array();
      for (int j = 0; j < r.servers; ++j) row.push_back(r.at(i, j));
      rows.push_back(row);
    }
    doc["rates"] = rows;
    return doc.dump(2) + "\n";
  }
  std::string text = "customer";
  for (int j = 0; j < r.servers; ++j) text += "," + csv_quote(m.server_name(j));
  text += "\n";
  for (int i = 0; i < r.customers; ++i) {
    text += csv_quote(m.customer_name(i));
    for (int j = 0; j < r.servers; ++j) text += "," + num(r.at(i, j));
    text += "\n";
  }
  return text;
}

ConditionalForm form_arg(const std::string& f) {
  if (f == "derived") return ConditionalForm::Derived;
  if (f == "printed") return ConditionalForm::Printed;
  throw InputError("unknown --form '" + f + "' (derived|printed)");
}

std::string solve_linklen(const StationaryEvaluator& ev, const Options& o) {
  const MatchingModel& m = ev.model();
  if (o.server.empty()) throw InputError("--what linklen needs --server");
  int j = server_arg(m, o.server);
  std::optional<int> i = customer_arg(m, o.customer);
  if (i && !m.compatible(*i, j)) throw InputError("customer and server types are incompatible");
  SignedGeometricMixture mix;
  try {
    mix = link_length_distribution(ev, j, i, form_arg(o.form)).normalized();
  } catch (const PermutationCapError& e) {
    throw Failure(e.what());
  }
  PmfTable t = mix.pmf_table();
  if (o.format == "json") {
    json pmf = json::array();
    for (std::size_t k = 0; k < t.values.size(); ++k)
      pmf.push_back({{"k", t.lo + static_cast<long>(k)}, {"pmf", t.values[k]}});
    json doc{{"server", m.server_name(j)}, {"mean", mix.mean()}, {"truncated", t.truncated}, {"pmf", pmf}};
    if (i) doc["customer"] = m.customer_name(*i);
    return doc.dump(2) + "\n";
  }
  std::string text = "k,pmf\n";
  for (std::size_t k = 0; k < t.values.size(); ++k)
    text += fmt::format("{},{}\n", t.lo + static_cast<long>(k), num(t.values[k]));
  return text;
}

std::string cmd_solve(const Options& o) {
  MatchingModel m = load(o);
  if (o.what != "B" && o.what != "pi" && o.what != "rates" && o.what != "linklen")
    throw InputError("unknown --what '" + o.what + "' (B|pi|rates|linklen)");
  StationaryEvaluator ev = evaluator(m, o);
  if (o.what == "B") return solve_b(ev, o);
  if (o.what == "pi") return solve_pi(ev, o);
  if (o.what == "rates") return solve_rates(ev, o);
  return solve_linklen(ev, o);
}

std::string match_log(const MatchingModel& m, const Options& o, bool crp, std::string& warn) {
  DrivingSequence seq(m, o.seed);
  PairwiseMatcher pm(m, seq, 0);
  std::vector<MatchRecord> recs;
  long cycles = 0;
  if (o.steps > 0) {
    for (long k = 0; k < o.steps; ++k) cycles += pm.advance(&recs) ? 1 : 0;
  } else {
    if (!crp) throw Failure("complete resource pooling fails: pass --steps to simulate a fixed number of pairs");
    while (cycles < o.cycles) cycles += pm.advance(&recs) ? 1 : 0;
  }
  if (!crp) warn = "warning: complete resource pooling fails; the run is transient";
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& r : recs)
      rows.push_back({{"m", r.customer_pos}, {"n", r.server_pos}, {"customer", m.customer_name(r.customer)},
                      {"server", m.server_name(r.server)}, {"length", r.length()}});
    return json{{"seed", o.seed}, {"generator", kGeneratorName}, {"crp", crp}, {"pairs", pm.position()},
                {"cycles", cycles}, {"unmatched", pm.backlog()}, {"matches", rows}}
               .dump(2) + "\n";
  }
  std::string text = seed_header(o.seed);
  if (!crp) text += "# crp=violated\n";
  text += fmt::format("# pairs={} cycles={} unmatched={}\n", pm.position(), cycles, pm.backlog());
  text += "m,n,customer,server,length\n";
  for (const auto& r : recs)
    text += fmt::format("{},{},{},{},{}\n", r.customer_pos, r.server_pos, csv_quote(m.customer_name(r.customer)),
                        csv_quote(m.server_name(r.server)), r.length());
  return text;
}

std::string occupancy_table(const MatchingModel& m, ChainKind kind, const Options& o, bool crp, std::string& warn) {
  long steps = o.steps > 0 ? o.steps : o.cycles;
  ChainRun run = simulate_chain(m, kind, steps, o.seed, o.max_len);
  if (!crp) warn = "warning: complete resource pooling fails; the run is transient";
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& [s, v] : run.occupancy)
      rows.push_back({{"state", format_state(m, kind, s)}, {"visits", v},
                      {"fraction", static_cast<double>(v) / static_cast<double>(steps)}});
    return json{{"seed", o.seed},
                {"generator", kGeneratorName},
                {"chain", chain_kind_name(kind)},
                {"crp", crp},
                {"steps", steps},
                {"empty_visits", run.empty_visits},
                {"last_empty_step", run.last_empty_step},
                {"max_length", run.max_length},
                {"final_state", format_state(m, kind, run.final_state)},
                {"occupancy", rows}}
               .dump(2) + "\n";
  }
  std::string text = seed_header(o.seed);
  if (!crp) text += "# crp=violated\n";
  text += fmt::format("# chain={} steps={} empty_visits={} last_empty_step={} max_length={} final_length={}\n",
                      chain_kind_name(kind), steps, run.empty_visits, run.last_empty_step, run.max_length,
                      run.final_state.length());
  text += "state,visits,fraction\n";
  for (const auto& [s, v] : run.occupancy)
    text += fmt::format("{},{},{}\n", csv_quote(format_state(m, kind, s)), v,
                        num(static_cast<double>(v) / static_cast<double>(steps)));
  return text;
}

std::string cmd_simulate(const Options& o, std::string& warn) {
  MatchingModel m = load(o);
  ChainKind kind;
  try {
    kind = parse_chain_kind(o.chain.empty() ? "o" : o.chain);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (!has_kernel(kind)) throw InputError(std::string(chain_kind_name(kind)) + " has no simulation kernel");
  const bool crp = check_crp(m).holds;
  if (kind == ChainKind::O) return match_log(m, o, crp, warn);
  return occupancy_table(m, kind, o, crp, warn);
}

struct Row {
  std::string quantity;
  double analytic = 0.0;
  Estimate empirical;
  double z = 0.0;
  bool exact = false;
  bool ok = true;
};

Row stat_row(std::string q, double analytic, Estimate e) {
  Row r{std::move(q), analytic, e, z_score(analytic, e), false, true};
  r.ok = std::abs(r.z) <= 4.0;
  return r;
}

std::string cmd_compare(const Options& o) {
  MatchingModel m = load(o);
  StationaryEvaluator ev = evaluator(m, o);
  if (m.num_servers() > kMixtureCap)
    throw Failure("link-length comparison needs at most " + std::to_string(kMixtureCap) + " server types");
  RegenerationReport rep = regeneration_estimates(m, o.seed, o.cycles);
  RateMatrix rates = matching_rates(ev);
  const int I = m.num_customers(), J = m.num_servers();

  std::vector<Row> rows;
  rows.push_back(stat_row("pi_O(empty)", ev.B(), rep.pi_empty));
  rows.push_back(stat_row("mean_cycle_length", 1.0 / ev.B(), rep.mean_cycle_length));
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j) {
      std::string q = fmt::format("rate({},{})", m.customer_name(i), m.server_name(j));
      if (m.compatible(i, j)) {
        rows.push_back(stat_row(q, rates.at(i, j), rep.rate(i, j)));
      } else {
        Row r{q, 0.0, rep.rate(i, j), 0.0, true, rep.match_counts[static_cast<std::size_t>(i) * J + j] == 0};
        rows.push_back(r);
      }
    }
  auto bins = [&](const std::string& prefix, const SignedGeometricMixture& mix, const std::map<long, Estimate>& emp,
                  long matches) {
    PmfTable t = mix.normalized().pmf_table();
    for (std::size_t k = 0; k < t.values.size(); ++k) {
      const long len = t.lo + static_cast<long>(k);
      if (t.values[k] * static_cast<double>(matches) < 100.0) continue;
      auto it = emp.find(len);
      rows.push_back(stat_row(fmt::format("{}={}", prefix, len), t.values[k], it == emp.end() ? Estimate{} : it->second));
    }
  };
  for (int j = 0; j < J; ++j) {
    bins(fmt::format("linklen({})", m.server_name(j)), link_length_distribution(ev, j), rep.link_pmf[j],
         rep.server_matches[j]);
    for (int i = 0; i < I; ++i) {
      if (!m.compatible(i, j)) continue;
      const std::size_t ij = static_cast<std::size_t>(i) * J + j;
      bins(fmt::format("linklen({},{})", m.customer_name(i), m.server_name(j)), link_length_distribution(ev, j, i),
           rep.pair_link_pmf[ij], rep.match_counts[ij]);
    }
  }

  const Row* first_fail = nullptr;
  for (const Row& r : rows)
    if (!r.ok && !first_fail) first_fail = &r;
  auto status = [](const Row& r) { return r.ok ? (r.exact ? "exact" : "ok") : "FAIL"; };

  std::string text;
  if (o.format == "json") {
    json jr = json::array();
    for (const Row& r : rows)
      jr.push_back({{"quantity", r.quantity}, {"analytic", r.analytic}, {"empirical", r.empirical.value},
                    {"std_error", r.empirical.se}, {"z", std::isfinite(r.z) ? json(r.z) : json(nullptr)},
                    {"status", status(r)}});
    text = json{{"seed", o.seed}, {"generator", kGeneratorName}, {"cycles", rep.cycles}, {"pairs", rep.pairs},
                {"passed", first_fail == nullptr}, {"rows", jr}}
               .dump(2) + "\n";
  } else {
    text = seed_header(o.seed);
    text += fmt::format("# cycles={} pairs={}\n", rep.cycles, rep.pairs);
    text += "quantity,analytic,empirical,std_error,z,status\n";
    for (const Row& r : rows)
      text += fmt::format("{},{},{},{},{},{}\n", csv_quote(r.quantity), num(r.analytic), num(r.empirical.value),
                          num(r.empirical.se), num(r.z), status(r));
  }
  if (first_fail) {
    throw Failure(fmt::format("first failing row: {} analytic={} empirical={} z={}", first_fail->quantity,
                              num(first_fail->analytic), num(first_fail->empirical.value), num(first_fail->z)),
                  text);
  }
  return text;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InputError("cannot write '" + o.out + "'");
  f << text;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("model", o.model, "model file (JSON)")->required();
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out, "output file (default stdout)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"FCFS infinite bipartite matching: exact solves, simulation and comparison", "fcfs"};
  app.require_subcommand(1, 1);

  auto* check = app.add_subcommand("check", "validate a model and test complete resource pooling");
  add_common(check, o);

  auto* solve = app.add_subcommand("solve", "exact stationary quantities");
  add_common(solve, o);
  solve->add_option("--what", o.what, "B, pi, rates or linklen");
  solve->add_option("--chain", o.chain, "chain for --what pi (zs, zc, d, e, qs, qc, o, zs-augmented, zs-outer)");
  solve->add_option("--max-len", o.max_len, "state length cap for --what pi")->check(CLI::Range(0, kEnumerationCap));
  solve->add_option("--server", o.server, "server type for --what linklen");
  solve->add_option("--customer", o.customer, "condition the link length on this customer type");
  solve->add_option("--form", o.form, "conditional link-length form: derived or printed");
  solve->add_option("--threads", o.threads, "worker threads for permutation sums (0: all)")->check(CLI::NonNegativeNumber);

  auto* simulate = app.add_subcommand("simulate", "seeded simulation: O match log, or occupancy of another chain");
  add_common(simulate, o);
  simulate->add_option("--chain", o.chain, "chain to run (default o)");
  simulate->add_option("--cycles", o.cycles, "regeneration cycles")->check(CLI::PositiveNumber);
  simulate->add_option("--steps", o.steps, "fixed number of steps instead of cycles")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "seed");
  simulate->add_option("--max-len", o.max_len, "state length cap for occupancy tables")->check(CLI::NonNegativeNumber);

  auto* compare = app.add_subcommand("compare", "analytic values against regeneration estimates");
  add_common(compare, o);
  compare->add_option("--cycles", o.cycles, "regeneration cycles")->check(CLI::PositiveNumber);
  compare->add_option("--seed", o.seed, "seed");
  compare->add_option("--threads", o.threads, "worker threads for permutation sums (0: all)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::string warn;
  try {
    std::string text;
    if (check->parsed()) text = cmd_check(o);
    else if (solve->parsed()) text = cmd_solve(o);
    else if (simulate->parsed()) text = cmd_simulate(o, warn);
    else text = cmd_compare(o);
    emit(o, text, out);
    if (!warn.empty()) err << warn << "\n";
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Failure& e) {
    if (!e.report.empty()) {
      try {
        emit(o, e.report, out);
      } catch (const InputError& e2) {
        err << "error: " << e2.what() << "\n";
        return kExitInput;
      }
    }
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace fcfs
