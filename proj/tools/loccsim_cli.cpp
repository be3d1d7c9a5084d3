// Copyright 2026 The loccsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// loccsim command-line front end. Every subcommand builds a scenario from
// flags (optionally on top of a --scenario JSON file), runs it and prints
// result rows. Exit status: 0 all rows pass, 1 some row failed, 2 bad input.

#include "loccsim/loccsim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

using namespace loccsim;

// Flag values are copied into the override scenario only when given, so a
// flag beats the file and an absent flag leaves the file value alone.
class Binder {
 public:
  template <class T>
  void opt(CLI::App* sub, const std::string& name, std::optional<T>& dst, const std::string& help) {
    auto store = std::make_shared<T>();
    auto* o = sub->add_option(name, *store, help);
    hooks_.push_back([o, store, &dst] {
      if (o->count() > 0) dst = *store;
    });
  }

  template <class T>
  void list(CLI::App* sub, const std::string& name, std::vector<T>& dst, const std::string& help) {
    auto store = std::make_shared<std::vector<T>>();
    auto* o = sub->add_option(name, *store, help)->delimiter(',');
    hooks_.push_back([o, store, &dst] {
      if (o->count() > 0) dst = *store;
    });
  }

  void str(CLI::App* sub, const std::string& name, std::string& dst, const std::string& help) {
    auto store = std::make_shared<std::string>();
    auto* o = sub->add_option(name, *store, help);
    hooks_.push_back([o, store, &dst] {
      if (o->count() > 0) dst = *store;
    });
  }

  void apply() const {
    for (const auto& h : hooks_) h();
  }

 private:
  std::vector<std::function<void()>> hooks_;
};

struct Common {
  std::string scenario_file;
  std::string format;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  std::string dump_tree;
  std::string report;
  std::string edges;
};

std::vector<std::pair<int, int>> parse_edges(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw ScenarioError("edges", "expected a-b pairs, got '" + item + "'");
    try {
      out.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
    } catch (const std::exception&) {
      throw ScenarioError("edges", "expected a-b pairs, got '" + item + "'");
    }
  }
  return out;
}

BuiltProtocol protocol_for(const Scenario& s) {
  const auto& c = s.command;
  const std::string& p = s.protocol;
  if (c == "ghz") {
    const int n = s.n.value_or(0);
    const auto sizes = s.sizes.empty() ? std::vector<int>(static_cast<std::size_t>(std::max(n, 0)), 1) : s.sizes;
    if (p == "appendix-a") return appendix_a_protocol(n, s.order);
    if (p == "computational") return computational_protocol(ghz_basis(n, sizes));
    return ghz_partitioned_protocol(n, sizes);
  }
  if (c == "graph") return graph_decode_protocol(detail::make_graph(s)).protocol;
  if (c == "lattice") {
    const int n = s.n.value_or(0);
    const int m = s.m.value_or(0);
    return m == 0 ? computational_protocol(lattice_basis(n)) : lattice_partial_teleport(n, m);
  }
  if (c == "parametric") {
    const auto ens = parametric_basis(s.alpha.value_or(0.0), s.gamma.value_or(0.0));
    return p == "teleport" ? teleportation_protocol(ens, "A", "B") : computational_protocol(ens);
  }
  if (c == "example4") return p == "no-resource" ? computational_protocol(example4_ensemble()) : example4_protocol();
  throw ScenarioError("dump-tree", "no protocol tree for command '" + c + "'");
}

json problem_json(const JointProblem& p, const ProtocolTree& tree) {
  json layout = json::object();
  for (const auto& party : p.layout().parties()) layout[party.name] = party.subsystems;
  return json{{"dims", p.dims()}, {"layout", std::move(layout)}, {"tree", tree_to_json(tree)}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::uint64_t env_seed() {
  const char* v = std::getenv("LOCCSIM_SEED");
  if (v == nullptr || *v == '\0') return 1;
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ScenarioError("LOCCSIM_SEED", std::string("not an unsigned integer: '") + v + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local discrimination of quantum states with entanglement resources"};
  app.require_subcommand(1);
  Scenario over;
  Common common;
  Binder bind;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario_file, "JSON scenario file; flags override its fields");
    sub->add_option("--format", common.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    bind.opt(sub, "--seed", common.seed, "seed (default: $LOCCSIM_SEED or 1)");
    sub->add_flag("--timing", common.timing, "fill the ms column with wall time (breaks byte-identical output)");
    bind.str(sub, "--id", over.id, "scenario id");
  };

  auto* ghz = app.add_subcommand("ghz", "GHZ basis split among parties");
  add_common(ghz);
  bind.opt(ghz, "--n", over.n, "qubits");
  bind.list(ghz, "--sizes", over.sizes, "qubits per party, e.g. 2,2");
  bind.list(ghz, "--order", over.order, "measurement order for appendix-a, e.g. 2,0,1");
  bind.str(ghz, "--protocol", over.protocol, "partitioned, appendix-a or computational");
  bind.opt(ghz, "--expected", over.expected, "override expected fidelity");
  ghz->add_option("--dump-tree", common.dump_tree, "write the protocol tree as JSON");

  auto* graph = app.add_subcommand("graph", "graph-state basis with the conjugate graph state as resource");
  add_common(graph);
  bind.str(graph, "--shape", over.shape, "path, cycle, complete or star");
  bind.opt(graph, "--vertices", over.vertices, "vertex count");
  graph->add_option("--edges", common.edges, "explicit edges, e.g. 0-1,1-2");
  bind.str(graph, "--protocol", over.protocol, "decode");
  bind.opt(graph, "--expected", over.expected, "override expected fidelity");
  graph->add_option("--dump-tree", common.dump_tree, "write the protocol tree as JSON");

  auto* lattice = app.add_subcommand("lattice", "lattice states with m teleported pairs");
  add_common(lattice);
  bind.opt(lattice, "--n", over.n, "pairs");
  bind.opt(lattice, "--m", over.m, "teleported pairs (0: computational basis, no resource)");
  bind.opt(lattice, "--expected", over.expected, "override expected fidelity");
  lattice->add_option("--dump-tree", common.dump_tree, "write the protocol tree as JSON");

  auto* parametric = app.add_subcommand("parametric", "two-qubit basis parametrized by alpha, gamma");
  add_common(parametric);
  bind.opt(parametric, "--alpha", over.alpha, "alpha in [1/sqrt2, 1]");
  bind.opt(parametric, "--gamma", over.gamma, "gamma in [1/sqrt2, 1]");
  bind.str(parametric, "--protocol", over.protocol, "computational or teleport");
  bind.opt(parametric, "--expected", over.expected, "override expected fidelity");
  parametric->add_option("--dump-tree", common.dump_tree, "write the protocol tree as JSON");

  auto* ex4 = app.add_subcommand("example4", "four GHZ states with a Bell pair shared by B and C");
  add_common(ex4);
  bind.str(ex4, "--protocol", over.protocol, "full or no-resource");
  ex4->add_option("--dump-tree", common.dump_tree, "write the protocol tree as JSON");

  auto* oneway = app.add_subcommand("oneway", "one-way feasibility search for a resource spectrum");
  add_common(oneway);
  bind.str(oneway, "--ensemble", over.ensemble, "bell, computational or parametric");
  bind.list(oneway, "--lambdas", over.lambdas, "resource spectrum with trace d, e.g. 1.6,0.4");
  bind.opt(oneway, "--outcomes", over.outcomes, "K, between d^2 and 4 d^2");
  bind.opt(oneway, "--restarts", over.restarts, "restarts (default 50)");
  bind.opt(oneway, "--alpha", over.alpha, "alpha for the parametric ensemble");
  bind.opt(oneway, "--gamma", over.gamma, "gamma for the parametric ensemble");
  oneway->add_option("--report", common.report, "write a structured JSON report");

  auto* bounds = app.add_subcommand("bounds", "upper bounds and resource checks");
  add_common(bounds);
  bind.str(bounds, "--kind", over.kind, "mes, sep, entropy or vidal");
  bind.opt(bounds, "--k", over.k, "members (mes)");
  bind.opt(bounds, "--d", over.d, "local dimension (mes)");
  bind.opt(bounds, "--n", over.n, "qubits (sep, entropy)");
  bind.list(bounds, "--sizes", over.sizes, "qubits per party (sep, entropy)");
  bind.opt(bounds, "--alpha", over.alpha, "parametric alpha (sep)");
  bind.opt(bounds, "--gamma", over.gamma, "parametric gamma (sep)");
  bind.list(bounds, "--coefficients", over.coefficients, "squared Schmidt coefficients of the resource (vidal)");
  bind.opt(bounds, "--rank", over.rank, "target Schmidt rank (vidal)");
  bind.opt(bounds, "--expected", over.expected, "expected value");

  auto* run = app.add_subcommand("run", "run every scenario in a --scenario file");
  add_common(run);

  auto* suite = app.add_subcommand("paper-suite", "run the built-in verification battery");
  suite->add_option("--format", common.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  bind.opt(suite, "--seed", common.seed, "seed (default: $LOCCSIM_SEED or 1)");
  suite->add_flag("--timing", common.timing, "fill the ms column with wall time");

  CLI11_PARSE(app, argc, argv);

  try {
    bind.apply();
    if (!common.edges.empty()) over.edges = parse_edges(common.edges);
    CLI::App* chosen = app.get_subcommands().front();
    const std::string cmd = chosen->get_name();

    RunOptions opt;
    opt.seed = env_seed();
    opt.timing = common.timing;
    std::string format = "table";
    std::vector<Scenario> scenarios;

    if (cmd == "paper-suite") {
      scenarios = paper_suite_scenarios();
    } else {
      if (!common.scenario_file.empty()) {
        std::ifstream in(common.scenario_file);
        if (!in) throw ScenarioError("scenario", "cannot open '" + common.scenario_file + "'");
        json j;
        try {
          j = json::parse(in);
        } catch (const json::parse_error& e) {
          throw ScenarioError("scenario", std::string("parse failure: ") + e.what());
        }
        auto file = scenario_file_from_json(j);
        if (file.seed) opt.seed = *file.seed;
        if (!file.format.empty()) format = file.format;
        for (auto& s : file.scenarios) {
          if (cmd != "run" && s.command != cmd) {
            throw ScenarioError("command", "file scenario '" + s.id + "' is '" + s.command + "', not '" + cmd + "'");
          }
          Scenario o = over;
          o.command.clear();
          scenarios.push_back(merge_scenarios(std::move(s), o));
        }
      } else {
        if (cmd == "run") throw ScenarioError("scenario", "run needs --scenario");
        over.command = cmd;
        if (over.id.empty()) over.id = cmd;
        scenarios.push_back(over);
      }
    }
    if (common.seed) opt.seed = *common.seed;
    if (!common.format.empty()) format = common.format;

    std::vector<ResultRow> rows;
    for (const auto& s : scenarios) rows.push_back(run_scenario(s, opt));

    if (!common.dump_tree.empty()) {
      if (scenarios.size() != 1) throw ScenarioError("dump-tree", "needs exactly one scenario");
      const auto p = protocol_for(scenarios.front());
      write_file(common.dump_tree, problem_json(p.problem, p.tree).dump(1) + "\n");
    }
    if (!common.report.empty()) {
      json reports = json::array();
      for (const auto& s : scenarios) reports.push_back(oneway_report(s, opt));
      write_file(common.report, (reports.size() == 1 ? reports[0] : reports).dump(2) + "\n");
    }

    std::cout << emit(rows, format);
    bool all = true;
    for (const auto& r : rows) all = all && r.pass;
    return all ? 0 : 1;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
