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

#pragma once

// Scenarios: a family + protocol + parameters, run to result rows with the
// fixed columns scenario, family, protocol, fidelity, bound, expected,
// status, ms. The CLI is a thin shell over this header.

#include "loccsim/oneway.hpp"
#include "loccsim/protocol_json.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace loccsim {

/// Parse or precondition failure tied to one scenario field.
class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(std::string field, const std::string& what)
      : std::invalid_argument("field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Scenario {
  std::string id;
  std::string command;   // ghz graph lattice parametric example4 oneway bounds crosscheck
  std::string protocol;  // empty = command default
  std::optional<int> n, m, vertices, outcomes, restarts, k, d, rank;
  std::vector<int> sizes, order;
  std::optional<double> alpha, gamma, expected;
  std::string shape, ensemble, kind;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> lambdas, coefficients;
  std::optional<std::uint64_t> seed;
};

struct ResultRow {
  std::string scenario, family, protocol;
  double fidelity = 0.0;
  std::string bound, expected;
  bool pass = false;
  long long ms = 0;
};

struct RunOptions {
  std::uint64_t seed = 1;
  bool timing = false;  // off: ms column is 0 so output stays byte-identical
};

/// 12 significant digits.
inline std::string fmt(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON scenario schema

namespace detail {

template <class T>
T field(const json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(name, e.what());
  }
}

template <class T>
void maybe(const json& j, const char* name, std::optional<T>& out) {
  if (j.contains(name)) out = field<T>(j, name);
}

template <class T>
void maybe(const json& j, const char* name, std::vector<T>& out) {
  if (j.contains(name)) out = field<std::vector<T>>(j, name);
}

inline void maybe(const json& j, const char* name, std::string& out) {
  if (j.contains(name)) out = field<std::string>(j, name);
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario", "expected an object");
  static const std::set<std::string> known{"id",      "command", "protocol", "n",     "m",        "vertices", "outcomes",
                                           "restarts", "k",      "d",        "rank",  "sizes",    "order",    "alpha",
                                           "gamma",   "expected", "shape",   "ensemble", "kind",  "edges",    "lambdas",
                                           "coefficients", "seed"};
  for (const auto& [key, v] : j.items()) {
    if (!known.count(key)) throw ScenarioError(key, "unknown field");
  }
  Scenario s;
  s.command = detail::field<std::string>(j, "command");
  detail::maybe(j, "id", s.id);
  detail::maybe(j, "protocol", s.protocol);
  detail::maybe(j, "n", s.n);
  detail::maybe(j, "m", s.m);
  detail::maybe(j, "vertices", s.vertices);
  detail::maybe(j, "outcomes", s.outcomes);
  detail::maybe(j, "restarts", s.restarts);
  detail::maybe(j, "k", s.k);
  detail::maybe(j, "d", s.d);
  detail::maybe(j, "rank", s.rank);
  detail::maybe(j, "sizes", s.sizes);
  detail::maybe(j, "order", s.order);
  detail::maybe(j, "alpha", s.alpha);
  detail::maybe(j, "gamma", s.gamma);
  detail::maybe(j, "expected", s.expected);
  detail::maybe(j, "shape", s.shape);
  detail::maybe(j, "ensemble", s.ensemble);
  detail::maybe(j, "kind", s.kind);
  detail::maybe(j, "lambdas", s.lambdas);
  detail::maybe(j, "coefficients", s.coefficients);
  detail::maybe(j, "seed", s.seed);
  if (j.contains("edges")) {
    for (const auto& e : detail::field<std::vector<std::vector<int>>>(j, "edges")) {
      if (e.size() != 2) throw ScenarioError("edges", "each edge must be a pair [a, b]");
      s.edges.emplace_back(e[0], e[1]);
    }
  }
  return s;
}

/// A file holds one scenario object or {"scenarios": [...]} (plus optional
/// "seed" and "format" defaults).
struct ScenarioFile {
  std::vector<Scenario> scenarios;
  std::optional<std::uint64_t> seed;
  std::string format;
};

inline ScenarioFile scenario_file_from_json(const json& j) {
  ScenarioFile f;
  if (j.is_object() && j.contains("scenarios")) {
    if (!j.at("scenarios").is_array()) throw ScenarioError("scenarios", "expected an array");
    for (const auto& s : j.at("scenarios")) f.scenarios.push_back(scenario_from_json(s));
    detail::maybe(j, "seed", f.seed);
    detail::maybe(j, "format", f.format);
    for (const auto& [key, v] : j.items()) {
      if (key != "scenarios" && key != "seed" && key != "format") throw ScenarioError(key, "unknown field");
    }
  } else {
    f.scenarios.push_back(scenario_from_json(j));
  }
  return f;
}

/// Non-empty fields of `over` replace those of `base`.
inline Scenario merge_scenarios(Scenario base, const Scenario& over) {
  auto take = [](auto& dst, const auto& src) {
    using T = std::decay_t<decltype(src)>;
    if constexpr (std::is_same_v<T, std::string>) {
      if (!src.empty()) dst = src;
    } else if constexpr (requires { src.has_value(); }) {
      if (src.has_value()) dst = src;
    } else {
      if (!src.empty()) dst = src;
    }
  };
  take(base.id, over.id);
  take(base.command, over.command);
  take(base.protocol, over.protocol);
  take(base.n, over.n);
  take(base.m, over.m);
  take(base.vertices, over.vertices);
  take(base.outcomes, over.outcomes);
  take(base.restarts, over.restarts);
  take(base.k, over.k);
  take(base.d, over.d);
  take(base.rank, over.rank);
  take(base.sizes, over.sizes);
  take(base.order, over.order);
  take(base.alpha, over.alpha);
  take(base.gamma, over.gamma);
  take(base.expected, over.expected);
  take(base.shape, over.shape);
  take(base.ensemble, over.ensemble);
  take(base.kind, over.kind);
  take(base.edges, over.edges);
  take(base.lambdas, over.lambdas);
  take(base.coefficients, over.coefficients);
  take(base.seed, over.seed);
  return base;
}

// ---------------------------------------------------------------------------
// Execution

namespace detail {

inline bool close(double a, double b) { return std::abs(a - b) <= 1e-9; }

template <class T>
T require(const std::optional<T>& v, const char* name) {
  if (!v) throw ScenarioError(name, "required");
  return *v;
}

inline std::string join(const std::vector<int>& v, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
  return out;
}

inline std::vector<int> ghz_sizes(const Scenario& s, int n) {
  if (n < 2) throw ScenarioError("n", "must be >= 2");
  if (n > 6) throw ScenarioError("n", "must be <= 6 (dense simulation)");
  if (s.sizes.empty()) return std::vector<int>(static_cast<std::size_t>(n), 1);
  int sum = 0;
  for (int x : s.sizes) {
    if (x < 1) throw ScenarioError("sizes", "every party needs at least one qubit");
    sum += x;
  }
  if (sum != n) throw ScenarioError("sizes", "must sum to n");
  if (s.sizes.size() < 2) throw ScenarioError("sizes", "need at least two parties");
  return s.sizes;
}

/// Min over party bipartitions of the Schmidt-coefficient bound.
inline double sep_min_bound(const Ensemble& ens) {
  std::map<std::string, double> b;
  for (const auto& pc : all_party_cuts(ens.layout())) b[pc.label()] = schmidt_coeff_sep_bound(ens, pc);
  return bipartition_min_bound(b);
}

/// Surviving-member counts required after Bell round j of the sequential
/// scheme: 2^(N-j+1) for 2 <= j < N, and a single member once the last
/// party has measured.
inline bool elimination_schedule_holds(const RunResult& r, int n) {
  for (const auto& b : r.branches) {
    const int j = b.measurement_rounds;
    if (j < 2) continue;
    const std::size_t want = j >= n ? 1 : std::size_t{1} << (n - j + 1);
    if (b.survivors.size() != want) return false;
  }
  return true;
}

inline std::string graph_label(const Scenario& s) {
  if (!s.shape.empty()) return s.shape + "(" + std::to_string(s.vertices.value_or(0)) + ")";
  std::string e;
  for (auto [a, b] : s.edges) e += (e.empty() ? "" : ",") + std::to_string(a) + "-" + std::to_string(b);
  return "graph(" + std::to_string(s.vertices.value_or(0)) + ";" + e + ")";
}

inline Graph make_graph(const Scenario& s) {
  const int v = require(s.vertices, "vertices");
  if (v < 2) throw ScenarioError("vertices", "must be >= 2");
  if (v > 5) throw ScenarioError("vertices", "must be <= 5 (dense simulation)");
  if (s.shape.empty()) return Graph(v, s.edges);
  if (!s.edges.empty()) throw ScenarioError("edges", "give either shape or edges, not both");
  if (s.shape == "path") return Graph::path(v);
  if (s.shape == "cycle") {
    if (v < 3) throw ScenarioError("vertices", "a cycle needs >= 3 vertices");
    return Graph::cycle(v);
  }
  if (s.shape == "complete") return Graph::complete(v);
  if (s.shape == "star") return Graph::star(v);
  throw ScenarioError("shape", "unknown shape '" + s.shape + "' (path, cycle, complete, star)");
}

/// Runs `p` directly, through the flattened POVM, and under a coarser
/// layout (first two parties merged, or everything merged when bipartite).
struct CrossCheck {
  double run = 0.0;
  double flat = 0.0;
  double coarse = 0.0;
};

inline CrossCheck cross_check(const BuiltProtocol& p, bool flatten) {
  CrossCheck c;
  c.run = p.fidelity();
  if (flatten) {
    const auto fp = flatten_to_povm(p.problem, p.tree);
    c.flat = average_fidelity(p.problem.joint(), fp.povm, fp.guesses);
  } else {
    c.flat = c.run;
  }
  const auto names = p.problem.layout().names();
  std::map<std::string, std::string> g;
  for (const auto& nm : names) g[nm] = nm;
  g[names[0]] = names[0] + names[1];
  g[names[1]] = names[0] + names[1];
  const auto coarse = p.problem.coarsened(g);
  const auto tree = coarsen_tree(p.tree, g);
  validate_tree(tree, coarse);
  c.coarse = run_protocol(coarse, tree).fidelity;
  return c;
}

inline ResultRow timed(const RunOptions& opt, const std::function<ResultRow()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRow r = body();
  if (opt.timing) {
    r.ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  }
  return r;
}

inline ResultRow run_ghz(const Scenario& s) {
  const int n = require(s.n, "n");
  const auto sizes = ghz_sizes(s, n);
  const std::string proto = s.protocol.empty() ? "partitioned" : s.protocol;
  ResultRow row{s.id, "ghz_basis(" + std::to_string(n) + ";" + join(sizes) + ")", proto};
  if (proto == "computational") {
    const auto ens = ghz_basis(n, sizes);
    row.fidelity = computational_protocol(ens).fidelity();
    const double bound = sep_min_bound(ens);
    const double want = s.expected.value_or(0.5);
    row.bound = fmt(bound);
    row.expected = fmt(want);
    row.pass = close(row.fidelity, want) && row.fidelity <= bound + 1e-9;
    return row;
  }
  bool schedule_ok = true;
  if (proto == "appendix-a") {
    for (int x : sizes) {
      if (x != 1) throw ScenarioError("sizes", "appendix-a needs one qubit per party");
    }
    const auto p = appendix_a_protocol(n, s.order);
    const auto r = p.run();
    row.fidelity = r.fidelity;
    schedule_ok = elimination_schedule_holds(r, n);
    if (!s.order.empty()) row.protocol += "[" + join(s.order) + "]";
  } else if (proto == "partitioned") {
    row.fidelity = ghz_partitioned_protocol(n, sizes).fidelity();
  } else {
    throw ScenarioError("protocol", "unknown ghz protocol '" + proto + "' (partitioned, appendix-a, computational)");
  }
  const double want = s.expected.value_or(1.0);
  row.bound = "n/a (perfect)";
  row.expected = fmt(want);
  row.pass = close(row.fidelity, want) && schedule_ok;
  return row;
}

inline ResultRow run_graph(const Scenario& s) {
  const Graph g = make_graph(s);
  const std::string proto = s.protocol.empty() ? "decode" : s.protocol;
  if (proto != "decode") throw ScenarioError("protocol", "unknown graph protocol '" + proto + "' (decode)");
  const auto gp = graph_decode_protocol(g);
  ResultRow row{s.id, graph_label(s), proto};
  row.fidelity = gp.protocol.fidelity();
  // each member must be hit by exactly 2^N outcome tuples
  const int n = g.vertex_count();
  std::vector<std::size_t> hits(gp.protocol.problem.ensemble().size(), 0);
  for (auto x : gp.decode_table) ++hits[x];
  bool multiplicity_ok = true;
  for (auto h : hits) multiplicity_ok = multiplicity_ok && h == (std::size_t{1} << n);
  const double want = s.expected.value_or(1.0);
  row.bound = "n/a (perfect)";
  row.expected = fmt(want);
  row.pass = close(row.fidelity, want) && multiplicity_ok;
  return row;
}

inline ResultRow run_lattice(const Scenario& s) {
  const int n = require(s.n, "n");
  const int m = s.m.value_or(0);
  if (n < 1 || n > 3) throw ScenarioError("n", "must satisfy 1 <= n <= 3");
  if (m < 0 || m > n) throw ScenarioError("m", "must satisfy 0 <= m <= n");
  ResultRow row{s.id, "lattice_basis(" + std::to_string(n) + ")", m == 0 ? "computational" : "partial-teleport(m=" + std::to_string(m) + ")"};
  row.fidelity = m == 0 ? computational_protocol(lattice_basis(n)).fidelity() : lattice_partial_teleport(n, m).fidelity();
  // d/k on the resource-free problem, k = 4^n members of local dimension 2^n
  const double bound = mes_bound(std::size_t{1} << (2 * n), std::size_t{1} << n);
  const double want = s.expected.value_or(std::ldexp(1.0, m - n));
  row.bound = fmt(bound);
  row.expected = fmt(want);
  row.pass = close(row.fidelity, want) && (m > 0 || row.fidelity <= bound + 1e-9);
  return row;
}

inline ResultRow run_parametric(const Scenario& s) {
  const double a = require(s.alpha, "alpha");
  const double c = require(s.gamma, "gamma");
  Ensemble ens = [&] {
    try {
      return parametric_basis(a, c);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("alpha", e.what());
    }
  }();
  const std::string proto = s.protocol.empty() ? "computational" : s.protocol;
  ResultRow row{s.id, "parametric_basis(" + fmt(a) + "," + fmt(c) + ")", proto};
  double want = 0.0;
  if (proto == "computational") {
    row.fidelity = optimal_guess(ens, Povm::computational(ens.dims())).fidelity;
    want = (a * a + c * c) / 2.0;
  } else if (proto == "teleport") {
    row.fidelity = teleportation_protocol(ens, "A", "B").fidelity();
    want = 1.0;
  } else {
    throw ScenarioError("protocol", "unknown parametric protocol '" + proto + "' (computational, teleport)");
  }
  want = s.expected.value_or(want);
  row.bound = "n/a";
  row.expected = fmt(want);
  row.pass = close(row.fidelity, want);
  return row;
}

inline ResultRow run_example4(const Scenario& s) {
  const std::string proto = s.protocol.empty() ? "full" : s.protocol;
  ResultRow row{s.id, "ghz_subset(4 of 8)", proto};
  double want = 0.0;
  if (proto == "full") {
    row.fidelity = example4_protocol().fidelity();
    Party b{"B", {0}}, c{"C", {1}};
    const auto rep = entropy_bound_check(bell_states()[0], PartyLayout({b, c}, 2), example4_ensemble());
    row.bound = rep.pass ? "entropy ok" : "entropy violated";
    want = 1.0;
    row.pass = rep.pass;
  } else if (proto == "no-resource") {
    row.fidelity = computational_protocol(example4_ensemble()).fidelity();
    row.bound = "n/a";
    want = 0.5;
    row.pass = true;
  } else {
    throw ScenarioError("protocol", "unknown example4 protocol '" + proto + "' (full, no-resource)");
  }
  want = s.expected.value_or(want);
  row.expected = fmt(want);
  row.pass = row.pass && close(row.fidelity, want);
  return row;
}

inline Ensemble oneway_ensemble(const Scenario& s) {
  const std::string e = s.ensemble.empty() ? "bell" : s.ensemble;
  if (e == "bell") return bell_basis();
  if (e == "parametric") return parametric_basis(require(s.alpha, "alpha"), require(s.gamma, "gamma"));
  if (e == "computational") {
    std::vector<StateVector> v;
    for (int i = 0; i < 4; ++i) v.push_back(StateVector::basis(Dims{2, 2}, static_cast<std::size_t>(i)));
    return Ensemble::equiprobable(PartyLayout::one_per_party(2), v);
  }
  throw ScenarioError("ensemble", "unknown ensemble '" + e + "' (bell, parametric, computational)");
}

struct OnewayRun {
  ResultRow row;
  FeasibilityResult result;
  std::vector<double> lambdas;
};

/// The numeric column holds the best residual. Expected: < 1e-6 when the
/// spectrum is flat or no member has full rank, > 1e-2 otherwise.
inline OnewayRun run_oneway(const Scenario& s, const RunOptions& opt) {
  const auto ens = oneway_ensemble(s);
  const auto rep = to_matrix_rep(ens);
  std::vector<double> lam = s.lambdas.empty() ? std::vector<double>(static_cast<std::size_t>(rep.d), 1.0) : s.lambdas;
  std::optional<ResourceSpectrum> spec;
  try {
    spec.emplace(lam);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("lambdas", e.what());
  }
  if (spec->d() != rep.d) throw ScenarioError("lambdas", "need one value per local dimension");
  const int k = s.outcomes.value_or(rep.d * rep.d);
  if (k < rep.d * rep.d || k > 4 * rep.d * rep.d) throw ScenarioError("outcomes", "must lie in [d^2, 4 d^2]");
  const int restarts = s.restarts.value_or(50);
  if (restarts < 1) throw ScenarioError("restarts", "must be >= 1");
  const std::uint64_t seed = s.seed.value_or(opt.seed);

  OnewayRun out;
  out.lambdas = lam;
  out.result = feasibility_search(rep, *spec, static_cast<std::size_t>(k), static_cast<std::size_t>(restarts), seed);

  bool flat = true;
  for (double x : lam) flat = flat && std::abs(x - 1.0) <= 1e-12;
  bool any_full_rank = false;
  for (const auto& mat : rep.matrices) {
    Eigen::ColPivHouseholderQR<Matrix> qr(mat);
    qr.setThreshold(1e-9);
    any_full_rank = any_full_rank || qr.rank() == rep.d;
  }
  const bool feasible = flat || !any_full_rank;
  auto& row = out.row;
  row.scenario = s.id;
  row.family = (s.ensemble.empty() ? std::string("bell") : s.ensemble) + " lambda=(" + [&] {
    std::string t;
    for (std::size_t i = 0; i < lam.size(); ++i) t += (i ? "," : "") + fmt(lam[i]);
    return t;
  }() + ")";
  row.protocol = "feasibility-search(K=" + std::to_string(k) + ",R=" + std::to_string(restarts) + ")";
  row.fidelity = out.result.best_residual;
  row.bound = "residual";
  row.expected = feasible ? "<1e-06" : ">0.01";
  row.pass = feasible ? row.fidelity < 1e-6 : row.fidelity > 1e-2;
  return out;
}

inline ResultRow run_bounds(const Scenario& s) {
  const std::string kind = s.kind.empty() ? s.protocol : s.kind;
  ResultRow row{s.id, "", kind};
  if (kind == "mes") {
    const int k = require(s.k, "k");
    const int d = require(s.d, "d");
    if (k < 1) throw ScenarioError("k", "must be >= 1");
    if (d < 2) throw ScenarioError("d", "must be >= 2");
    row.family = "mes(k=" + std::to_string(k) + ",d=" + std::to_string(d) + ")";
    row.fidelity = mes_bound(static_cast<std::size_t>(k), static_cast<std::size_t>(d));
    row.bound = fmt(row.fidelity);
    row.expected = s.expected ? fmt(*s.expected) : "-";
    row.pass = !s.expected || close(row.fidelity, *s.expected);
  } else if (kind == "sep") {
    Ensemble ens = [&] {
      if (s.alpha || s.gamma) return parametric_basis(require(s.alpha, "alpha"), require(s.gamma, "gamma"));
      const int n = require(s.n, "n");
      return ghz_basis(n, ghz_sizes(s, n));
    }();
    row.family = s.alpha ? "parametric_basis(" + fmt(*s.alpha) + "," + fmt(s.gamma.value_or(0)) + ")" : "ghz_basis(" + std::to_string(*s.n) + ")";
    try {
      row.fidelity = sep_min_bound(ens);
    } catch (const std::domain_error& e) {
      throw ScenarioError(s.alpha ? "alpha" : "sizes", e.what());
    }
    row.bound = fmt(row.fidelity);
    const double want = s.expected.value_or(0.5);
    row.expected = fmt(want);
    row.pass = close(row.fidelity, want);
  } else if (kind == "entropy") {
    const int n = require(s.n, "n");
    const auto sizes = ghz_sizes(s, n);
    const auto ens = ghz_basis(n, sizes);
    const auto m = static_cast<int>(sizes.size());
    const auto rep = entropy_bound_check(ghz_state(m), PartyLayout::one_per_party(m), ens);
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows) slack = std::min(slack, r.resource_entropy - r.mean_member_entropy);
    row.family = "ghz_basis(" + std::to_string(n) + ";" + join(sizes) + ") vs ghz(" + std::to_string(m) + ")";
    row.fidelity = slack;
    row.bound = "min slack (ebit)";
    row.expected = "pass";
    row.pass = rep.pass;
  } else if (kind == "vidal") {
    // Bell basis with a resource of squared Schmidt coefficients
    // `coefficients`; fallback is the computational-basis protocol.
    std::vector<double> c = s.coefficients.empty() ? std::vector<double>{0.8, 0.2} : s.coefficients;
    if (c.size() != 2) throw ScenarioError("coefficients", "need two squared Schmidt coefficients");
    double sum = 0.0;
    for (double x : c) {
      if (x < 0.0) throw ScenarioError("coefficients", "must be nonnegative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ScenarioError("coefficients", "must sum to 1");
    const auto rank = static_cast<std::size_t>(s.rank.value_or(2));
    if (rank < 2) throw ScenarioError("rank", "must be >= 2");
    const StateVector res = make_state(Dims{2, 2}, {{0, std::sqrt(c[0])}, {3, std::sqrt(c[1])}});
    const Ensemble ens = bell_basis();
    const auto fallback = computational_protocol(ens);
    const auto r = vidal_then_fallback(ens, Resource{res, PartyLayout::one_per_party(2)}, rank, fallback.tree);
    row.family = "bell_basis resource(" + fmt(c[0]) + "," + fmt(c[1]) + ")";
    row.fidelity = r.fidelity;
    row.bound = "fallback " + fmt(r.f_fallback);
    row.expected = s.expected ? fmt(*s.expected) : "> fallback";
    row.pass = s.expected ? close(row.fidelity, *s.expected)
                          : (r.conversion_probability > 0.0 ? row.fidelity > r.f_fallback : close(row.fidelity, r.f_fallback));
  } else {
    throw ScenarioError("kind", "unknown bound kind '" + kind + "' (mes, sep, entropy, vidal)");
  }
  return row;
}

inline BuiltProtocol crosscheck_protocol(const Scenario& s, bool& flatten) {
  const std::string p = s.protocol;
  flatten = true;
  if (p == "appendix-a") {
    const int n = s.n.value_or(3);
    flatten = n <= 3;
    return appendix_a_protocol(n, s.order);
  }
  if (p == "partitioned") {
    const int n = require(s.n, "n");
    flatten = n <= 3;
    return ghz_partitioned_protocol(n, ghz_sizes(s, n));
  }
  if (p == "graph") {
    const Graph g = make_graph(s);
    flatten = g.vertex_count() <= 3;
    return graph_decode_protocol(g).protocol;
  }
  if (p == "lattice") {
    const int n = require(s.n, "n");
    const int m = s.m.value_or(1);
    if (n < 1 || n > 3) throw ScenarioError("n", "must satisfy 1 <= n <= 3");
    if (m < 1 || m > n) throw ScenarioError("m", "must satisfy 1 <= m <= n");
    flatten = n + m <= 3;
    return lattice_partial_teleport(n, m);
  }
  if (p == "teleport") {
    return teleportation_protocol(s.alpha ? parametric_basis(*s.alpha, require(s.gamma, "gamma")) : bell_basis(), "A", "B");
  }
  if (p == "example4") return example4_protocol();
  if (p == "computational") {
    const int n = require(s.n, "n");
    return computational_protocol(ghz_basis(n, ghz_sizes(s, n)));
  }
  throw ScenarioError("protocol", "unknown crosscheck protocol '" + p + "'");
}

/// Direct vs flattened vs coarsened fidelity of one zoo protocol. Dense
/// flattening is skipped above 8 joint qubits (16 GB at 10).
inline ResultRow run_crosscheck(const Scenario& s) {
  bool flatten = true;
  const auto p = crosscheck_protocol(s, flatten);
  const auto c = cross_check(p, flatten);
  ResultRow row{s.id, "joint(" + std::to_string(p.problem.dims().size()) + " qudits)", "crosscheck:" + s.protocol};
  row.fidelity = c.run;
  row.bound = flatten ? "flat " + fmt(c.flat) : "flat skipped";
  row.expected = "coarse " + fmt(c.coarse);
  row.pass = close(c.run, c.flat) && close(c.run, c.coarse);
  return row;
}

}  // namespace detail

/// Validates and runs one scenario. Throws ScenarioError on bad input.
inline ResultRow run_scenario(const Scenario& s, const RunOptions& opt = {}) {
  return detail::timed(opt, [&]() -> ResultRow {
    const auto& c = s.command;
    if (c == "ghz") return detail::run_ghz(s);
    if (c == "graph") return detail::run_graph(s);
    if (c == "lattice") return detail::run_lattice(s);
    if (c == "parametric") return detail::run_parametric(s);
    if (c == "example4") return detail::run_example4(s);
    if (c == "oneway") return detail::run_oneway(s, opt).row;
    if (c == "bounds") return detail::run_bounds(s);
    if (c == "crosscheck") return detail::run_crosscheck(s);
    throw ScenarioError("command", "unknown command '" + c + "'");
  });
}

/// Structured record of a oneway run: spectrum, K, R, seed, per-restart and
/// best residual, certificate.
inline json oneway_report(const Scenario& s, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = detail::run_oneway(s, opt);
  json certificate = json::array();
  for (std::size_t i = 0; i < r.result.certificate.phis.size(); ++i) {
    json phi = json::array();
    for (Eigen::Index a = 0; a < r.result.certificate.phis[i].size(); ++a) {
      phi.push_back({r.result.certificate.phis[i][a].real(), r.result.certificate.phis[i][a].imag()});
    }
    certificate.push_back({{"weight", r.result.certificate.weights[i]}, {"phi", std::move(phi)}});
  }
  json out{{"scenario", s.id},
           {"ensemble", s.ensemble.empty() ? "bell" : s.ensemble},
           {"lambdas", r.lambdas},
           {"outcomes", r.result.outcomes},
           {"restarts", r.result.restarts},
           {"seed", r.result.seed},
           {"best_residual", r.result.best_residual},
           {"best_restart", r.result.best_restart},
           {"restart_residuals", r.result.restart_residuals},
           {"certificate", std::move(certificate)},
           {"status", r.row.pass ? "pass" : "fail"}};
  out["wall_ms"] = opt.timing ? std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count() : 0;
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols{"scenario", "family", "protocol", "fidelity", "bound", "expected", "status", "ms"};
  return cols;
}

inline std::vector<std::string> row_cells(const ResultRow& r) {
  return {r.scenario, r.family, r.protocol, fmt(r.fidelity), r.bound, r.expected, r.pass ? "pass" : "fail", std::to_string(r.ms)};
}

inline std::string emit(const std::vector<ResultRow>& rows, const std::string& format) {
  std::ostringstream os;
  const auto& cols = result_columns();
  if (format == "csv") {
    auto cell = [](const std::string& v) {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string q = "\"";
      for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    };
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : rows) {
      const auto cells = row_cells(r);
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cell(cells[i]);
      os << "\n";
    }
  } else if (format == "json") {
    // hand-rolled so numbers keep 12 significant digits
    os << "[";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      os << (k ? ",\n " : "\n ") << "{\"scenario\": " << json(r.scenario).dump() << ", \"family\": " << json(r.family).dump()
         << ", \"protocol\": " << json(r.protocol).dump() << ", \"fidelity\": " << fmt(r.fidelity)
         << ", \"bound\": " << json(r.bound).dump() << ", \"expected\": " << json(r.expected).dump()
         << ", \"status\": \"" << (r.pass ? "pass" : "fail") << "\", \"ms\": " << r.ms << "}";
    }
    os << (rows.empty() ? "]\n" : "\n]\n");
  } else if (format == "table") {
    std::vector<std::vector<std::string>> cells{cols};
    for (const auto& r : rows) cells.push_back(row_cells(r));
    std::vector<std::size_t> w(cols.size(), 0);
    for (const auto& line : cells) {
      for (std::size_t i = 0; i < line.size(); ++i) w[i] = std::max(w[i], line[i].size());
    }
    for (const auto& line : cells) {
      std::string out;
      for (std::size_t i = 0; i < line.size(); ++i) {
        out += line[i];
        if (i + 1 < line.size()) out += std::string(w[i] - line[i].size() + 2, ' ');
      }
      os << out << "\n";
    }
  } else {
    throw ScenarioError("format", "unknown format '" + format + "' (table, csv, json)");
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Built-in battery

inline std::vector<Scenario> paper_suite_scenarios() {
  std::vector<Scenario> out;
  auto add = [&](Scenario s) { out.push_back(std::move(s)); };
  for (int n = 2; n <= 5; ++n) {
    Scenario s;
    s.id = "appendix-a-N" + std::to_string(n);
    s.command = "ghz";
    s.protocol = "appendix-a";
    s.n = n;
    add(s);
  }
  {
    Scenario s;
    s.id = "appendix-a-N4-reversed";
    s.command = "ghz";
    s.protocol = "appendix-a";
    s.n = 4;
    s.order = {3, 2, 1, 0};
    add(s);
  }
  for (auto [n, sizes] : std::vector<std::pair<int, std::vector<int>>>{{3, {2, 1}}, {4, {2, 2}}, {4, {3, 1}}, {5, {2, 2, 1}}}) {
    Scenario s;
    s.id = "partitioned-" + std::to_string(n) + "-" + detail::join(sizes, "");
    s.command = "ghz";
    s.protocol = "partitioned";
    s.n = n;
    s.sizes = sizes;
    add(s);
  }
  for (auto [shape, v] : std::vector<std::pair<std::string, int>>{{"path", 3}, {"complete", 3}, {"star", 4}, {"cycle", 4}}) {
    Scenario s;
    s.id = "graph-" + shape + std::to_string(v);
    s.command = "graph";
    s.shape = shape;
    s.vertices = v;
    add(s);
  }
  for (int m = 0; m <= 2; ++m) {
    Scenario s;
    s.id = "lattice-2-m" + std::to_string(m);
    s.command = "lattice";
    s.n = 2;
    s.m = m;
    add(s);
  }
  {
    Scenario s;
    s.id = "mes-16-4";
    s.command = "bounds";
    s.kind = "mes";
    s.k = 16;
    s.d = 4;
    s.expected = 0.25;
    add(s);
  }
  {
    Scenario s;
    s.id = "ghz3-computational";
    s.command = "ghz";
    s.protocol = "computational";
    s.n = 3;
    add(s);
    s.id = "ghz3-sep-bound";
    s.command = "bounds";
    s.protocol.clear();
    s.kind = "sep";
    add(s);
  }
  for (const char* p : {"full", "no-resource"}) {
    Scenario s;
    s.id = std::string("example4-") + p;
    s.command = "example4";
    s.protocol = p;
    add(s);
  }
  const double lo = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double a = lo + (1.0 - lo) * i / 4.0;
      const double c = lo + (1.0 - lo) * j / 4.0;
      for (const char* p : {"computational", "teleport"}) {
        Scenario s;
        s.id = "parametric-" + std::to_string(i) + std::to_string(j) + "-" + p;
        s.command = "parametric";
        s.protocol = p;
        s.alpha = a;
        s.gamma = c;
        add(s);
      }
    }
  }
  {
    Scenario s;
    s.id = "vidal-0.8";
    s.command = "bounds";
    s.kind = "vidal";
    s.coefficients = {0.8, 0.2};
    s.expected = 0.7;
    add(s);
  }
  for (auto [n, sizes] : std::vector<std::pair<int, std::vector<int>>>{{3, {1, 1, 1}}, {4, {2, 2}}, {4, {1, 1, 1, 1}}}) {
    Scenario s;
    s.id = "entropy-" + std::to_string(n) + "-" + detail::join(sizes, "");
    s.command = "bounds";
    s.kind = "entropy";
    s.n = n;
    s.sizes = sizes;
    add(s);
  }
  for (int k : {4, 8}) {
    Scenario s;
    s.id = "oneway-flat-K" + std::to_string(k);
    s.command = "oneway";
    s.outcomes = k;
    s.restarts = 5;
    add(s);
    s.id = "oneway-skewed-K" + std::to_string(k);
    s.lambdas = {1.6, 0.4};
    s.restarts = 50;
    add(s);
  }
  {
    Scenario s;
    s.id = "oneway-computational";
    s.command = "oneway";
    s.ensemble = "computational";
    s.lambdas = {1.6, 0.4};
    s.restarts = 5;
    add(s);
  }
  auto cc = [&](std::string id, std::string proto, auto&& setup) {
    Scenario s;
    s.id = "crosscheck-" + std::move(id);
    s.command = "crosscheck";
    s.protocol = std::move(proto);
    setup(s);
    add(s);
  };
  cc("appendix-a-3", "appendix-a", [](Scenario& s) { s.n = 3; });
  cc("appendix-a-5", "appendix-a", [](Scenario& s) { s.n = 5; });
  cc("partitioned-3-21", "partitioned", [](Scenario& s) { s.n = 3; s.sizes = {2, 1}; });
  cc("graph-path3", "graph", [](Scenario& s) { s.shape = "path"; s.vertices = 3; });
  cc("graph-star4", "graph", [](Scenario& s) { s.shape = "star"; s.vertices = 4; });
  cc("lattice-2-1", "lattice", [](Scenario& s) { s.n = 2; s.m = 1; });
  cc("lattice-1-1", "lattice", [](Scenario& s) { s.n = 1; s.m = 1; });
  cc("teleport-bell", "teleport", [](Scenario&) {});
  cc("teleport-parametric", "teleport", [](Scenario& s) { s.alpha = 0.9; s.gamma = 0.8; });
  cc("example4", "example4", [](Scenario&) {});
  cc("computational-ghz3", "computational", [](Scenario& s) { s.n = 3; });
  return out;
}

}  // namespace loccsim
