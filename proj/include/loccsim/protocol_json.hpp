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

// JSON form of protocol trees. Operators are {"real": [[..]], "imag": [[..]]}
// row-major.
//
//   {"type": "round", "party": "A", "targets": [0, 1],
//    "kraus": [op, ...], "children": [node, ...]}
//   {"type": "leaf", "member": 3}
//   {"type": "leaf", "state": {"dims": [2, 2], "real": [..], "imag": [..]}}

#include "loccsim/locc.hpp"

#include <json.hpp>

namespace loccsim {

using nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ir = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return json{{"real", std::move(re)}, {"imag", std::move(im)}};
}

inline Matrix matrix_from_json(const json& j) {
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  if (!re.is_array() || re.empty() || re.size() != im.size()) throw std::invalid_argument("operator: real/imag shape mismatch");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& rr = re[static_cast<std::size_t>(r)];
    const auto& ir = im[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(rr.size()) != cols || ir.size() != rr.size()) throw std::invalid_argument("operator: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cplx(rr[static_cast<std::size_t>(c)].get<double>(), ir[static_cast<std::size_t>(c)].get<double>());
  }
  return m;
}

inline json state_to_json(const StateVector& s) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < s.amps().size(); ++i) {
    re.push_back(s.amps()[i].real());
    im.push_back(s.amps()[i].imag());
  }
  return json{{"dims", s.dims()}, {"real", std::move(re)}, {"imag", std::move(im)}};
}

inline StateVector state_from_json(const json& j) {
  const auto dims = j.at("dims").get<Dims>();
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  if (re.size() != im.size()) throw std::invalid_argument("state: real/imag length mismatch");
  Vector v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v[static_cast<Eigen::Index>(i)] = cplx(re[i].get<double>(), im[i].get<double>());
  return StateVector(dims, v);
}

inline json tree_to_json(const ProtocolNode& node) {
  if (node.is_leaf()) {
    const auto& g = node.leaf().guess;
    if (const auto* m = std::get_if<std::size_t>(&g)) return json{{"type", "leaf"}, {"member", *m}};
    return json{{"type", "leaf"}, {"state", state_to_json(std::get<StateVector>(g))}};
  }
  const auto& r = node.round();
  json kraus = json::array();
  for (const auto& k : r.instrument.kraus) kraus.push_back(matrix_to_json(k));
  json children = json::array();
  for (const auto& c : r.children) children.push_back(tree_to_json(c));
  return json{{"type", "round"},
              {"party", r.instrument.party},
              {"targets", r.instrument.targets},
              {"kraus", std::move(kraus)},
              {"children", std::move(children)}};
}

inline ProtocolNode tree_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "leaf") {
    if (j.contains("member")) return make_leaf(j.at("member").get<std::size_t>());
    if (j.contains("state")) return make_leaf(state_from_json(j.at("state")));
    throw std::invalid_argument("leaf needs 'member' or 'state'");
  }
  if (type != "round") throw std::invalid_argument("unknown node type '" + type + "'");
  Instrument inst{j.at("party").get<std::string>(), j.at("targets").get<std::vector<int>>(), {}};
  for (const auto& k : j.at("kraus")) inst.kraus.push_back(matrix_from_json(k));
  std::vector<ProtocolNode> children;
  for (const auto& c : j.at("children")) children.push_back(tree_from_json(c));
  if (children.size() != inst.kraus.size()) throw std::invalid_argument("round needs one child per Kraus operator");
  return make_round(std::move(inst), std::move(children));
}

}  // namespace loccsim
