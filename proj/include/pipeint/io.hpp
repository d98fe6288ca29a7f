// Copyright 2026 The pipeint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PIPEINT_IO_HPP_
#define PIPEINT_IO_HPP_

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipeint/cost.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/matrix.hpp"
#include "pipeint/model.hpp"

namespace pipeint {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json mask_to_json(const Mask& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c) != 0);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

inline std::vector<double> as_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

inline Matrix as_matrix(const Json& j, std::size_t rows, std::size_t cols,
                        const std::string& where) {
  if (!j.is_array() || j.size() != rows)
    throw InputError(where + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      throw InputError(where + ": row " + std::to_string(r) + " must have " +
                       std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = as_number(row[c], where + "[" + std::to_string(r) + "][" +
                                      std::to_string(c) + "]");
  }
  return m;
}

inline Mask as_mask(const Json& j, std::size_t rows, std::size_t cols,
                    const std::string& where) {
  if (!j.is_array() || j.size() != rows)
    throw InputError(where + ": expected " + std::to_string(rows) + " rows");
  Mask m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      throw InputError(where + ": row " + std::to_string(r) + " must have " +
                       std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_boolean()) throw InputError(where + ": expected booleans");
      m(r, c) = row[c].get<bool>() ? 1 : 0;
    }
  }
  return m;
}

}  // namespace detail

inline Json instance_to_json(const Instance& in) {
  Json j;
  j["layers"] = in.layer_sizes;
  j["rewards"] = in.rewards;
  j["initial_distribution"] = in.initial_distribution;
  j["budget"] = in.budget;
  Json tr = Json::array();
  for (const auto& m : in.initial_matrices) tr.push_back(detail::matrix_to_json(m));
  j["transitions"] = std::move(tr);
  Json mk = Json::array();
  for (const auto& m : in.malleable) mk.push_back(detail::mask_to_json(m));
  j["malleable"] = std::move(mk);
  Json cm;
  if (in.cost_model.kind == CostKind::kL1) {
    cm["kind"] = "l1";
  } else {
    cm["kind"] = "weighted_l1";
    Json ws = Json::array();
    for (const auto& w : in.cost_model.weights) ws.push_back(detail::matrix_to_json(w));
    cm["weights"] = std::move(ws);
  }
  j["cost_model"] = std::move(cm);
  return j;
}

// Structural parse only; call validate_instance for the model invariants.
inline Instance instance_from_json(const Json& j) {
  Instance in;
  const auto& layers = detail::field(j, "layers");
  if (!layers.is_array()) throw InputError("layers: expected an array");
  for (const auto& x : layers) {
    if (!x.is_number_integer() || x.get<long long>() < 0)
      throw InputError("layers: expected non-negative integers");
    in.layer_sizes.push_back(x.get<std::size_t>());
  }
  if (in.layer_sizes.size() < 2) throw InputError("layers: need at least two layers");
  const std::size_t k = in.layer_sizes.size();
  in.rewards = detail::as_vector(detail::field(j, "rewards"), "rewards");
  in.initial_distribution =
      detail::as_vector(detail::field(j, "initial_distribution"), "initial_distribution");
  in.budget = detail::as_number(detail::field(j, "budget"), "budget");
  const auto& tr = detail::field(j, "transitions");
  if (!tr.is_array() || tr.size() != k - 1)
    throw InputError("transitions: expected " + std::to_string(k - 1) + " matrices");
  for (std::size_t t = 0; t + 1 < k; ++t)
    in.initial_matrices.push_back(detail::as_matrix(
        tr[t], in.layer_sizes[t + 1], in.layer_sizes[t], "transitions[" + std::to_string(t) + "]"));
  if (auto it = j.find("malleable"); it != j.end()) {
    if (!it->is_array() || it->size() != k - 1)
      throw InputError("malleable: expected " + std::to_string(k - 1) + " masks");
    for (std::size_t t = 0; t + 1 < k; ++t)
      in.malleable.push_back(detail::as_mask((*it)[t], in.layer_sizes[t + 1], in.layer_sizes[t],
                                             "malleable[" + std::to_string(t) + "]"));
  } else {
    for (std::size_t t = 0; t + 1 < k; ++t)
      in.malleable.emplace_back(in.layer_sizes[t + 1], in.layer_sizes[t], 1);
  }
  if (auto it = j.find("cost_model"); it != j.end()) {
    const std::string kind = detail::field(*it, "kind").get<std::string>();
    if (kind == "l1") {
      in.cost_model.kind = CostKind::kL1;
    } else if (kind == "weighted_l1") {
      in.cost_model.kind = CostKind::kWeightedL1;
      const auto& ws = detail::field(*it, "weights");
      if (!ws.is_array() || ws.size() != k - 1)
        throw InputError("cost_model.weights: expected " + std::to_string(k - 1) + " matrices");
      for (std::size_t t = 0; t + 1 < k; ++t)
        in.cost_model.weights.push_back(
            detail::as_matrix(ws[t], in.layer_sizes[t + 1], in.layer_sizes[t],
                              "cost_model.weights[" + std::to_string(t) + "]"));
    } else {
      throw InputError("cost_model.kind must be \"l1\" or \"weighted_l1\"");
    }
  }
  return in;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": JSON syntax error: " + e.what());
  }
}

// Reads, parses and validates; any violation is an InputError naming its
// location.
inline Instance parse_instance(const std::string& path) {
  Instance in;
  try {
    in = instance_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  require_valid(in);
  return in;
}

inline Json plan_to_json(const InterventionPlan& p) {
  Json j;
  Json ms = Json::array();
  for (const auto& m : p.matrices) ms.push_back(detail::matrix_to_json(m));
  j["matrices"] = std::move(ms);
  j["budget_split"] = p.budget_split;
  return j;
}

inline InterventionPlan plan_from_json(const Json& j, const Instance& in) {
  InterventionPlan p;
  const auto& ms = detail::field(j, "matrices");
  if (!ms.is_array() || ms.size() != in.num_transitions())
    throw InputError("plan: wrong number of matrices");
  for (std::size_t t = 0; t < in.num_transitions(); ++t)
    p.matrices.push_back(detail::as_matrix(ms[t], in.layer_sizes[t + 1], in.layer_sizes[t],
                                           "plan.matrices[" + std::to_string(t) + "]"));
  p.budget_split = detail::as_vector(detail::field(j, "budget_split"), "budget_split");
  return p;
}

inline Json mixture_to_json(const MixedPlan& mp) {
  Json sup = Json::array();
  for (const auto& e : mp.support) {
    Json x;
    x["weight"] = e.weight;
    x["plan"] = plan_to_json(e.plan);
    sup.push_back(std::move(x));
  }
  Json j;
  j["support"] = std::move(sup);
  return j;
}

inline MixedPlan mixture_from_json(const Json& j, const Instance& in) {
  MixedPlan mp;
  const auto& sup = detail::field(j, "support");
  if (!sup.is_array()) throw InputError("mixture: support must be an array");
  for (const auto& e : sup)
    mp.support.push_back({detail::as_number(detail::field(e, "weight"), "weight"),
                          plan_from_json(detail::field(e, "plan"), in)});
  return mp;
}

inline Json report_to_json(const SolveReport& r) {
  Json j;
  j["objective"] = r.objective_value;
  j["per_population_rewards"] = r.per_population_rewards;
  j["budget_used"] = r.budget_used;
  Json meta;
  meta["epsilon"] = r.meta.epsilon;
  meta["cells"] = r.meta.cells;
  meta["wall_ms"] = r.meta.wall_ms;
  if (!r.meta.extra.empty()) {
    Json extra;
    for (const auto& [k, v] : r.meta.extra) extra[k] = v;
    meta["details"] = std::move(extra);
  }
  j["meta"] = std::move(meta);
  return j;
}

inline void write_population_csv(std::ostream& os, const std::vector<double>& rewards) {
  os << "population,expected_reward\n";
  os << std::setprecision(17);
  for (std::size_t j = 0; j < rewards.size(); ++j) os << j << ',' << rewards[j] << '\n';
}

// FNV-1a 64-bit digest of a string.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Digest of the compact canonical JSON form of an instance, as 16 hex digits.
inline std::string instance_digest(const Instance& in) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(instance_to_json(in).dump());
  return os.str();
}

}  // namespace pipeint

#endif  // PIPEINT_IO_HPP_
