// Copyright 2026 The qduality Authors
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

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qduality/duality.hpp"

namespace qduality {

using Json = nlohmann::json;

/// Malformed or invariant-violating input files. The CLI maps this to exit
/// code 2, distinct from numeric failures.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline void expect(bool cond, const std::string& msg) {
  if (!cond) throw SchemaError(msg);
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& what) {
  expect(j.is_array() && Index(j.size()) == rows, what + ": expected " + std::to_string(rows) +
                                                      " rows");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[size_t(i)];
    expect(row.is_array() && Index(row.size()) == cols,
           what + ": expected " + std::to_string(cols) + " columns");
    for (Index c = 0; c < cols; ++c) {
      const Json& z = row[size_t(c)];
      expect(z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number(),
             what + ": entries must be [re, im] pairs");
      m(i, c) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

inline Index dim_field(const Json& j, const char* key) {
  expect(j.contains(key) && j[key].is_number_integer(), std::string(key) + ": missing integer");
  auto v = j[key].get<long long>();
  expect(v >= 1 && v <= long long(kMaxDim), std::string(key) + ": out of range");
  return Index(v);
}

}  // namespace detail

// Channel schema:
//   {"d_a": int, "d_b": int,
//    "branches": [{"p": real, "m": [[[re, im], ...], ...]}, ...]}
// with m a d_B x d_A row-major matrix per branch.
inline Json channel_to_json(const Evolution& e) {
  Json branches = Json::array();
  for (const auto& br : e.branches())
    branches.push_back({{"p", br.p}, {"m", detail::matrix_to_json(br.m)}});
  return Json{{"d_a", e.d_a()}, {"d_b", e.d_b()}, {"branches", std::move(branches)}};
}

inline Evolution channel_from_json(const Json& j) {
  detail::expect(j.is_object(), "channel: expected a JSON object");
  Index d_a = detail::dim_field(j, "d_a");
  Index d_b = detail::dim_field(j, "d_b");
  detail::expect(j.contains("branches") && j["branches"].is_array() && !j["branches"].empty(),
                 "channel: missing non-empty branches array");
  std::vector<Evolution::Branch> branches;
  double psum = 0.0;
  Matrix ksum = Matrix::Zero(d_a, d_a);
  for (const Json& bj : j["branches"]) {
    detail::expect(bj.is_object() && bj.contains("p") && bj["p"].is_number() && bj.contains("m"),
                   "channel branch: needs numeric p and matrix m");
    double p = bj["p"].get<double>();
    detail::expect(p > 0.0 && p <= 1.0, "channel branch: p must lie in (0, 1]");
    Matrix m = detail::matrix_from_json(bj["m"], d_b, d_a, "channel branch m");
    double norm = (m.adjoint() * m).trace().real();
    detail::expect(std::abs(norm - double(d_a)) <= 1e-8 * double(d_a),
                   "channel branch: operator not canonically normalized, Tr(M^dag M) != d_a");
    psum += p;
    ksum += p * m.adjoint() * m;
    branches.push_back({std::move(m), p});
  }
  detail::expect(std::abs(psum - 1.0) <= 1e-9, "channel: probabilities must sum to 1");
  bool selective = (ksum - Matrix::Identity(d_a, d_a)).norm() > 1e-8 * double(d_a);
  try {
    return Evolution(d_a, d_b, std::move(branches), selective);
  } catch (const std::invalid_argument& err) {
    throw SchemaError(std::string("channel: ") + err.what());
  }
}

// Ensemble schema mirrors the channel one:
//   {"d_a": int, "d_b": int,
//    "members": [{"p": real, "amps": [[[re, im], ...], ...]}, ...]}
// with amps a d_A x d_B row-major amplitude matrix per member.
inline Json ensemble_to_json(const BipartiteEnsemble& ens) {
  Json members = Json::array();
  for (const auto& m : ens.members())
    members.push_back({{"p", m.p}, {"amps", detail::matrix_to_json(m.state.amplitudes())}});
  return Json{{"d_a", ens.d_a()}, {"d_b", ens.d_b()}, {"members", std::move(members)}};
}

inline BipartiteEnsemble ensemble_from_json(const Json& j) {
  detail::expect(j.is_object(), "ensemble: expected a JSON object");
  Index d_a = detail::dim_field(j, "d_a");
  Index d_b = detail::dim_field(j, "d_b");
  detail::expect(j.contains("members") && j["members"].is_array() && !j["members"].empty(),
                 "ensemble: missing non-empty members array");
  std::vector<BipartiteEnsemble::Member> members;
  double psum = 0.0;
  for (const Json& mj : j["members"]) {
    detail::expect(mj.is_object() && mj.contains("p") && mj["p"].is_number() && mj.contains("amps"),
                   "ensemble member: needs numeric p and matrix amps");
    double p = mj["p"].get<double>();
    detail::expect(p > 0.0 && p <= 1.0, "ensemble member: p must lie in (0, 1]");
    Matrix amps = detail::matrix_from_json(mj["amps"], d_a, d_b, "ensemble member amps");
    detail::expect(std::abs(amps.norm() - 1.0) <= 1e-9,
                   "ensemble member: amplitudes not normalized");
    psum += p;
    members.push_back({p, PureBipartiteState(amps)});
  }
  detail::expect(std::abs(psum - 1.0) <= 1e-9, "ensemble: probabilities must sum to 1");
  try {
    return BipartiteEnsemble(std::move(members));
  } catch (const std::invalid_argument& err) {
    throw SchemaError(std::string("ensemble: ") + err.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& err) {
    throw SchemaError("invalid JSON in " + path + ": " + err.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

/// Doubles are printed with max_digits10 so CSV round-trips losslessly.
inline std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace qduality
