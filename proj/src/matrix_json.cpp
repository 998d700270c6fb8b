// SPDX-License-Identifier: Apache-2.0
#include "opcvx/matrix_json.hpp"

#include <string>

#include "opcvx/errors.hpp"

namespace opcvx {

using nlohmann::json;

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return {{"dim", m.rows()}, {"entries", std::move(rows)}};
}

CMatrix matrix_from_json(const json& j) {
  auto bad = [](const std::string& why) { return Error(ErrorKind::BadInput, "matrix JSON: " + why); };
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw bad("expected an object with \"dim\" and \"entries\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1) throw bad("\"dim\" must be a positive integer");
  const auto n = static_cast<Eigen::Index>(j["dim"].get<long>());
  const json& entries = j["entries"];
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != n) throw bad("expected dim rows");
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = entries[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw bad("expected dim entries per row");
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& z = row[static_cast<std::size_t>(k)];
      if (z.is_number()) {
        m(i, k) = Complex(z.get<double>(), 0.0);
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
      } else {
        throw bad("entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

json to_json(const HermitianMatrix& a) { return matrix_to_json(a.matrix()); }

HermitianMatrix hermitian_from_json(const json& j) { return HermitianMatrix(matrix_from_json(j)); }

std::vector<HermitianMatrix> hermitian_list_from_json(const json& j) {
  std::vector<HermitianMatrix> list;
  if (j.is_array()) {
    for (const auto& item : j) list.push_back(hermitian_from_json(item));
  } else {
    list.push_back(hermitian_from_json(j));
  }
  return list;
}

json to_json(const std::vector<HermitianMatrix>& list) {
  json out = json::array();
  for (const auto& a : list) out.push_back(to_json(a));
  return out;
}

}  // namespace opcvx
