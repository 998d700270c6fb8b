// SPDX-License-Identifier: Apache-2.0
#pragma once

// Matrix file format: {"dim": n, "entries": [[[re, im], ...], ...]}, row-major.

#include <vector>

#include <nlohmann/json.hpp>

#include "opcvx/matcore.hpp"

namespace opcvx {

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HermitianMatrix& a);
HermitianMatrix hermitian_from_json(const nlohmann::json& j);

/// Accepts a single matrix object or an array of them.
std::vector<HermitianMatrix> hermitian_list_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<HermitianMatrix>& list);

}  // namespace opcvx
