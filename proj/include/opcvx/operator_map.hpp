// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opcvx/errors.hpp"
#include "opcvx/matcore.hpp"

namespace opcvx {

enum class Sense { Concave, Convex };

inline const char* to_string(Sense sense) { return sense == Sense::Concave ? "concave" : "convex"; }

/// A map from k-tuples of positive definite matrices to Hermitian matrices.
struct OperatorMap {
  std::string name;
  int arity = 1;
  Sense sense = Sense::Concave;
  std::function<HermitianMatrix(std::span<const HermitianMatrix>)> fn;

  HermitianMatrix operator()(std::span<const HermitianMatrix> inputs) const {
    if (static_cast<int>(inputs.size()) != arity) {
      throw Error(ErrorKind::ArityMismatch, name + " called with the wrong number of inputs");
    }
    return fn(inputs);
  }
};

}  // namespace opcvx
