// SPDX-License-Identifier: Apache-2.0
#pragma once

// Perspectives of operator maps and the nested construction
//   F1(A) = (lambda A^p + (1 - lambda) I)^{1/p}
//   G2(A, B) = P_{F1}(A, B)^{1 - p}
//   F2(A, B) = (1/p) int_0^1 G2(A, B) dlambda
//   P_{F2}(A, B, C) = C^{1/2} F2(C^{-1/2} A C^{-1/2}, C^{-1/2} B C^{-1/2}) C^{1/2}
// whose scalar restriction is the F35 kernel.

#include <span>

#include "opcvx/kernels.hpp"
#include "opcvx/operator_map.hpp"

namespace opcvx {

/// B^{1/2} F(B^{-1/2} A_1 B^{-1/2}, ..., B^{-1/2} A_k B^{-1/2}) B^{1/2}.
HermitianMatrix perspective_apply(const OperatorMap& f, std::span<const HermitianMatrix> as,
                                  const HermitianMatrix& b);

/// The perspective of `f` as an operator map of arity k + 1 (B last).
OperatorMap perspective_of(OperatorMap f);

HermitianMatrix f1_map(const HermitianMatrix& a, double lambda, double p);

HermitianMatrix f2_map(const HermitianMatrix& a, const HermitianMatrix& b, double p, const QuadratureRule& rule);

HermitianMatrix pf2_apply(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c, double p,
                          const QuadratureRule& rule);

}  // namespace opcvx
