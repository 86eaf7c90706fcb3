#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "ncfree/expr.hpp"
#include "ncfree/matengine.hpp"

namespace ncfree {

struct SemiLetter {
  int color = 1;  // 1-based
  friend bool operator==(const SemiLetter&, const SemiLetter&) = default;
};
struct MatrixRef {
  int index = 1;  // 1-based into the matrix list
  friend bool operator==(const MatrixRef&, const MatrixRef&) = default;
};
using FreeToken = std::variant<SemiLetter, MatrixRef>;

/// Word in the free product of M_N(C) with free semicirculars x_1..x_d.
struct FreeWord {
  std::vector<FreeToken> tokens;
  /// Parses space-separated tokens such as "x1 B1 x1 B2".
  static FreeWord parse(std::string_view text);
};

/// Exact trace: sum over colour-respecting non-crossing pairings of the
/// semicircular positions of the product, over Kreweras blocks, of ts of
/// the ordered gap products.
cplx free_word_trace(const FreeWord& w, const std::vector<Matrix>& mats, Eigen::Index N);

/// Independent reference computed from the freeness recursion on centered
/// factors. Words are limited to 12 tokens.
cplx freeness_oracle_trace(const FreeWord& w, const std::vector<Matrix>& mats, Eigen::Index N);

/// tau_N of a polynomial expression, X_i read as free semicirculars and
/// A_j as the given matrices. Throws for expressions with exponentials.
cplx free_polynomial_trace(const NcExpr& e, const std::vector<Matrix>& A);
/// tau_N(e * M) for a polynomial e and a fixed matrix M.
cplx free_polynomial_trace(const NcExpr& e, const std::vector<Matrix>& A, const Matrix& M);

}  // namespace ncfree
