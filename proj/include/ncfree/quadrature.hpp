#pragma once

#include <vector>

namespace ncfree {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes on [0, 1].
const QuadratureRule& gauss_legendre_unit(int n);

/// Gauss-Hermite rule with n nodes for the standard normal weight, so that
/// sum_k w_k f(x_k) approximates E f(Z).
QuadratureRule gauss_hermite_normal(int n);

}  // namespace ncfree
