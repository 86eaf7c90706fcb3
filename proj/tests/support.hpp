#pragma once

#include <random>

#include "ncfree/expr.hpp"
#include "ncfree/matengine.hpp"

namespace testsupport {

using ncfree::cplx;
using ncfree::Matrix;
using ncfree::NcExpr;

inline Matrix random_hermitian(std::mt19937_64& g, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> z;
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = cplx{z(g), z(g)};
  Matrix H = (M + M.adjoint()) * (0.5 * scale / std::sqrt(static_cast<double>(n)));
  return H;
}

inline Matrix random_matrix(std::mt19937_64& g, Eigen::Index n) {
  std::normal_distribution<double> z;
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = cplx{z(g), z(g)};
  return M / std::sqrt(static_cast<double>(n));
}

inline cplx random_coef(std::mt19937_64& g) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  switch (kind(g)) {
    case 0:
      return {std::round(u(g) * 4.0) / 4.0 + 0.25, 0.0};
    case 1:
      return {u(g), 0.0};
    case 2:
      return {0.0, u(g)};
    default:
      return {u(g), u(g)};
  }
}

/// Random element of F_{d,q} with at most `terms` words of length <= max_len.
/// Exponential atoms count as one factor and carry self-adjoint bases.
inline NcExpr random_expr(std::mt19937_64& g, int d, int q, int max_len, int terms, bool with_exp = true,
                          int depth = 0) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> nterms(1, terms);
  std::uniform_int_distribution<int> xi(1, d);
  std::uniform_int_distribution<int> aj(1, std::max(1, q));
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  NcExpr e(d, q);
  const int n = nterms(g);
  for (int t = 0; t < n; ++t) {
    ncfree::Word w;
    const int L = len(g);
    for (int k = 0; k < L; ++k) {
      const int p = pick(g);
      if (with_exp && depth == 0 && p == 9) {
        NcExpr b = random_expr(g, d, q, 2, 2, false, depth + 1);
        NcExpr base = b + ncfree::adjoint(b);
        if (base.is_zero()) base = NcExpr::x(1, d, q);
        w.emplace_back(ncfree::ExpAtom{ncfree::RealAlphaPoly(std::round(scale(g) * 8.0) / 8.0 + 0.125),
                                       std::make_shared<const NcExpr>(base)});
      } else if (q > 0 && p >= 6) {
        w.emplace_back(p % 2 == 0 ? ncfree::Letter::a(aj(g)) : ncfree::Letter::a_star(aj(g)));
      } else {
        w.emplace_back(ncfree::Letter::x(xi(g)));
      }
    }
    e.add_term(std::move(w), random_coef(g));
  }
  return e;
}

/// Same terms, weights equal up to rounding relative to each weight.
inline bool tensor_close(const ncfree::TensorExpr& a, const ncfree::TensorExpr& b, double tol = 1e-13) {
  if (a.terms().size() != b.terms().size()) return false;
  for (auto ia = a.terms().begin(), ib = b.terms().begin(); ia != a.terms().end(); ++ia, ++ib) {
    if (!(ia->first == ib->first)) return false;
    const ncfree::ComplexAlphaPoly diff = ia->second - ib->second;
    double scale = 1.0;
    for (const auto& [m, c] : ia->second.terms()) scale = std::max(scale, std::abs(c));
    for (const auto& [m, c] : diff.terms())
      if (std::abs(c) > tol * scale) return false;
  }
  return true;
}

}  // namespace testsupport
