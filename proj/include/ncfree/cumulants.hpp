#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "ncfree/ensembles.hpp"

namespace ncfree {

/// Law of a pair (u, v) of real random variables.
class BivariateLaw {
 public:
  /// u = su * U and v = sv * V with U, V independent of the given laws.
  static BivariateLaw independent(const EntryLaw& U, double su, const EntryLaw& V, double sv);
  /// v identically zero.
  static BivariateLaw single(const EntryLaw& U, double su = 1.0);
  /// Atoms (u, v, weight).
  static BivariateLaw discrete(std::vector<std::array<double, 3>> atoms);
  static BivariateLaw empirical(std::vector<std::array<double, 2>> samples);
  /// (Re, Im) of a GUE off-diagonal entry at dimension N.
  static BivariateLaw gue_offdiag(int N);

  bool is_empirical() const { return empirical_; }
  std::size_t sample_count() const { return atoms_.size(); }
  /// E[u^n v^m], exact unless empirical.
  double moment(int n, int m) const;
  /// E[g(u, v)] over the atoms. For continuous laws the atoms form a
  /// product quadrature rule, exact for polynomials of moderate degree.
  std::complex<double> expect(const std::function<std::complex<double>(double, double)>& g) const;

 private:
  std::vector<std::array<double, 3>> atoms_;
  bool empirical_ = false;
  std::function<double(int, int)> exact_moment_;
};

/// kappa(n, m) for n + m <= order.
class CumulantTable {
 public:
  explicit CumulantTable(int order) : order_(order), k_(static_cast<std::size_t>((order + 1) * (order + 1)), 0.0) {}
  int order() const { return order_; }
  double operator()(int n, int m) const { return k_[index(n, m)]; }
  double& at(int n, int m) { return k_[index(n, m)]; }

 private:
  std::size_t index(int n, int m) const;
  int order_;
  std::vector<double> k_;
};

/// Cumulants from the moment recursion implied by
/// log E exp(i t u + i s v) = sum kappa_{n,m} (it)^n (is)^m / (n! m!).
/// Empirical laws need at least 100 samples. order <= 6.
CumulantTable joint_cumulants(const BivariateLaw& law, int order);

/// Test functionals with closed-form partial derivatives.
struct TestFunctional {
  enum class Kind { monomial, exponential };
  Kind kind = Kind::monomial;
  int p = 0;  // u^p v^r
  int r = 0;
  double t = 0.0;  // exp(i (t u + s v))
  double s = 0.0;

  static TestFunctional monomial(int p, int r) { return {Kind::monomial, p, r, 0.0, 0.0}; }
  static TestFunctional exponential(double t, double s) { return {Kind::exponential, 0, 0, t, s}; }
  /// d_u^a d_v^b Phi evaluated at (u, v).
  std::complex<double> derivative(int a, int b, double u, double v) const;
};

struct CumulantCheck {
  std::complex<double> lhs;        // E[u Phi]
  std::complex<double> expansion;  // sum_{a+b<=l} kappa_{a+1,b}/(a! b!) E[d_u^a d_v^b Phi]
  std::complex<double> residual;   // lhs - expansion
};

/// Throws for monomials of degree above 6.
CumulantCheck cumulant_expansion_check(const BivariateLaw& law, const TestFunctional& phi, int order);

/// sum_{a+b=order} kappa_{a+1,b}/(a! b!) E[d_u^a d_v^b Phi]: the leading
/// remainder term, which is the whole remainder for polynomials of degree order.
std::complex<double> expansion_layer(const BivariateLaw& law, const TestFunctional& phi, int order);

}  // namespace ncfree
