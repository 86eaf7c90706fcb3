#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ncfree/expr.hpp"
#include "ncfree/fourier.hpp"

namespace ncfree {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class HermiticityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Violations of Hermiticity up to this level are symmetrized silently.
inline constexpr double kHermitianSilent = 1e-10;
/// Beyond kHermitianSilent and up to this level they are symmetrized with a warning.
inline constexpr double kHermitianReject = 1e-6;

/// max |H - H^*| relative to max(1, max |H|).
double hermiticity_violation(const Matrix& H);

/// Returns (H + H^*)/2; sets *warned when the violation exceeds
/// kHermitianSilent and throws HermiticityError beyond kHermitianReject.
Matrix symmetrize_checked(const Matrix& H, bool* warned = nullptr);

struct Eigensystem {
  Eigen::VectorXd values;
  Matrix vectors;

  /// exp(i y H)
  Matrix exp_i(double y) const;
  /// U diag(g) U^*
  Matrix with_spectrum(const Vector& g) const;
};

Eigensystem hermitian_eigensystem(const Matrix& H, bool* warned = nullptr);

/// f(H) through the spectral decomposition; H itself for the identity function.
Matrix herm_funcalc(const Matrix& H, const FourierSum& f);
Matrix herm_funcalc(const Eigensystem& es, const FourierSum& f);

struct Context {
  std::vector<Matrix> X;
  std::vector<Matrix> A;
  int quadrature_order = 21;

  Eigen::Index dim() const;
  /// Throws DimensionError or HermiticityError.
  void validate() const;
};

struct TsTs {};
struct SharpThenTrace {
  Matrix P;
};
struct HThenTrace {};
using Reduction = std::variant<TsTs, SharpThenTrace, HThenTrace>;

/// Evaluates expressions against a fixed context. Eigendecompositions of
/// exponential bases are cached, so one Evaluator serves a whole y sweep.
/// The context must outlive the evaluator. Not thread-safe; use one per
/// worker.
class Evaluator {
 public:
  explicit Evaluator(const Context& ctx);

  const Context& context() const { return ctx_; }
  Eigen::Index dim() const { return n_; }

  Matrix evaluate(const NcExpr& e);
  /// Integrates the quadrature variables over the unit cube.
  Matrix evaluate(const LegExpr& e);
  Matrix evaluate_word(const Word& w, std::span<const double> alpha = {});

  /// Sum of reduced term values integrated over the quadrature variables.
  /// Tensors tagged transposed_left always reduce through h.
  cplx evaluate_tensor(const TensorExpr& t, const Reduction& r);

  cplx trace_of(const NcExpr& e);

  const Eigensystem& eigensystem(const NcExpr& base);
  bool hermiticity_warning() const { return warned_; }

 private:
  const Matrix& atom_matrix(const ExpAtom& atom, std::span<const double> alpha);
  const Matrix& letter_matrix(const Letter& l);

  template <typename F>
  void for_each_node(int m, F&& f);

  const Context& ctx_;
  Eigen::Index n_;
  bool warned_ = false;
  std::map<NcExpr, Eigensystem> eig_cache_;
  std::map<std::pair<const Eigensystem*, double>, Matrix> exp_cache_;
  std::vector<Matrix> adjoint_cache_;
  Matrix scratch_;
};

Matrix evaluate(const NcExpr& e, const Context& ctx);
cplx evaluate_tensor(const TensorExpr& t, const Context& ctx, const Reduction& r);

cplx trace(const Matrix& M);
cplx normalized_trace(const Matrix& M);
/// x^* M y
cplx bilinear(const Vector& x, const Matrix& M, const Vector& y);
/// ts(A B) without forming the product.
cplx ts_product(const Matrix& A, const Matrix& B);

}  // namespace ncfree
