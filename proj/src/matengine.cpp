#include "ncfree/matengine.hpp"

#include <cmath>

#include "ncfree/quadrature.hpp"

namespace ncfree {

double hermiticity_violation(const Matrix& H) {
  if (H.rows() != H.cols()) throw DimensionError("matrix is not square");
  if (H.size() == 0) return 0.0;
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  return (H - H.adjoint()).cwiseAbs().maxCoeff() / scale;
}

Matrix symmetrize_checked(const Matrix& H, bool* warned) {
  const double v = hermiticity_violation(H);
  if (v > kHermitianReject) throw HermiticityError("matrix is not Hermitian (violation " + std::to_string(v) + ")");
  if (v > kHermitianSilent && warned != nullptr) *warned = true;
  Matrix S = 0.5 * (H + H.adjoint());
  return S;
}

Matrix Eigensystem::exp_i(double y) const {
  Vector g(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) g(k) = std::polar(1.0, y * values(k));
  return with_spectrum(g);
}

Matrix Eigensystem::with_spectrum(const Vector& g) const {
  return vectors * g.asDiagonal() * vectors.adjoint();
}

Eigensystem hermitian_eigensystem(const Matrix& H, bool* warned) {
  const Matrix S = symmetrize_checked(H, warned);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix herm_funcalc(const Eigensystem& es, const FourierSum& f) {
  if (f.is_identity()) return es.with_spectrum(es.values.cast<cplx>());
  Vector g(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) g(k) = f(es.values(k));
  return es.with_spectrum(g);
}

Matrix herm_funcalc(const Matrix& H, const FourierSum& f) {
  if (f.is_identity()) {
    if (hermiticity_violation(H) > kHermitianReject) throw HermiticityError("funcalc input is not Hermitian");
    return H;
  }
  return herm_funcalc(hermitian_eigensystem(H), f);
}

Eigen::Index Context::dim() const {
  if (!X.empty()) return X.front().rows();
  if (!A.empty()) return A.front().rows();
  return 0;
}

void Context::validate() const {
  const Eigen::Index n = dim();
  for (const auto& m : X) {
    if (m.rows() != n || m.cols() != n) throw DimensionError("context matrices differ in dimension");
    if (hermiticity_violation(m) > kHermitianReject) throw HermiticityError("context X matrix is not Hermitian");
  }
  for (const auto& m : A)
    if (m.rows() != n || m.cols() != n) throw DimensionError("context matrices differ in dimension");
  if (quadrature_order < 1) throw std::invalid_argument("quadrature order must be positive");
}

Evaluator::Evaluator(const Context& ctx) : ctx_(ctx), n_(ctx.dim()) {
  ctx_.validate();
  for (const auto& m : ctx_.X)
    if (hermiticity_violation(m) > kHermitianSilent) warned_ = true;
  adjoint_cache_.resize(ctx_.A.size());
}

const Matrix& Evaluator::letter_matrix(const Letter& l) {
  const auto idx = static_cast<std::size_t>(l.index - 1);
  switch (l.kind) {
    case Letter::Kind::X:
      if (idx >= ctx_.X.size()) throw ArityError("context lacks X" + std::to_string(l.index));
      return ctx_.X[idx];
    case Letter::Kind::A:
      if (idx >= ctx_.A.size()) throw ArityError("context lacks A" + std::to_string(l.index));
      return ctx_.A[idx];
    case Letter::Kind::AStar:
      if (idx >= ctx_.A.size()) throw ArityError("context lacks A" + std::to_string(l.index));
      if (adjoint_cache_[idx].size() == 0) adjoint_cache_[idx] = ctx_.A[idx].adjoint();
      return adjoint_cache_[idx];
  }
  throw std::logic_error("bad letter kind");
}

const Eigensystem& Evaluator::eigensystem(const NcExpr& base) {
  auto it = eig_cache_.find(base);
  if (it == eig_cache_.end()) {
    const Matrix B = evaluate(base);
    it = eig_cache_.emplace(base, hermitian_eigensystem(B, &warned_)).first;
  }
  return it->second;
}

const Matrix& Evaluator::atom_matrix(const ExpAtom& atom, std::span<const double> alpha) {
  const Eigensystem& es = eigensystem(*atom.base);
  const double s = atom.scale(alpha);
  auto key = std::make_pair(&es, s);
  auto it = exp_cache_.find(key);
  if (it == exp_cache_.end()) {
    if (exp_cache_.size() > 256) exp_cache_.clear();
    it = exp_cache_.emplace(key, es.exp_i(s)).first;
  }
  return it->second;
}

Matrix Evaluator::evaluate_word(const Word& w, std::span<const double> alpha) {
  if (w.empty()) return Matrix::Identity(n_, n_);
  auto factor_matrix = [&](const Factor& f) -> const Matrix& {
    if (const auto* l = std::get_if<Letter>(&f)) return letter_matrix(*l);
    return atom_matrix(std::get<ExpAtom>(f), alpha);
  };
  Matrix acc = factor_matrix(w.front());
  for (std::size_t k = 1; k < w.size(); ++k) {
    scratch_.noalias() = acc * factor_matrix(w[k]);
    acc.swap(scratch_);
  }
  return acc;
}

Matrix Evaluator::evaluate(const NcExpr& e) {
  Matrix out = Matrix::Zero(n_, n_);
  for (const auto& [w, c] : e.terms()) out += c * evaluate_word(w);
  return out;
}

template <typename F>
void Evaluator::for_each_node(int m, F&& f) {
  if (m == 0) {
    f(std::span<const double>{}, 1.0);
    return;
  }
  const QuadratureRule& rule = gauss_legendre_unit(ctx_.quadrature_order);
  const auto order = rule.nodes.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> alpha(static_cast<std::size_t>(m));
  for (;;) {
    double w = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      alpha[k] = rule.nodes[idx[k]];
      w *= rule.weights[idx[k]];
    }
    f(std::span<const double>(alpha), w);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == order) idx[k++] = 0;
    if (k == idx.size()) break;
  }
}

Matrix Evaluator::evaluate(const LegExpr& e) {
  Matrix out = Matrix::Zero(n_, n_);
  for (const auto& [key, weight] : e.terms()) {
    for_each_node(key.alpha_count, [&](std::span<const double> alpha, double qw) {
      out += (qw * weight(alpha)) * evaluate_word(key.word, alpha);
    });
  }
  return out;
}

cplx Evaluator::evaluate_tensor(const TensorExpr& t, const Reduction& r) {
  const bool transposed = t.pairing() == TensorExpr::Pairing::transposed_left;
  if (const auto* sp = std::get_if<SharpThenTrace>(&r)) {
    if (sp->P.rows() != n_ || sp->P.cols() != n_) throw DimensionError("sharp matrix has wrong dimension");
  }
  cplx acc{};
  for (const auto& [key, weight] : t.terms()) {
    for_each_node(key.alpha_count, [&](std::span<const double> alpha, double qw) {
      const cplx coef = qw * weight(alpha);
      const Matrix L = evaluate_word(key.left, alpha);
      const Matrix R = evaluate_word(key.right, alpha);
      cplx v;
      if (transposed || std::holds_alternative<HThenTrace>(r)) {
        v = (L.cwiseProduct(R)).sum() / static_cast<double>(n_);
      } else if (const auto* sp = std::get_if<SharpThenTrace>(&r)) {
        v = ts_product(L * sp->P, R);
      } else {
        v = normalized_trace(L) * normalized_trace(R);
      }
      acc += coef * v;
    });
  }
  return acc;
}

cplx Evaluator::trace_of(const NcExpr& e) {
  cplx acc{};
  for (const auto& [w, c] : e.terms()) {
    if (w.size() >= 2) {
      Word head(w.begin(), w.end() - 1);
      Word tail(w.end() - 1, w.end());
      acc += c * ts_product(evaluate_word(head), evaluate_word(tail));
    } else {
      acc += c * normalized_trace(evaluate_word(w));
    }
  }
  return acc;
}

Matrix evaluate(const NcExpr& e, const Context& ctx) {
  Evaluator ev(ctx);
  return ev.evaluate(e);
}

cplx evaluate_tensor(const TensorExpr& t, const Context& ctx, const Reduction& r) {
  Evaluator ev(ctx);
  return ev.evaluate_tensor(t, r);
}

cplx trace(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("trace of a non-square matrix");
  return M.trace();
}

cplx normalized_trace(const Matrix& M) { return trace(M) / static_cast<double>(M.rows()); }

cplx bilinear(const Vector& x, const Matrix& M, const Vector& y) {
  if (x.size() != M.rows() || y.size() != M.cols()) throw DimensionError("bilinear form dimension mismatch");
  return x.dot(M * y);
}

cplx ts_product(const Matrix& A, const Matrix& B) {
  if (A.cols() != B.rows() || A.rows() != B.cols()) throw DimensionError("trace of product dimension mismatch");
  return (A.cwiseProduct(B.transpose())).sum() / static_cast<double>(A.rows());
}

}  // namespace ncfree
