#pragma once

// Non-commutative expressions: polynomials in self-adjoint letters X_i,
// deterministic letters A_j and A_j^*, and opaque exponential atoms
// exp(i*y*R) with R self-adjoint. Expressions are immutable values; every
// operation below is a pure function.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ncfree/alpha_poly.hpp"

namespace ncfree {

class NcExpr;

struct Letter {
  enum class Kind : std::uint8_t { X, A, AStar };
  Kind kind = Kind::X;
  int index = 1;  // 1-based

  static Letter x(int i) { return {Kind::X, i}; }
  static Letter a(int j) { return {Kind::A, j}; }
  static Letter a_star(int j) { return {Kind::AStar, j}; }

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

/// exp(i * scale * base). The scale is a polynomial in the quadrature
/// variables so that derivative outputs can carry exp(i*alpha*y*R).
struct ExpAtom {
  RealAlphaPoly scale;
  std::shared_ptr<const NcExpr> base;
};

bool operator==(const ExpAtom& a, const ExpAtom& b);
bool operator<(const ExpAtom& a, const ExpAtom& b);

using Factor = std::variant<Letter, ExpAtom>;
using Word = std::vector<Factor>;  // empty word is the unit

class ArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotSelfAdjointError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NcExpr {
 public:
  using TermMap = std::map<Word, cplx>;

  NcExpr() = default;
  NcExpr(int d, int q) : d_(d), q_(q) {}

  static NcExpr unit(int d, int q);
  static NcExpr scalar(cplx c, int d, int q);
  static NcExpr letter(Letter l, int d, int q);
  static NcExpr x(int i, int d, int q = 0) { return letter(Letter::x(i), d, q); }
  static NcExpr a(int j, int d, int q) { return letter(Letter::a(j), d, q); }
  /// exp(i * scale * base); throws NotSelfAdjointError unless base is self-adjoint.
  static NcExpr exp(double scale, const NcExpr& base);
  static NcExpr exp(const RealAlphaPoly& scale, const NcExpr& base);
  static NcExpr from_word(Word w, cplx c, int d, int q);

  int d() const { return d_; }
  int q() const { return q_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c*w, dropping unit atoms (zero scale or zero base) from w.
  void add_term(Word w, cplx c);

  bool has_exp() const;
  bool is_polynomial() const { return !has_exp(); }
  bool has_alpha() const;
  bool contains_x(int i) const;
  bool has_x() const;
  bool has_a() const;
  /// Largest word length, atoms counting as one factor.
  int degree() const;

  NcExpr with_arity(int d, int q) const;

  NcExpr& operator+=(const NcExpr& o);
  NcExpr& operator-=(const NcExpr& o);
  NcExpr& operator*=(cplx s);

  friend NcExpr operator+(NcExpr a, const NcExpr& b) { return a += b; }
  friend NcExpr operator-(NcExpr a, const NcExpr& b) { return a -= b; }
  friend NcExpr operator-(NcExpr a) { return a *= cplx{-1.0}; }
  friend NcExpr operator*(NcExpr a, cplx s) { return a *= s; }
  friend NcExpr operator*(cplx s, NcExpr a) { return a *= s; }
  friend NcExpr operator*(const NcExpr& a, const NcExpr& b);

  friend bool operator==(const NcExpr& a, const NcExpr& b);
  friend bool operator<(const NcExpr& a, const NcExpr& b);

 private:
  int d_ = 0;
  int q_ = 0;
  TermMap terms_;
};

Word concat(const Word& a, const Word& b);
Word adjoint(const Word& w);
NcExpr adjoint(const NcExpr& e);
bool is_self_adjoint(const NcExpr& e);
NcExpr normalize(const NcExpr& e);
/// Multiplies the scale of every top-level exponential atom by y.
NcExpr scale_atoms(const NcExpr& e, double y);
bool word_has_alpha(const Word& w);

/// Key of one elementary tensor: alpha_count integration variables, left
/// and right words. Coefficients live in the map value.
struct TensorKey {
  int alpha_count = 0;
  Word left;
  Word right;
};
bool operator<(const TensorKey& a, const TensorKey& b);
bool operator==(const TensorKey& a, const TensorKey& b);

struct LegKey {
  int alpha_count = 0;
  Word word;
};
bool operator<(const LegKey& a, const LegKey& b);
bool operator==(const LegKey& a, const LegKey& b);

/// Weighted sum of left (x) right word pairs. Weights are polynomials in
/// the term-local quadrature variables.
class TensorExpr {
 public:
  /// transposed_left marks the output of h(A (x) B) = A^T B, which only
  /// has meaning once evaluated on matrices.
  enum class Pairing { tensor, transposed_left };
  using TermMap = std::map<TensorKey, ComplexAlphaPoly>;

  TensorExpr() = default;
  TensorExpr(int d, int q) : d_(d), q_(q) {}

  void add_term(int alpha_count, Word left, Word right, const ComplexAlphaPoly& weight);
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int d() const { return d_; }
  int q() const { return q_; }
  Pairing pairing() const { return pairing_; }
  TensorExpr with_pairing(Pairing p) const;
  int max_alpha_count() const;

  TensorExpr& operator+=(const TensorExpr& o);
  TensorExpr& operator*=(cplx s);
  friend TensorExpr operator+(TensorExpr a, const TensorExpr& b) { return a += b; }
  friend bool operator==(const TensorExpr& a, const TensorExpr& b) {
    return a.pairing_ == b.pairing_ && a.terms_ == b.terms_;
  }

 private:
  int d_ = 0;
  int q_ = 0;
  Pairing pairing_ = Pairing::tensor;
  TermMap terms_;
};

/// Single-leg expression with quadrature variables: the output of m, #
/// and the cyclic derivative.
class LegExpr {
 public:
  using TermMap = std::map<LegKey, ComplexAlphaPoly>;

  LegExpr() = default;
  LegExpr(int d, int q) : d_(d), q_(q) {}
  explicit LegExpr(const NcExpr& e);

  void add_term(int alpha_count, Word w, const ComplexAlphaPoly& weight);
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int d() const { return d_; }
  int q() const { return q_; }
  int max_alpha_count() const;

  LegExpr& operator+=(const LegExpr& o);
  friend bool operator==(const LegExpr& a, const LegExpr& b) { return a.terms_ == b.terms_; }

 private:
  int d_ = 0;
  int q_ = 0;
  TermMap terms_;
};

/// (P (x) 1) t
TensorExpr left_multiply(const NcExpr& p, const TensorExpr& t);
/// t (1 (x) Q)
TensorExpr right_multiply(const TensorExpr& t, const NcExpr& q);
TensorExpr tensor_product(const NcExpr& left, const NcExpr& right);

/// Non-commutative derivative with respect to X_i. Each exponential atom
/// whose base contains X_i contributes i*y*(exp(i a y R) (x) 1) dR (1 (x) exp(i (1-a) y R))
/// with a fresh integration variable a.
TensorExpr nc_derivative(const NcExpr& e, int i);
TensorExpr nc_derivative(const LegExpr& e, int i);

/// D_i = m o d_i.
LegExpr cyclic_derivative(const NcExpr& e, int i);
LegExpr cyclic_derivative(const LegExpr& e, int i);

enum class Contraction { sharp, tilde_sharp, multiply, transpose_pair };

/// A(x)B # C = ACB, A(x)B ~# C = BCA, m(A(x)B) = BA. transpose_pair tags the
/// tensor for h(A(x)B) = A^T B, resolved by the evaluator.
std::variant<LegExpr, TensorExpr> tensor_contract(const TensorExpr& t, Contraction mode,
                                                  const NcExpr* c = nullptr);
LegExpr sharp(const TensorExpr& t, const NcExpr& c);
LegExpr tilde_sharp(const TensorExpr& t, const NcExpr& c);
LegExpr multiply(const TensorExpr& t);
TensorExpr transpose_pair(const TensorExpr& t);

}  // namespace ncfree
