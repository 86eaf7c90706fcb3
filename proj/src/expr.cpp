#include "ncfree/expr.hpp"

#include <algorithm>
#include <string>

namespace ncfree {

namespace {

bool cplx_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

bool is_unit_atom(const ExpAtom& a) { return a.scale.is_zero() || !a.base || a.base->is_zero(); }

Word canonical_word(Word w) {
  std::erase_if(w, [](const Factor& f) {
    const auto* atom = std::get_if<ExpAtom>(&f);
    return atom != nullptr && is_unit_atom(*atom);
  });
  return w;
}

void check_letter(Letter l, int d, int q) {
  const int bound = l.kind == Letter::Kind::X ? d : q;
  if (l.index < 1 || l.index > bound) {
    const char* name = l.kind == Letter::Kind::X ? "X" : "A";
    throw ArityError(std::string("letter ") + name + std::to_string(l.index) + " exceeds arity " +
                     (l.kind == Letter::Kind::X ? "d=" : "q=") + std::to_string(bound));
  }
}

Factor adjoint_factor(const Factor& f) {
  if (const auto* l = std::get_if<Letter>(&f)) {
    switch (l->kind) {
      case Letter::Kind::X:
        return *l;
      case Letter::Kind::A:
        return Letter::a_star(l->index);
      case Letter::Kind::AStar:
        return Letter::a(l->index);
    }
  }
  const auto& atom = std::get<ExpAtom>(f);
  return ExpAtom{-atom.scale, atom.base};
}

bool factor_has_alpha(const Factor& f) {
  const auto* atom = std::get_if<ExpAtom>(&f);
  if (atom == nullptr) return false;
  return !atom->scale.is_constant() || atom->base->has_alpha();
}

template <typename Pred>
bool any_factor(const NcExpr& e, Pred pred) {
  for (const auto& [w, c] : e.terms())
    for (const auto& f : w)
      if (pred(f)) return true;
  return false;
}

// Derivative of one word with integration variables numbered from offset.
TensorExpr derive_word(const Word& w, int i, int offset, int d, int q);

TensorExpr derive_expr(const NcExpr& e, int i, int offset) {
  TensorExpr out(e.d(), e.q());
  for (const auto& [w, c] : e.terms()) {
    TensorExpr t = derive_word(w, i, offset, e.d(), e.q());
    t *= c;
    out += t;
  }
  return out;
}

TensorExpr derive_factor(const Factor& f, int i, int offset, int d, int q) {
  TensorExpr out(d, q);
  if (const auto* l = std::get_if<Letter>(&f)) {
    if (l->kind == Letter::Kind::X && l->index == i) out.add_term(offset, {}, {}, ComplexAlphaPoly(1.0));
    return out;
  }
  const auto& atom = std::get<ExpAtom>(f);
  const TensorExpr inner = derive_expr(*atom.base, i, offset);
  const ComplexAlphaPoly prefactor = atom.scale.cast<cplx>() * cplx{0.0, 1.0};
  for (const auto& [key, weight] : inner.terms()) {
    const int k = key.alpha_count;
    const RealAlphaPoly alpha = RealAlphaPoly::variable(k);
    ExpAtom head{alpha * atom.scale, atom.base};
    ExpAtom tail{(RealAlphaPoly(1.0) - alpha) * atom.scale, atom.base};
    Word left;
    left.reserve(key.left.size() + 1);
    left.emplace_back(std::move(head));
    left.insert(left.end(), key.left.begin(), key.left.end());
    Word right = key.right;
    right.emplace_back(std::move(tail));
    out.add_term(k + 1, std::move(left), std::move(right), weight * prefactor);
  }
  return out;
}

TensorExpr derive_word(const Word& w, int i, int offset, int d, int q) {
  TensorExpr out(d, q);
  for (std::size_t j = 0; j < w.size(); ++j) {
    const TensorExpr df = derive_factor(w[j], i, offset, d, q);
    if (df.is_zero()) continue;
    for (const auto& [key, weight] : df.terms()) {
      Word left(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j));
      left.insert(left.end(), key.left.begin(), key.left.end());
      Word right = key.right;
      right.insert(right.end(), w.begin() + static_cast<std::ptrdiff_t>(j) + 1, w.end());
      out.add_term(key.alpha_count, std::move(left), std::move(right), weight);
    }
  }
  return out;
}

}  // namespace

bool operator==(const ExpAtom& a, const ExpAtom& b) {
  if (!(a.scale == b.scale)) return false;
  if (a.base == b.base) return true;
  if (!a.base || !b.base) return false;
  return *a.base == *b.base;
}

bool operator<(const ExpAtom& a, const ExpAtom& b) {
  if (a.scale < b.scale) return true;
  if (b.scale < a.scale) return false;
  if (a.base == b.base) return false;
  if (!a.base || !b.base) return !a.base && b.base;
  return *a.base < *b.base;
}

NcExpr NcExpr::unit(int d, int q) { return scalar(1.0, d, q); }

NcExpr NcExpr::scalar(cplx c, int d, int q) {
  NcExpr e(d, q);
  e.add_term({}, c);
  return e;
}

NcExpr NcExpr::letter(Letter l, int d, int q) {
  check_letter(l, d, q);
  NcExpr e(d, q);
  e.add_term({l}, 1.0);
  return e;
}

NcExpr NcExpr::exp(double scale, const NcExpr& base) { return exp(RealAlphaPoly(scale), base); }

NcExpr NcExpr::exp(const RealAlphaPoly& scale, const NcExpr& base) {
  if (!is_self_adjoint(base)) throw NotSelfAdjointError("exponential base is not self-adjoint");
  NcExpr e(base.d(), base.q());
  e.add_term({ExpAtom{scale, std::make_shared<const NcExpr>(base)}}, 1.0);
  return e;
}

NcExpr NcExpr::from_word(Word w, cplx c, int d, int q) {
  NcExpr e(d, q);
  e.add_term(std::move(w), c);
  return e;
}

void NcExpr::add_term(Word w, cplx c) {
  if (c == cplx{}) return;
  w = canonical_word(std::move(w));
  auto [it, inserted] = terms_.try_emplace(std::move(w), c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{}) terms_.erase(it);
  }
}

bool NcExpr::has_exp() const {
  return any_factor(*this, [](const Factor& f) { return std::holds_alternative<ExpAtom>(f); });
}

bool NcExpr::has_alpha() const { return any_factor(*this, factor_has_alpha); }

bool NcExpr::contains_x(int i) const {
  return any_factor(*this, [i](const Factor& f) {
    if (const auto* l = std::get_if<Letter>(&f)) return l->kind == Letter::Kind::X && l->index == i;
    return std::get<ExpAtom>(f).base->contains_x(i);
  });
}

bool NcExpr::has_x() const {
  return any_factor(*this, [](const Factor& f) {
    if (const auto* l = std::get_if<Letter>(&f)) return l->kind == Letter::Kind::X;
    return std::get<ExpAtom>(f).base->has_x();
  });
}

bool NcExpr::has_a() const {
  return any_factor(*this, [](const Factor& f) {
    if (const auto* l = std::get_if<Letter>(&f)) return l->kind != Letter::Kind::X;
    return std::get<ExpAtom>(f).base->has_a();
  });
}

int NcExpr::degree() const {
  int deg = 0;
  for (const auto& [w, c] : terms_) deg = std::max(deg, static_cast<int>(w.size()));
  return deg;
}

NcExpr NcExpr::with_arity(int d, int q) const {
  NcExpr e = *this;
  e.d_ = d;
  e.q_ = q;
  return e;
}

NcExpr& NcExpr::operator+=(const NcExpr& o) {
  d_ = std::max(d_, o.d_);
  q_ = std::max(q_, o.q_);
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

NcExpr& NcExpr::operator-=(const NcExpr& o) {
  d_ = std::max(d_, o.d_);
  q_ = std::max(q_, o.q_);
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

NcExpr& NcExpr::operator*=(cplx s) {
  if (s == cplx{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= s;
  return *this;
}

NcExpr operator*(const NcExpr& a, const NcExpr& b) {
  NcExpr out(std::max(a.d_, b.d_), std::max(a.q_, b.q_));
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_) out.add_term(concat(wa, wb), ca * cb);
  return out;
}

bool operator==(const NcExpr& a, const NcExpr& b) {
  return a.d_ == b.d_ && a.q_ == b.q_ && a.terms_ == b.terms_;
}

bool operator<(const NcExpr& a, const NcExpr& b) {
  return std::lexicographical_compare(
      a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end(), [](const auto& x, const auto& y) {
        if (x.first < y.first) return true;
        if (y.first < x.first) return false;
        return cplx_less(x.second, y.second);
      });
}

Word concat(const Word& a, const Word& b) {
  Word w;
  w.reserve(a.size() + b.size());
  w.insert(w.end(), a.begin(), a.end());
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

Word adjoint(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(adjoint_factor(*it));
  return out;
}

NcExpr adjoint(const NcExpr& e) {
  NcExpr out(e.d(), e.q());
  for (const auto& [w, c] : e.terms()) out.add_term(adjoint(w), std::conj(c));
  return out;
}

bool is_self_adjoint(const NcExpr& e) { return adjoint(e) == e; }

NcExpr normalize(const NcExpr& e) {
  NcExpr out(e.d(), e.q());
  for (const auto& [w, c] : e.terms()) out.add_term(w, c);
  return out;
}

NcExpr scale_atoms(const NcExpr& e, double y) {
  NcExpr out(e.d(), e.q());
  for (const auto& [w, c] : e.terms()) {
    Word scaled = w;
    for (auto& f : scaled)
      if (auto* atom = std::get_if<ExpAtom>(&f)) atom->scale *= y;
    out.add_term(std::move(scaled), c);
  }
  return out;
}

bool word_has_alpha(const Word& w) { return std::any_of(w.begin(), w.end(), factor_has_alpha); }

bool operator<(const TensorKey& a, const TensorKey& b) {
  if (a.alpha_count != b.alpha_count) return a.alpha_count < b.alpha_count;
  if (a.left < b.left) return true;
  if (b.left < a.left) return false;
  return a.right < b.right;
}

bool operator==(const TensorKey& a, const TensorKey& b) {
  return a.alpha_count == b.alpha_count && a.left == b.left && a.right == b.right;
}

bool operator<(const LegKey& a, const LegKey& b) {
  if (a.alpha_count != b.alpha_count) return a.alpha_count < b.alpha_count;
  return a.word < b.word;
}

bool operator==(const LegKey& a, const LegKey& b) { return a.alpha_count == b.alpha_count && a.word == b.word; }

void TensorExpr::add_term(int alpha_count, Word left, Word right, const ComplexAlphaPoly& weight) {
  if (weight.is_zero()) return;
  TensorKey key{alpha_count, canonical_word(std::move(left)), canonical_word(std::move(right))};
  auto [it, inserted] = terms_.try_emplace(std::move(key), weight);
  if (!inserted) {
    it->second += weight;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TensorExpr TensorExpr::with_pairing(Pairing p) const {
  TensorExpr t = *this;
  t.pairing_ = p;
  return t;
}

int TensorExpr::max_alpha_count() const {
  int m = 0;
  for (const auto& [key, w] : terms_) m = std::max(m, key.alpha_count);
  return m;
}

TensorExpr& TensorExpr::operator+=(const TensorExpr& o) {
  d_ = std::max(d_, o.d_);
  q_ = std::max(q_, o.q_);
  for (const auto& [key, w] : o.terms_) add_term(key.alpha_count, key.left, key.right, w);
  return *this;
}

TensorExpr& TensorExpr::operator*=(cplx s) {
  if (s == cplx{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, w] : terms_) w *= s;
  return *this;
}

LegExpr::LegExpr(const NcExpr& e) : d_(e.d()), q_(e.q()) {
  for (const auto& [w, c] : e.terms()) add_term(0, w, ComplexAlphaPoly(c));
}

void LegExpr::add_term(int alpha_count, Word w, const ComplexAlphaPoly& weight) {
  if (weight.is_zero()) return;
  LegKey key{alpha_count, canonical_word(std::move(w))};
  auto [it, inserted] = terms_.try_emplace(std::move(key), weight);
  if (!inserted) {
    it->second += weight;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int LegExpr::max_alpha_count() const {
  int m = 0;
  for (const auto& [key, w] : terms_) m = std::max(m, key.alpha_count);
  return m;
}

LegExpr& LegExpr::operator+=(const LegExpr& o) {
  d_ = std::max(d_, o.d_);
  q_ = std::max(q_, o.q_);
  for (const auto& [key, w] : o.terms_) add_term(key.alpha_count, key.word, w);
  return *this;
}

TensorExpr left_multiply(const NcExpr& p, const TensorExpr& t) {
  TensorExpr out(std::max(p.d(), t.d()), std::max(p.q(), t.q()));
  for (const auto& [w, c] : p.terms())
    for (const auto& [key, weight] : t.terms())
      out.add_term(key.alpha_count, concat(w, key.left), key.right, weight * c);
  return out.with_pairing(t.pairing());
}

TensorExpr right_multiply(const TensorExpr& t, const NcExpr& q) {
  TensorExpr out(std::max(q.d(), t.d()), std::max(q.q(), t.q()));
  for (const auto& [key, weight] : t.terms())
    for (const auto& [w, c] : q.terms())
      out.add_term(key.alpha_count, key.left, concat(key.right, w), weight * c);
  return out.with_pairing(t.pairing());
}

TensorExpr tensor_product(const NcExpr& left, const NcExpr& right) {
  TensorExpr out(std::max(left.d(), right.d()), std::max(left.q(), right.q()));
  for (const auto& [wl, cl] : left.terms())
    for (const auto& [wr, cr] : right.terms()) out.add_term(0, wl, wr, ComplexAlphaPoly(cl * cr));
  return out;
}

TensorExpr nc_derivative(const NcExpr& e, int i) {
  if (i < 1 || i > e.d()) throw ArityError("derivative index " + std::to_string(i) + " outside [1, d]");
  return derive_expr(e, i, 0);
}

TensorExpr nc_derivative(const LegExpr& e, int i) {
  if (i < 1 || i > e.d()) throw ArityError("derivative index " + std::to_string(i) + " outside [1, d]");
  TensorExpr out(e.d(), e.q());
  for (const auto& [key, weight] : e.terms()) {
    const TensorExpr t = derive_word(key.word, i, key.alpha_count, e.d(), e.q());
    for (const auto& [tk, tw] : t.terms()) out.add_term(tk.alpha_count, tk.left, tk.right, tw * weight);
  }
  return out;
}

LegExpr cyclic_derivative(const NcExpr& e, int i) { return multiply(nc_derivative(e, i)); }

LegExpr cyclic_derivative(const LegExpr& e, int i) { return multiply(nc_derivative(e, i)); }

LegExpr sharp(const TensorExpr& t, const NcExpr& c) {
  LegExpr out(std::max(t.d(), c.d()), std::max(t.q(), c.q()));
  for (const auto& [key, weight] : t.terms())
    for (const auto& [w, coef] : c.terms())
      out.add_term(key.alpha_count, concat(concat(key.left, w), key.right), weight * coef);
  return out;
}

LegExpr tilde_sharp(const TensorExpr& t, const NcExpr& c) {
  LegExpr out(std::max(t.d(), c.d()), std::max(t.q(), c.q()));
  for (const auto& [key, weight] : t.terms())
    for (const auto& [w, coef] : c.terms())
      out.add_term(key.alpha_count, concat(concat(key.right, w), key.left), weight * coef);
  return out;
}

LegExpr multiply(const TensorExpr& t) {
  LegExpr out(t.d(), t.q());
  for (const auto& [key, weight] : t.terms()) out.add_term(key.alpha_count, concat(key.right, key.left), weight);
  return out;
}

TensorExpr transpose_pair(const TensorExpr& t) { return t.with_pairing(TensorExpr::Pairing::transposed_left); }

std::variant<LegExpr, TensorExpr> tensor_contract(const TensorExpr& t, Contraction mode, const NcExpr* c) {
  switch (mode) {
    case Contraction::sharp:
      if (c == nullptr) throw std::invalid_argument("sharp contraction requires an expression C");
      return sharp(t, *c);
    case Contraction::tilde_sharp:
      if (c == nullptr) throw std::invalid_argument("tilde-sharp contraction requires an expression C");
      return tilde_sharp(t, *c);
    case Contraction::multiply:
      return multiply(t);
    case Contraction::transpose_pair:
      return transpose_pair(t);
  }
  throw std::invalid_argument("unknown contraction mode");
}

}  // namespace ncfree
