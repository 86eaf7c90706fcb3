#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace ncfree {

using cplx = std::complex<double>;

/// Exponent vector over the quadrature variables alpha_0, alpha_1, ...
/// Trailing zero exponents are always trimmed.
using AlphaMonomial = std::vector<std::uint8_t>;

/// Polynomial in the integration variables introduced by derivatives of
/// exponential atoms. Every variable is integrated over [0,1].
template <typename T>
class AlphaPoly {
 public:
  AlphaPoly() = default;
  AlphaPoly(T c) {  // NOLINT: implicit constant promotion is intended
    if (c != T{}) terms_[AlphaMonomial{}] = c;
  }

  static AlphaPoly variable(int k, T c = T{1}) {
    AlphaPoly p;
    AlphaMonomial m(static_cast<std::size_t>(k) + 1, 0);
    m[static_cast<std::size_t>(k)] = 1;
    if (c != T{}) p.terms_[m] = c;
    return p;
  }

  const std::map<AlphaMonomial, T>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  T constant_term() const {
    auto it = terms_.find(AlphaMonomial{});
    return it == terms_.end() ? T{} : it->second;
  }

  /// Number of variables referenced, i.e. one past the highest index used.
  int variable_count() const {
    std::size_t n = 0;
    for (const auto& [m, c] : terms_) n = std::max(n, m.size());
    return static_cast<int>(n);
  }

  T operator()(std::span<const double> alpha) const {
    T acc{};
    for (const auto& [m, c] : terms_) {
      double w = 1.0;
      for (std::size_t k = 0; k < m.size(); ++k)
        for (std::uint8_t e = 0; e < m[k]; ++e) w *= alpha[k];
      acc += c * w;
    }
    return acc;
  }

  template <typename U>
  AlphaPoly<U> cast() const {
    AlphaPoly<U> out;
    for (const auto& [m, c] : terms_) out.add_term(m, static_cast<U>(c));
    return out;
  }

  void add_term(const AlphaMonomial& m, T c) {
    if (c == T{}) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == T{}) terms_.erase(it);
    }
  }

  AlphaPoly& operator+=(const AlphaPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  AlphaPoly& operator-=(const AlphaPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  AlphaPoly& operator*=(T s) {
    if (s == T{}) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend AlphaPoly operator+(AlphaPoly a, const AlphaPoly& b) { return a += b; }
  friend AlphaPoly operator-(AlphaPoly a, const AlphaPoly& b) { return a -= b; }
  friend AlphaPoly operator-(AlphaPoly a) { return a *= T{-1}; }
  friend AlphaPoly operator*(AlphaPoly a, T s) { return a *= s; }
  friend AlphaPoly operator*(T s, AlphaPoly a) { return a *= s; }

  friend AlphaPoly operator*(const AlphaPoly& a, const AlphaPoly& b) {
    AlphaPoly out;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        AlphaMonomial m(std::max(ma.size(), mb.size()), 0);
        for (std::size_t k = 0; k < ma.size(); ++k) m[k] += ma[k];
        for (std::size_t k = 0; k < mb.size(); ++k) m[k] += mb[k];
        out.add_term(m, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const AlphaPoly& a, const AlphaPoly& b) { return a.terms_ == b.terms_; }

 private:
  std::map<AlphaMonomial, T> terms_;
};

using RealAlphaPoly = AlphaPoly<double>;
using ComplexAlphaPoly = AlphaPoly<cplx>;

/// Total order on real polynomials (monomials lexicographic, then coefficient).
inline bool operator<(const RealAlphaPoly& a, const RealAlphaPoly& b) { return a.terms() < b.terms(); }

}  // namespace ncfree
