#include "ncfree/free_trace.hpp"

#include <charconv>
#include <map>
#include <stdexcept>
#include <string>

#include "ncfree/partitions.hpp"

namespace ncfree {

namespace {

void check_mats(const FreeWord& w, const std::vector<Matrix>& mats, Eigen::Index N) {
  for (const auto& m : mats)
    if (m.rows() != N || m.cols() != N) throw DimensionError("free word matrices must be N x N");
  for (const auto& t : w.tokens) {
    if (const auto* r = std::get_if<MatrixRef>(&t)) {
      if (r->index < 1 || r->index > static_cast<int>(mats.size())) throw std::invalid_argument("matrix reference out of range");
    } else if (std::get<SemiLetter>(t).color < 1) {
      throw std::invalid_argument("semicircular colour must be positive");
    }
  }
}

// Semicircle moments from the Catalan recursion, kept separate from the
// partition module so the oracle shares no code with free_word_trace.
double oracle_semicircle_moment(int p) {
  if (p % 2) return 0.0;
  std::vector<double> c(static_cast<std::size_t>(p / 2) + 1, 0.0);
  c[0] = 1.0;
  for (std::size_t m = 1; m < c.size(); ++m)
    for (std::size_t i = 0; i < m; ++i) c[m] += c[i] * c[m - 1 - i];
  return c.back();
}

class FreenessOracle {
 public:
  FreenessOracle(const FreeWord& w, const std::vector<Matrix>& mats, Eigen::Index N) : w_(w), mats_(mats), n_(N) {}

  cplx run() { return tau((std::uint32_t{1} << w_.tokens.size()) - 1); }

 private:
  struct Element {
    int algebra;  // 0 for M_N, colour otherwise
    int power;
    Matrix m;
  };

  std::vector<Element> merged(std::uint32_t mask) const {
    std::vector<Element> out;
    for (std::size_t k = 0; k < w_.tokens.size(); ++k) {
      if (!(mask >> k & 1u)) continue;
      const auto& t = w_.tokens[k];
      if (const auto* s = std::get_if<SemiLetter>(&t)) {
        if (!out.empty() && out.back().algebra == s->color) {
          ++out.back().power;
        } else {
          out.push_back({s->color, 1, {}});
        }
      } else {
        const Matrix& m = mats_[static_cast<std::size_t>(std::get<MatrixRef>(t).index - 1)];
        if (!out.empty() && out.back().algebra == 0) {
          out.back().m = out.back().m * m;
        } else {
          out.push_back({0, 0, m});
        }
      }
    }
    return out;
  }

  cplx element_trace(const Element& e) const {
    if (e.algebra == 0) return e.m.trace() / static_cast<double>(n_);
    return oracle_semicircle_moment(e.power);
  }

  // Positions of the tokens forming each merged element, in order.
  std::vector<std::uint32_t> element_masks(std::uint32_t mask) const {
    std::vector<std::uint32_t> out;
    int last = -1;
    for (std::size_t k = 0; k < w_.tokens.size(); ++k) {
      if (!(mask >> k & 1u)) continue;
      const auto& t = w_.tokens[k];
      const int alg = std::holds_alternative<MatrixRef>(t) ? 0 : std::get<SemiLetter>(t).color;
      if (!out.empty() && alg == last) {
        out.back() |= std::uint32_t{1} << k;
      } else {
        out.push_back(std::uint32_t{1} << k);
      }
      last = alg;
    }
    return out;
  }

  cplx tau(std::uint32_t mask) {
    if (mask == 0) return 1.0;
    if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
    const auto elems = merged(mask);
    const auto masks = element_masks(mask);
    cplx result;
    if (elems.size() == 1) {
      result = element_trace(elems.front());
    } else {
      // tau(prod (a_j - tau a_j)) = 0 expanded over the subsets T of
      // factors replaced by their traces.
      const std::size_t n = elems.size();
      std::vector<cplx> t(n);
      for (std::size_t j = 0; j < n; ++j) t[j] = element_trace(elems[j]);
      cplx acc{};
      for (std::uint32_t sub = 1; sub < (std::uint32_t{1} << n); ++sub) {
        cplx coef = 1.0;
        std::uint32_t rest = mask;
        for (std::size_t j = 0; j < n; ++j) {
          if (sub >> j & 1u) {
            coef *= -t[j];
            rest &= ~masks[j];
          }
        }
        if (coef == cplx{}) continue;
        acc += coef * tau(rest);
      }
      result = -acc;
    }
    memo_.emplace(mask, result);
    return result;
  }

  const FreeWord& w_;
  const std::vector<Matrix>& mats_;
  Eigen::Index n_;
  std::map<std::uint32_t, cplx> memo_;
};

struct GapWord {
  std::vector<int> colors;
  std::vector<Matrix> gaps;  // gap j follows semicircular j; the last wraps around
};

// Rotates the word so it starts at its first semicircular letter and
// collects the matrix products between consecutive semicirculars.
GapWord to_gaps(const std::vector<std::variant<int, const Matrix*>>& seq, Eigen::Index N) {
  GapWord g;
  std::size_t first = seq.size();
  for (std::size_t k = 0; k < seq.size(); ++k)
    if (std::holds_alternative<int>(seq[k])) {
      first = k;
      break;
    }
  if (first == seq.size()) return g;
  for (std::size_t step = 0; step < seq.size(); ++step) {
    const auto& t = seq[(first + step) % seq.size()];
    if (const int* c = std::get_if<int>(&t)) {
      g.colors.push_back(*c);
      g.gaps.push_back(Matrix::Identity(N, N));
    } else {
      g.gaps.back() = g.gaps.back() * *std::get<const Matrix*>(t);
    }
  }
  return g;
}

cplx gap_trace(const std::vector<std::variant<int, const Matrix*>>& seq, Eigen::Index N) {
  if (N < 1) throw DimensionError("free trace requires N >= 1");
  const GapWord g = to_gaps(seq, N);
  if (g.colors.empty()) {
    Matrix acc = Matrix::Identity(N, N);
    for (const auto& t : seq) acc = acc * *std::get<const Matrix*>(t);
    return acc.trace() / static_cast<double>(N);
  }
  const int k = static_cast<int>(g.colors.size());
  if (k % 2) return 0.0;
  cplx total{};
  for (const auto& pi : nc_pair_partitions(k, g.colors)) {
    const NcPartition K = kreweras(pi);
    cplx term = 1.0;
    for (const auto& block : K.blocks) {
      Matrix prod = g.gaps[static_cast<std::size_t>(block.front() - 1)];
      for (std::size_t t = 1; t < block.size(); ++t) prod = prod * g.gaps[static_cast<std::size_t>(block[t] - 1)];
      term *= prod.trace() / static_cast<double>(N);
    }
    total += term;
  }
  return total;
}

std::vector<std::variant<int, const Matrix*>> word_sequence(const Word& w, const std::vector<Matrix>& A,
                                                            std::vector<Matrix>& adjoints) {
  std::vector<std::variant<int, const Matrix*>> seq;
  for (const auto& f : w) {
    const auto* l = std::get_if<Letter>(&f);
    if (l == nullptr) throw std::invalid_argument("exact free trace is limited to polynomial expressions");
    if (l->kind == Letter::Kind::X) {
      seq.emplace_back(l->index);
      continue;
    }
    const auto idx = static_cast<std::size_t>(l->index - 1);
    if (idx >= A.size()) throw ArityError("missing matrix for A" + std::to_string(l->index));
    if (l->kind == Letter::Kind::A) {
      seq.emplace_back(&A[idx]);
    } else {
      if (adjoints[idx].size() == 0) adjoints[idx] = A[idx].adjoint();
      seq.emplace_back(&adjoints[idx]);
    }
  }
  return seq;
}

}  // namespace

FreeWord FreeWord::parse(std::string_view text) {
  FreeWord w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view tok = text.substr(pos, end - pos);
    if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'B')) throw std::invalid_argument("bad free word token '" + std::string(tok) + "'");
    int idx = 0;
    auto res = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || idx < 1)
      throw std::invalid_argument("bad free word token '" + std::string(tok) + "'");
    if (tok[0] == 'x') {
      w.tokens.emplace_back(SemiLetter{idx});
    } else {
      w.tokens.emplace_back(MatrixRef{idx});
    }
    pos = end;
  }
  return w;
}

cplx free_word_trace(const FreeWord& w, const std::vector<Matrix>& mats, Eigen::Index N) {
  check_mats(w, mats, N);
  std::vector<std::variant<int, const Matrix*>> seq;
  for (const auto& t : w.tokens) {
    if (const auto* s = std::get_if<SemiLetter>(&t)) {
      seq.emplace_back(s->color);
    } else {
      seq.emplace_back(&mats[static_cast<std::size_t>(std::get<MatrixRef>(t).index - 1)]);
    }
  }
  return gap_trace(seq, N);
}

cplx freeness_oracle_trace(const FreeWord& w, const std::vector<Matrix>& mats, Eigen::Index N) {
  if (w.tokens.size() > 12) throw std::invalid_argument("freeness oracle is limited to words of length <= 12");
  check_mats(w, mats, N);
  return FreenessOracle(w, mats, N).run();
}

cplx free_polynomial_trace(const NcExpr& e, const std::vector<Matrix>& A) {
  const Eigen::Index N = A.empty() ? 1 : A.front().rows();
  std::vector<Matrix> adjoints(A.size());
  cplx acc{};
  for (const auto& [w, c] : e.terms()) acc += c * gap_trace(word_sequence(w, A, adjoints), N);
  return acc;
}

cplx free_polynomial_trace(const NcExpr& e, const std::vector<Matrix>& A, const Matrix& M) {
  const Eigen::Index N = M.rows();
  for (const auto& a : A)
    if (a.rows() != N) throw DimensionError("matrix dimensions differ");
  std::vector<Matrix> adjoints(A.size());
  cplx acc{};
  for (const auto& [w, c] : e.terms()) {
    auto seq = word_sequence(w, A, adjoints);
    seq.emplace_back(&M);
    acc += c * gap_trace(seq, N);
  }
  return acc;
}

}  // namespace ncfree
