#include "ncfree/surrogate.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ncfree/ensembles.hpp"
#include "ncfree/free_trace.hpp"
#include "ncfree/parallel.hpp"
#include "ncfree/stats.hpp"

namespace ncfree {

namespace {

bool word_has_x(const Word& w) {
  return std::any_of(w.begin(), w.end(), [](const Factor& f) {
    const auto* l = std::get_if<Letter>(&f);
    return l == nullptr || l->kind == Letter::Kind::X;
  });
}

int max_x_index(const NcExpr& e) {
  int m = 0;
  for (const auto& [w, c] : e.terms())
    for (const auto& f : w) {
      if (const auto* l = std::get_if<Letter>(&f)) {
        if (l->kind == Letter::Kind::X) m = std::max(m, l->index);
      } else {
        for (const auto& [bw, bc] : std::get<ExpAtom>(f).base->terms())
          for (const auto& bf : bw)
            if (const auto* bl = std::get_if<Letter>(&bf); bl && bl->kind == Letter::Kind::X) m = std::max(m, bl->index);
      }
    }
  return std::max(m, e.d());
}

Word min_rotation(const Word& w) {
  Word best = w;
  for (std::size_t r = 1; r < w.size(); ++r) {
    Word rot(w.begin() + static_cast<std::ptrdiff_t>(r), w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r));
    if (rot < best) best = std::move(rot);
  }
  return best;
}

// ts of a product of A letters, exact at the matrices' own dimension.
cplx deterministic_trace(const Word& w, const std::vector<Matrix>& A) {
  if (w.empty()) return 1.0;
  if (A.empty()) throw ArityError("word references A letters but no matrices were supplied");
  Context ctx;
  ctx.A = A;
  Evaluator ev(ctx);
  return normalized_trace(ev.evaluate_word(w));
}

std::vector<Matrix> replicate_all(const std::vector<Matrix>& A, Eigen::Index n) {
  std::vector<Matrix> out;
  out.reserve(A.size());
  for (const auto& a : A) out.push_back(block_replicate(a, n));
  return out;
}

Estimate summarize(const std::vector<cplx>& values) {
  return {mean(values), stderr_of_mean(values), static_cast<long>(values.size())};
}

Context gue_context(int d, const std::vector<Matrix>& A_rep, Eigen::Index n, const SeedStream& s, int order) {
  Context ctx;
  ctx.quadrature_order = order;
  ctx.A = A_rep;
  for (int i = 0; i < d; ++i)
    ctx.X.push_back(sample(EnsembleSpec::gue(static_cast<int>(n)), s.with_matrix(static_cast<std::uint32_t>(i))));
  return ctx;
}

}  // namespace

Matrix block_replicate(const Matrix& A, Eigen::Index n) {
  if (A.rows() != A.cols()) throw DimensionError("block replication needs a square matrix");
  const Eigen::Index m = A.rows();
  if (m == n) return A;
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index b = 0; b * m < n; ++b) {
    const Eigen::Index len = std::min(m, n - b * m);
    out.block(b * m, b * m, len, len) = A.topLeftCorner(len, len);
  }
  return out;
}

ReducedTrace reduce_by_loop_equations(const NcExpr& e, const std::vector<Matrix>& A) {
  if (e.has_exp()) throw std::invalid_argument("loop-equation reduction needs a polynomial observable");
  ReducedTrace out{0.0, {}};
  // Pending single traces keyed by (length, canonical rotation) so longer
  // words are expanded first and identical traces are merged.
  std::map<std::pair<std::size_t, Word>, cplx, std::greater<>> pending;
  std::map<std::pair<Word, Word>, cplx> pairs;
  auto push = [&](const Word& w, cplx c) {
    if (c == cplx{}) return;
    if (!word_has_x(w)) {
      out.constant += c * deterministic_trace(w, A);
      return;
    }
    Word r = min_rotation(w);
    pending[{r.size(), std::move(r)}] += c;
  };
  for (const auto& [w, c] : e.terms()) push(w, c);
  while (!pending.empty()) {
    auto it = pending.begin();
    const Word w = it->first.second;
    const cplx c = it->second;
    pending.erase(it);
    if (c == cplx{}) continue;
    std::size_t p = 0;
    while (std::get<Letter>(w[p]).kind != Letter::Kind::X) ++p;
    Word rot(w.begin() + static_cast<std::ptrdiff_t>(p), w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
    const Letter xi = std::get<Letter>(rot.front());
    const Word R(rot.begin() + 1, rot.end());
    for (std::size_t q = 0; q < R.size(); ++q) {
      if (std::get<Letter>(R[q]) != xi) continue;
      Word L(R.begin(), R.begin() + static_cast<std::ptrdiff_t>(q));
      Word M(R.begin() + static_cast<std::ptrdiff_t>(q) + 1, R.end());
      const bool lx = word_has_x(L), mx = word_has_x(M);
      if (!lx) {
        push(M, c * deterministic_trace(L, A));
      } else if (!mx) {
        push(L, c * deterministic_trace(M, A));
      } else {
        Word a = min_rotation(L), b = min_rotation(M);
        if (b < a) std::swap(a, b);
        pairs[{std::move(a), std::move(b)}] += c;
      }
    }
  }
  for (auto& [key, c] : pairs)
    if (c != cplx{}) out.pairs.push_back({c, key.first, key.second});
  return out;
}

Estimate free_surrogate_trace(const NcExpr& e, const std::vector<Matrix>& A, Eigen::Index N_surrogate, long samples,
                              const SeedStream& stream, const SurrogateOptions& opts) {
  if (samples < 2) throw std::invalid_argument("surrogate needs at least two samples");
  if (N_surrogate < 1) throw std::invalid_argument("surrogate dimension must be positive");
  const int d = max_x_index(e);
  const std::vector<Matrix> A_rep = replicate_all(A, N_surrogate);
  std::vector<cplx> values(static_cast<std::size_t>(samples));

  if (opts.method == SurrogateMethod::schwinger_dyson) {
    const ReducedTrace red = reduce_by_loop_equations(e, A);
    parallel_for(values.size(), opts.workers, [&](std::size_t s) {
      const Context ctx = gue_context(d, A_rep, N_surrogate, stream.with_sample(static_cast<std::uint32_t>(s)), opts.quadrature_order);
      Evaluator ev(ctx);
      std::map<Word, cplx> cache;
      auto ts = [&](const Word& w) {
        auto it = cache.find(w);
        if (it == cache.end()) it = cache.emplace(w, normalized_trace(ev.evaluate_word(w))).first;
        return it->second;
      };
      cplx v = red.constant;
      for (const auto& p : red.pairs) v += p.coef * ts(p.left) * ts(p.right);
      values[s] = v;
    });
    if (red.pairs.empty()) return {red.constant, 0.0, samples};
    return summarize(values);
  }

  parallel_for(values.size(), opts.workers, [&](std::size_t s) {
    const Context ctx = gue_context(d, A_rep, N_surrogate, stream.with_sample(static_cast<std::uint32_t>(s)), opts.quadrature_order);
    Evaluator ev(ctx);
    values[s] = ev.trace_of(e);
  });
  return summarize(values);
}

Estimate conditional_expectation_scalar(const NcExpr& e, const std::vector<Matrix>& A, const Vector& x,
                                        const Vector& y, Eigen::Index N_surrogate, long samples,
                                        const SeedStream& stream, const SurrogateOptions& opts) {
  const Eigen::Index N = x.size();
  if (y.size() != N) throw DimensionError("vectors x and y differ in length");
  for (const auto& a : A)
    if (a.rows() != N || a.cols() != N) throw DimensionError("matrices must match the vector length");
  if (!e.has_x()) {
    Context ctx;
    ctx.A = A;
    if (A.empty()) {
      // Scalar expression: evaluate on a 1 x 1 context and scale.
      cplx s{};
      for (const auto& [w, c] : e.terms()) s += c;
      return {s * x.dot(y), 0.0, 0};
    }
    return {bilinear(x, evaluate(e, ctx), y), 0.0, 0};
  }
  if (e.is_polynomial()) {
    const Matrix yx = y * x.adjoint();
    return {static_cast<double>(N) * free_polynomial_trace(e, A, yx), 0.0, 0};
  }
  if (N_surrogate % N != 0) throw std::invalid_argument("N_surrogate must be a multiple of the vector length");
  if (samples < 2) throw std::invalid_argument("surrogate needs at least two samples");
  const Eigen::Index blocks = N_surrogate / N;
  const int d = max_x_index(e);
  const std::vector<Matrix> A_rep = replicate_all(A, N_surrogate);
  std::vector<cplx> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), opts.workers, [&](std::size_t s) {
    const Context ctx = gue_context(d, A_rep, N_surrogate, stream.with_sample(static_cast<std::uint32_t>(s)), opts.quadrature_order);
    Evaluator ev(ctx);
    const Matrix Q = ev.evaluate(e);
    cplx acc{};
    for (Eigen::Index b = 0; b < blocks; ++b) acc += x.dot(Q.block(b * N, b * N, N, N) * y);
    values[s] = acc / static_cast<double>(blocks);
  });
  return summarize(values);
}

}  // namespace ncfree
