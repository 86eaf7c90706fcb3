#pragma once

#include <cstdint>
#include <vector>

#include "ncfree/expr.hpp"
#include "ncfree/matengine.hpp"
#include "ncfree/rng.hpp"

namespace ncfree {

enum class SurrogateMethod {
  /// Plain average of ts(Q(X, A)) over GUE samples.
  monte_carlo,
  /// Polynomial observables only: single-trace terms are reduced with the
  /// GUE loop equation E ts(X_i R) = E ts(x)ts(d_i R) until every remaining
  /// term is a product of two random traces, which is then sampled. Same
  /// expectation as monte_carlo, much smaller variance.
  schwinger_dyson,
};

struct SurrogateOptions {
  SurrogateMethod method = SurrogateMethod::monte_carlo;
  int quadrature_order = 21;
  unsigned workers = 1;
};

struct Estimate {
  cplx value;
  double stderr_ = 0.0;
  long samples = 0;
};

/// I_m (x) A, truncated to n x n when A's size does not divide n.
Matrix block_replicate(const Matrix& A, Eigen::Index n);

/// Estimates tau_N(e(x, A)) by GUE matrices of size N_surrogate, with the A
/// matrices block-replicated. Streams use matrix index i - 1 for X_i.
Estimate free_surrogate_trace(const NcExpr& e, const std::vector<Matrix>& A, Eigen::Index N_surrogate, long samples,
                              const SeedStream& stream, const SurrogateOptions& opts = {});

/// Estimates <x, E[e(x, A)] y>, E the conditional expectation onto M_N(C).
/// Exact when e has no X letters or is polynomial; otherwise a GUE
/// surrogate at N_surrogate (a multiple of N) averaged over diagonal blocks.
Estimate conditional_expectation_scalar(const NcExpr& e, const std::vector<Matrix>& A, const Vector& x,
                                        const Vector& y, Eigen::Index N_surrogate, long samples,
                                        const SeedStream& stream, const SurrogateOptions& opts = {});

/// Loop-equation reduction of a polynomial: E ts(e) = constant +
/// sum_k coef_k E[ts(left_k) ts(right_k)] in any GUE model with the given A.
struct ReducedTrace {
  cplx constant;
  struct Pair {
    cplx coef;
    Word left;
    Word right;
  };
  std::vector<Pair> pairs;
};
ReducedTrace reduce_by_loop_equations(const NcExpr& e, const std::vector<Matrix>& A);

}  // namespace ncfree
