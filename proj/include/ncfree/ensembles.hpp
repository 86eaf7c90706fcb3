#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncfree/matengine.hpp"
#include "ncfree/quadrature.hpp"
#include "ncfree/rng.hpp"

namespace ncfree {

/// Real entry law with mean 0 and variance 1.
class EntryLaw {
 public:
  enum class Kind { gaussian, rademacher, uniform, discrete };

  static EntryLaw gaussian() { return EntryLaw(Kind::gaussian); }
  static EntryLaw rademacher() { return EntryLaw(Kind::rademacher); }
  /// Uniform on [-sqrt 3, sqrt 3].
  static EntryLaw uniform() { return EntryLaw(Kind::uniform); }
  /// Throws unless |mean| <= 1e-12 and |variance - 1| <= 1e-12.
  static EntryLaw discrete(std::vector<double> atoms, std::vector<double> weights);
  /// "gaussian", "rademacher" or "uniform".
  static EntryLaw from_name(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  double draw(StreamGenerator& g) const;
  /// Exact E[u^p].
  double moment(int p) const;
  /// Finite rule reproducing the law's moments: exact for discrete laws,
  /// Gauss-Hermite or Gauss-Legendre otherwise.
  QuadratureRule rule(int n = 40) const;

 private:
  explicit EntryLaw(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

enum class Symmetry { hermitian, symmetric };

struct EnsembleSpec {
  int N = 1;
  Symmetry symmetry = Symmetry::hermitian;
  EntryLaw offdiag = EntryLaw::gaussian();
  EntryLaw diag = EntryLaw::gaussian();
  /// Diagonal entries have variance diag_variance / N.
  double diag_variance = 1.0;

  static EnsembleSpec gue(int N);
  static EnsembleSpec goe(int N);
  static EnsembleSpec wigner(int N, EntryLaw offdiag, Symmetry s = Symmetry::symmetric);
  void validate() const;
};

/// Hermitian off-diagonal entries are (u + i v)/sqrt(2N) with u, v
/// independent draws of the law; symmetric ones are u/sqrt(N).
Matrix sample(const EnsembleSpec& spec, const SeedStream& stream);

/// Y e^{-t/2} + X (1 - e^{-t})^{1/2}
Matrix interpolate(const Matrix& Y, const Matrix& X, double t);

struct MomentEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long draws = 0;
};

struct EntryMomentReport {
  int p = 0;
  MomentEstimate diag;
  MomentEstimate offdiag;
};

/// Empirical E|sqrt(N) entry|^p for the (0,0) and (0,1) entries over draws
/// independent samples.
EntryMomentReport entry_moment_report(const EnsembleSpec& spec, int p, long draws, const SeedStream& stream);

}  // namespace ncfree
