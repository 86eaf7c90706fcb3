#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncfree/ensembles.hpp"
#include "ncfree/expr.hpp"
#include "ncfree/fourier.hpp"
#include "ncfree/matengine.hpp"
#include "ncfree/stats.hpp"
#include "ncfree/surrogate.hpp"

namespace ncfree {

enum class EnsembleClass { gue, goe, wigner };

struct EnsembleTemplate {
  EnsembleClass cls = EnsembleClass::gue;
  Symmetry symmetry = Symmetry::hermitian;
  EntryLaw offdiag = EntryLaw::gaussian();
  EntryLaw diag = EntryLaw::gaussian();
  double diag_variance = 1.0;

  static EnsembleTemplate gue();
  static EnsembleTemplate goe();
  EnsembleSpec at(int N) const;
  std::string name() const;
};

/// One row of the output table. y holds the sweep coordinate of the
/// experiment: the exponential scale, the evolution time or the pattern index.
struct CellStats {
  int N = 0;
  double y = 0.0;
  double median_err = 0.0;
  double q99_err = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  std::string label;
};

struct SlopeRecord {
  std::string label;
  SlopeFit fit;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunRecord {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t seed = 0;
  std::vector<CellStats> cells;
  std::vector<SlopeRecord> slopes;
  std::vector<Verdict> verdicts;
  double wall_seconds = 0.0;

  bool pass() const;
};

/// Deterministic A matrices and vectors: builtin "gen:" specs, NCFM1/NCFV1
/// files, or for vectors "flat", "unit:k" and "random:seed" (unit norm).
std::vector<Matrix> resolve_matrices(const std::vector<std::string>& specs, Eigen::Index N);
Vector resolve_vector(const std::string& spec, Eigen::Index N);

/// prod_i f_i(P_i) with f = sum_j c_j e^{i y_j t} expanded into atoms.
NcExpr product_form(const std::vector<FourierSum>& f, const std::vector<NcExpr>& P);

struct ExperimentConfig {
  std::string observable_text;
  NcExpr observable;
  EnsembleTemplate ensemble;
  std::vector<int> N_list;
  std::vector<double> y_list{1.0};
  std::vector<double> t_list;
  long samples = 200;
  int N_surrogate = 256;
  long surrogate_samples = 200;
  SurrogateMethod surrogate_method = SurrogateMethod::monte_carlo;
  std::uint64_t seed = 1;
  std::uint32_t experiment_id = 0;
  std::vector<std::string> A_specs;
  std::string x_spec = "flat";
  std::string y_spec = "flat";
  int quadrature_order = 21;
  unsigned workers = 1;
  double slope_target = -1.0;
  double slope_tolerance = 0.25;

  // thermalization
  std::string C_spec = "gen:alt";
  std::string B_spec = "gen:alt";
  std::vector<double> tail_t_list;
  double t_check = 30.0;
  double tail_factor = 5.0;
  int seed_repeats = 1;

  // asymptotic freeness
  double beta = 0.2;
  int max_pattern = 4;
  double degenerate_level = 1e-13;
  double freeness_ratio = 0.5;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SdResidual {
  Estimate lhs;
  Estimate rhs;
  Estimate residual;
  bool within_3se = false;
};

struct SdOptions {
  std::vector<Matrix> A;
  int quadrature_order = 21;
  unsigned workers = 1;
};

/// E ts(X_1 Q) - E ts(x)ts(d_1 Q), plus (1/N) E ts(h(d_1 Q)) for goe. The
/// residual is averaged per sample, so its error bar is that of the difference.
SdResidual sd_residual(EnsembleClass cls, const NcExpr& Q, int N, long samples, const SeedStream& stream,
                       const SdOptions& opts = {});

RunRecord run_trace_concentration(const ExperimentConfig& cfg);
RunRecord run_scalar_concentration(const ExperimentConfig& cfg);
RunRecord run_thermalization(const ExperimentConfig& cfg);
RunRecord run_asymptotic_freeness(const ExperimentConfig& cfg);

/// Trace and scalar forms of the evolved correlation at each t for one
/// realisation of P(Y): ts(e^{itP} C e^{-itP} B) and <x, e^{itP} C e^{-itP} y>.
struct EvolvedCorrelations {
  std::vector<cplx> trace_form;
  std::vector<cplx> scalar_form;
};
EvolvedCorrelations evolved_correlations(const Matrix& P, const Matrix& C, const Matrix& B, const Vector& x,
                                         const Vector& y, const std::vector<double>& t_list);

/// Alternating index patterns over {1, 2} of lengths 1..max_length.
std::vector<std::vector<int>> alternating_patterns(int max_length);

}  // namespace ncfree
