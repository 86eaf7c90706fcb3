#include "ncfree/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ncfree/free_trace.hpp"
#include "ncfree/generators.hpp"
#include "ncfree/matrix_io.hpp"
#include "ncfree/parallel.hpp"

namespace ncfree {

namespace {

enum Purpose : std::uint32_t { kSamples = 0, kReference = 1, kRepeat = 2 };

SeedStream cell_stream(const ExperimentConfig& cfg, std::size_t n_index, std::uint32_t purpose) {
  const std::uint32_t exp = (cfg.experiment_id << 16) | (static_cast<std::uint32_t>(n_index) << 4) | purpose;
  return SeedStream{cfg.seed, exp, 0, 0};
}

Context sample_context(const ExperimentConfig& cfg, int d, int N, const std::vector<Matrix>& A, const SeedStream& s) {
  Context ctx;
  ctx.quadrature_order = cfg.quadrature_order;
  ctx.A = A;
  const EnsembleSpec spec = cfg.ensemble.at(N);
  for (int i = 0; i < d; ++i) ctx.X.push_back(sample(spec, s.with_matrix(static_cast<std::uint32_t>(i))));
  return ctx;
}

CellStats cell_from_errors(int N, double y, const std::vector<double>& errors, std::uint64_t seed, std::string label) {
  CellStats c;
  c.N = N;
  c.y = y;
  c.median_err = median(errors);
  c.q99_err = quantile(errors, 0.99);
  c.stderr_ = stderr_of_mean(errors);
  c.samples = static_cast<long>(errors.size());
  c.seed = seed;
  c.label = std::move(label);
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> e;
  auto join = [](const auto& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(static_cast<double>(v[k]));
    return s + "]";
  };
  e.emplace_back("observable", cfg.observable_text);
  e.emplace_back("ensemble", cfg.ensemble.name());
  e.emplace_back("N_list", join(cfg.N_list));
  e.emplace_back("y_list", join(cfg.y_list));
  e.emplace_back("t_list", join(cfg.t_list));
  e.emplace_back("samples", std::to_string(cfg.samples));
  e.emplace_back("N_surrogate", std::to_string(cfg.N_surrogate));
  e.emplace_back("surrogate_samples", std::to_string(cfg.surrogate_samples));
  e.emplace_back("quadrature_order", std::to_string(cfg.quadrature_order));
  e.emplace_back("slope_target", fmt(cfg.slope_target));
  e.emplace_back("slope_tolerance", fmt(cfg.slope_tolerance));
  std::string a;
  for (const auto& s : cfg.A_specs) a += (a.empty() ? "" : ", ") + s;
  e.emplace_back("A", "[" + a + "]");
  return e;
}

SlopeRecord slope_record(const std::string& label, const std::vector<std::pair<double, double>>& pts, double target,
                         double tol) {
  SlopeRecord r;
  r.label = label;
  r.target = target;
  r.tolerance = tol;
  r.fit = fit_decay_slope(pts);
  r.pass = std::abs(r.fit.slope - target) <= tol;
  return r;
}

std::vector<double> sweep_values(const ExperimentConfig& cfg) {
  if (cfg.observable.has_exp()) return cfg.y_list;
  return {0.0};
}

NcExpr at_scale(const NcExpr& e, double y) { return e.has_exp() ? scale_atoms(e, y) : e; }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Slope verdicts for a concentration run. Cells with zero medians at every
// N are exact and reported as such.
void add_slopes(RunRecord& rec, const ExperimentConfig& cfg, const std::vector<double>& ys, bool& all_exact) {
  all_exact = true;
  bool slopes_pass = true;
  std::string detail;
  for (double y : ys) {
    std::vector<std::pair<double, double>> pts;
    bool exact = true;
    for (const auto& c : rec.cells)
      if (c.y == y) {
        pts.emplace_back(c.N, c.median_err);
        if (c.median_err != 0.0 || c.q99_err != 0.0) exact = false;
      }
    if (exact) continue;
    all_exact = false;
    SlopeRecord s = slope_record("y=" + fmt(y), pts, cfg.slope_target, cfg.slope_tolerance);
    slopes_pass = slopes_pass && s.pass;
    detail += (detail.empty() ? "" : "; ") + s.label + " slope " + fmt(s.fit.slope);
    rec.slopes.push_back(std::move(s));
  }
  if (all_exact) {
    rec.verdicts.push_back({"exact", true, "all errors are exactly zero"});
  } else {
    rec.verdicts.push_back({"slope", slopes_pass,
                            detail + " (target " + fmt(cfg.slope_target) + " +- " + fmt(cfg.slope_tolerance) + ")"});
  }
}

}  // namespace

EnsembleTemplate EnsembleTemplate::gue() { return {}; }

EnsembleTemplate EnsembleTemplate::goe() {
  EnsembleTemplate t;
  t.cls = EnsembleClass::goe;
  t.symmetry = Symmetry::symmetric;
  t.diag_variance = 2.0;
  return t;
}

EnsembleSpec EnsembleTemplate::at(int N) const {
  if (cls == EnsembleClass::gue) return EnsembleSpec::gue(N);
  if (cls == EnsembleClass::goe) return EnsembleSpec::goe(N);
  EnsembleSpec s{N, symmetry, offdiag, diag, diag_variance};
  return s;
}

std::string EnsembleTemplate::name() const {
  switch (cls) {
    case EnsembleClass::gue:
      return "gue";
    case EnsembleClass::goe:
      return "goe";
    case EnsembleClass::wigner:
      return "wigner(" + offdiag.name() + "/" + diag.name() + ", " +
             (symmetry == Symmetry::hermitian ? "hermitian" : "symmetric") + ", diag_variance " + fmt(diag_variance) + ")";
  }
  return {};
}

bool RunRecord::pass() const {
  return !verdicts.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::vector<Matrix> resolve_matrices(const std::vector<std::string>& specs, Eigen::Index N) {
  std::vector<Matrix> out;
  for (const auto& s : specs) {
    if (is_generator_spec(s)) {
      out.push_back(generate_matrix(s, N));
    } else {
      Matrix M = load_matrix(s);
      if (M.rows() != N) throw DimensionError("matrix file " + s + " has dimension " + std::to_string(M.rows()));
      out.push_back(std::move(M));
    }
  }
  return out;
}

Vector resolve_vector(const std::string& spec, Eigen::Index N) {
  if (spec == "flat") return Vector::Constant(N, 1.0 / std::sqrt(static_cast<double>(N)));
  if (spec.rfind("unit:", 0) == 0) {
    const long k = std::stol(spec.substr(5));
    if (k < 0 || k >= N) throw std::invalid_argument("unit vector index out of range in '" + spec + "'");
    Vector v = Vector::Zero(N);
    v(k) = 1.0;
    return v;
  }
  if (spec.rfind("random:", 0) == 0) {
    const auto seed = static_cast<std::uint64_t>(std::stoull(spec.substr(7)));
    StreamGenerator g(SeedStream{seed, 0x7EC7u, static_cast<std::uint32_t>(N), 0});
    Vector v(N);
    for (Eigen::Index k = 0; k < N; ++k) {
      const double re = g.normal();
      const double im = g.normal();
      v(k) = cplx{re, im};
    }
    return v / v.norm();
  }
  Vector v = load_vector(spec);
  if (v.size() != N) throw DimensionError("vector file " + spec + " has length " + std::to_string(v.size()));
  return v;
}

NcExpr product_form(const std::vector<FourierSum>& f, const std::vector<NcExpr>& P) {
  if (f.size() != P.size() || f.empty()) throw std::invalid_argument("product form needs matching non-empty f and P lists");
  NcExpr out = NcExpr::unit(P.front().d(), P.front().q());
  for (std::size_t i = 0; i < f.size(); ++i) {
    NcExpr term(P[i].d(), P[i].q());
    if (f[i].is_identity()) {
      term = P[i];
    } else {
      for (const auto& a : f[i].atoms()) term += a.c * NcExpr::exp(a.y, P[i]);
    }
    out = out * term;
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (N_list.empty()) throw std::invalid_argument("grid.N_list must not be empty");
  for (int n : N_list)
    if (n < 1) throw std::invalid_argument("grid.N_list entries must be positive");
  if (samples < 2) throw std::invalid_argument("grid.samples must be at least 2");
  if (quadrature_order < 1) throw std::invalid_argument("quadrature_order must be positive");
  if (N_surrogate < 1) throw std::invalid_argument("surrogate.N_surrogate must be positive");
  if (!A_specs.empty() && observable.has_a() && observable.has_x()) {
    for (int n : N_list)
      if (N_surrogate % n != 0)
        throw std::invalid_argument("surrogate.N_surrogate = " + std::to_string(N_surrogate) +
                                    " is not divisible by N = " + std::to_string(n));
  }
  if (static_cast<int>(A_specs.size()) < observable.q())
    throw std::invalid_argument("matrices section defines fewer A matrices than the observable uses");
  if (beta < 0.0) throw std::invalid_argument("freeness.beta must be nonnegative");
  const double beta_max = ensemble.cls == EnsembleClass::wigner ? 0.25 : 0.5;
  if (beta >= beta_max) throw std::invalid_argument("freeness.beta must be below " + fmt(beta_max));
}

SdResidual sd_residual(EnsembleClass cls, const NcExpr& Q, int N, long samples, const SeedStream& stream,
                       const SdOptions& opts) {
  if (cls == EnsembleClass::wigner) throw std::invalid_argument("loop equations hold for gue and goe only");
  if (samples < 2) throw std::invalid_argument("sd_residual needs at least two samples");
  const int d = std::max(1, Q.d());
  const NcExpr XQ = NcExpr::x(1, d, Q.q()) * Q;
  const TensorExpr dQ = nc_derivative(Q.with_arity(d, Q.q()), 1);
  const EnsembleSpec spec = cls == EnsembleClass::gue ? EnsembleSpec::gue(N) : EnsembleSpec::goe(N);
  std::vector<cplx> lhs(static_cast<std::size_t>(samples)), rhs(lhs.size()), res(lhs.size());
  parallel_for(lhs.size(), opts.workers, [&](std::size_t s) {
    Context ctx;
    ctx.quadrature_order = opts.quadrature_order;
    ctx.A = opts.A;
    const SeedStream ss = stream.with_sample(static_cast<std::uint32_t>(s));
    for (int i = 0; i < d; ++i) ctx.X.push_back(sample(spec, ss.with_matrix(static_cast<std::uint32_t>(i))));
    Evaluator ev(ctx);
    const cplx l = ev.trace_of(XQ);
    cplx r = ev.evaluate_tensor(dQ, TsTs{});
    if (cls == EnsembleClass::goe) r += ev.evaluate_tensor(dQ, HThenTrace{}) / static_cast<double>(N);
    lhs[s] = l;
    rhs[s] = r;
    res[s] = l - r;
  });
  SdResidual out;
  out.lhs = {mean(lhs), stderr_of_mean(lhs), samples};
  out.rhs = {mean(rhs), stderr_of_mean(rhs), samples};
  out.residual = {mean(res), stderr_of_mean(res), samples};
  out.within_3se = std::abs(out.residual.value) <= 3.0 * out.residual.stderr_;
  return out;
}

RunRecord run_trace_concentration(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.experiment = "concentration-trace";
  rec.config = echo(cfg);
  rec.seed = cfg.seed;
  const std::vector<double> ys = sweep_values(cfg);
  const int d = std::max(1, cfg.observable.d());
  for (std::size_t ni = 0; ni < cfg.N_list.size(); ++ni) {
    const int N = cfg.N_list[ni];
    const std::vector<Matrix> A = resolve_matrices(cfg.A_specs, N);
    std::vector<NcExpr> Q;
    std::vector<cplx> ref;
    for (double y : ys) {
      Q.push_back(at_scale(cfg.observable, y));
      if (Q.back().is_polynomial()) {
        ref.push_back(free_polynomial_trace(Q.back(), A));
      } else {
        SurrogateOptions so{cfg.surrogate_method, cfg.quadrature_order, cfg.workers};
        ref.push_back(free_surrogate_trace(Q.back(), A, cfg.N_surrogate, cfg.surrogate_samples,
                                           cell_stream(cfg, ni, kReference), so)
                          .value);
      }
    }
    std::vector<std::vector<double>> err(ys.size(), std::vector<double>(static_cast<std::size_t>(cfg.samples)));
    const SeedStream base = cell_stream(cfg, ni, kSamples);
    parallel_for(static_cast<std::size_t>(cfg.samples), cfg.workers, [&](std::size_t s) {
      const Context ctx = sample_context(cfg, d, N, A, base.with_sample(static_cast<std::uint32_t>(s)));
      Evaluator ev(ctx);
      for (std::size_t k = 0; k < ys.size(); ++k) err[k][s] = std::abs(ev.trace_of(Q[k]) - ref[k]);
    });
    for (std::size_t k = 0; k < ys.size(); ++k) rec.cells.push_back(cell_from_errors(N, ys[k], err[k], cfg.seed, "trace"));
  }
  bool all_exact = false;
  add_slopes(rec, cfg, ys, all_exact);
  if (cfg.observable.has_exp()) {
    // Bound median <= C y^2 / N: C_N is the smallest constant per N; the
    // bound is informative when C_N does not drift with N.
    std::vector<double> CN;
    for (int N : cfg.N_list) {
      double c = 0.0;
      for (const auto& cell : rec.cells)
        if (cell.N == N && cell.y != 0.0) c = std::max(c, cell.median_err * N / (cell.y * cell.y));
      CN.push_back(c);
    }
    const double cmax = *std::max_element(CN.begin(), CN.end());
    const double cmin = *std::min_element(CN.begin(), CN.end());
    std::string detail = "C_N =";
    for (double c : CN) detail += " " + fmt(c);
    detail += "; fitted C = " + fmt(cmax) + ", max/min = " + fmt(cmin > 0 ? cmax / cmin : INFINITY);
    rec.verdicts.push_back({"y2_over_N_bound", cmin > 0.0 && cmax / cmin <= 2.0, detail});
  }
  rec.wall_seconds = elapsed(t0);
  return rec;
}

RunRecord run_scalar_concentration(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.experiment = "concentration-scalar";
  rec.config = echo(cfg);
  rec.config.emplace_back("x", cfg.x_spec);
  rec.config.emplace_back("y", cfg.y_spec);
  rec.seed = cfg.seed;
  const std::vector<double> ys = sweep_values(cfg);
  const int d = std::max(1, cfg.observable.d());
  for (std::size_t ni = 0; ni < cfg.N_list.size(); ++ni) {
    const int N = cfg.N_list[ni];
    const std::vector<Matrix> A = resolve_matrices(cfg.A_specs, N);
    const Vector x = resolve_vector(cfg.x_spec, N);
    const Vector yv = resolve_vector(cfg.y_spec, N);
    std::vector<NcExpr> Q;
    std::vector<cplx> ref;
    for (double y : ys) {
      Q.push_back(at_scale(cfg.observable, y));
      SurrogateOptions so{SurrogateMethod::monte_carlo, cfg.quadrature_order, cfg.workers};
      ref.push_back(conditional_expectation_scalar(Q.back(), A, x, yv, cfg.N_surrogate, cfg.surrogate_samples,
                                                   cell_stream(cfg, ni, kReference), so)
                        .value);
    }
    std::vector<std::vector<double>> err(ys.size(), std::vector<double>(static_cast<std::size_t>(cfg.samples)));
    const SeedStream base = cell_stream(cfg, ni, kSamples);
    parallel_for(static_cast<std::size_t>(cfg.samples), cfg.workers, [&](std::size_t s) {
      const Context ctx = sample_context(cfg, d, N, A, base.with_sample(static_cast<std::uint32_t>(s)));
      Evaluator ev(ctx);
      for (std::size_t k = 0; k < ys.size(); ++k) err[k][s] = std::abs(bilinear(x, ev.evaluate(Q[k]), yv) - ref[k]);
    });
    for (std::size_t k = 0; k < ys.size(); ++k) rec.cells.push_back(cell_from_errors(N, ys[k], err[k], cfg.seed, "scalar"));
  }
  bool all_exact = false;
  add_slopes(rec, cfg, ys, all_exact);
  rec.wall_seconds = elapsed(t0);
  return rec;
}

EvolvedCorrelations evolved_correlations(const Matrix& P, const Matrix& C, const Matrix& B, const Vector& x,
                                         const Vector& y, const std::vector<double>& t_list) {
  const Eigen::Index n = P.rows();
  if (C.rows() != n || B.rows() != n || x.size() != n || y.size() != n) throw DimensionError("thermalization inputs differ in size");
  const Eigensystem es = hermitian_eigensystem(P);
  const Matrix& U = es.vectors;
  const Matrix Ch = U.adjoint() * C * U;
  const Matrix Bh = U.adjoint() * B * U;
  const Vector xh = U.adjoint() * x;
  const Vector yh = U.adjoint() * y;
  // M_jk = Ch_jk Bh_kj and m_jk = conj(xh_j) Ch_jk yh_k carry all t dependence
  // through the phases exp(i t (l_j - l_k)).
  const Matrix Mt = Ch.cwiseProduct(Bh.transpose());
  const Matrix ms = xh.conjugate().asDiagonal() * Ch * yh.asDiagonal();
  EvolvedCorrelations out;
  Vector ph(n);
  for (double t : t_list) {
    for (Eigen::Index j = 0; j < n; ++j) ph(j) = std::polar(1.0, t * es.values(j));
    const Vector phc = ph.conjugate();
    out.trace_form.push_back(ph.cwiseProduct(Mt * phc).sum() / static_cast<double>(n));
    out.scalar_form.push_back(ph.cwiseProduct(ms * phc).sum());
  }
  return out;
}

RunRecord run_thermalization(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.t_list.empty()) throw std::invalid_argument("grid.t_list must not be empty");
  if (!is_self_adjoint(cfg.observable) || !cfg.observable.has_x()) throw std::invalid_argument("thermalization needs a non-constant self-adjoint P");
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.experiment = "thermalize";
  rec.config = echo(cfg);
  rec.config.emplace_back("C", cfg.C_spec);
  rec.config.emplace_back("B", cfg.B_spec);
  rec.config.emplace_back("x", cfg.x_spec);
  rec.config.emplace_back("y", cfg.y_spec);
  rec.seed = cfg.seed;
  const int d = std::max(1, cfg.observable.d());
  std::vector<double> grid = cfg.t_list;
  for (double t : cfg.tail_t_list) grid.push_back(t);
  const std::size_t nt = cfg.t_list.size();

  double identity_err = 0.0;
  bool trends_pass = true;
  std::string trend_detail;
  for (std::size_t ni = 0; ni < cfg.N_list.size(); ++ni) {
    const int N = cfg.N_list[ni];
    const Matrix C = resolve_matrices({cfg.C_spec}, N).front();
    const Matrix B = resolve_matrices({cfg.B_spec}, N).front();
    const Matrix I = Matrix::Identity(N, N);
    const Vector x = resolve_vector(cfg.x_spec, N);
    const Vector yv = resolve_vector(cfg.y_spec, N);
    const cplx tsC = normalized_trace(C), tsB = normalized_trace(B), xy = x.dot(yv);
    const int repeats = std::max(1, cfg.seed_repeats);
    const auto total = static_cast<std::size_t>(cfg.samples) * static_cast<std::size_t>(repeats);
    std::vector<std::vector<double>> dtr(total), dsc(total);
    std::vector<double> id_err(total, 0.0);
    const SeedStream base = cell_stream(cfg, ni, kSamples);
    parallel_for(total, cfg.workers, [&](std::size_t s) {
      const Context ctx = sample_context(cfg, d, N, {}, base.with_sample(static_cast<std::uint32_t>(s)));
      Evaluator ev(ctx);
      const Matrix P = ev.evaluate(cfg.observable);
      const EvolvedCorrelations ec = evolved_correlations(P, C, B, x, yv, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        dtr[s].push_back(std::abs(ec.trace_form[k] - tsC * tsB));
        dsc[s].push_back(std::abs(ec.scalar_form[k] - tsC * xy));
      }
      if (s == 0) {
        const EvolvedCorrelations ci = evolved_correlations(P, I, B, x, yv, grid);
        const EvolvedCorrelations bi = evolved_correlations(P, C, I, x, yv, grid);
        double e = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          e = std::max(e, std::abs(ci.trace_form[k] - tsB));
          e = std::max(e, std::abs(bi.trace_form[k] - tsC));
          e = std::max(e, std::abs(ci.scalar_form[k] - xy));
        }
        id_err[s] = e;
      }
    });
    identity_err = std::max(identity_err, *std::max_element(id_err.begin(), id_err.end()));

    auto medians = [&](const std::vector<std::vector<double>>& dev, std::size_t from, std::size_t to) {
      std::vector<double> med(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> v;
        for (std::size_t s = from; s < to; ++s) v.push_back(dev[s][k]);
        med[k] = median(v);
      }
      return med;
    };
    for (int form = 0; form < 2; ++form) {
      const auto& dev = form == 0 ? dtr : dsc;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> v;
        for (std::size_t s = 0; s < total; ++s) v.push_back(dev[s][k]);
        rec.cells.push_back(cell_from_errors(N, grid[k], v, cfg.seed, form == 0 ? "trace" : "scalar"));
      }
    }
    if (ni + 1 != cfg.N_list.size()) continue;

    // Trend verdicts per repetition at the largest N.
    if (cfg.tail_t_list.empty()) throw std::invalid_argument("thermalization.tail_t_list must not be empty");
    const auto check_it = std::find(cfg.t_list.begin(), cfg.t_list.end(), cfg.t_check);
    if (check_it == cfg.t_list.end()) throw std::invalid_argument("thermalization.t_check must be in grid.t_list");
    const std::size_t kc = static_cast<std::size_t>(check_it - cfg.t_list.begin());
    for (int form = 0; form < 2; ++form) {
      int passed = 0;
      for (int r = 0; r < repeats; ++r) {
        const auto from = static_cast<std::size_t>(r) * static_cast<std::size_t>(cfg.samples);
        const auto med = medians(form == 0 ? dtr : dsc, from, from + static_cast<std::size_t>(cfg.samples));
        const std::vector<double> tail(med.begin() + static_cast<std::ptrdiff_t>(nt), med.end());
        const double tail_level = median(tail);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t k = 0; k <= kc; ++k) pts.emplace_back(cfg.t_list[k], med[k]);
        const double slope = fit_decay_slope(pts, 0).slope;
        const bool ok = med[kc] <= cfg.tail_factor * tail_level && med.front() > med[kc] && slope < 0.0;
        passed += ok ? 1 : 0;
        if (r == 0) {
          trend_detail += std::string(trend_detail.empty() ? "" : "; ") + (form == 0 ? "trace" : "scalar") +
                          ": dev(t_min) " + fmt(med.front()) + ", dev(t_check) " + fmt(med[kc]) + ", tail " +
                          fmt(tail_level) + ", slope " + fmt(slope);
        }
      }
      const double frac = static_cast<double>(passed) / repeats;
      trend_detail += ", repeats passing " + std::to_string(passed) + "/" + std::to_string(repeats);
      trends_pass = trends_pass && frac >= 0.95;
    }
  }
  rec.verdicts.push_back({"identities", identity_err <= 1e-12, "max identity error " + fmt(identity_err)});
  rec.verdicts.push_back({"trend", trends_pass, trend_detail});
  rec.wall_seconds = elapsed(t0);
  return rec;
}

std::vector<std::vector<int>> alternating_patterns(int max_length) {
  std::vector<std::vector<int>> out;
  for (int p = 1; p <= max_length; ++p)
    for (int start = 1; start <= 2; ++start) {
      std::vector<int> pat;
      for (int j = 0; j < p; ++j) pat.push_back((start - 1 + j) % 2 + 1);
      out.push_back(std::move(pat));
    }
  return out;
}

RunRecord run_asymptotic_freeness(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.N_list.size() < 2) throw std::invalid_argument("freeness needs at least two dimensions");
  if (cfg.A_specs.size() < 2) throw std::invalid_argument("freeness needs matrices A1 and A2");
  if (!is_self_adjoint(cfg.observable) || !cfg.observable.has_x()) throw std::invalid_argument("freeness needs a non-constant self-adjoint P");
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.experiment = "freeness";
  rec.config = echo(cfg);
  rec.config.emplace_back("beta", fmt(cfg.beta));
  rec.seed = cfg.seed;
  const int d = std::max(1, cfg.observable.d());
  const auto patterns = alternating_patterns(cfg.max_pattern);
  std::vector<std::vector<double>> med(patterns.size());
  for (std::size_t ni = 0; ni < cfg.N_list.size(); ++ni) {
    const int N = cfg.N_list[ni];
    std::vector<Matrix> A = resolve_matrices({cfg.A_specs[0], cfg.A_specs[1]}, N);
    for (auto& a : A) a -= normalized_trace(a) * Matrix::Identity(N, N);
    const double spacing = std::pow(static_cast<double>(N), cfg.beta);
    std::vector<std::vector<double>> vals(patterns.size(), std::vector<double>(static_cast<std::size_t>(cfg.samples)));
    const SeedStream base = cell_stream(cfg, ni, kSamples);
    parallel_for(static_cast<std::size_t>(cfg.samples), cfg.workers, [&](std::size_t s) {
      const Context ctx = sample_context(cfg, d, N, {}, base.with_sample(static_cast<std::uint32_t>(s)));
      Evaluator ev(ctx);
      const Eigensystem es = hermitian_eigensystem(ev.evaluate(cfg.observable));
      std::array<Matrix, 2> a;
      for (int i = 0; i < 2; ++i) {
        const Matrix Ah = es.vectors.adjoint() * A[static_cast<std::size_t>(i)] * es.vectors;
        const double yi = (i + 1) * spacing;
        Vector ph(N);
        for (Eigen::Index j = 0; j < N; ++j) ph(j) = std::polar(1.0, yi * es.values(j));
        a[static_cast<std::size_t>(i)] = ph.asDiagonal() * Ah * ph.conjugate().asDiagonal();
        a[static_cast<std::size_t>(i)] -= normalized_trace(a[static_cast<std::size_t>(i)]) * Matrix::Identity(N, N);
      }
      for (std::size_t p = 0; p < patterns.size(); ++p) {
        const auto& pat = patterns[p];
        if (pat.size() == 1) {
          vals[p][s] = std::abs(normalized_trace(a[static_cast<std::size_t>(pat[0] - 1)]));
          continue;
        }
        Matrix acc = a[static_cast<std::size_t>(pat[0] - 1)];
        for (std::size_t j = 1; j + 1 < pat.size(); ++j) acc = acc * a[static_cast<std::size_t>(pat[j] - 1)];
        vals[p][s] = std::abs(ts_product(acc, a[static_cast<std::size_t>(pat.back() - 1)]));
      }
    });
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      std::string label;
      for (int i : patterns[p]) label += std::to_string(i);
      rec.cells.push_back(cell_from_errors(N, static_cast<double>(p), vals[p], cfg.seed, "pattern " + label));
      med[p].push_back(rec.cells.back().median_err);
    }
  }
  bool pass = true;
  int informative = 0;
  std::string detail;
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    std::string label;
    for (int i : patterns[p]) label += std::to_string(i);
    if (*std::max_element(med[p].begin(), med[p].end()) < cfg.degenerate_level) continue;
    ++informative;
    bool mono = true;
    for (std::size_t k = 1; k < med[p].size(); ++k) mono = mono && med[p][k] < med[p][k - 1];
    const double ratio = med[p].back() / med[p].front();
    const bool ok = mono && ratio <= cfg.freeness_ratio;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + label + ": ratio " + fmt(ratio) + (mono ? "" : " (not monotone)");
  }
  rec.verdicts.push_back({"decrease", pass && informative > 0, detail});
  rec.wall_seconds = elapsed(t0);
  return rec;
}

}  // namespace ncfree
