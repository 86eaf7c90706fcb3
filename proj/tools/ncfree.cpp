#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncfree/config.hpp"
#include "ncfree/cumulants.hpp"
#include "ncfree/dsl.hpp"
#include "ncfree/ensembles.hpp"
#include "ncfree/experiments.hpp"
#include "ncfree/free_trace.hpp"
#include "ncfree/generators.hpp"
#include "ncfree/matrix_io.hpp"
#include "ncfree/output.hpp"
#include "ncfree/surrogate.hpp"

using namespace ncfree;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string num(cplx z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (std::signbit(z.imag()) ? " - " : " + ") + num(std::abs(z.imag())) + "i";
}

std::uint64_t seed_override(std::uint64_t fallback) {
  if (const char* s = std::getenv("NCFREE_SEED"); s != nullptr && *s != '\0') {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("NCFREE_SEED is not an unsigned integer: ") + s);
    }
  }
  return fallback;
}

EnsembleClass class_from(const std::string& s) {
  if (s == "gue") return EnsembleClass::gue;
  if (s == "goe") return EnsembleClass::goe;
  if (s == "wigner") return EnsembleClass::wigner;
  throw std::invalid_argument("unknown ensemble class '" + s + "'");
}

EnsembleSpec ensemble_from(const std::string& cls, const std::string& law, const std::string& symmetry, int N) {
  if (cls == "gue") return EnsembleSpec::gue(N);
  if (cls == "goe") return EnsembleSpec::goe(N);
  if (cls != "wigner") throw std::invalid_argument("unknown ensemble class '" + cls + "'");
  if (symmetry != "symmetric" && symmetry != "hermitian") throw std::invalid_argument("symmetry must be symmetric or hermitian");
  return EnsembleSpec::wigner(N, EntryLaw::from_name(law), symmetry == "hermitian" ? Symmetry::hermitian : Symmetry::symmetric);
}

SurrogateMethod method_from(const std::string& s) {
  if (s == "monte_carlo") return SurrogateMethod::monte_carlo;
  if (s == "schwinger_dyson") return SurrogateMethod::schwinger_dyson;
  throw std::invalid_argument("surrogate method must be monte_carlo or schwinger_dyson");
}

int exit_for(const RunRecord& r) { return r.pass() ? kExitPass : kExitFail; }

void print_summary(const RunRecord& r, const std::string& where) {
  std::cout << r.experiment << ": " << (r.pass() ? "PASS" : "FAIL");
  for (const auto& s : r.slopes) std::cout << " " << s.label << "_slope=" << num(s.fit.slope);
  for (const auto& v : r.verdicts) std::cout << " " << v.name << "=" << (v.pass ? "pass" : "fail");
  if (!where.empty()) std::cout << " -> " << where;
  std::cout << "\n";
}

struct RunOptions {
  std::string config;
  std::string out;
  unsigned workers = 0;
};

int run_experiment(const std::string& kind, const RunOptions& o) {
  RunManifest man;
  man.start_time = utc_timestamp();
  RunConfig rc = load_config(o.config);
  if (rc.has("experiment.kind") && rc.get_string("experiment.kind") != kind)
    throw ConfigError("experiment.kind is '" + rc.get_string("experiment.kind") + "' but the subcommand is " + kind);
  const auto seed = seed_override(static_cast<std::uint64_t>(rc.get_int("experiment.seed")));
  rc.set("experiment.seed", {static_cast<long long>(seed)});
  if (o.workers > 0) rc.set("experiment.workers", {static_cast<long long>(o.workers)});
  const ExperimentConfig cfg = experiment_config(rc);

  RunRecord rec;
  if (kind == "concentration-trace") {
    rec = run_trace_concentration(cfg);
  } else if (kind == "concentration-scalar") {
    rec = run_scalar_concentration(cfg);
  } else if (kind == "thermalize") {
    rec = run_thermalization(cfg);
  } else {
    rec = run_asymptotic_freeness(cfg);
  }

  man.config_hash = rc.hash();
  man.master_seed = seed;
  for (const auto& [k, v] : rc.values()) man.config.emplace_back(k, v.to_text());
  std::string where;
  if (!o.out.empty()) {
    man.end_time = utc_timestamp();
    write_outputs(rec, man, o.out);
    where = o.out + ".{json,csv,manifest.json}";
  } else {
    std::cout << record_csv(rec);
  }
  print_summary(rec, where);
  return exit_for(rec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ncfree: noncommutative expressions, random matrices and free probability"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  int rc = kExitPass;

  // parse
  auto* c_parse = app.add_subcommand("parse", "Parse an expression and print its canonical form");
  std::string p_expr;
  int p_d = 1, p_q = 0;
  c_parse->add_option("--expr", p_expr, "Expression")->required();
  c_parse->add_option("--d", p_d, "Number of X letters");
  c_parse->add_option("--q", p_q, "Number of A letters");
  c_parse->callback([&] { std::cout << to_text(parse(p_expr, p_d, p_q)) << "\n"; });

  // eval
  auto* c_eval = app.add_subcommand("eval", "Evaluate an expression on matrices and print its normalized trace");
  std::string e_expr, e_out, e_class = "gue";
  int e_d = 1, e_q = 0, e_N = 0, e_order = 21;
  std::uint64_t e_seed = 1;
  std::vector<std::string> e_X, e_A;
  c_eval->add_option("--expr", e_expr, "Expression")->required();
  c_eval->add_option("--d", e_d, "Number of X letters");
  c_eval->add_option("--q", e_q, "Number of A letters");
  c_eval->add_option("--X", e_X, "NCFM1 files for X1, X2, ... (sampled when omitted)");
  c_eval->add_option("--A", e_A, "A matrices: NCFM1 files or gen: specs");
  c_eval->add_option("--N", e_N, "Dimension when X is sampled");
  c_eval->add_option("--class", e_class, "Ensemble for sampled X");
  c_eval->add_option("--seed", e_seed, "Master seed for sampled X");
  c_eval->add_option("--quadrature-order", e_order, "Gauss-Legendre order for alpha integrals");
  c_eval->add_option("--out", e_out, "Write the evaluated matrix as NCFM1");
  c_eval->callback([&] {
    const NcExpr e = parse(e_expr, e_d, e_q);
    Context ctx;
    ctx.quadrature_order = e_order;
    for (const auto& f : e_X) ctx.X.push_back(load_matrix(f));
    Eigen::Index N = ctx.X.empty() ? e_N : ctx.X.front().rows();
    if (N <= 0) throw std::invalid_argument("eval needs --X files or --N");
    const SeedStream s{seed_override(e_seed)};
    for (int i = static_cast<int>(ctx.X.size()); i < e_d; ++i)
      ctx.X.push_back(sample(ensemble_from(e_class, "gaussian", "symmetric", static_cast<int>(N)),
                             s.with_matrix(static_cast<std::uint32_t>(i))));
    ctx.A = resolve_matrices(e_A, N);
    Evaluator ev(ctx);
    const Matrix M = ev.evaluate(e);
    if (!e_out.empty()) save_matrix(e_out, M);
    std::cout << num(normalized_trace(M)) << "\n";
    if (ev.hermiticity_warning()) std::cerr << "warning: an exponential base was symmetrized\n";
  });

  // sample
  auto* c_sample = app.add_subcommand("sample", "Draw one ensemble matrix");
  std::string s_class = "gue", s_law = "gaussian", s_sym = "symmetric", s_out;
  int s_N = 0, s_moment = 0;
  long s_draws = 1000;
  std::uint64_t s_seed = 1;
  c_sample->add_option("--class", s_class, "gue, goe or wigner");
  c_sample->add_option("--law", s_law, "Wigner entry law: gaussian, rademacher or uniform");
  c_sample->add_option("--symmetry", s_sym, "Wigner symmetry: symmetric or hermitian");
  c_sample->add_option("--N", s_N, "Dimension")->required();
  c_sample->add_option("--seed", s_seed, "Master seed");
  c_sample->add_option("--out", s_out, "Write the matrix as NCFM1");
  c_sample->add_option("--moment", s_moment, "Report E|sqrt(N) h|^p for diagonal and off-diagonal entries");
  c_sample->add_option("--draws", s_draws, "Draws for --moment");
  c_sample->callback([&] {
    const EnsembleSpec spec = ensemble_from(s_class, s_law, s_sym, s_N);
    const SeedStream s{seed_override(s_seed)};
    if (s_moment > 0) {
      const EntryMomentReport r = entry_moment_report(spec, s_moment, s_draws, s);
      std::cout << "p=" << r.p << " diag=" << num(r.diag.mean) << " +- " << num(r.diag.stderr_)
                << " offdiag=" << num(r.offdiag.mean) << " +- " << num(r.offdiag.stderr_) << "\n";
      return;
    }
    const Matrix H = sample(spec, s);
    if (!s_out.empty()) save_matrix(s_out, H);
    std::cout << "N=" << s_N << " ts(H^2)=" << num(normalized_trace(H * H).real()) << "\n";
  });

  // sd-check
  auto* c_sd = app.add_subcommand("sd-check", "Schwinger-Dyson residual for E ts(X1 Q)");
  std::string sd_class = "gue", sd_expr;
  int sd_N = 64, sd_d = 1, sd_q = 0, sd_order = 21;
  long sd_samples = 2000;
  std::uint64_t sd_seed = 1;
  unsigned sd_workers = 1;
  std::vector<std::string> sd_A;
  c_sd->add_option("--class", sd_class, "gue or goe");
  c_sd->add_option("--N", sd_N, "Dimension");
  c_sd->add_option("--samples", sd_samples, "Samples");
  c_sd->add_option("--expr", sd_expr, "Q")->required();
  c_sd->add_option("--d", sd_d, "Number of X letters");
  c_sd->add_option("--q", sd_q, "Number of A letters");
  c_sd->add_option("--A", sd_A, "A matrices: NCFM1 files or gen: specs");
  c_sd->add_option("--seed", sd_seed, "Master seed");
  c_sd->add_option("--workers", sd_workers, "Worker threads");
  c_sd->add_option("--quadrature-order", sd_order, "Gauss-Legendre order");
  c_sd->callback([&] {
    const EnsembleClass cls = class_from(sd_class);
    if (cls == EnsembleClass::wigner) throw std::invalid_argument("sd-check supports gue and goe");
    const int q = std::max(sd_q, static_cast<int>(sd_A.size()));
    const NcExpr Q = parse(sd_expr, sd_d, q);
    SdOptions opts{resolve_matrices(sd_A, sd_N), sd_order, sd_workers};
    const SdResidual r = sd_residual(cls, Q, sd_N, sd_samples, SeedStream{seed_override(sd_seed), 0x5Du}, opts);
    std::cout << "lhs=" << num(r.lhs.value) << " rhs=" << num(r.rhs.value) << " residual=" << num(r.residual.value)
              << " stderr=" << num(r.residual.stderr_) << " " << (r.within_3se ? "PASS" : "FAIL") << "\n";
    rc = r.within_3se ? kExitPass : kExitFail;
  });

  // cumulant-check
  auto* c_cum = app.add_subcommand("cumulant-check", "Truncated cumulant expansion of E[u Phi(u, v)]");
  std::string cu_law = "gaussian";
  int cu_N = 0, cu_order = 2, cu_p = -1, cu_r = 0;
  double cu_t = 0.0, cu_s = 0.0;
  c_cum->add_option("--law", cu_law, "gaussian, rademacher, uniform (u only) or gue (entry at --N)");
  c_cum->add_option("--N", cu_N, "Dimension for --law gue");
  c_cum->add_option("--order", cu_order, "Truncation order l");
  c_cum->add_option("--p", cu_p, "Phi = u^p v^r");
  c_cum->add_option("--r", cu_r, "Phi = u^p v^r");
  c_cum->add_option("--t", cu_t, "Phi = exp(i(t u + s v)) when --p is omitted");
  c_cum->add_option("--s", cu_s, "Phi = exp(i(t u + s v)) when --p is omitted");
  c_cum->callback([&] {
    BivariateLaw law = cu_law == "gue" ? (cu_N > 0 ? BivariateLaw::gue_offdiag(cu_N)
                                                    : throw std::invalid_argument("--law gue needs --N"))
                                       : BivariateLaw::single(EntryLaw::from_name(cu_law));
    const TestFunctional phi = cu_p >= 0 ? TestFunctional::monomial(cu_p, cu_r) : TestFunctional::exponential(cu_t, cu_s);
    const CumulantCheck c = cumulant_expansion_check(law, phi, cu_order);
    std::cout << "lhs=" << num(c.lhs) << " expansion=" << num(c.expansion) << " residual=" << num(c.residual) << "\n";
  });

  // free-moment
  auto* c_free = app.add_subcommand("free-moment", "Exact trace of a word in semicirculars and matrices");
  std::string f_word;
  std::vector<std::string> f_mats;
  bool f_oracle = false;
  c_free->add_option("--word", f_word, "Tokens such as \"x1 B1 x1 B2\"")->required();
  c_free->add_option("--mat", f_mats, "Bk=path.ncfm (or Bk=gen:spec with --N)");
  int f_N = 0;
  c_free->add_option("--N", f_N, "Dimension for gen: matrices");
  c_free->add_flag("--oracle", f_oracle, "Also print the freeness-recursion reference");
  c_free->callback([&] {
    const FreeWord w = FreeWord::parse(f_word);
    std::vector<Matrix> mats;
    for (const auto& m : f_mats) {
      const auto eq = m.find('=');
      if (eq == std::string::npos || m.size() < 2 || m[0] != 'B') throw std::invalid_argument("--mat expects Bk=path");
      const std::size_t k = std::stoul(m.substr(1, eq - 1));
      if (k < 1) throw std::invalid_argument("matrix indices start at 1");
      if (mats.size() < k) mats.resize(k);
      const std::string src = m.substr(eq + 1);
      mats[k - 1] = is_generator_spec(src) ? generate_matrix(src, f_N) : load_matrix(src);
    }
    for (std::size_t k = 0; k < mats.size(); ++k)
      if (mats[k].size() == 0) throw std::invalid_argument("matrix B" + std::to_string(k + 1) + " is missing");
    const Eigen::Index N = mats.empty() ? std::max(f_N, 1) : mats.front().rows();
    std::cout << num(free_word_trace(w, mats, N)) << "\n";
    if (f_oracle) std::cout << "oracle " << num(freeness_oracle_trace(w, mats, N)) << "\n";
  });

  // surrogate
  auto* c_sur = app.add_subcommand("surrogate", "GUE surrogate estimate of the free trace");
  std::string su_expr, su_method = "monte_carlo";
  int su_d = 1, su_q = 0, su_Ns = 256, su_N = 0, su_order = 21;
  long su_samples = 200;
  std::uint64_t su_seed = 1;
  unsigned su_workers = 1;
  std::vector<std::string> su_A;
  c_sur->add_option("--expr", su_expr, "Expression")->required();
  c_sur->add_option("--d", su_d, "Number of X letters");
  c_sur->add_option("--q", su_q, "Number of A letters");
  c_sur->add_option("--A", su_A, "A matrices: NCFM1 files or gen: specs");
  c_sur->add_option("--N", su_N, "Dimension of the A matrices for gen: specs");
  c_sur->add_option("--N-surrogate", su_Ns, "Surrogate dimension");
  c_sur->add_option("--samples", su_samples, "Samples");
  c_sur->add_option("--method", su_method, "monte_carlo or schwinger_dyson");
  c_sur->add_option("--seed", su_seed, "Master seed");
  c_sur->add_option("--workers", su_workers, "Worker threads");
  c_sur->add_option("--quadrature-order", su_order, "Gauss-Legendre order");
  c_sur->callback([&] {
    const int q = std::max(su_q, static_cast<int>(su_A.size()));
    const NcExpr e = parse(su_expr, su_d, q);
    const std::vector<Matrix> A = resolve_matrices(su_A, su_N > 0 ? su_N : su_Ns);
    const SurrogateOptions so{method_from(su_method), su_order, su_workers};
    const Estimate est = free_surrogate_trace(e, A, su_Ns, su_samples, SeedStream{seed_override(su_seed), 0x5Eu}, so);
    std::cout << num(est.value) << " +- " << num(est.stderr_) << " (" << est.samples << " samples)\n";
  });

  // experiments driven by a config file
  RunOptions ro;
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"concentration-trace", "Trace concentration for N and y sweeps"},
      {"concentration-scalar", "Scalar (bilinear form) concentration"},
      {"thermalize", "Evolved correlations against their factorized limits"},
      {"freeness", "Alternating centered moments of evolved matrices"}};
  for (const auto& [name, help] : runs) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--config", ro.config, "Config file")->required()->check(CLI::ExistingFile);
    c->add_option("--out", ro.out, "Output stem; writes stem.json, stem.csv, stem.manifest.json");
    c->add_option("--workers", ro.workers, "Worker threads (overrides experiment.workers)");
    c->callback([&, n = name] { rc = run_experiment(n, ro); });
  }

  // report
  auto* c_rep = app.add_subcommand("report", "Summarize a stored run record");
  std::string r_path;
  c_rep->add_option("record", r_path, "JSON record")->required()->check(CLI::ExistingFile);
  c_rep->callback([&] {
    std::ifstream is(r_path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    const RunRecord r = record_from_json(ss.str());
    for (const auto& c : r.cells)
      std::cout << c.label << " N=" << c.N << " y=" << num(c.y) << " median=" << num(c.median_err)
                << " q99=" << num(c.q99_err) << "\n";
    for (const auto& v : r.verdicts) std::cout << v.name << ": " << (v.pass ? "pass" : "fail") << "  " << v.detail << "\n";
    print_summary(r, "");
    rc = exit_for(r);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return rc;
}
