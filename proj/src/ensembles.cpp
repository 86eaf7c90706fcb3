#include "ncfree/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ncfree {

namespace {

double u01(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double discrete_draw(const EntryLaw& law, double u) {
  const auto& w = law.weights();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    acc += w[k];
    if (u < acc) return law.atoms()[k];
  }
  return law.atoms().back();
}

// Two independent draws of the law from one Philox block.
std::pair<double, double> draw_pair(const EntryLaw& law, const Philox4x32Ctr& r) {
  const double a = u01(r[0], r[1]);
  const double b = u01(r[2], r[3]);
  switch (law.kind()) {
    case EntryLaw::Kind::gaussian: {
      const double rad = std::sqrt(-2.0 * std::log(a));
      const double th = 2.0 * std::numbers::pi * b;
      return {rad * std::cos(th), rad * std::sin(th)};
    }
    case EntryLaw::Kind::rademacher:
      return {(r[0] & 1u) ? 1.0 : -1.0, (r[2] & 1u) ? 1.0 : -1.0};
    case EntryLaw::Kind::uniform:
      return {std::sqrt(3.0) * (2.0 * a - 1.0), std::sqrt(3.0) * (2.0 * b - 1.0)};
    case EntryLaw::Kind::discrete:
      return {discrete_draw(law, a), discrete_draw(law, b)};
  }
  throw std::logic_error("bad law kind");
}

Philox4x32Key key_of(const SeedStream& s) {
  return {static_cast<std::uint32_t>(s.master), static_cast<std::uint32_t>(s.master >> 32)};
}

}  // namespace

EntryLaw EntryLaw::discrete(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) throw std::invalid_argument("discrete law needs matching atoms and weights");
  double total = 0.0, mean = 0.0, var = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(atoms[k])) throw std::invalid_argument("invalid discrete law atom");
    total += weights[k];
    mean += weights[k] * atoms[k];
    var += weights[k] * atoms[k] * atoms[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("discrete law weights must sum to 1");
  if (std::abs(mean) > 1e-12) throw std::invalid_argument("discrete law must have mean 0");
  if (std::abs(var - 1.0) > 1e-12) throw std::invalid_argument("discrete law must have variance 1");
  EntryLaw law(Kind::discrete);
  law.atoms_ = std::move(atoms);
  law.weights_ = std::move(weights);
  return law;
}

EntryLaw EntryLaw::from_name(const std::string& name) {
  if (name == "gaussian") return gaussian();
  if (name == "rademacher") return rademacher();
  if (name == "uniform") return uniform();
  throw std::invalid_argument("unknown entry law '" + name + "'");
}

std::string EntryLaw::name() const {
  switch (kind_) {
    case Kind::gaussian:
      return "gaussian";
    case Kind::rademacher:
      return "rademacher";
    case Kind::uniform:
      return "uniform";
    case Kind::discrete:
      return "discrete";
  }
  return {};
}

double EntryLaw::draw(StreamGenerator& g) const {
  switch (kind_) {
    case Kind::gaussian:
      return g.normal();
    case Kind::rademacher:
      return (g.next_u32() & 1u) ? 1.0 : -1.0;
    case Kind::uniform:
      return std::sqrt(3.0) * (2.0 * g.uniform() - 1.0);
    case Kind::discrete:
      return discrete_draw(*this, g.uniform());
  }
  throw std::logic_error("bad law kind");
}

double EntryLaw::moment(int p) const {
  if (p < 0) throw std::invalid_argument("negative moment order");
  if (p == 0) return 1.0;
  switch (kind_) {
    case Kind::gaussian: {
      if (p % 2) return 0.0;
      double m = 1.0;
      for (int k = p - 1; k > 0; k -= 2) m *= k;
      return m;
    }
    case Kind::rademacher:
      return p % 2 ? 0.0 : 1.0;
    case Kind::uniform:
      return p % 2 ? 0.0 : std::pow(3.0, p / 2) / (p + 1);
    case Kind::discrete: {
      double m = 0.0;
      for (std::size_t k = 0; k < atoms_.size(); ++k) m += weights_[k] * std::pow(atoms_[k], p);
      return m;
    }
  }
  throw std::logic_error("bad law kind");
}

QuadratureRule EntryLaw::rule(int n) const {
  switch (kind_) {
    case Kind::gaussian:
      return gauss_hermite_normal(n);
    case Kind::rademacher:
      return {{-1.0, 1.0}, {0.5, 0.5}};
    case Kind::uniform: {
      QuadratureRule r = gauss_legendre_unit(n);
      for (auto& x : r.nodes) x = std::sqrt(3.0) * (2.0 * x - 1.0);
      return r;
    }
    case Kind::discrete:
      return {atoms_, weights_};
  }
  throw std::logic_error("bad law kind");
}

EnsembleSpec EnsembleSpec::gue(int N) { return {N, Symmetry::hermitian, EntryLaw::gaussian(), EntryLaw::gaussian(), 1.0}; }

EnsembleSpec EnsembleSpec::goe(int N) { return {N, Symmetry::symmetric, EntryLaw::gaussian(), EntryLaw::gaussian(), 2.0}; }

EnsembleSpec EnsembleSpec::wigner(int N, EntryLaw offdiag, Symmetry s) {
  EnsembleSpec spec{N, s, offdiag, offdiag, s == Symmetry::symmetric ? 2.0 : 1.0};
  return spec;
}

void EnsembleSpec::validate() const {
  if (N < 1 || N > 65536) throw std::invalid_argument("ensemble dimension must lie in [1, 65536]");
  if (!(diag_variance > 0.0) || !std::isfinite(diag_variance)) throw std::invalid_argument("diag_variance must be positive");
}

Matrix sample(const EnsembleSpec& spec, const SeedStream& stream) {
  spec.validate();
  const int n = spec.N;
  const Philox4x32Key key = key_of(stream);
  const double off_scale = spec.symmetry == Symmetry::hermitian ? 1.0 / std::sqrt(2.0 * n) : 1.0 / std::sqrt(1.0 * n);
  const double diag_scale = std::sqrt(spec.diag_variance / n);
  Matrix M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const auto idx = static_cast<std::uint32_t>(i) * static_cast<std::uint32_t>(n) + static_cast<std::uint32_t>(j);
      const Philox4x32Ctr r = philox4x32({idx, stream.matrix, stream.sample, stream.experiment}, key);
      if (i == j) {
        M(i, i) = diag_scale * draw_pair(spec.diag, r).first;
        continue;
      }
      const auto [u, v] = draw_pair(spec.offdiag, r);
      const cplx z = spec.symmetry == Symmetry::hermitian ? cplx{u, v} * off_scale : cplx{u * off_scale, 0.0};
      M(i, j) = z;
      M(j, i) = std::conj(z);
    }
  }
  return M;
}

Matrix interpolate(const Matrix& Y, const Matrix& X, double t) {
  if (Y.rows() != X.rows() || Y.cols() != X.cols()) throw DimensionError("interpolation dimension mismatch");
  if (!(t >= 0.0)) throw std::invalid_argument("interpolation time must be nonnegative");
  return std::exp(-0.5 * t) * Y + std::sqrt(-std::expm1(-t)) * X;
}

EntryMomentReport entry_moment_report(const EnsembleSpec& spec, int p, long draws, const SeedStream& stream) {
  if (p < 1 || p > 12) throw std::invalid_argument("moment order must lie in [1, 12]");
  if (spec.N < 2) throw std::invalid_argument("entry report needs N >= 2");
  if (draws < 2) throw std::invalid_argument("entry report needs at least two draws");
  const Philox4x32Key key = key_of(stream);
  const double off_scale = spec.symmetry == Symmetry::hermitian ? 1.0 / std::sqrt(2.0) : 1.0;
  const double diag_scale = std::sqrt(spec.diag_variance);
  std::vector<double> dv, ov;
  dv.reserve(static_cast<std::size_t>(draws));
  ov.reserve(static_cast<std::size_t>(draws));
  for (long s = 0; s < draws; ++s) {
    const auto sample_idx = stream.sample + static_cast<std::uint32_t>(s);
    // Entries (0,0) and (0,1) of sample sample_idx, rescaled by sqrt(N).
    const Philox4x32Ctr rd = philox4x32({0u, stream.matrix, sample_idx, stream.experiment}, key);
    const Philox4x32Ctr ro = philox4x32({1u, stream.matrix, sample_idx, stream.experiment}, key);
    dv.push_back(std::pow(std::abs(diag_scale * draw_pair(spec.diag, rd).first), p));
    const auto [u, v] = draw_pair(spec.offdiag, ro);
    const double mag = spec.symmetry == Symmetry::hermitian ? std::hypot(u, v) * off_scale : std::abs(u);
    ov.push_back(std::pow(mag, p));
  }
  auto summarize = [draws](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(draws);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return MomentEstimate{mean, std::sqrt(ss / static_cast<double>(draws - 1) / static_cast<double>(draws)), draws};
  };
  return {p, summarize(dv), summarize(ov)};
}

}  // namespace ncfree
