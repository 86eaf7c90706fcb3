#include "ncfree/cumulants.hpp"

#include <cmath>
#include <stdexcept>

namespace ncfree {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double falling(int p, int a) {
  double r = 1.0;
  for (int i = 0; i < a; ++i) r *= p - i;
  return r;
}

CumulantTable cumulants_from_moments(const std::function<double(int, int)>& mu, int order) {
  CumulantTable k(order);
  // mu_{n+1,m} = sum_{a<=n, b<=m} C(n,a) C(m,b) kappa_{a+1,b} mu_{n-a,m-b}
  for (int total = 1; total <= order; ++total) {
    for (int n1 = 1; n1 <= total; ++n1) {
      const int n = n1 - 1, m = total - n1;
      double acc = mu(n + 1, m);
      for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= m; ++b) {
          if (a == n && b == m) continue;
          acc -= binom(n, a) * binom(m, b) * k(a + 1, b) * mu(n - a, m - b);
        }
      k.at(n + 1, m) = acc;
    }
    // mu_{0,m+1} = sum_{b<=m} C(m,b) kappa_{0,b+1} mu_{0,m-b}
    const int m = total - 1;
    double acc = mu(0, m + 1);
    for (int b = 0; b < m; ++b) acc -= binom(m, b) * k(0, b + 1) * mu(0, m - b);
    k.at(0, m + 1) = acc;
  }
  return k;
}

}  // namespace

BivariateLaw BivariateLaw::independent(const EntryLaw& U, double su, const EntryLaw& V, double sv) {
  BivariateLaw law;
  const QuadratureRule ru = U.rule(), rv = V.rule();
  for (std::size_t i = 0; i < ru.nodes.size(); ++i)
    for (std::size_t j = 0; j < rv.nodes.size(); ++j)
      law.atoms_.push_back({su * ru.nodes[i], sv * rv.nodes[j], ru.weights[i] * rv.weights[j]});
  law.exact_moment_ = [U, su, V, sv](int n, int m) { return std::pow(su, n) * U.moment(n) * std::pow(sv, m) * V.moment(m); };
  return law;
}

BivariateLaw BivariateLaw::single(const EntryLaw& U, double su) {
  BivariateLaw law;
  const QuadratureRule ru = U.rule();
  for (std::size_t i = 0; i < ru.nodes.size(); ++i) law.atoms_.push_back({su * ru.nodes[i], 0.0, ru.weights[i]});
  law.exact_moment_ = [U, su](int n, int m) { return m == 0 ? std::pow(su, n) * U.moment(n) : 0.0; };
  return law;
}

BivariateLaw BivariateLaw::discrete(std::vector<std::array<double, 3>> atoms) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a[2] >= 0.0)) throw std::invalid_argument("negative weight in discrete law");
    total += a[2];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("discrete law weights must sum to 1");
  BivariateLaw law;
  law.atoms_ = std::move(atoms);
  return law;
}

BivariateLaw BivariateLaw::empirical(std::vector<std::array<double, 2>> samples) {
  BivariateLaw law;
  law.empirical_ = true;
  const double w = samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size());
  for (const auto& s : samples) law.atoms_.push_back({s[0], s[1], w});
  return law;
}

BivariateLaw BivariateLaw::gue_offdiag(int N) {
  const double s = 1.0 / std::sqrt(2.0 * N);
  return independent(EntryLaw::gaussian(), s, EntryLaw::gaussian(), s);
}

double BivariateLaw::moment(int n, int m) const {
  if (exact_moment_) return exact_moment_(n, m);
  double acc = 0.0;
  for (const auto& a : atoms_) acc += a[2] * std::pow(a[0], n) * std::pow(a[1], m);
  return acc;
}

std::complex<double> BivariateLaw::expect(const std::function<std::complex<double>(double, double)>& g) const {
  std::complex<double> acc{};
  for (const auto& a : atoms_) acc += a[2] * g(a[0], a[1]);
  return acc;
}

std::size_t CumulantTable::index(int n, int m) const {
  if (n < 0 || m < 0 || n + m > order_) throw std::out_of_range("cumulant index outside the table");
  return static_cast<std::size_t>(n * (order_ + 1) + m);
}

CumulantTable joint_cumulants(const BivariateLaw& law, int order) {
  if (order < 1 || order > 7) throw std::invalid_argument("cumulant order must lie in [1, 7]");
  if (law.is_empirical() && law.sample_count() < 100) throw std::invalid_argument("empirical cumulants need at least 100 samples");
  return cumulants_from_moments([&law](int n, int m) { return law.moment(n, m); }, order);
}

std::complex<double> TestFunctional::derivative(int a, int b, double u, double v) const {
  if (kind == Kind::exponential) {
    return std::pow(std::complex<double>(0.0, t), a) * std::pow(std::complex<double>(0.0, s), b) *
           std::exp(std::complex<double>(0.0, t * u + s * v));
  }
  if (a > p || b > r) return 0.0;
  return falling(p, a) * falling(r, b) * std::pow(u, p - a) * std::pow(v, r - b);
}

std::complex<double> expansion_layer(const BivariateLaw& law, const TestFunctional& phi, int order) {
  const CumulantTable k = joint_cumulants(law, order + 1);
  std::complex<double> acc{};
  for (int a = 0; a <= order; ++a) {
    const int b = order - a;
    const double kap = k(a + 1, b);
    if (kap == 0.0) continue;
    acc += kap / (factorial(a) * factorial(b)) * law.expect([&](double u, double v) { return phi.derivative(a, b, u, v); });
  }
  return acc;
}

CumulantCheck cumulant_expansion_check(const BivariateLaw& law, const TestFunctional& phi, int order) {
  if (phi.kind == TestFunctional::Kind::monomial && (phi.p < 0 || phi.r < 0 || phi.p + phi.r > 6))
    throw std::invalid_argument("monomial test functionals are supported up to degree 6");
  if (order < 0 || order > 6) throw std::invalid_argument("expansion order must lie in [0, 6]");
  CumulantCheck out;
  out.lhs = law.expect([&](double u, double v) { return u * phi.derivative(0, 0, u, v); });
  for (int l = 0; l <= order; ++l) out.expansion += expansion_layer(law, phi, l);
  out.residual = out.lhs - out.expansion;
  return out;
}

}  // namespace ncfree
