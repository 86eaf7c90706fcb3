#include <set>

#include "doctest.h"
#include "ncfree/ensembles.hpp"
#include "ncfree/rng.hpp"
#include "ncfree/stats.hpp"

using namespace ncfree;

TEST_SUITE("ensembles") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    // Reference values published with the Random123 library.
    const auto z = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(z == Philox4x32Ctr{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto f = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(f == Philox4x32Ctr{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const auto p = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(p == Philox4x32Ctr{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("uniform and normal draws have the right first moments") {
    StreamGenerator g(SeedStream{42});
    std::vector<double> u, z;
    for (int k = 0; k < 20000; ++k) {
      u.push_back(g.uniform());
      z.push_back(g.normal());
    }
    for (double v : u) CHECK((v > 0.0 && v < 1.0));
    CHECK(std::abs(mean(u) - 0.5) <= 4.0 * stderr_of_mean(u));
    CHECK(std::abs(mean(z)) <= 4.0 * stderr_of_mean(z));
    std::vector<double> z2;
    for (double v : z) z2.push_back(v * v);
    CHECK(std::abs(mean(z2) - 1.0) <= 4.0 * stderr_of_mean(z2));
  }

  TEST_CASE("GUE off-diagonal second moment is 1/N") {
    const EntryMomentReport r = entry_moment_report(EnsembleSpec::gue(16), 2, 100000, SeedStream{1, 1});
    CHECK(std::abs(r.offdiag.mean - 1.0) <= 3.0 * r.offdiag.stderr_);
    CHECK(std::abs(r.diag.mean - 1.0) <= 3.0 * r.diag.stderr_);
  }

  TEST_CASE("GOE diagonal variance is 2/N") {
    const EntryMomentReport r = entry_moment_report(EnsembleSpec::goe(16), 2, 100000, SeedStream{1, 2});
    CHECK(std::abs(r.diag.mean - 2.0) <= 3.0 * r.diag.stderr_);
    CHECK(std::abs(r.offdiag.mean - 1.0) <= 3.0 * r.offdiag.stderr_);
  }

  TEST_CASE("Rademacher Wigner entries are +-1/sqrt(N)") {
    const int N = 12;
    const Matrix H = sample(EnsembleSpec::wigner(N, EntryLaw::rademacher()), SeedStream{3});
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        CHECK(H(i, j).imag() == 0.0);
        if (i != j) CHECK(std::abs(std::abs(H(i, j).real()) - 1.0 / std::sqrt(N)) == 0.0);
      }
    const EntryMomentReport r = entry_moment_report(EnsembleSpec::wigner(N, EntryLaw::rademacher()), 4, 1000, SeedStream{3});
    CHECK(r.offdiag.mean == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("Gaussian fourth moment is 3") {
    const EntryLaw gl = EntryLaw::gaussian();
    CHECK(gl.moment(4) == 3.0);
    const QuadratureRule rule = gl.rule(20);
    double m4 = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) m4 += rule.weights[k] * std::pow(rule.nodes[k], 4);
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
    const EntryMomentReport r = entry_moment_report(EnsembleSpec::wigner(8, gl), 4, 100000, SeedStream{4});
    CHECK(std::abs(r.offdiag.mean - 3.0) <= 3.0 * r.offdiag.stderr_);
  }

  TEST_CASE("entry laws") {
    CHECK(EntryLaw::uniform().moment(2) == doctest::Approx(1.0));
    CHECK(EntryLaw::uniform().moment(4) == doctest::Approx(9.0 / 5.0));
    CHECK(EntryLaw::rademacher().moment(4) == 1.0);
    CHECK(EntryLaw::from_name("rademacher").kind() == EntryLaw::Kind::rademacher);
    CHECK_THROWS(EntryLaw::from_name("cauchy"));
    const double a = std::sqrt(1.5);
    CHECK_NOTHROW(EntryLaw::discrete({-a, 0.0, a}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
    CHECK_THROWS(EntryLaw::discrete({-1.0, 2.0}, {0.5, 0.5}));
    CHECK_THROWS(EntryLaw::discrete({-2.0, 2.0}, {0.5, 0.5}));
    CHECK_THROWS(entry_moment_report(EnsembleSpec::gue(4), 14, 10, SeedStream{}));
  }

  TEST_CASE("interpolation endpoints") {
    const Matrix Y = sample(EnsembleSpec::gue(6), SeedStream{5, 0, 0, 0});
    const Matrix X = sample(EnsembleSpec::gue(6), SeedStream{5, 0, 0, 1});
    CHECK((interpolate(Y, X, 0.0) - Y).norm() == 0.0);
    CHECK((interpolate(Y, X, 1e3) - X).norm() <= 1e-15 * X.norm());
    for (double t : {0.1, 1.0, 7.0}) {
      CHECK(std::exp(-t) + -std::expm1(-t) == doctest::Approx(1.0).epsilon(1e-15));
      const Matrix Z = interpolate(Y, X, t);
      CHECK((Z - Z.adjoint()).norm() == 0.0);
    }
    CHECK_THROWS(interpolate(Y, X, -1.0));
    CHECK_THROWS(interpolate(Y, Matrix::Zero(5, 5), 1.0));
  }

  TEST_CASE("samples are exactly Hermitian or real symmetric") {
    const Matrix H = sample(EnsembleSpec::gue(20), SeedStream{6});
    CHECK((H - H.adjoint()).norm() == 0.0);
    for (int i = 0; i < 20; ++i) CHECK(H(i, i).imag() == 0.0);
    const Matrix S = sample(EnsembleSpec::goe(20), SeedStream{6});
    CHECK((S - S.transpose()).norm() == 0.0);
    CHECK(S.imag().norm() == 0.0);
  }

  TEST_CASE("determinism and stream separation") {
    const SeedStream s{77, 3, 9, 1};
    CHECK(sample(EnsembleSpec::gue(10), s) == sample(EnsembleSpec::gue(10), s));
    std::set<double> firsts;
    for (const SeedStream& t : {s, s.with_experiment(4), s.with_sample(10), s.with_matrix(2), SeedStream{78, 3, 9, 1}})
      firsts.insert(sample(EnsembleSpec::gue(10), t)(0, 1).real());
    CHECK(firsts.size() == 5);
  }

  TEST_CASE("entries at distinct coordinates are uncorrelated") {
    const long draws = 4000;
    std::vector<double> a, b, c;
    for (long s = 0; s < draws; ++s) {
      const SeedStream st = SeedStream{8}.with_sample(static_cast<std::uint32_t>(s));
      const Matrix X1 = sample(EnsembleSpec::gue(4), st);
      const Matrix X2 = sample(EnsembleSpec::gue(4), st.with_matrix(1));
      a.push_back(X1(0, 1).real());
      b.push_back(X1(2, 3).real());
      c.push_back(X2(0, 1).real());
    }
    auto corr = [](const std::vector<double>& x, const std::vector<double>& y) {
      const double mx = mean(x), my = mean(y);
      double sxy = 0, sxx = 0, syy = 0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
      }
      return sxy / std::sqrt(sxx * syy);
    };
    CHECK(std::abs(corr(a, b)) <= 4.0 / std::sqrt(draws));
    CHECK(std::abs(corr(a, c)) <= 4.0 / std::sqrt(draws));
  }

  TEST_CASE("spec validation") {
    CHECK_THROWS(EnsembleSpec::gue(0).validate());
    EnsembleSpec s = EnsembleSpec::gue(4);
    s.diag_variance = 0.0;
    CHECK_THROWS(s.validate());
  }
}
