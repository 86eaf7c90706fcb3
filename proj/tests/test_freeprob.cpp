#include <cmath>

#include "doctest.h"
#include "ncfree/dsl.hpp"
#include "ncfree/fourier.hpp"
#include "ncfree/free_trace.hpp"
#include "ncfree/partitions.hpp"
#include "ncfree/quadrature.hpp"
#include "ncfree/surrogate.hpp"
#include "support.hpp"

using namespace ncfree;

namespace {

std::vector<Matrix> random_mats(std::mt19937_64& g, int count, int N) {
  std::vector<Matrix> m;
  for (int k = 0; k < count; ++k) m.push_back(testsupport::random_matrix(g, N) + Matrix::Identity(N, N) * 0.3);
  return m;
}

// Semicircle moment by quadrature in t = 2 cos(theta).
double semicircle_quadrature(int k) {
  const QuadratureRule& r = gauss_legendre_unit(60);
  double s = 0.0;
  for (std::size_t j = 0; j < r.nodes.size(); ++j) {
    const double th = M_PI * r.nodes[j];
    s += r.weights[j] * std::pow(2.0 * std::cos(th), k) * 4.0 * std::sin(th) * std::sin(th);
  }
  return s * M_PI / (2.0 * M_PI);
}

FreeWord rotate(const FreeWord& w, std::size_t r) {
  FreeWord out;
  for (std::size_t k = 0; k < w.tokens.size(); ++k) out.tokens.push_back(w.tokens[(k + r) % w.tokens.size()]);
  return out;
}

}  // namespace

TEST_SUITE("freeprob") {
  TEST_CASE("nc_pair_partitions examples") {
    CHECK(nc_pair_partitions(2, {1, 1}).size() == 1);
    const auto four = nc_pair_partitions(4, {1, 1, 1, 1});
    REQUIRE(four.size() == 2);
    CHECK(std::find(four.begin(), four.end(), NcPartition::from_blocks(4, {{1, 2}, {3, 4}})) != four.end());
    CHECK(std::find(four.begin(), four.end(), NcPartition::from_blocks(4, {{1, 4}, {2, 3}})) != four.end());
    CHECK(nc_pair_partitions(4, {1, 2, 1, 2}).empty());
    CHECK(nc_pair_partitions(3, {1, 1, 1}).empty());
  }

  TEST_CASE("is_noncrossing") {
    CHECK(is_noncrossing(NcPartition::from_blocks(4, {{1, 4}, {2, 3}})));
    CHECK_FALSE(is_noncrossing(NcPartition::from_blocks(4, {{1, 3}, {2, 4}})));
    CHECK_THROWS(NcPartition::from_blocks(3, {{1, 2}}));
  }

  TEST_CASE("kreweras examples") {
    CHECK(kreweras(NcPartition::from_blocks(4, {{1, 2}, {3, 4}})) == NcPartition::from_blocks(4, {{1}, {2, 4}, {3}}));
    CHECK(kreweras_bruteforce(NcPartition::from_blocks(4, {{1, 2}, {3, 4}})) ==
          NcPartition::from_blocks(4, {{1}, {2, 4}, {3}}));
    CHECK(kreweras(NcPartition::from_blocks(5, {{1}, {2}, {3}, {4}, {5}})) ==
          NcPartition::from_blocks(5, {{1, 2, 3, 4, 5}}));
    CHECK_THROWS(kreweras(NcPartition::from_blocks(4, {{1, 3}, {2, 4}})));
  }

  TEST_CASE("property: kreweras matches brute force and sizes add to k + 1") {
    for (int k = 1; k <= 7; ++k)
      for (const auto& pi : all_nc_partitions(k)) {
        const NcPartition K = kreweras(pi);
        CHECK(pi.size() + K.size() == static_cast<std::size_t>(k + 1));
        CHECK(K == kreweras_bruteforce(pi));
      }
  }

  TEST_CASE("partition counts") {
    const std::vector<std::size_t> bell = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
    for (int k = 0; k <= 8; ++k) CHECK(all_partitions(k).size() == bell[static_cast<std::size_t>(k)]);
    std::uint64_t c = 1;
    for (int k = 0; k <= 8; ++k) {
      CHECK(catalan(k) == c);
      CHECK(all_nc_partitions(k).size() == c);
      CHECK(nc_pair_partitions(2 * k, std::vector<int>(static_cast<std::size_t>(2 * k), 1)).size() == c);
      c = c * 2 * (2 * k + 1) / (k + 2);
    }
  }

  TEST_CASE("semicircle moments") {
    CHECK(semicircle_moment(0) == 1.0);
    CHECK(semicircle_moment(2) == 1.0);
    CHECK(semicircle_moment(4) == 2.0);
    CHECK(semicircle_moment(6) == 5.0);
    for (int k : {1, 3, 7}) CHECK(semicircle_moment(k) == 0.0);
    for (int k = 0; k <= 12; ++k) CHECK(std::abs(semicircle_moment(k) - semicircle_quadrature(k)) <= 1e-10);
  }

  TEST_CASE("free_word_trace examples") {
    std::mt19937_64 g(1);
    const auto B = random_mats(g, 2, 5);
    const cplx v = free_word_trace(FreeWord::parse("x1 B1 x1 B2"), B, 5);
    CHECK(std::abs(v - normalized_trace(B[0]) * normalized_trace(B[1])) <= 1e-12);
    CHECK(free_word_trace(FreeWord::parse("x1 x2 x1 x2"), {}, 3) == cplx{0.0});
    CHECK(free_word_trace(FreeWord::parse("x1 x1"), {}, 3) == cplx{1.0});
    CHECK_THROWS_AS(free_word_trace(FreeWord::parse("x1 B1"), {Matrix::Identity(4, 4)}, 5), DimensionError);
    CHECK_THROWS(FreeWord::parse("y1 B1"));
  }

  TEST_CASE("free moment on diag(1, 2)") {
    Matrix B = Matrix::Zero(2, 2);
    B(0, 0) = 1.0;
    B(1, 1) = 2.0;
    CHECK(std::abs(free_word_trace(FreeWord::parse("x1 B1 x1 B1"), {B}, 2) - 2.25) <= 1e-15);
  }

  TEST_CASE("freeness_oracle_trace examples") {
    std::mt19937_64 g(2);
    auto B = random_mats(g, 1, 4);
    std::vector<Matrix> centered = {B[0] - normalized_trace(B[0]) * Matrix::Identity(4, 4)};
    CHECK(std::abs(freeness_oracle_trace(FreeWord::parse("x1 B1"), centered, 4)) <= 1e-14);
    const FreeWord w = FreeWord::parse("x1 B1 x1 B1");
    CHECK(std::abs(freeness_oracle_trace(w, B, 4) - free_word_trace(w, B, 4)) <= 1e-10);
    CHECK(std::abs(freeness_oracle_trace(FreeWord::parse("x1 x1 x1 x1"), {}, 4) - 2.0) <= 1e-14);
    CHECK_THROWS(freeness_oracle_trace(FreeWord::parse("x1 x1 x1 x1 x1 x1 x1 x1 x1 x1 x1 x1 x1 x1"), {}, 4));
  }

  TEST_CASE("property: oracle equivalence on random words") {
    std::mt19937_64 g(3);
    std::uniform_int_distribution<int> len(1, 8), tok(0, 4);
    for (int k = 0; k < 300; ++k) {
      const int N = 1 + k % 6;
      const auto B = random_mats(g, 3, N);
      FreeWord w;
      const int L = len(g);
      for (int j = 0; j < L; ++j) {
        const int t = tok(g);
        if (t < 2) {
          w.tokens.emplace_back(SemiLetter{t + 1});
        } else {
          w.tokens.emplace_back(MatrixRef{t - 1});
        }
      }
      const cplx a = free_word_trace(w, B, N), b = freeness_oracle_trace(w, B, N);
      CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)));
    }
  }

  TEST_CASE("property: traciality") {
    std::mt19937_64 g(4);
    const auto B = random_mats(g, 3, 4);
    for (const char* s : {"x1 B1 x2 B2 x1 B3 x2", "x1 B1 x1 x2 B2 x2 B3 x1 x1", "B1 x1 B2 x1 B3 x2 x2 x1 x1 B1"}) {
      const FreeWord w = FreeWord::parse(s);
      const cplx v = free_word_trace(w, B, 4);
      for (std::size_t r = 1; r < w.tokens.size(); ++r) CHECK(std::abs(free_word_trace(rotate(w, r), B, 4) - v) <= 1e-10);
    }
  }

  TEST_CASE("free_polynomial_trace") {
    std::mt19937_64 g(5);
    const auto A = random_mats(g, 2, 4);
    const NcExpr e = parse("X1*A1*X1*A2 + 2*X1*X1*X1*X1 - A1'", 1, 2);
    const cplx want = normalized_trace(A[0]) * normalized_trace(A[1]) + 4.0 - normalized_trace(A[0].adjoint());
    CHECK(std::abs(free_polynomial_trace(e, A) - want) <= 1e-12);
    const Matrix M = A[1];
    CHECK(std::abs(free_polynomial_trace(parse("X1*A1*X1", 1, 2), A, M) - normalized_trace(A[0]) * normalized_trace(M)) <=
          1e-12);
    CHECK_THROWS(free_polynomial_trace(parse("exp(i X1)", 1, 0), {}));
  }

  TEST_CASE("loop-equation reduction of X1^4") {
    const ReducedTrace r = reduce_by_loop_equations(parse("X1*X1*X1*X1", 1, 0), {});
    CHECK(r.constant == cplx{2.0});
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].coef == cplx{1.0});
    CHECK(r.pairs[0].left.size() == 1);
    CHECK(r.pairs[0].right.size() == 1);
  }

  TEST_CASE("surrogate examples") {
    const SeedStream s{9, 100};
    const Estimate x2 = free_surrogate_trace(parse("X1*X1", 1, 0), {}, 256, 200, s);
    CHECK(std::abs(x2.value - 1.0) <= 3.0 * x2.stderr_);
    const Estimate alt = free_surrogate_trace(parse("X1*X2*X1*X2", 2, 0), {}, 256, 200, s.with_experiment(101));
    CHECK(std::abs(alt.value) <= 3.0 * alt.stderr_);
    const Estimate sd = free_surrogate_trace(parse("X1*X2*X1*X2", 2, 0), {}, 64, 50, s,
                                             SurrogateOptions{SurrogateMethod::schwinger_dyson, 21, 1});
    CHECK(std::abs(sd.value) <= 3.0 * sd.stderr_ + 1e-3);
  }

  TEST_CASE("surrogate with block-replicated matrices") {
    std::mt19937_64 g(6);
    Matrix A = testsupport::random_hermitian(g, 8);
    const Matrix R = block_replicate(A, 32);
    CHECK(std::abs(normalized_trace(R * R * R) - normalized_trace(A * A * A)) <= 1e-12);
    CHECK(block_replicate(A, 12).rows() == 12);
    const NcExpr e = parse("X1*A1*X1*A1", 1, 1);
    const Estimate est = free_surrogate_trace(e, {A}, 128, 100, SeedStream{10});
    const cplx exact = free_polynomial_trace(e, {A});
    CHECK(std::abs(est.value - exact) <= 3.0 * est.stderr_ + 1e-3);
  }

  TEST_CASE("conditional expectation scalar form") {
    std::mt19937_64 g(7);
    const int N = 8;
    const Matrix A = testsupport::random_matrix(g, N);
    Vector x = Vector::Zero(N), y = Vector::Zero(N);
    x(0) = 1.0;
    y(0) = 0.6;
    y(1) = 0.8;
    const SeedStream s{11};
    const Estimate a = conditional_expectation_scalar(parse("A1", 1, 1), {A}, x, y, 64, 10, s);
    CHECK(std::abs(a.value - x.dot(A * y)) <= 1e-14);
    const Estimate x1 = conditional_expectation_scalar(parse("X1", 1, 0), {}, x, y, 64, 10, s);
    CHECK(std::abs(x1.value) <= 1e-14);
    const Estimate x2 = conditional_expectation_scalar(parse("X1*X1*X1*X1", 1, 0), {}, x, x, 64, 10, s);
    CHECK(std::abs(x2.value - 2.0) <= 1e-13);
    // tau(exp(i x)) = J_1(2) for a standard semicircular x.
    const Estimate ex = conditional_expectation_scalar(parse("exp(i X1)", 1, 0), {}, x, x, 256, 100, s);
    CHECK(std::abs(ex.value - std::cyl_bessel_j(1.0, 2.0)) <= 3.0 * ex.stderr_ + 2e-3);
    CHECK_THROWS(conditional_expectation_scalar(parse("exp(i X1)", 1, 0), {}, x, x, 60, 10, s));
    CHECK_THROWS_AS(conditional_expectation_scalar(parse("A1", 1, 1), {A}, x, Vector::Zero(3), 64, 10, s), DimensionError);
  }

  TEST_CASE("fourier_norm examples") {
    const double t = 1.7;
    CHECK(fourier_norm(FourierSum::single(1.0, t), 4) == doctest::Approx(1.0 + std::pow(t, 4)));
    CHECK(fourier_norm(FourierSum::identity_function(), 4) == 1.0);
    CHECK(fourier_norm(FourierSum::from_atoms({{1.0, 0.0}, {2.0, 1.0}}), 2) == 5.0);
    const FourierSum merged = FourierSum::from_atoms({{1.0, 0.5}, {2.0, 0.5}, {0.0, 3.0}});
    REQUIRE(merged.atoms().size() == 1);
    CHECK(merged.atoms()[0].c == cplx{3.0});
  }

  TEST_CASE("property: norm chain") {
    // Order 4 dominates order 2 only for frequencies with |y| >= 1.
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0), mag(1.0, 3.0);
    std::bernoulli_distribution sign;
    for (int k = 0; k < 50; ++k) {
      std::vector<FourierAtom> atoms;
      for (int j = 0; j < 4; ++j) atoms.push_back({cplx{u(g), u(g)}, sign(g) ? mag(g) : -mag(g)});
      const FourierSum f = FourierSum::from_atoms(atoms);
      double l1 = 0.0;
      for (const auto& a : f.atoms()) l1 += std::abs(a.c);
      double sup = 0.0;
      for (int s = -200; s <= 200; ++s) sup = std::max(sup, std::abs(f(s * 0.05)));
      CHECK(fourier_norm(f, 4) >= fourier_norm(f, 2));
      CHECK(fourier_norm(f, 2) >= l1);
      CHECK(l1 >= sup - 1e-12);
    }
    CHECK(fourier_norm(FourierSum::single(1.0, 0.5), 4) < fourier_norm(FourierSum::single(1.0, 0.5), 2));
  }
}
