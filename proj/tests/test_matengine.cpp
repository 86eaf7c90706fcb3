#include <sstream>

#include "doctest.h"
#include "ncfree/dsl.hpp"
#include "ncfree/matengine.hpp"
#include "ncfree/matrix_io.hpp"
#include "ncfree/quadrature.hpp"
#include "support.hpp"

using namespace ncfree;

namespace {

double unitarity_defect(const Matrix& U) {
  return (U.adjoint() * U - Matrix::Identity(U.rows(), U.cols())).norm();
}

// exp(i y H) by the truncated power series with scaling and squaring.
Matrix exp_series(const Matrix& H, double y) {
  const double nrm = (H * y).norm();
  int s = 0;
  while (nrm / std::ldexp(1.0, s) > 0.5) ++s;
  const Matrix B = H * cplx{0.0, y / std::ldexp(1.0, s)};
  Matrix term = Matrix::Identity(H.rows(), H.cols()), acc = term;
  for (int k = 1; k < 30; ++k) {
    term = term * B / static_cast<double>(k);
    acc += term;
  }
  for (int k = 0; k < s; ++k) acc = acc * acc;
  return acc;
}

// Five-point derivative of f at 0.
template <typename F>
cplx five_point(F f, double h) {
  return (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12.0 * h);
}

}  // namespace

TEST_SUITE("matengine") {
  TEST_CASE("evaluate examples") {
    std::mt19937_64 g(1);
    Context ctx;
    ctx.X = {testsupport::random_hermitian(g, 6)};
    CHECK((evaluate(NcExpr::x(1, 1), ctx) - ctx.X[0]).norm() == 0.0);
    CHECK((evaluate(NcExpr::unit(1, 0), ctx) - Matrix::Identity(6, 6)).norm() == 0.0);
    const Matrix U = evaluate(NcExpr::exp(2.5, NcExpr::x(1, 1) * NcExpr::x(1, 1)), ctx);
    CHECK(unitarity_defect(U) <= 1e-10);
  }

  TEST_CASE("exponential matches an independent series") {
    std::mt19937_64 g(2);
    Context ctx;
    ctx.X = {testsupport::random_hermitian(g, 8)};
    for (double y : {-3.0, 0.5, 4.0}) {
      const Matrix U = evaluate(NcExpr::exp(y, NcExpr::x(1, 1)), ctx);
      CHECK((U - exp_series(ctx.X[0], y)).norm() <= 1e-10);
    }
  }

  TEST_CASE("evaluation errors") {
    std::mt19937_64 g(3);
    Context ctx;
    ctx.X = {testsupport::random_hermitian(g, 4), testsupport::random_hermitian(g, 5)};
    CHECK_THROWS_AS(ctx.validate(), DimensionError);
    Context c2;
    c2.X = {testsupport::random_matrix(g, 4)};
    CHECK_THROWS_AS(evaluate(NcExpr::exp(1.0, NcExpr::x(1, 1)), c2), HermiticityError);
    Context c3;
    c3.X = {testsupport::random_hermitian(g, 4)};
    CHECK_THROWS_AS(evaluate(NcExpr::x(2, 2), c3), ArityError);
  }

  TEST_CASE("hermiticity tolerance levels") {
    std::mt19937_64 g(4);
    const Matrix H = testsupport::random_hermitian(g, 5);
    Matrix E = Matrix::Zero(5, 5);
    E(0, 1) = 1.0;
    bool warned = false;
    symmetrize_checked(H + E * 1e-12, &warned);
    CHECK_FALSE(warned);
    symmetrize_checked(H + E * 1e-8, &warned);
    CHECK(warned);
    CHECK_THROWS_AS(symmetrize_checked(H + E * 1e-4), HermiticityError);
  }

  TEST_CASE("herm_funcalc examples") {
    std::mt19937_64 g(5);
    const Matrix H = testsupport::random_hermitian(g, 7);
    CHECK((herm_funcalc(H, FourierSum::identity_function()) - H).norm() == 0.0);
    CHECK((herm_funcalc(H, FourierSum::single(1.0, 0.0)) - Matrix::Identity(7, 7)).norm() <= 1e-12);
    Context ctx;
    ctx.X = {H};
    const Matrix a = herm_funcalc(H, FourierSum::single(1.0, 1.3));
    const Matrix b = evaluate(NcExpr::exp(1.3, NcExpr::x(1, 1)), ctx);
    CHECK((a - b).norm() <= 1e-10);
  }

  TEST_CASE("trace forms") {
    CHECK(normalized_trace(Matrix::Identity(5, 5)) == cplx{1.0});
    Matrix D = Matrix::Zero(3, 3);
    D.diagonal() << 1.0, 2.0, 3.0;
    CHECK(trace(D) == cplx{6.0});
    Matrix M = Matrix::Zero(2, 2);
    M(0, 0) = 5.0;
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    CHECK(bilinear(e1, M, e1) == cplx{5.0});
    CHECK_THROWS_AS(bilinear(Vector::Zero(3), M, e1), DimensionError);
  }

  TEST_CASE("evaluate_tensor examples") {
    std::mt19937_64 g(6);
    Context ctx;
    ctx.X = {testsupport::random_hermitian(g, 8)};
    const NcExpr x1 = NcExpr::x(1, 1);
    const cplx v = evaluate_tensor(nc_derivative(x1 * x1, 1), ctx, TsTs{});
    CHECK(std::abs(v - 2.0 * normalized_trace(ctx.X[0])) <= 1e-13);
    CHECK(std::abs(evaluate_tensor(nc_derivative(x1, 1), ctx, HThenTrace{}) - 1.0) <= 1e-14);
  }

  TEST_CASE("exponential derivative matches finite differences") {
    std::mt19937_64 g(7);
    for (int N : {8, 32}) {
      const Matrix H = testsupport::random_hermitian(g, N);
      const Matrix K = testsupport::random_hermitian(g, N);
      const Matrix M = testsupport::random_matrix(g, N);
      for (double y : {-8.0, 3.0, 8.0}) {
        Context ctx;
        ctx.X = {H};
        ctx.A = {M};
        const NcExpr Q = NcExpr::exp(y, NcExpr::x(1, 1, 1)) * NcExpr::a(1, 1, 1);
        const cplx analytic = evaluate_tensor(nc_derivative(Q, 1), ctx, SharpThenTrace{K});
        const cplx fd = five_point(
            [&](double eps) {
              Context c = ctx;
              c.X[0] = H + eps * K;
              return normalized_trace(evaluate(Q, c));
            },
            1e-3);
        CHECK(std::abs(analytic - fd) <= 1e-6);
      }
    }
  }

  TEST_CASE("cyclic derivative of exp(i y X1) evaluates to i y exp(i y X1)") {
    std::mt19937_64 g(8);
    Context ctx;
    ctx.X = {testsupport::random_hermitian(g, 10)};
    Evaluator ev(ctx);
    for (double y : {0.5, 2.0, 6.0}) {
      const NcExpr e = NcExpr::exp(y, NcExpr::x(1, 1));
      const Matrix D = ev.evaluate(cyclic_derivative(e, 1));
      CHECK((D - cplx{0.0, y} * ev.evaluate(e)).norm() <= 1e-10);
    }
  }

  TEST_CASE("property: trace cyclicity") {
    std::mt19937_64 g(9);
    for (int k = 0; k < 50; ++k) {
      const Matrix A = testsupport::random_matrix(g, 9), B = testsupport::random_matrix(g, 9);
      CHECK(std::abs(normalized_trace(A * B) - normalized_trace(B * A)) <= 1e-12 * A.norm() * B.norm());
      CHECK(std::abs(ts_product(A, B) - normalized_trace(A * B)) <= 1e-12 * A.norm() * B.norm());
    }
  }

  TEST_CASE("property: exponential words are unitary") {
    std::mt19937_64 g(10);
    for (int k = 0; k < 30; ++k) {
      Context ctx;
      ctx.X = {testsupport::random_hermitian(g, 8), testsupport::random_hermitian(g, 8)};
      const NcExpr b = testsupport::random_expr(g, 2, 0, 3, 3, false);
      const NcExpr P = b + adjoint(b);
      if (P.is_zero()) continue;
      const NcExpr w = NcExpr::exp(1.7, P) * NcExpr::exp(-0.4, NcExpr::x(1, 2));
      CHECK(unitarity_defect(evaluate(w, ctx)) <= 1e-10);
    }
  }

  TEST_CASE("property: spectral mapping") {
    std::mt19937_64 g(11);
    for (int k = 0; k < 20; ++k) {
      const Matrix H = testsupport::random_hermitian(g, 8);
      const FourierSum f = FourierSum::from_atoms({{0.7, 0.0}, {0.3, 1.1}});
      // f is real on the spectrum only up to a phase, so compare f(H) with
      // U diag(f) U^* through its action on the eigenvectors.
      const Matrix F = herm_funcalc(H, f);
      Eigen::SelfAdjointEigenSolver<Matrix> es(H);
      for (Eigen::Index j = 0; j < 8; ++j) {
        const Vector v = es.eigenvectors().col(j);
        CHECK((F * v - f(es.eigenvalues()(j)) * v).norm() <= 1e-10);
      }
      const FourierSum r = FourierSum::from_atoms({{0.5, 1.0}, {0.5, -1.0}});
      Eigen::SelfAdjointEigenSolver<Matrix> fs(herm_funcalc(H, r));
      std::vector<double> got(fs.eigenvalues().data(), fs.eigenvalues().data() + 8), want;
      for (Eigen::Index j = 0; j < 8; ++j) want.push_back(std::cos(es.eigenvalues()(j)));
      std::sort(want.begin(), want.end());
      for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(got[j] - want[j]) <= 1e-10);
    }
  }

  TEST_CASE("property: quadrature convergence of the exponential derivative") {
    // The alpha integrand oscillates with frequency y (l_j - l_k), up to
    // about 4|y| for a semicircle spectrum; 21 and 31 nodes agree, while
    // 11 nodes are not yet converged at |y| = 8.
    std::mt19937_64 g(12);
    for (int N : {8, 32}) {
      Context ctx;
      ctx.X = {testsupport::random_hermitian(g, N)};
      const Matrix K = testsupport::random_hermitian(g, N);
      for (double y : {1.0, 4.0, 8.0}) {
        const TensorExpr t = nc_derivative(NcExpr::exp(y, NcExpr::x(1, 1)), 1);
        auto at = [&](int order) {
          Context c = ctx;
          c.quadrature_order = order;
          return evaluate_tensor(t, c, SharpThenTrace{K});
        };
        CHECK(std::abs(at(21) - at(31)) <= 1e-9);
        if (y <= 1.0) CHECK(std::abs(at(11) - at(21)) <= 1e-9);
      }
    }
  }

  TEST_CASE("eleven nodes do not resolve |y| = 8") {
    std::mt19937_64 g(12);
    Context ctx;
    ctx.X = {testsupport::random_hermitian(g, 8)};
    const TensorExpr t = nc_derivative(NcExpr::exp(8.0, NcExpr::x(1, 1)), 1);
    Context c11 = ctx, c21 = ctx;
    c11.quadrature_order = 11;
    c21.quadrature_order = 21;
    CHECK(std::abs(evaluate_tensor(t, c11, TsTs{}) - evaluate_tensor(t, c21, TsTs{})) > 1e-9);
  }

  TEST_CASE("property: bilinear equals trace with rank-one insertion") {
    std::mt19937_64 g(13);
    std::normal_distribution<double> z;
    for (int k = 0; k < 30; ++k) {
      const Matrix M = testsupport::random_matrix(g, 7);
      Vector x(7), y(7);
      for (int j = 0; j < 7; ++j) {
        x(j) = cplx{z(g), z(g)};
        y(j) = cplx{z(g), z(g)};
      }
      CHECK(std::abs(bilinear(x, M, y) - trace(M * y * x.adjoint())) <= 1e-12 * (1.0 + std::abs(bilinear(x, M, y))));
    }
  }

  TEST_CASE("property: self-adjoint expressions evaluate to Hermitian matrices") {
    std::mt19937_64 g(14);
    for (int k = 0; k < 40; ++k) {
      Context ctx;
      ctx.X = {testsupport::random_hermitian(g, 6), testsupport::random_hermitian(g, 6)};
      ctx.A = {testsupport::random_matrix(g, 6)};
      const NcExpr b = testsupport::random_expr(g, 2, 1, 4, 3);
      const Matrix M = evaluate(b + adjoint(b), ctx);
      CHECK((M - M.adjoint()).norm() <= 1e-12 * (1.0 + M.norm()));
    }
  }

  TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
    const QuadratureRule& r = gauss_legendre_unit(11);
    for (int p = 0; p <= 21; ++p) {
      double s = 0.0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    }
    const QuadratureRule h = gauss_hermite_normal(20);
    double m4 = 0.0;
    for (std::size_t k = 0; k < h.nodes.size(); ++k) m4 += h.weights[k] * std::pow(h.nodes[k], 4);
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  }

  TEST_CASE("matrix and vector files round trip exactly") {
    std::mt19937_64 g(15);
    const Matrix M = testsupport::random_matrix(g, 5);
    std::stringstream ss;
    write_matrix(ss, M);
    CHECK(ss.str().rfind("NCFM1\nN 5\n", 0) == 0);
    CHECK(read_matrix(ss) == M);
    const Vector v = M.col(2);
    std::stringstream sv;
    write_vector(sv, v);
    CHECK(read_vector(sv) == v);
    std::stringstream bad("NCFV1\nN 2\n0 0\n0 0\n");
    CHECK_THROWS(read_matrix(bad));
  }
}
