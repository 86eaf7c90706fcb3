#include "ncfree/generators.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ncfree {

namespace {

Matrix basis(const std::string& name, Eigen::Index n) {
  const double tau = 2.0 * std::numbers::pi;
  Vector dg(n);
  auto fill = [&](auto f) {
    for (Eigen::Index k = 0; k < n; ++k) dg(k) = f(static_cast<double>(k));
    return Matrix(dg.asDiagonal());
  };
  const double nn = static_cast<double>(n);
  if (name == "identity" || name == "I") return Matrix::Identity(n, n);
  if (name == "alt") return fill([](double k) { return std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0; });
  if (name == "cos") return fill([&](double k) { return std::cos(tau * k / nn); });
  if (name == "sin") return fill([&](double k) { return std::sin(tau * k / nn); });
  if (name == "altcos") return fill([&](double k) { return (std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0) * std::cos(tau * k / nn); });
  if (name == "ramp") return fill([&](double k) { return (2.0 * k + 1.0 - nn) / nn; });
  if (name == "shift" || name == "hop") {
    Matrix S = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) S((k + 1) % n, k) = 1.0;
    if (name == "shift") return S;
    return S + S.adjoint();
  }
  throw std::invalid_argument("unknown generator basis '" + name + "'");
}

}  // namespace

bool is_generator_spec(const std::string& spec) { return spec.rfind("gen:", 0) == 0; }

Matrix generate_matrix(const std::string& spec, Eigen::Index n) {
  if (!is_generator_spec(spec)) throw std::invalid_argument("generator specs start with 'gen:'");
  if (n < 1) throw std::invalid_argument("generator dimension must be positive");
  const std::string body = spec.substr(4);
  Matrix out = Matrix::Zero(n, n);
  std::size_t pos = 0;
  bool any = false;
  while (pos < body.size()) {
    double sign = 1.0;
    if (body[pos] == '+' || body[pos] == '-') {
      if (body[pos] == '-') sign = -1.0;
      ++pos;
    } else if (any) {
      throw std::invalid_argument("expected '+' or '-' in generator spec '" + spec + "'");
    }
    double coef = 1.0;
    const char* start = body.data() + pos;
    const char* end = body.data() + body.size();
    double v = 0.0;
    auto res = std::from_chars(start, end, v);
    if (res.ec == std::errc{} && res.ptr != start) {
      coef = v;
      pos = static_cast<std::size_t>(res.ptr - body.data());
      if (pos >= body.size() || body[pos] != '*') throw std::invalid_argument("expected '*' after coefficient in '" + spec + "'");
      ++pos;
    }
    std::size_t stop = body.find_first_of("+-", pos);
    if (stop == std::string::npos) stop = body.size();
    out += sign * coef * basis(body.substr(pos, stop - pos), n);
    pos = stop;
    any = true;
  }
  if (!any) throw std::invalid_argument("empty generator spec");
  return out;
}

}  // namespace ncfree
