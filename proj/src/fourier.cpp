#include "ncfree/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ncfree {

FourierSum FourierSum::identity_function() {
  FourierSum f;
  f.identity_ = true;
  return f;
}

FourierSum FourierSum::single(cplx c, double y) { return from_atoms({{c, y}}); }

FourierSum FourierSum::from_atoms(std::vector<FourierAtom> atoms) {
  std::stable_sort(atoms.begin(), atoms.end(), [](const FourierAtom& a, const FourierAtom& b) { return a.y < b.y; });
  FourierSum f;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.y)) throw std::invalid_argument("non-finite frequency");
    if (!f.atoms_.empty() && f.atoms_.back().y == a.y) {
      f.atoms_.back().c += a.c;
    } else {
      f.atoms_.push_back(a);
    }
  }
  std::erase_if(f.atoms_, [](const FourierAtom& a) { return a.c == cplx{}; });
  return f;
}

cplx FourierSum::operator()(double t) const {
  if (identity_) return t;
  cplx acc{};
  for (const auto& a : atoms_) acc += a.c * std::exp(cplx{0.0, t * a.y});
  return acc;
}

double fourier_norm(const FourierSum& f, int order) {
  if (order != 2 && order != 4) throw std::invalid_argument("fourier_norm order must be 2 or 4");
  if (f.is_identity()) return 1.0;
  double s = 0.0;
  for (const auto& a : f.atoms()) s += std::abs(a.c) * (1.0 + std::pow(std::abs(a.y), order));
  return s;
}

}  // namespace ncfree
