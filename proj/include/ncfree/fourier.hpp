#pragma once

#include <complex>
#include <vector>

#include "ncfree/alpha_poly.hpp"

namespace ncfree {

/// f(t) = sum_j c_j exp(i t y_j), or the identity function when identity is set.
struct FourierAtom {
  cplx c;
  double y;
};

class FourierSum {
 public:
  FourierSum() = default;
  static FourierSum identity_function();
  static FourierSum single(cplx c, double y);
  /// Atoms with equal frequency are merged and zero weights dropped.
  static FourierSum from_atoms(std::vector<FourierAtom> atoms);

  bool is_identity() const { return identity_; }
  const std::vector<FourierAtom>& atoms() const { return atoms_; }
  cplx operator()(double t) const;

 private:
  bool identity_ = false;
  std::vector<FourierAtom> atoms_;
};

/// sum_j |c_j| (1 + |y_j|^order), and 1 for the identity function.
double fourier_norm(const FourierSum& f, int order);

}  // namespace ncfree
