#pragma once

#include <string>

#include "ncfree/matengine.hpp"

namespace ncfree {

/// Builtin deterministic matrices of any size n, written "gen:" followed by
/// a sum of terms [coef "*"] basis. Bases, for k = 0..n-1:
///   identity  I
///   alt       diag((-1)^k)
///   cos       diag(cos(2 pi k / n))
///   sin       diag(sin(2 pi k / n))
///   altcos    diag((-1)^k cos(2 pi k / n))
///   ramp      diag((2k + 1 - n) / n)
///   shift     cyclic shift e_k -> e_{k+1}
///   hop       shift + shift^*
/// Example: "gen:alt+0.5*altcos".
bool is_generator_spec(const std::string& spec);
Matrix generate_matrix(const std::string& spec, Eigen::Index n);

}  // namespace ncfree
