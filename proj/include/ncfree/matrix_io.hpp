#pragma once

#include <iosfwd>
#include <string>

#include "ncfree/matengine.hpp"

namespace ncfree {

/// NCFM1: "NCFM1\n", "N <dim>\n", then N*N lines "re im" in row-major order.
void write_matrix(std::ostream& os, const Matrix& M);
Matrix read_matrix(std::istream& is);
void save_matrix(const std::string& path, const Matrix& M);
Matrix load_matrix(const std::string& path);

/// NCFV1: same layout with N lines.
void write_vector(std::ostream& os, const Vector& v);
Vector read_vector(std::istream& is);
void save_vector(const std::string& path, const Vector& v);
Vector load_vector(const std::string& path);

}  // namespace ncfree
