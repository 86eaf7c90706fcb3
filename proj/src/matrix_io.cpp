#include "ncfree/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ncfree {

namespace {

void write_entries(std::ostream& os, const char* magic, Eigen::Index n, const cplx* data, Eigen::Index count) {
  os << magic << "\nN " << n << "\n" << std::setprecision(17);
  for (Eigen::Index k = 0; k < count; ++k) os << data[k].real() << ' ' << data[k].imag() << '\n';
  if (!os) throw std::runtime_error("write failed");
}

Eigen::Index read_header(std::istream& is, const std::string& magic) {
  std::string line;
  if (!std::getline(is, line) || line != magic) throw std::runtime_error("bad magic, expected " + magic);
  std::string tag;
  long long n = -1;
  if (!(is >> tag >> n) || tag != "N" || n < 0) throw std::runtime_error("bad dimension line");
  return static_cast<Eigen::Index>(n);
}

cplx read_entry(std::istream& is) {
  double re = 0.0, im = 0.0;
  if (!(is >> re >> im)) throw std::runtime_error("truncated entry list");
  return {re, im};
}

}  // namespace

void write_matrix(std::ostream& os, const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("NCFM1 matrices are square");
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = M;
  write_entries(os, "NCFM1", M.rows(), R.data(), R.size());
}

Matrix read_matrix(std::istream& is) {
  const Eigen::Index n = read_header(is, "NCFM1");
  Matrix M(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) M(r, c) = read_entry(is);
  return M;
}

void write_vector(std::ostream& os, const Vector& v) { write_entries(os, "NCFV1", v.size(), v.data(), v.size()); }

Vector read_vector(std::istream& is) {
  const Eigen::Index n = read_header(is, "NCFV1");
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = read_entry(is);
  return v;
}

void save_matrix(const std::string& path, const Matrix& M) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_matrix(os, M);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_matrix(is);
}

void save_vector(const std::string& path, const Vector& v) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_vector(os, v);
}

Vector load_vector(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_vector(is);
}

}  // namespace ncfree
