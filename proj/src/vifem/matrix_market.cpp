#include "vifem/matrix_market.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vifem {

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.nrows << " " << a.ncols << " " << a.nnz() << "\n";
  char buf[96];
  for (int i = 0; i < a.nrows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, a.col_indices[k] + 1, a.values[k]);
      out << buf;
    }
}

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix market file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("not a MatrixMarket file: " + path);
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream head(line);
  int nrows, ncols;
  long nnz;
  if (!(head >> nrows >> ncols >> nnz)) throw std::runtime_error("malformed MatrixMarket header: " + path);
  CooBuilder b(nrows, ncols);
  for (long k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    if (!(in >> i >> j >> v)) throw std::runtime_error("truncated MatrixMarket body: " + path);
    b.add(i - 1, j - 1, v);
    if (symmetric && i != j) b.add(j - 1, i - 1, v);
  }
  return b.to_csr();
}

void write_vector_market(std::span<const double> v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  char buf[48];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
}

std::vector<double> read_vector_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("not a MatrixMarket file: " + path);
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream head(line);
  long n, cols;
  if (!(head >> n >> cols) || cols != 1) throw std::runtime_error("expected an n-by-1 array: " + path);
  std::vector<double> v(n);
  for (long i = 0; i < n; ++i)
    if (!(in >> v[i])) throw std::runtime_error("truncated vector body: " + path);
  return v;
}

}  // namespace vifem
