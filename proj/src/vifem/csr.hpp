#pragma once

#include <span>
#include <vector>

namespace vifem {

// Compressed sparse row matrix. Column indices are sorted and unique within
// each row, which fixes the spmv accumulation order.
struct CsrMatrix {
  int nrows = 0;
  int ncols = 0;
  std::vector<int> row_offsets;  // size nrows+1, monotone
  std::vector<int> col_indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(col_indices.size()); }
  // Returns the stored entry or 0; does not insert.
  double at(int i, int j) const;
  // Index into values for (i,j), or -1 when not stored.
  int find(int i, int j) const;
};

class CooBuilder {
 public:
  CooBuilder(int nrows, int ncols) : nrows_(nrows), ncols_(ncols) {}
  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  void reserve(size_t n) { entries_.reserve(n); }
  // Sorts, merges duplicates, drops nothing else.
  CsrMatrix to_csr() const;

 private:
  struct Entry {
    int row, col;
    double val;
  };
  int nrows_, ncols_;
  std::vector<Entry> entries_;
};

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

CsrMatrix transpose(const CsrMatrix& a);

// max_{ij} |A - A^T| over the union sparsity pattern.
double max_asymmetry(const CsrMatrix& a);
double max_abs_value(const CsrMatrix& a);
bool is_symmetric(const CsrMatrix& a, double rel_tol);

// Extracts A(rows, rows) for the index subset given by new_index (old -> new,
// -1 for dropped rows/columns).
CsrMatrix extract_submatrix(const CsrMatrix& a, std::span<const int> new_index, int n_new);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);  // y += alpha x

// Dense solve with partial pivoting; a is row-major n-by-n and is clobbered.
// Returns false when the matrix is numerically singular.
bool dense_solve_inplace(std::vector<double>& a, std::vector<double>& b, int n);

}  // namespace vifem
