#include "vifem/csr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vifem {

int CsrMatrix::find(int i, int j) const {
  const int lo = row_offsets[i], hi = row_offsets[i + 1];
  auto it = std::lower_bound(col_indices.begin() + lo, col_indices.begin() + hi, j);
  if (it != col_indices.begin() + hi && *it == j) return static_cast<int>(it - col_indices.begin());
  return -1;
}

double CsrMatrix::at(int i, int j) const {
  const int k = find(i, j);
  return k < 0 ? 0.0 : values[k];
}

CsrMatrix CooBuilder::to_csr() const {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.nrows = nrows_;
  m.ncols = ncols_;
  m.row_offsets.assign(nrows_ + 1, 0);
  for (size_t k = 0; k < sorted.size();) {
    size_t e = k + 1;
    double v = sorted[k].val;
    while (e < sorted.size() && sorted[e].row == sorted[k].row && sorted[e].col == sorted[k].col)
      v += sorted[e++].val;
    if (sorted[k].row < 0 || sorted[k].row >= nrows_ || sorted[k].col < 0 || sorted[k].col >= ncols_)
      throw std::out_of_range("CooBuilder: entry outside matrix bounds");
    m.col_indices.push_back(sorted[k].col);
    m.values.push_back(v);
    ++m.row_offsets[sorted[k].row + 1];
    k = e;
  }
  for (int i = 0; i < nrows_; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
  return m;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != a.ncols || static_cast<int>(y.size()) != a.nrows)
    throw std::invalid_argument("spmv: dimension mismatch");
  for (int i = 0; i < a.nrows; ++i) {
    double s = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) s += a.values[k] * x[a.col_indices[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.nrows);
  spmv(a, x, y);
  return y;
}

CsrMatrix transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.nrows = a.ncols;
  t.ncols = a.nrows;
  t.row_offsets.assign(t.nrows + 1, 0);
  for (int c : a.col_indices) ++t.row_offsets[c + 1];
  for (int i = 0; i < t.nrows; ++i) t.row_offsets[i + 1] += t.row_offsets[i];
  t.col_indices.resize(a.nnz());
  t.values.resize(a.nnz());
  std::vector<int> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (int i = 0; i < a.nrows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int pos = next[a.col_indices[k]]++;
      t.col_indices[pos] = i;
      t.values[pos] = a.values[k];
    }
  return t;
}

double max_asymmetry(const CsrMatrix& a) {
  if (a.nrows != a.ncols) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int i = 0; i < a.nrows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      worst = std::max(worst, std::abs(a.values[k] - a.at(a.col_indices[k], i)));
  return worst;
}

double max_abs_value(const CsrMatrix& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

bool is_symmetric(const CsrMatrix& a, double rel_tol) {
  if (a.nrows != a.ncols) return false;
  const double scale = max_abs_value(a);
  return max_asymmetry(a) <= rel_tol * (scale > 0 ? scale : 1.0);
}

CsrMatrix extract_submatrix(const CsrMatrix& a, std::span<const int> new_index, int n_new) {
  CsrMatrix s;
  s.nrows = s.ncols = n_new;
  s.row_offsets.assign(n_new + 1, 0);
  for (int i = 0; i < a.nrows; ++i) {
    if (new_index[i] < 0) continue;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      if (new_index[a.col_indices[k]] >= 0) ++s.row_offsets[new_index[i] + 1];
  }
  for (int i = 0; i < n_new; ++i) s.row_offsets[i + 1] += s.row_offsets[i];
  s.col_indices.resize(s.row_offsets[n_new]);
  s.values.resize(s.row_offsets[n_new]);
  std::vector<int> next(s.row_offsets.begin(), s.row_offsets.end() - 1);
  for (int i = 0; i < a.nrows; ++i) {
    if (new_index[i] < 0) continue;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int jc = new_index[a.col_indices[k]];
      if (jc < 0) continue;
      const int pos = next[new_index[i]]++;
      s.col_indices[pos] = jc;  // stays sorted: source columns are sorted
      s.values[pos] = a.values[k];
    }
  }
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool dense_solve_inplace(std::vector<double>& a, std::vector<double>& b, int n) {
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int p = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[p * n + col])) p = r;
    if (std::abs(a[p * n + col]) < 1e-300) return false;
    if (p != col) {
      for (int j = 0; j < n; ++j) std::swap(a[p * n + j], a[col * n + j]);
      std::swap(b[p], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      a[r * n + col] = 0.0;
      for (int j = col + 1; j < n; ++j) a[r * n + j] -= factor * a[col * n + j];
      b[r] -= factor * b[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i * n + j] * b[j];
    b[i] = s / a[i * n + i];
  }
  return true;
}

}  // namespace vifem
