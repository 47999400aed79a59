#include "addm/block_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "addm/errors.hpp"

namespace addm {

BlockSparseMatrix::BlockSparseMatrix(std::vector<int> block_sizes)
    : block_sizes_(std::move(block_sizes)) {
  block_offsets_.resize(block_sizes_.size());
  for (std::size_t r = 0; r < block_sizes_.size(); ++r) {
    block_offsets_[r] = size_;
    size_ += block_sizes_[r];
  }
  rows_.resize(block_sizes_.size());
}

Mat& BlockSparseMatrix::block(int row, int col) {
  auto& list = rows_[row];
  auto it = std::lower_bound(list.begin(), list.end(), col,
                             [](const Entry& e, int c) { return e.col < c; });
  if (it == list.end() || it->col != col) {
    it = list.insert(it, Entry{col, Mat(block_sizes_[row], block_sizes_[col])});
  }
  return it->mat;
}

const Mat* BlockSparseMatrix::find_block(int row, int col) const {
  const auto& list = rows_[row];
  auto it = std::lower_bound(list.begin(), list.end(), col,
                             [](const Entry& e, int c) { return e.col < c; });
  if (it == list.end() || it->col != col) return nullptr;
  return &it->mat;
}

std::size_t BlockSparseMatrix::num_blocks() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

void BlockSparseMatrix::set_zero() {
  for (auto& r : rows_)
    for (auto& e : r) e.mat *= 0.0;
}

void BlockSparseMatrix::matvec(const double* x, double* y) const {
  std::fill(y, y + size_, 0.0);
  for (int r = 0; r < num_block_rows(); ++r) {
    double* yr = y + block_offsets_[r];
    for (const auto& e : rows_[r]) gemv_add(e.mat, x + block_offsets_[e.col], yr);
  }
}

std::vector<double> BlockSparseMatrix::matvec(const std::vector<double>& x) const {
  if (static_cast<long long>(x.size()) != size_) throw ConfigError("matvec: dimension mismatch");
  std::vector<double> y(size_);
  matvec(x.data(), y.data());
  return y;
}

double BlockSparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& r : rows_)
    for (const auto& e : r) {
      double f = e.mat.frobenius_norm();
      s += f * f;
    }
  return std::sqrt(s);
}

double BlockSparseMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& r : rows_)
    for (const auto& e : r) s = std::max(s, e.mat.max_abs());
  return s;
}

bool BlockSparseMatrix::structurally_symmetric() const {
  for (int r = 0; r < num_block_rows(); ++r)
    for (const auto& e : rows_[r])
      if (!find_block(e.col, r)) return false;
  return true;
}

double BlockSparseMatrix::symmetry_defect() const {
  double d = 0.0;
  for (int r = 0; r < num_block_rows(); ++r) {
    for (const auto& e : rows_[r]) {
      const Mat* t = find_block(e.col, r);
      for (int i = 0; i < e.mat.rows(); ++i)
        for (int j = 0; j < e.mat.cols(); ++j) {
          double other = t ? (*t)(j, i) : 0.0;
          d = std::max(d, std::abs(e.mat(i, j) - other));
        }
    }
  }
  return d;
}

Mat BlockSparseMatrix::to_dense() const {
  Mat dense(static_cast<int>(size_), static_cast<int>(size_));
  for (int r = 0; r < num_block_rows(); ++r)
    for (const auto& e : rows_[r])
      for (int i = 0; i < e.mat.rows(); ++i)
        for (int j = 0; j < e.mat.cols(); ++j)
          dense(static_cast<int>(block_offsets_[r]) + i,
                static_cast<int>(block_offsets_[e.col]) + j) = e.mat(i, j);
  return dense;
}

BlockSparseMatrix::Csc BlockSparseMatrix::to_csc(const std::vector<int>& subset) const {
  std::vector<int> local(num_block_rows(), -1);
  std::vector<long long> offset(subset.size());
  long long n = 0;
  for (std::size_t s = 0; s < subset.size(); ++s) {
    local[subset[s]] = static_cast<int>(s);
    offset[s] = n;
    n += block_sizes_[subset[s]];
  }
  Csc csc;
  csc.n = static_cast<int>(n);
  std::vector<long long> count(n + 1, 0);
  for (int gr : subset) {
    for (const auto& e : rows_[gr]) {
      if (local[e.col] < 0) continue;
      long long c0 = offset[local[e.col]];
      for (int j = 0; j < e.mat.cols(); ++j) count[c0 + j + 1] += e.mat.rows();
    }
  }
  for (long long c = 0; c < n; ++c) count[c + 1] += count[c];
  csc.colptr = count;
  csc.rowind.resize(count[n]);
  csc.values.resize(count[n]);
  std::vector<long long> fill(csc.colptr.begin(), csc.colptr.end() - 1);
  for (int gr : subset) {
    long long r0 = offset[local[gr]];
    for (const auto& e : rows_[gr]) {
      if (local[e.col] < 0) continue;
      long long c0 = offset[local[e.col]];
      for (int j = 0; j < e.mat.cols(); ++j) {
        long long p = fill[c0 + j];
        for (int i = 0; i < e.mat.rows(); ++i) {
          csc.rowind[p] = static_cast<int>(r0 + i);
          csc.values[p] = e.mat(i, j);
          ++p;
        }
        fill[c0 + j] = p;
      }
    }
  }
  // Row indices inside each column must be sorted for the factorization.
  for (long long c = 0; c < n; ++c) {
    long long lo = csc.colptr[c], hi = csc.colptr[c + 1];
    std::vector<std::pair<int, double>> tmp;
    tmp.reserve(hi - lo);
    for (long long p = lo; p < hi; ++p) tmp.emplace_back(csc.rowind[p], csc.values[p]);
    std::sort(tmp.begin(), tmp.end());
    for (long long p = lo; p < hi; ++p) {
      csc.rowind[p] = tmp[p - lo].first;
      csc.values[p] = tmp[p - lo].second;
    }
  }
  return csc;
}

BlockSparseMatrix::Csc BlockSparseMatrix::to_csc() const {
  std::vector<int> all(num_block_rows());
  for (int i = 0; i < num_block_rows(); ++i) all[i] = i;
  return to_csc(all);
}

void BlockSparseMatrix::write_matrix_market(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_matrix_market: cannot open " + path);
  std::size_t nnz = 0;
  for (const auto& r : rows_)
    for (const auto& e : r) nnz += static_cast<std::size_t>(e.mat.rows()) * e.mat.cols();
  f << "%%MatrixMarket matrix coordinate real general\n";
  f << size_ << ' ' << size_ << ' ' << nnz << '\n';
  char buf[96];
  for (int r = 0; r < num_block_rows(); ++r) {
    for (const auto& e : rows_[r]) {
      for (int i = 0; i < e.mat.rows(); ++i) {
        for (int j = 0; j < e.mat.cols(); ++j) {
          std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", block_offsets_[r] + i + 1,
                        block_offsets_[e.col] + j + 1, e.mat(i, j));
          f << buf;
        }
      }
    }
  }
}

}  // namespace addm
