#ifndef ADDM_DENSE_HPP
#define ADDM_DENSE_HPP

#include <cstddef>
#include <vector>

namespace addm {

// Small dense row-major matrix. Used for element blocks, local projections
// and test oracles; not meant for large systems.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Mat transposed() const;
  double frobenius_norm() const;
  double max_abs() const;

  Mat& operator+=(const Mat& o);
  Mat& operator*=(double s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Mat operator*(const Mat& a, const Mat& b);

// y += alpha * A x  (sizes must agree; x/y given as raw spans)
void gemv_add(const Mat& a, const double* x, double* y, double alpha = 1.0);
// y += alpha * A^T x
void gemv_trans_add(const Mat& a, const double* x, double* y, double alpha = 1.0);

// Solve A x = b in place by LU with partial pivoting; throws on singularity.
std::vector<double> dense_solve(Mat a, std::vector<double> b);

// Inverse via LU; for small test oracles.
Mat dense_inverse(const Mat& a);

// Cholesky factor L of a symmetric positive definite matrix (A = L L^T).
Mat cholesky(const Mat& a);

// Invert a lower-triangular matrix.
Mat invert_lower_triangular(const Mat& l);

// Least squares min ||X c - y||_2 via Householder QR with column
// equilibration. X has more rows than columns; returns c.
std::vector<double> least_squares(const Mat& x, const std::vector<double>& y);

}  // namespace addm

#endif
