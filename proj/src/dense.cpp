#include "addm/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "addm/errors.hpp"

namespace addm {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Mat::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Mat::max_abs() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::abs(v));
  return s;
}

Mat& Mat::operator+=(const Mat& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

void gemv_add(const Mat& a, const double* x, double* y, double alpha) {
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const double* row = a.data() + static_cast<std::size_t>(i) * a.cols();
    for (int j = 0; j < a.cols(); ++j) s += row[j] * x[j];
    y[i] += alpha * s;
  }
}

void gemv_trans_add(const Mat& a, const double* x, double* y, double alpha) {
  for (int i = 0; i < a.rows(); ++i) {
    const double* row = a.data() + static_cast<std::size_t>(i) * a.cols();
    double xi = alpha * x[i];
    if (xi == 0.0) continue;
    for (int j = 0; j < a.cols(); ++j) y[j] += row[j] * xi;
  }
}

std::vector<double> dense_solve(Mat a, std::vector<double> b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw ConfigError("dense_solve: dimension mismatch");
  std::vector<int> piv(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (a(p, k) == 0.0) throw FactorizationError("dense_solve: singular matrix");
    piv[k] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      double l = a(i, k) / a(k, k);
      a(i, k) = l;
      for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
      b[i] -= l * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
    b[i] = s / a(i, i);
  }
  return b;
}

Mat dense_inverse(const Mat& a) {
  const int n = a.rows();
  Mat inv(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    auto col = dense_solve(a, std::move(e));
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

Mat cholesky(const Mat& a) {
  const int n = a.rows();
  Mat l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) throw FactorizationError("cholesky: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Mat invert_lower_triangular(const Mat& l) {
  const int n = l.rows();
  Mat inv(n, n);
  for (int j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / l(j, j);
    for (int i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s += l(i, k) * inv(k, j);
      inv(i, j) = -s / l(i, i);
    }
  }
  return inv;
}

std::vector<double> least_squares(const Mat& x, const std::vector<double>& y) {
  const int m = x.rows();
  const int n = x.cols();
  if (static_cast<int>(y.size()) != m || m < n)
    throw ConfigError("least_squares: need at least as many rows as columns");

  // Column equilibration keeps the QR well conditioned when regressors have
  // wildly different scales (e.g. log2 P vs N).
  std::vector<double> scale(n, 1.0);
  Mat a = x;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s = std::max(s, std::abs(a(i, j)));
    if (s > 0.0) {
      scale[j] = s;
      for (int i = 0; i < m; ++i) a(i, j) /= s;
    }
  }

  std::vector<double> b = y;
  std::vector<double> rdiag(n);
  // Householder QR.
  for (int k = 0; k < n; ++k) {
    double nrm = 0.0;
    for (int i = k; i < m; ++i) nrm = std::hypot(nrm, a(i, k));
    if (nrm == 0.0) throw FactorizationError("least_squares: rank-deficient design matrix");
    if (a(k, k) < 0.0) nrm = -nrm;
    for (int i = k; i < m; ++i) a(i, k) /= nrm;
    a(k, k) += 1.0;
    for (int j = k + 1; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < m; ++i) s += a(i, k) * a(i, j);
      s = -s / a(k, k);
      for (int i = k; i < m; ++i) a(i, j) += s * a(i, k);
    }
    double s = 0.0;
    for (int i = k; i < m; ++i) s += a(i, k) * b[i];
    s = -s / a(k, k);
    for (int i = k; i < m; ++i) b[i] += s * a(i, k);
    rdiag[k] = -nrm;
  }
  std::vector<double> c(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * c[j];
    c[i] = s / rdiag[i];
  }
  for (int j = 0; j < n; ++j) c[j] /= scale[j];
  return c;
}

}  // namespace addm
