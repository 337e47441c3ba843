#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metriclass/numerics.hpp"

namespace metriclass {

template <class T>
using Vec = std::vector<T>;

/// Small dense row-major matrix over either scalar backend.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }
  static Matrix diagonal(const Vec<T>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static Matrix from_columns(const std::vector<Vec<T>>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vec<T> column(std::size_t j) const {
    Vec<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  Vec<T> row(std::size_t i) const {
    return Vec<T>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorCode::DimensionMismatch, "matrix product");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vec<T> operator*(const Matrix& a, const Vec<T>& v) {
    if (a.cols_ != v.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
    Vec<T> out(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  template <class F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    Matrix<decltype(f(std::declval<const T&>()))> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

  /// Submatrix on the given row and column index sets.
  Matrix select(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    Matrix m(rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) m(i, j) = (*this)(rs[i], cs[j]);
    return m;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::DimensionMismatch, "shape");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<double> to_double(const Matrix<T>& m) {
  return m.map([](const T& x) { return ScalarTraits<T>::to_double(x); });
}

template <class T>
Matrix<T> from_exact(const Matrix<QSqrt3>& m) {
  return m.map([](const QSqrt3& x) { return ScalarTraits<T>::from_qsqrt3(x); });
}

/// Largest absolute entry, as a double.
template <class T>
double max_abs(const Matrix<T>& m) {
  double out = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out = std::max(out, std::fabs(ScalarTraits<T>::to_double(m(i, j))));
  return out;
}

template <class T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  return max_abs(Matrix<T>(a - b));
}

template <class T>
bool is_symmetric(const Matrix<T>& m, double tol) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (!ScalarTraits<T>::is_zero(m(i, j) - m(j, i), tol)) return false;
  return true;
}

/// Matrix with +1 on the first p diagonal slots and -1 on the remaining q.
template <class T>
Matrix<T> signature_matrix(std::size_t p, std::size_t q) {
  Matrix<T> m(p + q, p + q);
  for (std::size_t i = 0; i < p + q; ++i) m(i, i) = T(i < p ? 1 : -1);
  return m;
}

/// I_{n-1,1}.
template <class T>
Matrix<T> lorentz_form(std::size_t n) {
  return signature_matrix<T>(n - 1, 1);
}

/// Unit matrix E_{ij} of size n.
template <class T>
Matrix<T> unit_matrix(std::size_t n, std::size_t i, std::size_t j) {
  Matrix<T> m(n, n);
  m(i, j) = T(1);
  return m;
}

// ---------------------------------------------------------------------------
// Row reduction. Exact backend: first nonzero pivot. Floating backend: partial
// pivoting, entries with |x| <= tol * scale treated as zero.
// ---------------------------------------------------------------------------

template <class T>
struct RowEchelon {
  Matrix<T> reduced;
  std::vector<std::size_t> pivots;
};

template <class T>
RowEchelon<T> rref(Matrix<T> m, double tol = 1e-9) {
  using Tr = ScalarTraits<T>;
  const double threshold = Tr::exact ? 0.0 : tol * std::max(1.0, max_abs(m));
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::optional<std::size_t> piv;
    if constexpr (Tr::exact) {
      for (std::size_t i = r; i < m.rows(); ++i)
        if (!Tr::is_zero(m(i, c), 0.0)) {
          piv = i;
          break;
        }
    } else {
      double best = threshold;
      for (std::size_t i = r; i < m.rows(); ++i)
        if (std::fabs(Tr::to_double(m(i, c))) > best) {
          best = std::fabs(Tr::to_double(m(i, c)));
          piv = i;
        }
    }
    if (!piv) {
      if constexpr (!Tr::exact)
        for (std::size_t i = r; i < m.rows(); ++i) m(i, c) = T(0);
      continue;
    }
    if (*piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(*piv, j));
    T inv = T(1) / m(r, c);
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) *= inv;
    m(r, c) = T(1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || Tr::is_zero(m(i, c), 0.0)) continue;
      T f = m(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
      m(i, c) = T(0);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

template <class T>
std::size_t rank(const Matrix<T>& m, double tol = 1e-9) {
  return rref(m, tol).pivots.size();
}

/// Basis of {x : m x = 0}, one vector per free column (free entry set to 1).
template <class T>
std::vector<Vec<T>> nullspace(const Matrix<T>& m, double tol = 1e-9) {
  auto [red, pivots] = rref(m, tol);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<Vec<T>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vec<T> v(m.cols(), T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -red(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& m, double tol = 1e-12) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "inverse of non-square matrix");
  const std::size_t n = m.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  auto [red, pivots] = rref(aug, tol);
  if (pivots.size() < n || pivots[n - 1] != n - 1) throw Error(ErrorCode::SingularMatrix, "matrix is singular");
  Matrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = red(i, n + j);
  return inv;
}

/// Some solution of a x = b, or nullopt when the system is inconsistent.
template <class T>
std::optional<Vec<T>> solve(const Matrix<T>& a, const Vec<T>& b, double tol = 1e-9) {
  Matrix<T> aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  auto [red, pivots] = rref(aug, tol);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  Vec<T> x(a.cols(), T(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = red(r, a.cols());
  return x;
}

template <class T>
T determinant(Matrix<T> m) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "determinant");
  const std::size_t n = m.rows();
  T det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    if constexpr (ScalarTraits<T>::exact) {
      while (piv < n && m(piv, c).is_zero()) ++piv;
    } else {
      for (std::size_t i = c + 1; i < n; ++i)
        if (std::fabs(m(i, c)) > std::fabs(m(piv, c))) piv = i;
      if (m(piv, c) == 0.0) piv = n;
    }
    if (piv == n) return T(0);
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      T f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

template <class T>
std::string to_string(const Matrix<T>& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      if constexpr (ScalarTraits<T>::exact) {
        out += m(i, j).str();
      } else {
        out += std::to_string(m(i, j));
      }
    }
    out += "]";
  }
  return out + "]";
}

}  // namespace metriclass
