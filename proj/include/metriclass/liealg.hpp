#pragma once

#include <cstddef>
#include <vector>

#include "metriclass/matrix.hpp"

namespace metriclass {

/// Finite-dimensional Lie algebra given by structure constants
/// [e_i, e_j] = sum_k c(i, j, k) e_k in some fixed basis.
template <class T>
class LieAlgebra {
 public:
  explicit LieAlgebra(std::size_t n) : n_(n), c_(n * n * n, T(0)) {}

  std::size_t dim() const { return n_; }

  const T& c(std::size_t i, std::size_t j, std::size_t k) const { return c_[(i * n_ + j) * n_ + k]; }
  /// Sets c(i,j,k) and c(j,i,k) = -value together.
  void set(std::size_t i, std::size_t j, std::size_t k, const T& value) {
    c_[(i * n_ + j) * n_ + k] = value;
    c_[(j * n_ + i) * n_ + k] = -value;
  }

  Vec<T> bracket(const Vec<T>& x, const Vec<T>& y) const;
  Vec<T> bracket_basis(std::size_t i, std::size_t j) const;
  /// ad_x as an n x n matrix: column j is [x, e_j].
  Matrix<T> ad(const Vec<T>& x) const;

  /// Structure constants in the basis given by the columns of p.
  LieAlgebra change_basis(const Matrix<T>& p, double tol = 1e-12) const;

  friend bool operator==(const LieAlgebra& a, const LieAlgebra& b) { return a.n_ == b.n_ && a.c_ == b.c_; }

 private:
  std::size_t n_;
  std::vector<T> c_;
};

/// h3 + R^{n-3} with [e_1, e_2] = e_n (0-based: [e_0, e_1] = e_{n-1}).
template <class T>
LieAlgebra<T> build_algebra(std::size_t n);

template <class T>
Vec<T> bracket_vec(const LieAlgebra<T>& g, const Vec<T>& x, const Vec<T>& y) {
  return g.bracket(x, y);
}

template <class T>
struct Subspace {
  std::size_t ambient = 0;
  std::vector<Vec<T>> basis;

  std::size_t dim() const { return basis.size(); }
  /// Basis vectors as columns.
  Matrix<T> matrix() const { return Matrix<T>::from_columns(basis, ambient); }
  bool contains(const Vec<T>& v, double tol = 1e-9) const;
  bool contains(const Subspace& other, double tol = 1e-9) const;
};

template <class T>
struct CenterAndDerived {
  Subspace<T> center;
  Subspace<T> derived;
};

/// Center via the kernel of x -> ([x, e_1], ..., [x, e_n]); derived ideal via
/// the span of all brackets of basis vectors.
template <class T>
CenterAndDerived<T> center_and_derived(const LieAlgebra<T>& g, double tol = 1e-9);

/// Basis of Der(g), from the linear system D[x,y] = [Dx,y] + [x,Dy] on basis
/// pairs. Each matrix acts on column vectors.
template <class T>
std::vector<Matrix<T>> derivation_basis(const LieAlgebra<T>& g, double tol = 1e-9);

/// True when D[e_i,e_j] = [De_i,e_j] + [e_i,De_j] for every pair.
template <class T>
bool is_derivation(const LieAlgebra<T>& g, const Matrix<T>& d, double tol = 1e-9);

/// Dimension of R*id + span(basis).
template <class T>
std::size_t dim_with_identity(const std::vector<Matrix<T>>& basis, std::size_t n, double tol = 1e-9);

/// Antisymmetry and the Jacobi identity on all basis triples.
template <class T>
bool satisfies_jacobi(const LieAlgebra<T>& g, double tol = 1e-9);

/// Zero pattern of R^x Aut(g) in the standard basis: blocks of sizes
/// (2, n-3, 1); the upper-right 2 x (n-2) block and the middle-right
/// (n-3) x 1 block vanish.
class BlockPattern {
 public:
  explicit BlockPattern(std::size_t n);

  std::size_t dim() const { return n_; }
  bool allowed(std::size_t i, std::size_t j) const;
  /// Pattern of the transposed group H'.
  bool allowed_transposed(std::size_t i, std::size_t j) const { return allowed(j, i); }
  std::size_t free_entries() const;

  template <class T>
  bool contains(const Matrix<T>& m, double tol = 1e-9) const {
    return check(m, tol, false);
  }
  template <class T>
  bool contains_transposed(const Matrix<T>& m, double tol = 1e-9) const {
    return check(m, tol, true);
  }

  /// Matrix with 1 on allowed slots, 0 elsewhere.
  Matrix<int> mask() const;

 private:
  template <class T>
  bool check(const Matrix<T>& m, double tol, bool transposed) const {
    if (m.rows() != n_ || m.cols() != n_) return false;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        bool ok = transposed ? allowed_transposed(i, j) : allowed(i, j);
        if (!ok && !ScalarTraits<T>::is_zero(m(i, j), tol)) return false;
      }
    return true;
  }

  std::size_t n_;
};

/// The extra diagonal relation satisfied by every derivation: D_nn = D_11 + D_22.
template <class T>
bool satisfies_trace_relation(const Matrix<T>& d, double tol = 1e-9) {
  const std::size_t n = d.rows();
  return ScalarTraits<T>::is_zero(d(n - 1, n - 1) - d(0, 0) - d(1, 1), tol);
}

}  // namespace metriclass
