#pragma once

#include <optional>
#include <vector>

#include "metriclass/metrics.hpp"

namespace metriclass {

enum class Symmetry { Symmetric, Antisymmetric, None };

/// Values B(x_i, x_j) of a bilinear map on frame pairs, as frame coordinates.
template <class T>
struct BilinearTable {
  std::size_t n = 0;
  Symmetry symmetry = Symmetry::None;
  std::vector<Vec<T>> data;

  BilinearTable() = default;
  BilinearTable(std::size_t dim, Symmetry s) : n(dim), symmetry(s), data(dim * dim, Vec<T>(dim, T(0))) {}

  Vec<T>& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
  const Vec<T>& at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  /// B(x, y) for coordinate vectors x, y.
  Vec<T> apply(const Vec<T>& x, const Vec<T>& y) const;
  /// Declared symmetry holds entrywise.
  bool symmetry_holds(double tol = 0.0) const;

  friend bool operator==(const BilinearTable& a, const BilinearTable& b) { return a.n == b.n && a.data == b.data; }
};

/// R(x_i, x_j) as n x n matrices acting on frame coordinates.
template <class T>
struct OperatorTable {
  std::size_t n = 0;
  std::vector<Matrix<T>> data;

  OperatorTable() = default;
  explicit OperatorTable(std::size_t dim) : n(dim), data(dim * dim, Matrix<T>(dim, dim)) {}

  Matrix<T>& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
  const Matrix<T>& at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  bool antisymmetric(double tol = 0.0) const;

  friend bool operator==(const OperatorTable& a, const OperatorTable& b) { return a.n == b.n && a.data == b.data; }
};

/// (1, ..., 1, -1).
template <class T>
Vec<T> frame_signs(std::size_t n);

/// Structure constants of the algebra in the frame given by the columns of
/// canonical_g(lambda, xi, n).
template <class T>
LieAlgebra<T> frame_algebra(const T& lambda, const T& xi, std::size_t n);

/// 2<U(x_i,x_j), x_k> = <[x_k,x_i], x_j> + <x_i, [x_k,x_j]> with <x_i,x_j> = eps_i delta_ij.
/// Throws FrameNotPseudoOrthonormal unless every eps_i is +1 or -1.
template <class T>
BilinearTable<T> u_map(const LieAlgebra<T>& frame_brackets, const Vec<T>& eps);

/// Same, starting from standard-basis constants, a gram matrix and a frame
/// (columns); the frame must be pseudo-orthonormal for gram.
template <class T>
BilinearTable<T> u_map(const LieAlgebra<T>& g, const Matrix<T>& gram, const Matrix<T>& frame, double tol = 1e-9);

/// nabla_{x_i} x_j = [x_i, x_j]/2 + U(x_i, x_j).
template <class T>
BilinearTable<T> levi_civita(const BilinearTable<T>& u, const LieAlgebra<T>& frame_brackets);

/// R(x_i, x_j) = [nabla_i, nabla_j] - nabla_{[x_i, x_j]}.
template <class T>
OperatorTable<T> riemann(const BilinearTable<T>& nabla, const LieAlgebra<T>& frame_brackets);

/// Ric(X) = sum_i eps_i R(X, x_i) x_i; column j is Ric(x_j).
template <class T>
Matrix<T> ricci(const OperatorTable<T>& r, const Vec<T>& eps);

template <class T>
struct CurvatureTables {
  BilinearTable<T> u;
  BilinearTable<T> nabla;
  OperatorTable<T> r;
  Matrix<T> ric;
};

/// Structure-constant pipeline on the frame of canonical_g(lambda, xi, n).
template <class T>
CurvatureTables<T> generic_tables(const T& lambda, const T& xi, std::size_t n);

/// Hard-coded polynomial formulas in (lambda, xi) on the block {x_1, x_2, x_{n-1}, x_n};
/// middle directions are inert. Valid for arbitrary parameter values.
template <class T>
CurvatureTables<T> closed_form_tables(const T& lambda, const T& xi, std::size_t n);

template <class T>
bool is_flat(const OperatorTable<T>& r, double tol = 0.0);

/// c with ric = c I, if any.
template <class T>
std::optional<T> einstein_test(const Matrix<T>& ric, double tol = 0.0);

template <class T>
struct SolitonCertificate {
  T c;
  Matrix<T> d;
  double residual = 0.0;
};

/// Derivations of the frame algebra: g^{-1} D g for D in Der, g = canonical_g.
template <class T>
std::vector<Matrix<T>> frame_derivations(const T& lambda, const T& xi, std::size_t n);

/// Solves ric = c I + sum a_i D_i over (c, a); nullopt when inconsistent.
template <class T>
std::optional<SolitonCertificate<T>> soliton_certificate(const Matrix<T>& ric, const T& lambda, const T& xi,
                                                         std::size_t n, double tol = 1e-10);

struct RicciSpectrum {
  /// Eigenvalues of the essential 4 x 4 block, descending real part.
  std::vector<double> approx;
  /// Exact values when every root is rational and verified against the
  /// characteristic polynomial.
  std::optional<std::vector<QSqrt3>> exact;
};

/// Characteristic polynomial det(x I - a), coefficients from degree 0 up.
template <class T>
std::vector<T> characteristic_polynomial(const Matrix<T>& a);

template <class T>
RicciSpectrum ricci_spectrum(const Matrix<T>& ric);

template <class T>
struct CurvatureReport {
  T lambda;
  T xi;
  std::size_t n = 0;
  CurvatureTables<T> tables;
  bool flat = false;
  std::optional<T> einstein;
  std::optional<SolitonCertificate<T>> soliton;
  RicciSpectrum spectrum;
};

template <class T>
CurvatureReport<T> curvature_report(const T& lambda, const T& xi, std::size_t n);

/// Exact report for a representative.
CurvatureReport<QSqrt3> curvature_report(const ClassPair& cls, std::size_t n);

}  // namespace metriclass
