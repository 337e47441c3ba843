#pragma once

#include <array>
#include <optional>
#include <string>

#include "metriclass/liealg.hpp"

namespace metriclass {

// ---------------------------------------------------------------------------
// The six classes.
// ---------------------------------------------------------------------------

enum class Xi { Zero, One, Sqrt3, Two };

std::string to_string(Xi xi);
/// Parses "0", "1", "sqrt3", "2".
std::optional<Xi> parse_xi(const std::string& text);

struct ClassPair {
  int lambda = 0;
  Xi xi = Xi::Zero;

  template <class T>
  T lambda_value() const {
    return ScalarTraits<T>::from_int(lambda);
  }
  template <class T>
  T xi_value() const {
    switch (xi) {
      case Xi::Zero: return ScalarTraits<T>::from_int(0);
      case Xi::One: return ScalarTraits<T>::from_int(1);
      case Xi::Sqrt3: return ScalarTraits<T>::sqrt3();
      case Xi::Two: return ScalarTraits<T>::from_int(2);
    }
    return ScalarTraits<T>::from_int(0);
  }

  /// "(2,sqrt3)".
  std::string str() const;
  /// Index in all_classes().
  std::size_t index() const;

  friend bool operator==(const ClassPair& a, const ClassPair& b) { return a.lambda == b.lambda && a.xi == b.xi; }
  friend bool operator!=(const ClassPair& a, const ClassPair& b) { return !(a == b); }
  friend bool operator<(const ClassPair& a, const ClassPair& b) { return a.index() < b.index(); }
};

/// (0,0), (1,0), (1,1), (2,0), (2,sqrt3), (2,2).
const std::array<ClassPair, 6>& all_classes();

/// Exact lookup of a value pair in the representative set.
std::optional<ClassPair> find_class(const QSqrt3& lambda, const QSqrt3& xi);

// ---------------------------------------------------------------------------
// Signatures.
// ---------------------------------------------------------------------------

struct SignatureTriple {
  std::size_t plus = 0;
  std::size_t minus = 0;
  std::size_t zero = 0;

  std::size_t dim() const { return plus + minus + zero; }
  std::string str() const;
  friend bool operator==(const SignatureTriple&, const SignatureTriple&) = default;
};

/// Exact backend: symmetric Gaussian elimination. Floating backend: eigenvalue
/// signs, |mu| <= tol counted as zero. tol is absolute.
template <class T>
SignatureTriple signature_of(const Matrix<T>& m, double tol = 1e-9);
template <>
SignatureTriple signature_of<QSqrt3>(const Matrix<QSqrt3>& m, double tol);
template <>
SignatureTriple signature_of<double>(const Matrix<double>& m, double tol);

/// Eigenvalues of a symmetric floating matrix, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix<double>& m);

// ---------------------------------------------------------------------------
// Metrics and the GL(n) action.
// ---------------------------------------------------------------------------

/// Inner product of signature (n-1, 1); entry (i,j) = <e_i, e_j>.
template <class T>
class Metric {
 public:
  /// Validates squareness, symmetry and signature. tol is relative to the
  /// largest entry on the floating backend.
  explicit Metric(Matrix<T> gram, double tol = 1e-9);

  std::size_t dim() const { return gram_.rows(); }
  const Matrix<T>& gram() const { return gram_; }
  double scale() const { return std::max(1e-300, max_abs(gram_)); }

  friend bool operator==(const Metric& a, const Metric& b) { return a.gram_ == b.gram_; }

 private:
  Matrix<T> gram_;
};

/// Rejects non-square or asymmetric input; returns the signature.
template <class T>
SignatureTriple checked_signature(const Matrix<T>& gram, double tol);

/// g^{-T} gram g^{-1}.
template <class T>
Matrix<T> act(const Matrix<T>& g, const Matrix<T>& gram, double tol = 1e-12);

template <class T>
Metric<T> act(const Matrix<T>& g, const Metric<T>& m, double tol = 1e-12) {
  return Metric<T>(act(g, m.gram(), tol));
}

/// B^T gram B for the basis matrix B of s.
template <class T>
Matrix<T> restrict(const Matrix<T>& gram, const Subspace<T>& s, double tol = 1e-9);

/// I + xi E_{1,n-1} + lambda E_{1,n} (1-based).
template <class T>
Matrix<T> canonical_g(const T& lambda, const T& xi, std::size_t n);

/// act(g_{lambda,xi}, I_{n-1,1}) for arbitrary parameters.
template <class T>
Matrix<T> parametric_gram(const T& lambda, const T& xi, std::size_t n);

/// Columns form a pseudo-orthonormal basis for scale * gram.
template <class T>
struct Frame {
  Matrix<T> columns;
  T scale = T(1);
};

template <class T>
struct CanonicalMetric {
  ClassPair cls;
  Metric<T> metric;
  Frame<T> frame;
};

template <class T>
CanonicalMetric<T> canonical_metric(const ClassPair& cls, std::size_t n);

/// Checks membership in the representative set first; NotARepresentative otherwise.
CanonicalMetric<QSqrt3> canonical_metric(const QSqrt3& lambda, const QSqrt3& xi, std::size_t n);

/// cols^T (scale * gram) cols == I_{n-1,1}.
template <class T>
bool is_pseudo_orthonormal(const Frame<T>& f, const Matrix<T>& gram, double tol = 1e-9);

/// k^T I_{n-1,1} k == I_{n-1,1}.
template <class T>
bool is_lorentz(const Matrix<T>& k, double tol = 1e-9);

/// m with act(m, I_{n-1,1}) = gram; m = Q |Lambda|^{-1/2}, negative eigenvalue last.
Matrix<double> factor_metric(const Metric<double>& m);

}  // namespace metriclass
