#include "metriclass/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>

namespace metriclass {

std::string to_string(Xi xi) {
  switch (xi) {
    case Xi::Zero: return "0";
    case Xi::One: return "1";
    case Xi::Sqrt3: return "sqrt3";
    case Xi::Two: return "2";
  }
  return "?";
}

std::optional<Xi> parse_xi(const std::string& text) {
  if (text == "0") return Xi::Zero;
  if (text == "1") return Xi::One;
  if (text == "sqrt3") return Xi::Sqrt3;
  if (text == "2") return Xi::Two;
  return std::nullopt;
}

std::string ClassPair::str() const {
  return "(" + std::to_string(lambda) + "," + to_string(xi) + ")";
}

const std::array<ClassPair, 6>& all_classes() {
  static const std::array<ClassPair, 6> classes = {{
      {0, Xi::Zero},
      {1, Xi::Zero},
      {1, Xi::One},
      {2, Xi::Zero},
      {2, Xi::Sqrt3},
      {2, Xi::Two},
  }};
  return classes;
}

std::size_t ClassPair::index() const {
  const auto& all = all_classes();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].lambda == lambda && all[i].xi == xi) return i;
  return all.size();
}

std::optional<ClassPair> find_class(const QSqrt3& lambda, const QSqrt3& xi) {
  for (const auto& c : all_classes())
    if (c.lambda_value<QSqrt3>() == lambda && c.xi_value<QSqrt3>() == xi) return c;
  return std::nullopt;
}

std::string SignatureTriple::str() const {
  return "(" + std::to_string(plus) + "," + std::to_string(minus) + "," + std::to_string(zero) + ")";
}

// ---------------------------------------------------------------------------

std::vector<double> symmetric_eigenvalues(const Matrix<double>& m) {
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

namespace {

SignatureTriple congruence_signature(Matrix<QSqrt3> m) {
  const std::size_t n = m.rows();
  SignatureTriple sig;
  std::size_t k = 0;
  while (k < n) {
    // symmetric pivot: a nonzero diagonal entry in the trailing block
    std::size_t p = n;
    for (std::size_t i = k; i < n; ++i)
      if (!m(i, i).is_zero()) {
        p = i;
        break;
      }
    if (p == n) {
      // all trailing diagonals vanish; look for an off-diagonal entry
      std::size_t qi = n, qj = n;
      for (std::size_t i = k; i < n && qi == n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (!m(i, j).is_zero()) {
            qi = i;
            qj = j;
            break;
          }
      if (qi == n) break;
      // e_i <- e_i + e_j gives diagonal 2 m(i,j) != 0
      for (std::size_t c = 0; c < n; ++c) m(qi, c) += m(qj, c);
      for (std::size_t r = 0; r < n; ++r) m(r, qi) += m(r, qj);
      p = qi;
    }
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(p, c));
      for (std::size_t r = 0; r < n; ++r) std::swap(m(r, k), m(r, p));
    }
    QSqrt3 piv = m(k, k);
    if (piv.sign() > 0) ++sig.plus;
    else ++sig.minus;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k).is_zero()) continue;
      QSqrt3 f = m(i, k) / piv;
      for (std::size_t c = k; c < n; ++c) m(i, c) -= f * m(k, c);
      for (std::size_t r = k; r < n; ++r)
        if (r != i) m(r, i) = m(i, r);
      m(i, k) = QSqrt3(0);
      m(k, i) = QSqrt3(0);
    }
    ++k;
  }
  sig.zero = n - sig.plus - sig.minus;
  return sig;
}

}  // namespace

template <>
SignatureTriple signature_of<QSqrt3>(const Matrix<QSqrt3>& m, double tol) {
  if (!is_symmetric(m, tol)) throw Error(ErrorCode::AsymmetricInput, "signature of asymmetric matrix");
  return congruence_signature(m);
}

template <>
SignatureTriple signature_of<double>(const Matrix<double>& m, double tol) {
  if (!is_symmetric(m, tol * std::max(1.0, max_abs(m))))
    throw Error(ErrorCode::AsymmetricInput, "signature of asymmetric matrix");
  SignatureTriple sig;
  for (double mu : symmetric_eigenvalues(m)) {
    switch (sign_with_tol(mu, tol)) {
      case Sign::Positive: ++sig.plus; break;
      case Sign::Negative: ++sig.minus; break;
      case Sign::Zero: ++sig.zero; break;
    }
  }
  return sig;
}

template <class T>
SignatureTriple checked_signature(const Matrix<T>& gram, double tol) {
  if (!gram.is_square()) throw Error(ErrorCode::DimensionMismatch, "gram matrix is not square");
  const double abs_tol = ScalarTraits<T>::exact ? 0.0 : tol * std::max(1e-300, max_abs(gram));
  if (!is_symmetric(gram, abs_tol)) throw Error(ErrorCode::AsymmetricInput, "gram matrix is not symmetric");
  return signature_of(gram, abs_tol);
}

template <class T>
Metric<T>::Metric(Matrix<T> gram, double tol) : gram_(std::move(gram)) {
  SignatureTriple sig = checked_signature(gram_, tol);
  const std::size_t n = gram_.rows();
  if (sig.plus != n - 1 || sig.minus != 1 || sig.zero != 0)
  {
    std::string shown = sig.zero == 0 ? "(" + std::to_string(sig.plus) + "," + std::to_string(sig.minus) + ")" : sig.str();
    throw Error(ErrorCode::WrongSignature, "signature " + shown + " unsupported");
  }
}

template <class T>
Matrix<T> act(const Matrix<T>& g, const Matrix<T>& gram, double tol) {
  Matrix<T> ginv = inverse(g, tol);
  return ginv.transpose() * gram * ginv;
}

template <class T>
Matrix<T> restrict(const Matrix<T>& gram, const Subspace<T>& s, double tol) {
  Matrix<T> b = s.matrix();
  if (rank(b, tol) != s.dim()) throw Error(ErrorCode::DependentBasis, "subspace basis is dependent");
  return b.transpose() * gram * b;
}

template <class T>
Matrix<T> canonical_g(const T& lambda, const T& xi, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
  Matrix<T> g = Matrix<T>::identity(n);
  g(0, n - 2) = xi;
  g(0, n - 1) = lambda;
  return g;
}

template <class T>
Matrix<T> parametric_gram(const T& lambda, const T& xi, std::size_t n) {
  return act(canonical_g(lambda, xi, n), lorentz_form<T>(n));
}

template <class T>
CanonicalMetric<T> canonical_metric(const ClassPair& cls, std::size_t n) {
  Matrix<T> g = canonical_g(cls.lambda_value<T>(), cls.xi_value<T>(), n);
  return {cls, Metric<T>(act(g, lorentz_form<T>(n))), Frame<T>{g, T(1)}};
}

CanonicalMetric<QSqrt3> canonical_metric(const QSqrt3& lambda, const QSqrt3& xi, std::size_t n) {
  auto cls = find_class(lambda, xi);
  if (!cls) throw Error(ErrorCode::NotARepresentative, "(" + lambda.str() + "," + xi.str() + ") is not a representative");
  return canonical_metric<QSqrt3>(*cls, n);
}

template <class T>
bool is_pseudo_orthonormal(const Frame<T>& f, const Matrix<T>& gram, double tol) {
  const std::size_t n = gram.rows();
  Matrix<T> p = f.columns.transpose() * (f.scale * gram) * f.columns;
  if constexpr (ScalarTraits<T>::exact) {
    return p == lorentz_form<T>(n);
  } else {
    return max_abs_diff(p, lorentz_form<T>(n)) <= tol;
  }
}

template <class T>
bool is_lorentz(const Matrix<T>& k, double tol) {
  const std::size_t n = k.rows();
  Matrix<T> j = lorentz_form<T>(n);
  Matrix<T> p = k.transpose() * j * k;
  if constexpr (ScalarTraits<T>::exact) {
    return p == j;
  } else {
    return max_abs_diff(p, j) <= tol;
  }
}

Matrix<double> factor_metric(const Metric<double>& metric) {
  const std::size_t n = metric.dim();
  const auto en = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(en, en);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = metric.gram()(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigendecomposition failed");
  // ascending order: the single negative eigenvalue comes first
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (!(es.eigenvalues()(0) < 0.0) || !(es.eigenvalues()(1) > 0.0))
    throw Error(ErrorCode::WrongSignature, "metric is not Lorentzian");
  std::rotate(order.begin(), order.begin() + 1, order.end());
  Matrix<double> m(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    double mu = es.eigenvalues()(order[c]);
    double s = 1.0 / std::sqrt(std::fabs(mu));
    for (std::size_t r = 0; r < n; ++r) m(r, c) = es.eigenvectors()(static_cast<Eigen::Index>(r), order[c]) * s;
  }
  return m;
}

#define METRICLASS_INSTANTIATE(T)                                                         \
  template SignatureTriple checked_signature<T>(const Matrix<T>&, double);                \
  template class Metric<T>;                                                               \
  template Matrix<T> act<T>(const Matrix<T>&, const Matrix<T>&, double);                  \
  template Matrix<T> restrict<T>(const Matrix<T>&, const Subspace<T>&, double);           \
  template Matrix<T> canonical_g<T>(const T&, const T&, std::size_t);                     \
  template Matrix<T> parametric_gram<T>(const T&, const T&, std::size_t);                 \
  template CanonicalMetric<T> canonical_metric<T>(const ClassPair&, std::size_t);         \
  template bool is_pseudo_orthonormal<T>(const Frame<T>&, const Matrix<T>&, double);      \
  template bool is_lorentz<T>(const Matrix<T>&, double);

METRICLASS_INSTANTIATE(double)
METRICLASS_INSTANTIATE(QSqrt3)

#undef METRICLASS_INSTANTIATE

}  // namespace metriclass
