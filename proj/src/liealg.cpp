#include "metriclass/liealg.hpp"

namespace metriclass {

template <class T>
Vec<T> LieAlgebra<T>::bracket(const Vec<T>& x, const Vec<T>& y) const {
  if (x.size() != n_ || y.size() != n_) throw Error(ErrorCode::DimensionMismatch, "bracket arguments");
  Vec<T> out(n_, T(0));
  for (std::size_t i = 0; i < n_; ++i) {
    if (x[i] == T(0)) continue;
    for (std::size_t j = 0; j < n_; ++j) {
      if (y[j] == T(0)) continue;
      T w = x[i] * y[j];
      for (std::size_t k = 0; k < n_; ++k)
        if (c(i, j, k) != T(0)) out[k] += w * c(i, j, k);
    }
  }
  return out;
}

template <class T>
Vec<T> LieAlgebra<T>::bracket_basis(std::size_t i, std::size_t j) const {
  Vec<T> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = c(i, j, k);
  return out;
}

template <class T>
Matrix<T> LieAlgebra<T>::ad(const Vec<T>& x) const {
  Matrix<T> m(n_, n_);
  for (std::size_t j = 0; j < n_; ++j) {
    Vec<T> ej(n_, T(0));
    ej[j] = T(1);
    Vec<T> col = bracket(x, ej);
    for (std::size_t k = 0; k < n_; ++k) m(k, j) = col[k];
  }
  return m;
}

template <class T>
LieAlgebra<T> LieAlgebra<T>::change_basis(const Matrix<T>& p, double tol) const {
  Matrix<T> pinv = inverse(p, tol);
  LieAlgebra out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      Vec<T> b = pinv * bracket(p.column(i), p.column(j));
      for (std::size_t k = 0; k < n_; ++k) out.set(i, j, k, b[k]);
    }
  return out;
}

template <class T>
LieAlgebra<T> build_algebra(std::size_t n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
  LieAlgebra<T> g(n);
  g.set(0, 1, n - 1, T(1));
  return g;
}

namespace {

// Row basis of span(vectors) via reduced echelon form.
template <class T>
std::vector<Vec<T>> row_basis(const std::vector<Vec<T>>& vectors, std::size_t n, double tol) {
  if (vectors.empty()) return {};
  Matrix<T> m(vectors.size(), n);
  for (std::size_t r = 0; r < vectors.size(); ++r)
    for (std::size_t j = 0; j < n; ++j) m(r, j) = vectors[r][j];
  auto red = rref(m, tol);
  std::vector<Vec<T>> out;
  for (std::size_t r = 0; r < red.pivots.size(); ++r) out.push_back(red.reduced.row(r));
  return out;
}

}  // namespace

template <class T>
bool Subspace<T>::contains(const Vec<T>& v, double tol) const {
  std::vector<Vec<T>> vs = basis;
  std::size_t r0 = row_basis(vs, ambient, tol).size();
  vs.push_back(v);
  return row_basis(vs, ambient, tol).size() == r0;
}

template <class T>
bool Subspace<T>::contains(const Subspace& other, double tol) const {
  for (const auto& v : other.basis)
    if (!contains(v, tol)) return false;
  return true;
}

template <class T>
CenterAndDerived<T> center_and_derived(const LieAlgebra<T>& g, double tol) {
  const std::size_t n = g.dim();
  // rows indexed by (j, k): sum_i x_i c(i, j, k) = 0
  Matrix<T> a(n * n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) a(j * n + k, i) = g.c(i, j, k);
  CenterAndDerived<T> out;
  out.center = {n, nullspace(a, tol)};

  std::vector<Vec<T>> values;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) values.push_back(g.bracket_basis(i, j));
  out.derived = {n, row_basis(values, n, tol)};
  return out;
}

namespace {

// Linear map D -> defects of the derivation identity; D flattened row-major.
template <class T>
Matrix<T> derivation_system(const LieAlgebra<T>& g) {
  const std::size_t n = g.dim();
  std::size_t pairs = n * (n - 1) / 2;
  Matrix<T> a(pairs * n, n * n);
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k, ++row) {
        // (D[e_i,e_j])_k = sum_l c(i,j,l) D(k,l)
        for (std::size_t l = 0; l < n; ++l) a(row, k * n + l) += g.c(i, j, l);
        // -([De_i, e_j])_k = -sum_m D(m,i) c(m,j,k)
        for (std::size_t m = 0; m < n; ++m) a(row, m * n + i) -= g.c(m, j, k);
        // -([e_i, De_j])_k = -sum_m D(m,j) c(i,m,k)
        for (std::size_t m = 0; m < n; ++m) a(row, m * n + j) -= g.c(i, m, k);
      }
  return a;
}

}  // namespace

template <class T>
std::vector<Matrix<T>> derivation_basis(const LieAlgebra<T>& g, double tol) {
  const std::size_t n = g.dim();
  std::vector<Matrix<T>> out;
  for (const auto& v : nullspace(derivation_system(g), tol)) {
    Matrix<T> d(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) d(r, c) = v[r * n + c];
    out.push_back(std::move(d));
  }
  return out;
}

template <class T>
bool is_derivation(const LieAlgebra<T>& g, const Matrix<T>& d, double tol) {
  const std::size_t n = g.dim();
  Vec<T> flat(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) flat[r * n + c] = d(r, c);
  for (const auto& x : derivation_system(g) * flat)
    if (!ScalarTraits<T>::is_zero(x, tol)) return false;
  return true;
}

template <class T>
std::size_t dim_with_identity(const std::vector<Matrix<T>>& basis, std::size_t n, double tol) {
  std::vector<Vec<T>> flat;
  auto push = [&](const Matrix<T>& m) {
    Vec<T> v(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) v[r * n + c] = m(r, c);
    flat.push_back(std::move(v));
  };
  push(Matrix<T>::identity(n));
  for (const auto& m : basis) push(m);
  return row_basis(flat, n * n, tol).size();
}

template <class T>
bool satisfies_jacobi(const LieAlgebra<T>& g, double tol) {
  const std::size_t n = g.dim();
  auto e = [n](std::size_t i) {
    Vec<T> v(n, T(0));
    v[i] = T(1);
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Vec<T> a = g.bracket(g.bracket(e(i), e(j)), e(k));
        Vec<T> b = g.bracket(g.bracket(e(j), e(k)), e(i));
        Vec<T> c = g.bracket(g.bracket(e(k), e(i)), e(j));
        for (std::size_t l = 0; l < n; ++l)
          if (!ScalarTraits<T>::is_zero(a[l] + b[l] + c[l], tol)) return false;
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (!ScalarTraits<T>::is_zero(g.c(i, j, k) + g.c(j, i, k), tol)) return false;
  return true;
}

BlockPattern::BlockPattern(std::size_t n) : n_(n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
}

bool BlockPattern::allowed(std::size_t i, std::size_t j) const {
  if (i < 2 && j >= 2) return false;
  if (i >= 2 && i <= n_ - 2 && j == n_ - 1) return false;
  return true;
}

std::size_t BlockPattern::free_entries() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) count += allowed(i, j) ? 1 : 0;
  return count;
}

Matrix<int> BlockPattern::mask() const {
  Matrix<int> m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = allowed(i, j) ? 1 : 0;
  return m;
}

#define METRICLASS_INSTANTIATE(T)                                                                 \
  template class LieAlgebra<T>;                                                                   \
  template struct Subspace<T>;                                                                    \
  template LieAlgebra<T> build_algebra<T>(std::size_t);                                           \
  template CenterAndDerived<T> center_and_derived<T>(const LieAlgebra<T>&, double);               \
  template std::vector<Matrix<T>> derivation_basis<T>(const LieAlgebra<T>&, double);              \
  template bool is_derivation<T>(const LieAlgebra<T>&, const Matrix<T>&, double);                 \
  template std::size_t dim_with_identity<T>(const std::vector<Matrix<T>>&, std::size_t, double); \
  template bool satisfies_jacobi<T>(const LieAlgebra<T>&, double);

METRICLASS_INSTANTIATE(double)
METRICLASS_INSTANTIATE(QSqrt3)

#undef METRICLASS_INSTANTIATE

}  // namespace metriclass
