#include "metriclass/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace metriclass {

namespace {

template <class T>
bool near_zero(const T& v, double tol) {
  return ScalarTraits<T>::is_zero(v, tol);
}

template <class T>
bool vec_equal(const Vec<T>& a, const Vec<T>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!near_zero<T>(a[i] - b[i], tol)) return false;
  return true;
}

}  // namespace

template <class T>
Vec<T> BilinearTable<T>::apply(const Vec<T>& x, const Vec<T>& y) const {
  Vec<T> out(n, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (near_zero<T>(x[i], 0.0)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (near_zero<T>(y[j], 0.0)) continue;
      T w = x[i] * y[j];
      const auto& v = at(i, j);
      for (std::size_t k = 0; k < n; ++k) out[k] += w * v[k];
    }
  }
  return out;
}

template <class T>
bool BilinearTable<T>::symmetry_holds(double tol) const {
  if (symmetry == Symmetry::None) return true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vec<T> other = at(j, i);
      if (symmetry == Symmetry::Antisymmetric)
        for (auto& v : other) v = -v;
      if (!vec_equal(at(i, j), other, tol)) return false;
    }
  return true;
}

template <class T>
bool OperatorTable<T>::antisymmetric(double tol) const {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Matrix<T> s = at(i, j) + at(j, i);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (!near_zero<T>(s(a, b), tol)) return false;
    }
  return true;
}

template <class T>
Vec<T> frame_signs(std::size_t n) {
  Vec<T> eps(n, T(1));
  eps[n - 1] = T(-1);
  return eps;
}

template <class T>
LieAlgebra<T> frame_algebra(const T& lambda, const T& xi, std::size_t n) {
  return build_algebra<T>(n).change_basis(canonical_g(lambda, xi, n));
}

template <class T>
BilinearTable<T> u_map(const LieAlgebra<T>& h, const Vec<T>& eps) {
  const std::size_t n = h.dim();
  if (eps.size() != n) throw Error(ErrorCode::FrameNotPseudoOrthonormal, "sign vector has wrong length");
  for (const auto& e : eps)
    if (!(e == T(1) || e == T(-1))) throw Error(ErrorCode::FrameNotPseudoOrthonormal, "signs must be +1 or -1");
  BilinearTable<T> u(n, Symmetry::Symmetric);
  const T half = T(1) / T(2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        u.at(i, j)[k] = eps[k] * half * (eps[j] * h.c(k, i, j) + eps[i] * h.c(k, j, i));
  return u;
}

template <class T>
BilinearTable<T> u_map(const LieAlgebra<T>& g, const Matrix<T>& gram, const Matrix<T>& frame, double tol) {
  const std::size_t n = g.dim();
  Matrix<T> p = frame.transpose() * gram * frame;
  Vec<T> eps(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !near_zero<T>(p(i, j), tol))
        throw Error(ErrorCode::FrameNotPseudoOrthonormal, "frame vectors are not orthogonal");
    if (near_zero<T>(p(i, i) - T(1), tol)) {
      eps[i] = T(1);
    } else if (near_zero<T>(p(i, i) + T(1), tol)) {
      eps[i] = T(-1);
    } else {
      throw Error(ErrorCode::FrameNotPseudoOrthonormal, "frame vector " + std::to_string(i) + " is not a unit vector");
    }
  }
  return u_map(g.change_basis(frame), eps);
}

template <class T>
BilinearTable<T> levi_civita(const BilinearTable<T>& u, const LieAlgebra<T>& h) {
  const std::size_t n = u.n;
  if (h.dim() != n) throw Error(ErrorCode::DimensionMismatch, "levi_civita");
  BilinearTable<T> nabla(n, Symmetry::None);
  const T half = T(1) / T(2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) nabla.at(i, j)[k] = half * h.c(i, j, k) + u.at(i, j)[k];
  return nabla;
}

template <class T>
OperatorTable<T> riemann(const BilinearTable<T>& nabla, const LieAlgebra<T>& h) {
  const std::size_t n = nabla.n;
  std::vector<Matrix<T>> op(n, Matrix<T>(n, n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) op[i](k, j) = nabla.at(i, j)[k];
  OperatorTable<T> r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Matrix<T> m = op[i] * op[j] - op[j] * op[i];
      for (std::size_t l = 0; l < n; ++l)
        if (!near_zero<T>(h.c(i, j, l), 0.0)) m -= h.c(i, j, l) * op[l];
      r.at(i, j) = m;
      r.at(j, i) = -m;
    }
  return r;
}

template <class T>
Matrix<T> ricci(const OperatorTable<T>& r, const Vec<T>& eps) {
  const std::size_t n = r.n;
  Matrix<T> ric(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix<T>& m = r.at(a, i);
      for (std::size_t k = 0; k < n; ++k) ric(k, a) += eps[i] * m(k, i);
    }
  return ric;
}

template <class T>
CurvatureTables<T> generic_tables(const T& lambda, const T& xi, std::size_t n) {
  LieAlgebra<T> h = frame_algebra(lambda, xi, n);
  Vec<T> eps = frame_signs<T>(n);
  CurvatureTables<T> t;
  t.u = u_map(h, eps);
  t.nabla = levi_civita(t.u, h);
  t.r = riemann(t.nabla, h);
  t.ric = ricci(t.r, eps);
  return t;
}

template <class T>
CurvatureTables<T> closed_form_tables(const T& l, const T& x, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
  const std::size_t e1 = 0, e2 = 1, ep = n - 2, en = n - 1;
  const T one(1), two(2), three(3), four(4);
  const T half = one / two;
  const T quarter = one / four;
  const T l2 = l * l, l3 = l2 * l, l4 = l2 * l2, x2 = x * x;
  auto v = [n](std::initializer_list<std::pair<std::size_t, T>> terms) {
    Vec<T> out(n, T(0));
    for (const auto& [i, c] : terms) out[i] += c;
    return out;
  };
  auto scaled = [](Vec<T> a, const T& s) {
    for (auto& c : a) c *= s;
    return a;
  };

  CurvatureTables<T> t;
  t.u = BilinearTable<T>(n, Symmetry::Symmetric);
  auto set_u = [&](std::size_t i, std::size_t j, const Vec<T>& val) {
    t.u.at(i, j) = val;
    t.u.at(j, i) = val;
  };
  set_u(e1, e1, v({{e2, l}}));
  set_u(e1, e2, v({{e1, -l * half}, {ep, -l * x * half}, {en, l2 * half}}));
  set_u(e1, ep, v({{e2, l * x * half}}));
  set_u(e1, en, v({{e2, (l2 + one) * half}}));
  set_u(e2, en, v({{e1, -half}, {ep, -x * half}, {en, l * half}}));
  set_u(ep, en, v({{e2, x * half}}));
  set_u(en, en, v({{e2, l}}));

  t.nabla = BilinearTable<T>(n, Symmetry::None);
  auto& nb = t.nabla;
  nb.at(e1, e1) = v({{e2, l}});
  nb.at(e1, e2) = v({{e1, -l}, {ep, -l * x * half}, {en, (l2 + one) * half}});
  nb.at(e1, ep) = v({{e2, l * x * half}});
  nb.at(e1, en) = v({{e2, (l2 + one) * half}});
  nb.at(e2, e1) = v({{ep, -l * x * half}, {en, (l2 - one) * half}});
  nb.at(e2, ep) = v({{e1, x * half * l}, {en, -x * half}});
  nb.at(e2, en) = v({{e1, (l2 - one) * half}, {ep, -x * half}});
  nb.at(ep, e1) = v({{e2, l * x * half}});
  nb.at(ep, e2) = v({{e1, -x * half * l}, {en, x * half}});
  nb.at(ep, en) = v({{e2, x * half}});
  nb.at(en, e1) = v({{e2, (l2 + one) * half}});
  nb.at(en, e2) = v({{e1, -(l2 + one) * half}, {ep, -x * half}, {en, l}});
  nb.at(en, ep) = v({{e2, x * half}});
  nb.at(en, en) = v({{e2, l}});

  t.r = OperatorTable<T>(n);
  // columns: images of x_1, x_2, x_{n-1}, x_n, each given as 4 R(.,.) x
  auto set_r = [&](std::size_t i, std::size_t j, const std::array<Vec<T>, 4>& cols) {
    Matrix<T> m(n, n);
    const std::array<std::size_t, 4> idx{e1, e2, ep, en};
    for (std::size_t c = 0; c < 4; ++c) {
      Vec<T> col = scaled(cols[c], quarter);
      for (std::size_t k = 0; k < n; ++k) m(k, idx[c]) = col[k];
    }
    t.r.at(i, j) = m;
    t.r.at(j, i) = -m;
  };
  const T a = l4 - l2 * (x2 - two) - three;
  const T b = three * x * (l2 - one);
  const T c = four * l3 - l * (x2 + four);
  const T m1 = l2 - one;
  const T d = three * l4 - two * l2 - x2 - one;
  const Vec<T> zero(n, T(0));
  set_r(e1, e2, {v({{e2, a}}), v({{e1, -a}, {ep, -b}, {en, c}}), v({{e2, b}}), v({{e2, c}})});
  set_r(e1, ep,
        {v({{ep, -l2 * x2}, {en, l * x * m1}}), zero, v({{e1, l * x2 * l}, {en, -l * x2}}),
         v({{e1, l * x * m1}, {ep, -l * x2}})});
  set_r(e1, en,
        {v({{ep, -l * x * m1}, {en, m1 * m1}}), zero, v({{e1, x * m1 * l}, {en, -x * m1}}),
         v({{e1, m1 * m1}, {ep, -x * m1}})});
  set_r(e2, ep,
        {v({{e2, -b}}), v({{e1, b}, {ep, b * x}, {en, -b * l}}), v({{e2, -three * x2 * m1}}),
         v({{e2, -three * l * x * m1}})});
  set_r(e2, en,
        {v({{e2, -c}}), v({{e1, c}, {ep, three * l * x * m1}, {en, -d}}), v({{e2, -three * l * x * m1}}),
         v({{e2, -d}})});
  set_r(ep, en,
        {v({{ep, l * x2}, {en, -x * m1}}), zero, v({{e1, -x2 * l}, {en, x2}}), v({{e1, -x * m1}, {ep, x2}})});

  t.ric = Matrix<T>(n, n);
  auto set_ric = [&](std::size_t j, const Vec<T>& twice) {
    for (std::size_t k = 0; k < n; ++k) t.ric(k, j) = twice[k] * half;
  };
  const T p = two * l3 - l * (x2 + two);
  set_ric(e1, v({{e1, -(l4 - l2 * x2 - one)}, {ep, -x * m1}, {en, p}}));
  set_ric(e2, v({{e2, l4 - l2 * (x2 + two) + x2 + one}}));
  set_ric(ep, v({{e1, -x * m1}, {ep, -x2 * m1}, {en, l * x * m1}}));
  set_ric(en, v({{e1, -p}, {ep, -l * x * m1}, {en, l4 - x2 - one}}));
  return t;
}

template <class T>
bool is_flat(const OperatorTable<T>& r, double tol) {
  for (const auto& m : r.data)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!near_zero<T>(m(i, j), tol)) return false;
  return true;
}

template <class T>
std::optional<T> einstein_test(const Matrix<T>& ric, double tol) {
  const std::size_t n = ric.rows();
  T c = ric(0, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T want = i == j ? c : T(0);
      if (!near_zero<T>(ric(i, j) - want, tol)) return std::nullopt;
    }
  return c;
}

namespace {

template <class T>
const std::vector<Matrix<T>>& cached_derivations(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<Matrix<T>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, derivation_basis(build_algebra<T>(n))).first;
  return it->second;
}

}  // namespace

template <class T>
std::vector<Matrix<T>> frame_derivations(const T& lambda, const T& xi, std::size_t n) {
  Matrix<T> g = canonical_g(lambda, xi, n);
  Matrix<T> gi = inverse(g);
  std::vector<Matrix<T>> out;
  for (const auto& d : cached_derivations<T>(n)) out.push_back(gi * d * g);
  return out;
}

template <class T>
std::optional<SolitonCertificate<T>> soliton_certificate(const Matrix<T>& ric, const T& lambda, const T& xi,
                                                         std::size_t n, double tol) {
  auto ders = frame_derivations(lambda, xi, n);
  const std::size_t m = ders.size();
  Matrix<T> a(n * n, m + 1);
  Vec<T> rhs(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      a(row, 0) = i == j ? T(1) : T(0);
      for (std::size_t k = 0; k < m; ++k) a(row, k + 1) = ders[k](i, j);
      rhs[row] = ric(i, j);
    }
  auto sol = solve(a, rhs, ScalarTraits<T>::exact ? 0.0 : 1e-12);
  if (!sol) return std::nullopt;
  SolitonCertificate<T> cert;
  cert.c = (*sol)[0];
  cert.d = ric - cert.c * Matrix<T>::identity(n);
  Matrix<T> rebuilt = cert.c * Matrix<T>::identity(n);
  for (std::size_t k = 0; k < m; ++k) rebuilt += (*sol)[k + 1] * ders[k];
  cert.residual = max_abs_diff(rebuilt, ric);
  if (ScalarTraits<T>::exact ? cert.residual != 0.0 : cert.residual > tol) return std::nullopt;
  return cert;
}

template <class T>
std::vector<T> characteristic_polynomial(const Matrix<T>& a) {
  const std::size_t k = a.rows();
  std::vector<T> c(k + 1, T(0));
  c[k] = T(1);
  Matrix<T> m(k, k);
  const Matrix<T> id = Matrix<T>::identity(k);
  for (std::size_t i = 1; i <= k; ++i) {
    m = a * m + c[k - i + 1] * id;
    Matrix<T> am = a * m;
    T tr(0);
    for (std::size_t j = 0; j < k; ++j) tr += am(j, j);
    c[k - i] = -tr / T(static_cast<int>(i));
  }
  return c;
}

namespace {

// Synthetic division by (x - r); returns the remainder.
std::pair<std::vector<QSqrt3>, QSqrt3> deflate(const std::vector<QSqrt3>& p, const QSqrt3& r) {
  const std::size_t deg = p.size() - 1;
  std::vector<QSqrt3> q(deg, QSqrt3(0));
  QSqrt3 acc = p[deg];
  for (std::size_t i = deg; i-- > 0;) {
    q[i] = acc;
    acc = p[i] + acc * r;
  }
  return {q, acc};
}

}  // namespace

template <class T>
RicciSpectrum ricci_spectrum(const Matrix<T>& ric) {
  const std::size_t n = ric.rows();
  const std::vector<std::size_t> block{0, 1, n - 2, n - 1};
  Matrix<T> b = ric.select(block, block);
  Eigen::Matrix4d e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      e(i, j) = ScalarTraits<T>::to_double(b(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  Eigen::EigenSolver<Eigen::Matrix4d> es(e, false);
  RicciSpectrum out;
  bool real = true;
  for (int i = 0; i < 4; ++i) {
    auto ev = es.eigenvalues()(i);
    if (std::fabs(ev.imag()) > 1e-6) real = false;
    out.approx.push_back(ev.real());
  }
  std::sort(out.approx.begin(), out.approx.end(), std::greater<>());
  if constexpr (ScalarTraits<T>::exact) {
    if (!real) return out;
    std::vector<QSqrt3> p = characteristic_polynomial(b);
    std::vector<QSqrt3> roots;
    for (double guess : out.approx) {
      QSqrt3 r(rationalize(guess, 1000));
      auto [q, rem] = deflate(p, r);
      if (!rem.is_zero()) return out;
      roots.push_back(r);
      p = q;
    }
    std::sort(roots.begin(), roots.end(), [](const QSqrt3& x, const QSqrt3& y) { return y < x; });
    out.exact = roots;
  }
  return out;
}

template <class T>
CurvatureReport<T> curvature_report(const T& lambda, const T& xi, std::size_t n) {
  CurvatureReport<T> rep;
  rep.lambda = lambda;
  rep.xi = xi;
  rep.n = n;
  rep.tables = generic_tables(lambda, xi, n);
  const double tol = ScalarTraits<T>::exact ? 0.0 : 1e-10;
  rep.flat = is_flat(rep.tables.r, tol);
  rep.einstein = einstein_test(rep.tables.ric, tol);
  rep.soliton = soliton_certificate(rep.tables.ric, lambda, xi, n);
  rep.spectrum = ricci_spectrum(rep.tables.ric);
  return rep;
}

CurvatureReport<QSqrt3> curvature_report(const ClassPair& cls, std::size_t n) {
  return curvature_report(cls.lambda_value<QSqrt3>(), cls.xi_value<QSqrt3>(), n);
}

#define METRICLASS_INSTANTIATE(T)                                                                     \
  template struct BilinearTable<T>;                                                                   \
  template struct OperatorTable<T>;                                                                   \
  template Vec<T> frame_signs<T>(std::size_t);                                                        \
  template LieAlgebra<T> frame_algebra<T>(const T&, const T&, std::size_t);                           \
  template BilinearTable<T> u_map<T>(const LieAlgebra<T>&, const Vec<T>&);                            \
  template BilinearTable<T> u_map<T>(const LieAlgebra<T>&, const Matrix<T>&, const Matrix<T>&, double); \
  template BilinearTable<T> levi_civita<T>(const BilinearTable<T>&, const LieAlgebra<T>&);            \
  template OperatorTable<T> riemann<T>(const BilinearTable<T>&, const LieAlgebra<T>&);                \
  template Matrix<T> ricci<T>(const OperatorTable<T>&, const Vec<T>&);                                \
  template CurvatureTables<T> generic_tables<T>(const T&, const T&, std::size_t);                     \
  template CurvatureTables<T> closed_form_tables<T>(const T&, const T&, std::size_t);                 \
  template bool is_flat<T>(const OperatorTable<T>&, double);                                          \
  template std::optional<T> einstein_test<T>(const Matrix<T>&, double);                               \
  template std::vector<Matrix<T>> frame_derivations<T>(const T&, const T&, std::size_t);              \
  template std::optional<SolitonCertificate<T>> soliton_certificate<T>(const Matrix<T>&, const T&,    \
                                                                       const T&, std::size_t, double); \
  template std::vector<T> characteristic_polynomial<T>(const Matrix<T>&);                             \
  template RicciSpectrum ricci_spectrum<T>(const Matrix<T>&);                                         \
  template CurvatureReport<T> curvature_report<T>(const T&, const T&, std::size_t);

METRICLASS_INSTANTIATE(double)
METRICLASS_INSTANTIATE(QSqrt3)

#undef METRICLASS_INSTANTIATE

}  // namespace metriclass
