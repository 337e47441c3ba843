#include "metriclass/reduction.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace metriclass {

std::string to_string(Flag f) {
  switch (f) {
    case Flag::NearDegenerate: return "NearDegenerate";
    case Flag::ClassifierDisagreement: return "ClassifierDisagreement";
  }
  return "?";
}

template <class T>
Matrix<T> Witness<T>::left_product(std::size_t n) const {
  Matrix<T> p = Matrix<T>::identity(n);
  for (const auto& h : left) p = h * p;
  return p;
}

template <class T>
Matrix<T> Witness<T>::right_product(std::size_t n) const {
  Matrix<T> p = Matrix<T>::identity(n);
  for (const auto& k : right) p = p * k;
  return p;
}

template <class T>
void Witness<T>::append(const Witness& later) {
  left.insert(left.end(), later.left.begin(), later.left.end());
  right.insert(right.end(), later.right.begin(), later.right.end());
  target = later.target;
}

template <class T>
WitnessCheck verify_witness(const Matrix<T>& g, const Witness<T>& w, double tol) {
  WitnessCheck out;
  const std::size_t n = g.rows();
  if (!g.is_square() || w.target.rows() != n || w.target.cols() != n) {
    out.message = "shape mismatch";
    return out;
  }
  BlockPattern pattern(n);
  for (std::size_t i = 0; i < w.left.size(); ++i) {
    const auto& h = w.left[i];
    if (h.rows() != n || h.cols() != n) {
      out.message = "left factor " + std::to_string(i) + " has wrong shape";
      return out;
    }
    double ptol = ScalarTraits<T>::exact ? 0.0 : tol * std::max(1.0, max_abs(h));
    if (!pattern.contains_transposed(h, ptol)) {
      out.message = "left factor " + std::to_string(i) + " violates the block pattern";
      return out;
    }
    if (rank(h, ScalarTraits<T>::exact ? 0.0 : 1e-12) != n) {
      out.message = "left factor " + std::to_string(i) + " is singular";
      return out;
    }
  }
  for (std::size_t i = 0; i < w.right.size(); ++i) {
    const auto& k = w.right[i];
    if (k.rows() != n || k.cols() != n) {
      out.message = "right factor " + std::to_string(i) + " has wrong shape";
      return out;
    }
    double m = max_abs(k);
    if (!is_lorentz(k, tol * std::max(1.0, m * m))) {
      out.message = "right factor " + std::to_string(i) + " is not in O(n-1,1)";
      return out;
    }
  }
  Matrix<T> p = w.left_product(n) * g * w.right_product(n);
  out.residual = max_abs_diff(p, w.target);
  if constexpr (ScalarTraits<T>::exact) {
    out.ok = p == w.target;
  } else {
    out.ok = out.residual <= tol;
  }
  if (!out.ok) out.message = "product misses the target by " + std::to_string(out.residual);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Orthogonal q with v^T q = |v| e_k.
Matrix<double> reflector_to(const Vec<double>& v, std::size_t k) {
  const std::size_t m = v.size();
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  Matrix<double> q = Matrix<double>::identity(m);
  if (norm == 0.0) return q;
  double sigma = v[k] >= 0.0 ? -norm : norm;
  Vec<double> u = v;
  u[k] -= sigma;
  double uu = 0.0;
  for (double x : u) uu += x * x;
  if (uu == 0.0) return q;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) q(i, j) -= 2.0 * u[i] * u[j] / uu;
  if (sigma < 0.0)
    for (std::size_t i = 0; i < m; ++i) q(i, k) = -q(i, k);
  return q;
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> r(hi - lo);
  std::iota(r.begin(), r.end(), lo);
  return r;
}

struct Chain {
  Matrix<double> cur;
  Witness<double> w;

  void left(const Matrix<double>& h) {
    cur = h * cur;
    w.left.push_back(h);
  }
  void right(const Matrix<double>& k) {
    cur = cur * k;
    w.right.push_back(k);
  }
};

double scale_of(const Matrix<double>& g) { return std::max(1.0, max_abs(g)); }

}  // namespace

template <class T>
Matrix<T> embed(const Matrix<T>& block, const std::vector<std::size_t>& coords, std::size_t n) {
  Matrix<T> m = Matrix<T>::identity(n);
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = 0; j < coords.size(); ++j) m(coords[i], coords[j]) = block(i, j);
  return m;
}

template <class T>
Matrix<T> t_normal_form(const T& t, int lambda, std::size_t n) {
  Matrix<T> m = Matrix<T>::identity(n);
  m(n - 2, 0) = t;
  m(n - 1, 0) = ScalarTraits<T>::from_int(-lambda);
  return m;
}

template <class T>
Matrix<T> dual_representative(const ClassPair& cls, std::size_t n) {
  return t_normal_form(cls.xi_value<T>(), cls.lambda, n);
}

O11Normal o11_normalize(double x, double y, double tol) {
  if (x == 0.0 && y == 0.0) throw Error(ErrorCode::ZeroVector, "o11_normalize of (0,0)");
  O11Normal out;
  double q = (x * x - y * y) / (x * x + y * y);
  switch (sign_with_tol(q, tol)) {
    case Sign::Zero:
      out.lambda = 1;
      out.a = std::fabs(y);
      out.g = Matrix<double>{{-sgn(x), 0.0}, {0.0, sgn(y)}};
      return out;
    case Sign::Negative:
      out.lambda = 0;
      out.a = std::sqrt(y * y - x * x);
      break;
    case Sign::Positive:
      out.lambda = 2;
      out.a = std::sqrt((x * x - y * y) / 3.0);
      break;
  }
  double a = out.a;
  double l = out.lambda;
  Matrix<double> v{{x, y}, {y, x}};
  Matrix<double> w{{-l * a, a}, {a, -l * a}};
  out.g = inverse(v, 0.0) * w;
  return out;
}

StageResult reduce_last_row(const Matrix<double>& g, double tol) {
  const std::size_t n = g.rows();
  if (!g.is_square() || n < 2) throw Error(ErrorCode::DimensionMismatch, "reduce_last_row needs a square matrix");
  (void)inverse(g, 1e-14 * scale_of(g));
  const std::size_t N = n - 1;
  Chain c{g, {}};

  Vec<double> r(N);
  for (std::size_t j = 0; j < N; ++j) r[j] = c.cur(N, j);
  c.right(embed(reflector_to(r, 0), range(0, N), n));

  O11Normal o = o11_normalize(c.cur(N, 0), c.cur(N, N), tol);
  c.right(embed(o.g, {0, N}, n));

  Matrix<double> h = Matrix<double>::identity(n);
  for (std::size_t i = 0; i < N; ++i) h(i, N) = -c.cur(i, N) / o.a;
  h(N, N) = 1.0 / o.a;
  c.left(h);

  for (std::size_t j = 0; j < n; ++j) {
    c.cur(N, j) = 0.0;
    c.cur(j, N) = 0.0;
  }
  c.cur(N, N) = 1.0;
  c.cur(N, 0) = -static_cast<double>(o.lambda);

  StageResult out;
  out.lambda = o.lambda;
  out.reached = c.cur;
  out.witness = std::move(c.w);
  out.witness.target = out.reached;
  return out;
}

namespace {

bool in_g_lambda(const Matrix<double>& g, int lambda, double tol) {
  const std::size_t n = g.rows();
  const std::size_t N = n - 1;
  double s = tol * scale_of(g);
  for (std::size_t j = 0; j < N; ++j) {
    double want = j == 0 ? -static_cast<double>(lambda) : 0.0;
    if (std::fabs(g(N, j) - want) > s) return false;
    if (std::fabs(g(j, N)) > s) return false;
  }
  return std::fabs(g(N, N) - 1.0) <= s;
}

}  // namespace

Witness<double> reduce_lambda0(const Matrix<double>& g, double tol) {
  const std::size_t n = g.rows();
  if (!g.is_square() || !in_g_lambda(g, 0, tol)) throw Error(ErrorCode::NotInG0, "matrix is not in G_0");
  Witness<double> w;
  w.target = Matrix<double>::identity(n);
  if (g == w.target) return w;
  const std::size_t N = n - 1;
  const auto eN = static_cast<Eigen::Index>(N);

  // alpha = P R1^T Q1^T from the QR factorization of (P alpha)^T, P the reversal
  Eigen::MatrixXd pa(eN, eN);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      pa(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(N - 1 - i, j);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(pa.transpose());
  Eigen::MatrixXd q1 = qr.householderQ();

  Matrix<double> k(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      k(i, j) = q1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(N - 1 - j));
  Matrix<double> kk = embed(k, range(0, N), n);
  Matrix<double> u = g * kk;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < i; ++j) u(i, j) = 0.0;
  w.right.push_back(kk);
  w.left.push_back(inverse(u, 0.0));
  return w;
}

StageResult reduce_to_t(const Matrix<double>& g, int lambda, double tol) {
  const std::size_t n = g.rows();
  if (!g.is_square() || n < 4 || (lambda != 1 && lambda != 2) || !in_g_lambda(g, lambda, tol))
    throw Error(ErrorCode::NotInGLambda, "matrix is not in G_" + std::to_string(lambda));
  const std::size_t N = n - 1;
  Chain c{g, {}};

  // column 0 below row 2
  if (N - 2 >= 2) {
    Vec<double> col(N - 2);
    for (std::size_t i = 2; i < N; ++i) col[i - 2] = c.cur(i, 0);
    Matrix<double> q = reflector_to(col, 0);
    c.left(embed(q.transpose(), range(2, N), n));
    for (std::size_t i = 3; i < N; ++i) c.cur(i, 0) = 0.0;
  }

  for (std::size_t j = N - 1; j >= 3; --j) {
    Vec<double> row(j);
    for (std::size_t k = 1; k <= j; ++k) row[k - 1] = c.cur(j, k);
    c.right(embed(reflector_to(row, j - 1), range(1, j + 1), n));
    double a = c.cur(j, j);
    if (a == 0.0) throw Error(ErrorCode::SingularMatrix, "reduce_to_t");
    Matrix<double> h = Matrix<double>::identity(n);
    for (std::size_t i = 0; i < j; ++i) h(i, j) = -c.cur(i, j) / a;
    h(j, j) = 1.0 / a;
    c.left(h);
    for (std::size_t k = 0; k < n; ++k) {
      c.cur(j, k) = k == j ? 1.0 : 0.0;
      if (k < j) c.cur(k, j) = 0.0;
    }
  }

  auto rotate_row2 = [&] {
    Vec<double> v{c.cur(2, 1), c.cur(2, 2)};
    c.right(embed(reflector_to(v, 1), {1, 2}, n));
    c.cur(2, 1) = 0.0;
  };
  rotate_row2();

  double y = c.cur(2, 0);
  double x = c.cur(2, 2);
  if (x < 0.5 * std::fabs(y)) {
    if (y < 0.0) {
      Matrix<double> d = Matrix<double>::identity(n);
      d(2, 2) = -1.0;
      c.left(d);
      c.right(d);
    }
    double l = lambda;
    double r = std::sqrt(l * l + 1.0);
    Matrix<double> k1{{0.0, 0.0, r, l}, {0.0, 1.0, 0.0, 0.0}, {-r, 0.0, l * l, l * r}, {-l, 0.0, l * r, l * l + 1.0}};
    c.right(embed(k1, {0, 1, 2, N}, n));
    Matrix<double> h = Matrix<double>::identity(n);
    for (std::size_t i = 0; i < N; ++i) h(i, N) = -c.cur(i, N) / c.cur(N, N);
    c.left(h);
    for (std::size_t i = 0; i < N; ++i) c.cur(i, N) = 0.0;
    rotate_row2();
    y = c.cur(2, 0);
    x = c.cur(2, 2);
  }
  if (x <= 0.0) throw Error(ErrorCode::SingularMatrix, "reduce_to_t");

  Matrix<double> h4 = Matrix<double>::identity(n);
  h4(0, 2) = -c.cur(0, 2) / x;
  h4(1, 2) = -c.cur(1, 2) / x;
  h4(2, 2) = 1.0 / x;
  c.left(h4);
  c.cur(0, 2) = 0.0;
  c.cur(1, 2) = 0.0;
  c.cur(2, 2) = 1.0;

  Matrix<double> a{{c.cur(0, 0), c.cur(0, 1)}, {c.cur(1, 0), c.cur(1, 1)}};
  c.left(embed(inverse(a, 0.0), {0, 1}, n));
  double t = c.cur(2, 0);

  if (n == 4) {
    if (t < 0.0) {
      Matrix<double> d = Matrix<double>::identity(n);
      d(2, 2) = -1.0;
      c.left(d);
      c.right(d);
    }
  } else {
    Matrix<double> alpha = Matrix<double>::identity(n);
    alpha(2, 2) = 0.0;
    alpha(N - 1, N - 1) = 0.0;
    alpha(N - 1, 2) = sgn(t);
    alpha(2, N - 1) = 1.0;
    c.left(alpha);
    c.right(alpha.transpose());
  }

  StageResult out;
  out.lambda = lambda;
  out.t = std::fabs(t);
  out.reached = t_normal_form(out.t, lambda, n);
  out.witness = std::move(c.w);
  out.witness.target = out.reached;
  return out;
}

template <class T>
BranchResult<T> reduce_lambda1(const T& t, std::size_t n, double small_t) {
  using S = ScalarTraits<T>;
  if (S::sign(t, 0.0) == Sign::Negative) throw Error(ErrorCode::NegativeT, "t < 0");
  const std::size_t N = n - 1;
  BranchResult<T> out;
  bool zero = S::is_zero(t, 0.0);
  if constexpr (!S::exact) {
    if (!zero && t < small_t) {
      zero = true;
      out.near_degenerate = true;
    }
  }
  if (zero) {
    out.cls = {1, Xi::Zero};
    out.witness.target = dual_representative<T>(out.cls, n);
    return out;
  }
  out.cls = {1, Xi::One};
  const T one = S::from_int(1);
  const T two = S::from_int(2);
  const T s = (t - one) / t;
  const T s2 = s * s / two;
  const T z = S::from_int(0);
  Matrix<T> k1{{one - s2, z, s, s2}, {z, one, z, z}, {-s, z, one, s}, {-s2, z, s, one + s2}};
  Matrix<T> h1{{one, z, z, -s2}, {z, one, z, z}, {z, z, one, -s2 * t - s}, {z, z, z, one}};
  Matrix<T> h2{{t, z, -s, z}, {z, one, z, z}, {z, z, one / t, z}, {z, z, z, one}};
  const std::vector<std::size_t> coords{0, 1, N - 1, N};
  out.witness.right.push_back(embed(k1, coords, n));
  out.witness.left.push_back(embed(h1, coords, n));
  out.witness.left.push_back(embed(h2, coords, n));
  out.witness.target = dual_representative<T>(out.cls, n);
  out.s = S::to_double(s);
  return out;
}

long double lambda2_equation(int branch, long double s, long double t) {
  long double rad = (3.0L * s - 5.0L) * (s - 1.0L);
  long double phi = std::sqrt(rad < 0.0L ? 0.0L : rad);
  if (branch == 1) return 3.0L * phi - t * (3.0L * s - 4.0L);
  return (3.0L + 2.0L * t) * phi - (t + 2.0L) * (3.0L * s - 4.0L);
}

RootResult<long double> lambda2_root(int branch, double t, double root_eps) {
  const long double tt = t;
  auto f = [branch, tt](long double s) { return lambda2_equation(branch, s, tt); };
  const long double lo = 5.0L / 3.0L;
  long double hi = 2.0L;
  int doublings = 0;
  while (f(hi) < 0.0L) {
    hi *= 2.0L;
    if (++doublings > 200) throw Error(ErrorCode::NoConvergence, "no bracket for t = " + std::to_string(t));
  }
  return bisect_root<long double>(f, lo, hi, static_cast<long double>(root_eps), 400);
}

BranchResult<double> reduce_lambda2(double t, std::size_t n, double tol, double root_eps) {
  if (t < 0.0) throw Error(ErrorCode::NegativeT, "t < 0");
  const std::size_t N = n - 1;
  BranchResult<double> out;
  if (std::fabs(t - std::sqrt(3.0)) <= tol) {
    out.cls = {2, Xi::Sqrt3};
    out.near_degenerate = true;
    out.witness.target = dual_representative<double>(out.cls, n);
    return out;
  }
  const int branch = t < std::sqrt(3.0) ? 1 : 2;
  out.cls = {2, branch == 1 ? Xi::Zero : Xi::Two};
  const long double sl = lambda2_root(branch, t, root_eps).root;
  const double s = static_cast<double>(sl);
  const double phi = static_cast<double>(std::sqrt((3.0L * sl - 5.0L) * (sl - 1.0L)));
  Matrix<double> k1{{s, 0.0, -phi, -2.0 * s + 2.0},
                    {0.0, 1.0, 0.0, 0.0},
                    {-phi, 0.0, 3.0 * s - 4.0, 2.0 * phi},
                    {2.0 * s - 2.0, 0.0, -2.0 * phi, -4.0 * s + 5.0}};
  Matrix<double> h1{{1.0, 0.0, 0.0, 2.0 * s - 2.0},
                    {0.0, 1.0, 0.0, 0.0},
                    {0.0, 0.0, 1.0, 2.0 * s * t - 2.0 * t - 2.0 * phi},
                    {0.0, 0.0, 0.0, 1.0}};
  const std::vector<std::size_t> coords{0, 1, N - 1, N};
  Matrix<double> k1n = embed(k1, coords, n);
  Matrix<double> h1n = embed(h1, coords, n);
  Matrix<double> g4 = h1n * t_normal_form(t, 2, n) * k1n;
  Matrix<double> target = dual_representative<double>(out.cls, n);
  Matrix<double> h = target * inverse(g4, 0.0);
  BlockPattern pattern(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!pattern.allowed_transposed(i, j)) h(i, j) = 0.0;
  out.witness.right.push_back(k1n);
  out.witness.left.push_back(h1n);
  out.witness.left.push_back(h);
  out.witness.target = target;
  out.s = s;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<InvariantClass> signature_table(std::size_t n) {
  const std::size_t m = n - 3;
  return {
      {{0, Xi::Zero}, {m, 1, 0}, {0, 1, 0}},
      {{1, Xi::Zero}, {m, 0, 1}, {0, 0, 1}},
      {{1, Xi::One}, {m, 1, 0}, {0, 0, 1}},
      {{2, Xi::Zero}, {m + 1, 0, 0}, {1, 0, 0}},
      {{2, Xi::Sqrt3}, {m, 0, 1}, {1, 0, 0}},
      {{2, Xi::Two}, {m, 1, 0}, {1, 0, 0}},
  };
}

namespace {

template <class T>
const CenterAndDerived<T>& cached_subspaces(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, CenterAndDerived<T>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, center_and_derived(build_algebra<T>(n))).first;
  return it->second;
}

}  // namespace

template <class T>
InvariantClass classify_by_invariants(const Metric<T>& m, const Tolerances& tol) {
  const std::size_t n = m.dim();
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
  const auto& cd = cached_subspaces<T>(n);
  Matrix<T> z = restrict(m.gram(), cd.center);
  Matrix<T> d = restrict(m.gram(), cd.derived);
  InvariantClass out;
  if constexpr (ScalarTraits<T>::exact) {
    out.center = signature_of(z);
    out.derived = signature_of(d);
  } else {
    const double scale = m.scale();
    const double abs_tol = tol.tol * scale;
    out.center = signature_of(z, abs_tol);
    out.derived = signature_of(d, abs_tol);
    for (const auto* block : {&z, &d})
      for (double mu : symmetric_eigenvalues(*block))
        if (std::fabs(mu) > abs_tol && std::fabs(mu) <= tol.near_band * scale) out.near_degenerate = true;
  }
  for (const auto& row : signature_table(n)) {
    if (row.center == out.center && row.derived == out.derived) {
      out.cls = row.cls;
      return out;
    }
  }
  throw Error(ErrorCode::NoTableMatch,
              "center " + out.center.str() + ", derived " + out.derived.str() + " match no class");
}

bool ClassificationResult::has_flag(Flag f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

void add_flag(ClassificationResult& r, Flag f) {
  if (!r.has_flag(f)) r.flags.push_back(f);
}

Matrix<double> sign_flip(std::size_t n) {
  Matrix<double> p = Matrix<double>::identity(n);
  p(n - 2, n - 2) = -1.0;
  return p;
}

// A = P L^{-T} carries M to the representative; A = c phi with phi in Aut.
void back_map(ClassificationResult& r) {
  const std::size_t n = r.n;
  Matrix<double> l = r.witness.left_product(n);
  Matrix<double> a = sign_flip(n) * inverse(l, 0.0).transpose();
  double det2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  double c = det2 / a(n - 1, n - 1);
  r.phi = a * (1.0 / c);
  r.k = 1.0 / (c * c);
  Matrix<double> gc = canonical_g(r.pipeline_cls.lambda_value<double>(), r.pipeline_cls.xi_value<double>(), n);
  r.frame = Frame<double>{inverse(r.phi, 0.0) * gc, r.k};
}

}  // namespace

ClassificationResult classify(const Metric<double>& m, const Tolerances& tol) {
  const std::size_t n = m.dim();
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
  ClassificationResult r;
  r.n = n;

  std::optional<InvariantClass> inv;
  try {
    inv = classify_by_invariants(m, tol);
    r.center = inv->center;
    r.derived = inv->derived;
    if (inv->near_degenerate) add_flag(r, Flag::NearDegenerate);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoTableMatch) throw;
    add_flag(r, Flag::NearDegenerate);
    add_flag(r, Flag::ClassifierDisagreement);
  }

  std::optional<ClassPair> fast;
  for (const auto& cls : all_classes()) {
    Matrix<double> cg = parametric_gram(cls.lambda_value<double>(), cls.xi_value<double>(), n);
    if (max_abs_diff(cg, m.gram()) <= tol.tol * m.scale()) {
      fast = cls;
      break;
    }
  }

  if (fast) {
    Matrix<double> gc = canonical_g(fast->lambda_value<double>(), fast->xi_value<double>(), n);
    r.g = inverse(gc, 0.0).transpose();
    r.pipeline_cls = *fast;
    Matrix<double> p = sign_flip(n);
    r.witness.left.push_back(p);
    r.witness.right.push_back(p);
    r.witness.target = dual_representative<double>(*fast, n);
  } else {
    Matrix<double> f = factor_metric(m);
    r.g = inverse(f, 0.0).transpose();
    StageResult first = reduce_last_row(r.g, tol.tol);
    r.witness = first.witness;
    if (first.lambda == 0) {
      r.witness.append(reduce_lambda0(first.reached, tol.tol));
      r.pipeline_cls = {0, Xi::Zero};
    } else {
      StageResult second = reduce_to_t(first.reached, first.lambda, tol.tol);
      r.witness.append(second.witness);
      r.t = second.t;
      BranchResult<double> b = first.lambda == 1 ? reduce_lambda1<double>(second.t, n)
                                                 : reduce_lambda2(second.t, n, tol.tol, tol.root_eps);
      r.witness.append(b.witness);
      r.pipeline_cls = b.cls;
      r.s = b.s;
      if (b.near_degenerate) add_flag(r, Flag::NearDegenerate);
    }
  }

  r.cls = r.pipeline_cls;
  if (inv && inv->cls != r.pipeline_cls) {
    r.cls = inv->cls;
    add_flag(r, Flag::ClassifierDisagreement);
  }
  back_map(r);
  return r;
}

ClassificationResult classify(const Metric<QSqrt3>& m, const Tolerances& tol) {
  const std::size_t n = m.dim();
  InvariantClass inv = classify_by_invariants(m, tol);
  auto canon = canonical_metric<QSqrt3>(inv.cls, n);
  if (canon.metric.gram() == m.gram()) {
    ClassificationResult r;
    r.n = n;
    r.cls = r.pipeline_cls = inv.cls;
    r.center = inv.center;
    r.derived = inv.derived;
    r.backend = "exact";
    Matrix<QSqrt3> eg = inverse(canon.frame.columns).transpose();
    Matrix<QSqrt3> p = Matrix<QSqrt3>::identity(n);
    p(n - 2, n - 2) = QSqrt3(-1);
    Witness<QSqrt3> w;
    w.left.push_back(p);
    w.right.push_back(p);
    w.target = dual_representative<QSqrt3>(inv.cls, n);
    r.exact_g = eg;
    r.exact_witness = w;
    r.g = to_double(eg);
    r.witness.left.push_back(to_double(p));
    r.witness.right.push_back(to_double(p));
    r.witness.target = to_double(w.target);
    back_map(r);
    return r;
  }
  ClassificationResult r = classify(Metric<double>(to_double(m.gram())), tol);
  r.backend = "exact";
  r.cls = inv.cls;
  r.center = inv.center;
  r.derived = inv.derived;
  r.flags.erase(std::remove(r.flags.begin(), r.flags.end(), Flag::ClassifierDisagreement), r.flags.end());
  if (r.pipeline_cls != inv.cls) add_flag(r, Flag::ClassifierDisagreement);
  return r;
}

#define METRICLASS_INSTANTIATE(T)                                                          \
  template struct Witness<T>;                                                              \
  template WitnessCheck verify_witness<T>(const Matrix<T>&, const Witness<T>&, double);   \
  template Matrix<T> embed<T>(const Matrix<T>&, const std::vector<std::size_t>&, std::size_t); \
  template Matrix<T> t_normal_form<T>(const T&, int, std::size_t);                         \
  template Matrix<T> dual_representative<T>(const ClassPair&, std::size_t);                \
  template BranchResult<T> reduce_lambda1<T>(const T&, std::size_t, double);               \
  template InvariantClass classify_by_invariants<T>(const Metric<T>&, const Tolerances&);

METRICLASS_INSTANTIATE(double)
METRICLASS_INSTANTIATE(QSqrt3)

#undef METRICLASS_INSTANTIATE

}  // namespace metriclass
