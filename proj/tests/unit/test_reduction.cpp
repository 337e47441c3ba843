#include "doctest.h"

#include <random>

#include "metriclass/reduction.hpp"

using namespace metriclass;

namespace {

using Q = QSqrt3;

Matrix<double> random_aut(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  BlockPattern pat(n);
  Matrix<double> phi(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (pat.allowed(a, b)) phi(a, b) = 0.5 * nd(rng);
  for (std::size_t a = 0; a < n; ++a) phi(a, a) = (rng() % 2 ? 1.0 : -1.0) * (2.0 + std::fabs(nd(rng)));
  return phi;
}

Matrix<double> random_orbit_point(const ClassPair& cls, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.2, 5.0);
  double c = ud(rng) * (rng() % 2 ? 1.0 : -1.0);
  Matrix<double> base = to_double(canonical_metric<Q>(cls, n).metric.gram());
  return act(Matrix<double>(c * random_aut(n, rng)), base);
}

// A boost in the (0, n-1) plane times a rotation of the spacelike block.
Matrix<double> random_lorentz(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  double b = 0.7 * nd(rng);
  Matrix<double> k = Matrix<double>::identity(n);
  k(0, 0) = std::cosh(b);
  k(0, n - 1) = std::sinh(b);
  k(n - 1, 0) = std::sinh(b);
  k(n - 1, n - 1) = std::cosh(b);
  for (std::size_t i = 0; i + 2 < n; ++i) {
    double a = nd(rng);
    Matrix<double> r = Matrix<double>::identity(n);
    r(i, i) = std::cos(a);
    r(i, i + 1) = -std::sin(a);
    r(i + 1, i) = std::sin(a);
    r(i + 1, i + 1) = std::cos(a);
    k = k * r;
  }
  return k;
}

Matrix<double> random_hprime(std::size_t n, std::mt19937_64& rng) {
  return random_aut(n, rng).transpose();
}

void check_code(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

bool is_o11(const Matrix<double>& g) {
  Matrix<double> j{{1.0, 0.0}, {0.0, -1.0}};
  return max_abs_diff(Matrix<double>(g.transpose() * j * g), j) < 1e-12;
}

}  // namespace

TEST_CASE("o11_normalize examples") {
  auto a = o11_normalize(0.0, 1.0);
  CHECK(a.lambda == 0);
  CHECK(a.a == doctest::Approx(1.0));
  CHECK(max_abs_diff(a.g, Matrix<double>::identity(2)) < 1e-15);

  auto b = o11_normalize(1.0, 1.0);
  CHECK(b.lambda == 1);
  CHECK(b.a == 1.0);
  CHECK(b.g == Matrix<double>{{-1.0, 0.0}, {0.0, 1.0}});

  auto c = o11_normalize(2.0, 1.0);
  CHECK(c.lambda == 2);
  CHECK(c.a == doctest::Approx(1.0));
  CHECK(is_o11(c.g));
  CHECK(2.0 * c.g(0, 0) + 1.0 * c.g(1, 0) == doctest::Approx(-2.0));
  CHECK(2.0 * c.g(0, 1) + 1.0 * c.g(1, 1) == doctest::Approx(1.0));

  check_code(ErrorCode::ZeroVector, [] { (void)o11_normalize(0.0, 0.0); });
}

TEST_CASE("o11_normalize on random vectors") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    double x = nd(rng);
    double y = nd(rng);
    if (trial % 10 == 0) y = (trial % 20 == 0 ? 1.0 : -1.0) * x;
    auto o = o11_normalize(x, y);
    CHECK(is_o11(o.g));
    CHECK(o.a > 0.0);
    double u = x * o.g(0, 0) + y * o.g(1, 0);
    double v = x * o.g(0, 1) + y * o.g(1, 1);
    CHECK(u == doctest::Approx(-o.lambda * o.a));
    CHECK(v == doctest::Approx(o.a));
    int expect = x * x < y * y ? 0 : 2;
    if (trial % 10 == 0) expect = 1;
    CHECK(o.lambda == expect);
  }
}

TEST_CASE("reduce_last_row") {
  auto id = reduce_last_row(Matrix<double>::identity(5));
  CHECK(id.lambda == 0);
  CHECK(max_abs_diff(id.reached, Matrix<double>::identity(5)) < 1e-15);

  std::mt19937_64 rng(32);
  for (std::size_t n = 4; n <= 7; ++n) {
    for (int lambda = 0; lambda <= 2; ++lambda) {
      // h * t_normal_form * k has the same last-row invariant as lambda
      Matrix<double> g = random_hprime(n, rng) * t_normal_form(0.7, lambda, n) * random_lorentz(n, rng);
      auto st = reduce_last_row(g);
      CHECK(st.lambda == lambda);
      auto chk = verify_witness(g, st.witness);
      CHECK_MESSAGE(chk.ok, chk.message);
      const std::size_t N = n - 1;
      CHECK(st.reached(N, 0) == -lambda);
      CHECK(st.reached(N, N) == 1.0);
      for (std::size_t j = 1; j < N; ++j) CHECK(st.reached(N, j) == 0.0);
      for (std::size_t i = 0; i < N; ++i) CHECK(st.reached(i, N) == 0.0);
    }
  }
  // transpose-inverse of the (2,0) factor
  Matrix<double> g20 = inverse(canonical_g(2.0, 0.0, 4)).transpose();
  auto st = reduce_last_row(g20);
  CHECK(st.lambda == 2);
  CHECK(verify_witness(g20, st.witness).ok);
  check_code(ErrorCode::SingularMatrix, [] { (void)reduce_last_row(Matrix<double>(4, 4)); });
}

TEST_CASE("reduce_lambda0") {
  CHECK(reduce_lambda0(Matrix<double>::identity(4)).left.empty());
  std::mt19937_64 rng(33);
  std::normal_distribution<double> nd;
  for (std::size_t n = 4; n <= 8; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      Matrix<double> g = Matrix<double>::identity(n);
      for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) {
          g(i, j) = nd(rng) + (i == j ? 3.0 : 0.0);
          if (trial % 2 && j > i) g(i, j) = 0.0;
        }
      auto w = reduce_lambda0(g);
      CHECK(w.target == Matrix<double>::identity(n));
      auto chk = verify_witness(g, w);
      CHECK_MESSAGE(chk.ok, chk.message);
      CHECK(chk.residual < 1e-12);
      // oracle: u u^T = g g^T for u = g k, k orthogonal
      Matrix<double> u = g * w.right_product(n);
      Matrix<double> gg = g * g.transpose();
      CHECK(max_abs_diff(Matrix<double>(u * u.transpose()), gg) < 1e-10);
    }
  }
  check_code(ErrorCode::NotInG0, [] { (void)reduce_lambda0(t_normal_form(0.0, 1, 4)); });
}

TEST_CASE("reduce_to_t") {
  auto zero = reduce_to_t(t_normal_form(0.0, 2, 4), 2);
  CHECK(zero.t == 0.0);
  CHECK(verify_witness(t_normal_form(0.0, 2, 4), zero.witness).ok);

  std::mt19937_64 rng(34);
  for (std::size_t n = 4; n <= 8; ++n) {
    for (int lambda = 1; lambda <= 2; ++lambda) {
      for (int trial = 0; trial < 20; ++trial) {
        Matrix<double> g = random_hprime(n, rng) * t_normal_form(2.0, lambda, n) * random_lorentz(n, rng);
        auto st = reduce_last_row(g);
        REQUIRE(st.lambda == lambda);
        auto tt = reduce_to_t(st.reached, lambda);
        CHECK(tt.t >= 0.0);
        CHECK(tt.reached == t_normal_form(tt.t, lambda, n));
        auto chk = verify_witness(st.reached, tt.witness);
        CHECK_MESSAGE(chk.ok, chk.message);
        if (lambda == 1) {
          CHECK(tt.t > 1e-6);
        } else {
          CHECK(tt.t > std::sqrt(3.0));
        }
      }
    }
  }
  // the x = 0 subcase: row 2 is (1, 0, 0, 0)
  for (int lambda = 1; lambda <= 2; ++lambda) {
    Matrix<double> g{{0, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}, {static_cast<double>(-lambda), 0, 0, 1}};
    auto tt = reduce_to_t(g, lambda);
    CHECK(std::isfinite(tt.t));
    auto chk = verify_witness(g, tt.witness);
    CHECK_MESSAGE(chk.ok, chk.message);
    // the special O(3,1) factor is used
    bool found = false;
    for (const auto& k : tt.witness.right)
      if (std::fabs(k(0, 2) - std::sqrt(lambda * lambda + 1.0)) < 1e-15) found = true;
    CHECK(found);
  }
  check_code(ErrorCode::NotInGLambda, [] { (void)reduce_to_t(Matrix<double>::identity(4), 1); });
}

TEST_CASE("reduce_lambda1") {
  for (std::size_t n : {4u, 5u, 7u}) {
    auto z = reduce_lambda1<Q>(Q(0), n);
    CHECK(z.cls == ClassPair{1, Xi::Zero});
    CHECK(z.witness.left.empty());

    auto one = reduce_lambda1<Q>(Q(1), n);
    CHECK(one.cls == ClassPair{1, Xi::One});
    CHECK(*one.s == 0.0);
    CHECK(one.witness.right[0] == Matrix<Q>::identity(n));

    for (Q t : {Q(3), Q(1), Q(Rational(1, 7)), Q(Rational(22, 5)), Q(Rational(1, 1000))}) {
      auto r = reduce_lambda1<Q>(t, n);
      CHECK(r.cls == ClassPair{1, Xi::One});
      auto chk = verify_witness(t_normal_form(t, 1, n), r.witness);
      CHECK_MESSAGE(chk.ok, chk.message);
      CHECK(chk.residual == 0.0);
      CHECK(is_lorentz(r.witness.right[0]));
    }
  }
  auto small = reduce_lambda1<double>(1e-8, 4);
  CHECK(small.cls == ClassPair{1, Xi::Zero});
  CHECK(small.near_degenerate);
  auto mid = reduce_lambda1<double>(0.37, 6);
  CHECK(verify_witness(t_normal_form(0.37, 1, 6), mid.witness).ok);
  check_code(ErrorCode::NegativeT, [] { (void)reduce_lambda1<Q>(Q(-1), 4); });
}

TEST_CASE("reduce_lambda2 examples") {
  auto w = reduce_lambda2(std::sqrt(3.0), 5);
  CHECK(w.cls == ClassPair{2, Xi::Sqrt3});
  CHECK(w.near_degenerate);

  auto a = reduce_lambda2(0.0, 4);
  CHECK(a.cls == ClassPair{2, Xi::Zero});
  CHECK(*a.s == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(verify_witness(t_normal_form(0.0, 2, 4), a.witness).ok);

  auto b = reduce_lambda2(2.0, 4);
  CHECK(b.cls == ClassPair{2, Xi::Two});
  CHECK(std::fabs(*b.s - 11.0 / 3.0) < 1e-10);
  CHECK(verify_witness(t_normal_form(2.0, 2, 4), b.witness).ok);

  check_code(ErrorCode::NegativeT, [] { (void)reduce_lambda2(-0.5, 4); });
}

TEST_CASE("lambda2 roots satisfy the equations and the quadratic oracle") {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> lo(0.0, std::sqrt(3.0) - 1e-3);
  std::uniform_real_distribution<double> hi(std::sqrt(3.0) + 1e-3, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    for (int branch = 1; branch <= 2; ++branch) {
      double t = branch == 1 ? lo(rng) : hi(rng);
      auto root = lambda2_root(branch, t);
      CHECK(root.root >= 5.0L / 3.0L);
      CHECK(std::fabs(static_cast<double>(lambda2_equation(branch, root.root, t))) <= 1e-12);
      // squared equation: p s^2 + q s + r = 0
      double s = static_cast<double>(root.root);
      double p, q, r;
      if (branch == 1) {
        p = 27 - 9 * t * t;
        q = 24 * t * t - 72;
        r = 45 - 16 * t * t;
      } else {
        double u = (3 + 2 * t) * (3 + 2 * t);
        double v = (t + 2) * (t + 2);
        p = 3 * u - 9 * v;
        q = -8 * u + 24 * v;
        r = 5 * u - 16 * v;
      }
      double disc = std::sqrt(q * q - 4 * p * r);
      double s1 = (-q + disc) / (2 * p);
      double s2 = (-q - disc) / (2 * p);
      double best = std::min(std::fabs(s - s1), std::fabs(s - s2));
      CHECK(best <= 1e-8 * std::max(1.0, s));

      auto br = reduce_lambda2(t, 5);
      auto chk = verify_witness(t_normal_form(t, 2, 5), br.witness);
      CHECK_MESSAGE(chk.ok, chk.message);
    }
  }
}

TEST_CASE("classify_by_invariants examples") {
  for (std::size_t n = 4; n <= 8; ++n) {
    auto a = classify_by_invariants(canonical_metric<Q>({2, Xi::Sqrt3}, n).metric);
    CHECK(a.cls == ClassPair{2, Xi::Sqrt3});
    CHECK(a.center == SignatureTriple{n - 3, 0, 1});
    CHECK(a.derived == SignatureTriple{1, 0, 0});
    auto b = classify_by_invariants(canonical_metric<Q>({0, Xi::Zero}, n).metric);
    CHECK(b.cls == ClassPair{0, Xi::Zero});
    CHECK(b.center == SignatureTriple{n - 3, 1, 0});
    CHECK(b.derived == SignatureTriple{0, 1, 0});
    auto c = classify_by_invariants(canonical_metric<Q>({1, Xi::Zero}, n).metric);
    CHECK(c.cls == ClassPair{1, Xi::Zero});
    CHECK(c.center == SignatureTriple{n - 3, 0, 1});
    CHECK(c.derived == SignatureTriple{0, 0, 1});
    for (const auto& cls : all_classes()) {
      CHECK(classify_by_invariants(canonical_metric<Q>(cls, n).metric).cls == cls);
      CHECK(classify_by_invariants(Metric<double>(to_double(canonical_metric<Q>(cls, n).metric.gram()))).cls == cls);
    }
  }
}

TEST_CASE("classify is idempotent on representatives") {
  for (const auto& cls : all_classes()) {
    for (std::size_t n = 4; n <= 8; ++n) {
      auto cm = canonical_metric<Q>(cls, n);
      auto e = classify(cm.metric);
      CHECK(e.cls == cls);
      CHECK(e.k == 1.0);
      REQUIRE(e.exact_witness);
      auto chk = verify_witness(*e.exact_g, *e.exact_witness);
      CHECK_MESSAGE(chk.ok, chk.message);
      auto d = classify(Metric<double>(to_double(cm.metric.gram())));
      CHECK(d.cls == cls);
      CHECK(d.k == doctest::Approx(1.0));
      CHECK(verify_witness(d.g, d.witness).ok);
    }
  }
}

TEST_CASE("classify: orbit invariance, cross-oracle agreement, witness soundness") {
  std::mt19937_64 rng(36);
  for (const auto& cls : all_classes()) {
    for (std::size_t n = 4; n <= 8; ++n) {
      CAPTURE(cls.str());
      CAPTURE(n);
      for (int trial = 0; trial < 40; ++trial) {
        Metric<double> m(random_orbit_point(cls, n, rng));
        auto r = classify(m);
        CHECK(r.cls == cls);
        CHECK(r.pipeline_cls == cls);
        CHECK(classify_by_invariants(m).cls == cls);
        CHECK_FALSE(r.has_flag(Flag::ClassifierDisagreement));
        auto chk = verify_witness(r.g, r.witness);
        CHECK_MESSAGE(chk.ok, chk.message);
        CHECK(chk.residual <= 1e-8);

        // the frame is pseudo-orthonormal for k M and carries the normal-form brackets
        CHECK(r.k > 0.0);
        CHECK(is_pseudo_orthonormal(r.frame, m.gram(), 1e-6));
        BlockPattern pat(n);
        CHECK(pat.contains(r.phi, 1e-8 * max_abs(r.phi)));
        auto h = build_algebra<double>(n).change_basis(r.frame.columns);
        double l = cls.lambda_value<double>();
        double x = cls.xi_value<double>();
        CHECK(h.c(0, 1, 0) == doctest::Approx(-l).epsilon(1e-6));
        CHECK(h.c(0, 1, n - 1) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(h.c(1, n - 2, 0) == doctest::Approx(x * l).epsilon(1e-6));
        CHECK(h.c(1, n - 1, 0) == doctest::Approx(l * l).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("classify on exact non-canonical input") {
  const std::size_t n = 5;
  Matrix<Q> phi = Matrix<Q>::identity(n);
  phi(0, 0) = Q(2);
  phi(1, 0) = Q(Rational(1, 3));
  phi(3, 0) = Q(-1);
  phi(4, 2) = Q(5);
  phi(4, 4) = Q(2);
  for (const auto& cls : all_classes()) {
    Metric<Q> m(act(phi, canonical_metric<Q>(cls, n).metric.gram()));
    auto r = classify(m);
    CHECK(r.cls == cls);
    CHECK(r.backend == "exact");
    CHECK_FALSE(r.exact_witness);
    CHECK(verify_witness(r.g, r.witness).ok);
  }
  check_code(ErrorCode::WrongSignature, [] { (void)classify(Metric<double>(Matrix<double>::identity(4))); });
}

TEST_CASE("verify_witness examples") {
  Witness<double> empty;
  empty.target = Matrix<double>::identity(4);
  auto a = verify_witness(Matrix<double>::identity(4), empty);
  CHECK(a.ok);
  CHECK(a.residual == 0.0);

  auto r = classify(Metric<double>(to_double(canonical_metric<Q>({2, Xi::Zero}, 6).metric.gram())));
  auto b = verify_witness(r.g, r.witness);
  CHECK(b.ok);
  CHECK(b.residual < 1e-8);

  std::mt19937_64 rng(37);
  Metric<double> m(random_orbit_point({2, Xi::Two}, 6, rng));
  auto c = classify(m);
  REQUIRE(verify_witness(c.g, c.witness).ok);
  auto bad = c.witness;
  bad.right[0](0, 0) += 1e-3;
  CHECK_FALSE(verify_witness(c.g, bad).ok);
  auto bad2 = c.witness;
  bad2.left.back()(0, 1) += 1e-3;
  CHECK_FALSE(verify_witness(c.g, bad2).ok);
}
