#include "doctest.h"

#include <random>

#include "metriclass/numerics.hpp"

using namespace metriclass;

TEST_CASE("qsqrt3 difference of squares") {
  QSqrt3 a(Rational(1), Rational(1));
  QSqrt3 b(Rational(1), Rational(-1));
  CHECK(a * b == QSqrt3(-2));
  CHECK((a * b).is_rational());
}

TEST_CASE("qsqrt3 square of sqrt3") {
  CHECK(QSqrt3::sqrt3() * QSqrt3::sqrt3() == QSqrt3(3));
}

TEST_CASE("qsqrt3 reciprocal of 1+sqrt3") {
  QSqrt3 x(Rational(1), Rational(1));
  QSqrt3 inv = QSqrt3(1) / x;
  CHECK(inv == QSqrt3(Rational(-1, 2), Rational(1, 2)));
  CHECK(inv * x == QSqrt3(1));
}

TEST_CASE("qsqrt3 division by zero throws") {
  try {
    (void)(QSqrt3(1) / QSqrt3(0));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("qsqrt3 exact sign") {
  CHECK(QSqrt3(Rational(2), Rational(-1)).sign() == 1);   // 2 - sqrt3
  CHECK(QSqrt3(Rational(-2), Rational(1)).sign() == -1);
  CHECK(QSqrt3(Rational(7, 4), Rational(-1)).sign() == 1);  // 1.75 > 1.732
  CHECK(QSqrt3(Rational(17, 10), Rational(-1)).sign() == -1);
  CHECK(QSqrt3(0).sign() == 0);
  CHECK(QSqrt3::sqrt3() < QSqrt3(2));
  CHECK(QSqrt3(1) < QSqrt3::sqrt3());
}

TEST_CASE("qsqrt3 text round trip") {
  const std::vector<QSqrt3> values = {
      QSqrt3(0),
      QSqrt3(-7),
      QSqrt3(Rational(3, 4)),
      QSqrt3::sqrt3(),
      -QSqrt3::sqrt3(),
      QSqrt3(Rational(0), Rational(-5, 3)),
      QSqrt3(Rational(1, 2), Rational(1, 2)),
      QSqrt3(Rational(-1, 2), Rational(-2)),
      QSqrt3(Rational(2), Rational(1)),
  };
  for (const auto& v : values) {
    CAPTURE(v.str());
    CHECK(QSqrt3::parse(v.str()) == v);
  }
  CHECK(QSqrt3::sqrt3().str() == "sqrt3");
  CHECK(QSqrt3(Rational(-1, 2), Rational(1, 2)).str() == "-1/2+1/2*sqrt3");
  CHECK(QSqrt3::parse(" 1 / 2 - sqrt3 ") == QSqrt3(Rational(1, 2), Rational(-1)));
  CHECK(QSqrt3::parse("2*sqrt3") == QSqrt3(Rational(0), Rational(2)));
  CHECK_THROWS_AS(QSqrt3::parse("1.5"), Error);
  CHECK_THROWS_AS(QSqrt3::parse("sqrt3sqrt3"), Error);
  CHECK_THROWS_AS(QSqrt3::parse("1/0"), Error);
  CHECK_THROWS_AS(QSqrt3::parse("abc"), Error);
}

TEST_CASE("qsqrt3 field round trip on random sample") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(-40, 40);
  std::uniform_int_distribution<int> den(1, 12);
  auto draw = [&] {
    return QSqrt3(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
  };
  for (int i = 0; i < 500; ++i) {
    QSqrt3 x = draw();
    QSqrt3 y = draw();
    if (y.is_zero()) continue;
    CHECK((x * y) / y == x);
    CHECK((x + y) - y == x);
  }
}

TEST_CASE("exact sqrt") {
  CHECK(sqrt(QSqrt3(4)) == QSqrt3(2));
  CHECK(sqrt(QSqrt3(Rational(9, 4))) == QSqrt3(Rational(3, 2)));
  CHECK(sqrt(QSqrt3(3)) == QSqrt3::sqrt3());
  // (1 + sqrt3)^2 = 4 + 2 sqrt3
  CHECK(sqrt(QSqrt3(Rational(4), Rational(2))) == QSqrt3(Rational(1), Rational(1)));
  // (2 - sqrt3)^2 = 7 - 4 sqrt3
  CHECK(sqrt(QSqrt3(Rational(7), Rational(-4))) == QSqrt3(Rational(2), Rational(-1)));
  try {
    (void)sqrt(QSqrt3(2));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SqrtUnsupportedExact);
  }
  CHECK_THROWS_AS(sqrt(QSqrt3(-1)), Error);
}

TEST_CASE("approx sqrt clamps tiny negatives") {
  CHECK(ScalarTraits<double>::sqrt(-1e-12, 1e-9) == 0.0);
  try {
    (void)ScalarTraits<double>::sqrt(-1e-3, 1e-9);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SqrtOfNegative);
  }
}

TEST_CASE("sign_with_tol") {
  CHECK(sign_with_tol(0.0, 1e-9) == Sign::Zero);
  CHECK(sign_with_tol(1e-12, 1e-9) == Sign::Zero);
  CHECK(sign_with_tol(-0.5, 1e-9) == Sign::Negative);
  CHECK(sign_with_tol(1e-9, 1e-9) == Sign::Zero);
  CHECK(sign_with_tol(2e-9, 1e-9) == Sign::Positive);
}

TEST_CASE("sign_with_tol is monotone") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3e-9, 3e-9);
  for (int i = 0; i < 2000; ++i) {
    double x = u(rng);
    double y = u(rng);
    if (x > y) std::swap(x, y);
    CHECK(static_cast<int>(sign_with_tol(x, 1e-9)) <= static_cast<int>(sign_with_tol(y, 1e-9)));
  }
}

TEST_CASE("bisect sqrt2") {
  auto r = bisect_root<double>([](double s) { return s * s - 2.0; }, 1.0, 2.0, 1e-12);
  CHECK(r.root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.residual <= 1e-12);
  CHECK(r.root >= 1.0);
  CHECK(r.root <= 2.0);
  CHECK(r.iterations <= 200);
}

namespace {
long double phi(long double s) {
  long double v = 3 * s * s - 8 * s + 5;
  return std::sqrt(v < 0 ? 0.0L : v);
}
}  // namespace

TEST_CASE("bisect lands on 5/3 at the bracket end") {
  auto r = bisect_root<long double>([](long double s) { return 3 * phi(s); }, 5.0L / 3, 10.0L, 1e-12L);
  CHECK(std::fabs(r.root - 5.0L / 3) <= 1e-10L);
  CHECK(r.residual <= 1e-12L);
}

TEST_CASE("bisect finds 11/3") {
  auto f = [](long double s) {
    return 3 * phi(s) - 2 * (3 * s - 4) - 2 * (-2 * phi(s) + 3 * s - 4);
  };
  auto r = bisect_root<long double>(f, 5.0L / 3, 10.0L, 1e-12L);
  // quadratic oracle: 3s^2 - 8s - 11 = 0, positive root (8 + sqrt(64 + 132)) / 6
  long double oracle = (8.0L + std::sqrt(64.0L + 132.0L)) / 6.0L;
  CHECK(std::fabs(oracle - 11.0L / 3) < 1e-15L);
  CHECK(std::fabs(r.root - oracle) <= 1e-10L);
  CHECK(std::fabs(f(r.root)) <= 1e-12L);
}

TEST_CASE("bisect errors") {
  auto f = [](double s) { return s * s + 1.0; };
  try {
    (void)bisect_root<double>(f, -1.0, 1.0, 1e-12);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSignChange);
  }
  CHECK_THROWS_AS(bisect_root<double>(f, 1.0, -1.0, 1e-12), Error);
  try {
    (void)bisect_root<double>([](double s) { return s > 0 ? 1.0 : -1.0; }, -1.0, 2.0, 1e-12);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}

TEST_CASE("rationalize recovers small fractions") {
  CHECK(rationalize(0.5, 1000) == Rational(1, 2));
  CHECK(rationalize(-4.5, 1000) == Rational(-9, 2));
  CHECK(rationalize(11.0 / 3.0, 1000) == Rational(11, 3));
  CHECK(rationalize(0.0, 1000) == Rational(0));
}
