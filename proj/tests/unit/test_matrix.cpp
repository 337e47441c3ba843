#include "doctest.h"

#include <random>

#include "metriclass/matrix.hpp"

using namespace metriclass;

TEST_CASE_TEMPLATE("identity products", T, double, QSqrt3) {
  Matrix<T> a{{T(1), T(2)}, {T(3), T(4)}};
  CHECK(a * Matrix<T>::identity(2) == a);
  CHECK(Matrix<T>::identity(2) * a == a);
  CHECK(a.transpose().transpose() == a);
}

TEST_CASE("exact inverse and determinant") {
  Matrix<QSqrt3> a{{QSqrt3(2), QSqrt3::sqrt3(), QSqrt3(0)},
                   {QSqrt3(1), QSqrt3(1), QSqrt3(Rational(1, 2))},
                   {QSqrt3(0), QSqrt3(3), QSqrt3(-1)}};
  auto inv = inverse(a);
  CHECK(a * inv == Matrix<QSqrt3>::identity(3));
  CHECK(inv * a == Matrix<QSqrt3>::identity(3));
  // cofactor expansion along the first row
  QSqrt3 det = QSqrt3(2) * (QSqrt3(-1) - QSqrt3(Rational(3, 2))) - QSqrt3::sqrt3() * QSqrt3(-1);
  CHECK(determinant(a) == det);
}

TEST_CASE("singular matrix is rejected") {
  Matrix<QSqrt3> a{{QSqrt3(1), QSqrt3(2)}, {QSqrt3(2), QSqrt3(4)}};
  CHECK(rank(a) == 1);
  try {
    (void)inverse(a);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
  }
  CHECK(determinant(a).is_zero());
}

TEST_CASE("nullspace vectors are annihilated") {
  Matrix<QSqrt3> a{{QSqrt3(1), QSqrt3(2), QSqrt3(3), QSqrt3(4)},
                   {QSqrt3(2), QSqrt3(4), QSqrt3(6), QSqrt3(8)},
                   {QSqrt3(0), QSqrt3(1), QSqrt3::sqrt3(), QSqrt3(0)}};
  auto ns = nullspace(a);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) {
    auto av = a * v;
    for (const auto& x : av) CHECK(x.is_zero());
  }
}

TEST_CASE("floating rank with tolerance") {
  Matrix<double> a{{1.0, 2.0}, {2.0, 4.0 + 1e-14}};
  CHECK(rank(a, 1e-9) == 1);
  Matrix<double> b{{1.0, 2.0}, {2.0, 4.1}};
  CHECK(rank(b, 1e-9) == 2);
}

TEST_CASE("random floating inverse") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix<double> a(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) a(i, j) = nd(rng) + (i == j ? 4.0 : 0.0);
    CHECK(max_abs_diff(a * inverse(a), Matrix<double>::identity(6)) < 1e-12);
  }
}

TEST_CASE("solve detects inconsistency") {
  Matrix<QSqrt3> a{{QSqrt3(1), QSqrt3(1)}, {QSqrt3(2), QSqrt3(2)}};
  CHECK_FALSE(solve(a, Vec<QSqrt3>{QSqrt3(1), QSqrt3(3)}).has_value());
  auto x = solve(a, Vec<QSqrt3>{QSqrt3(1), QSqrt3(2)});
  REQUIRE(x.has_value());
  CHECK(a * *x == Vec<QSqrt3>{QSqrt3(1), QSqrt3(2)});
}
