#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "metriclass/error.hpp"

namespace metriclass {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

/// Tolerances for the floating point backend. The exact backend ignores them.
struct Tolerances {
  double tol = 1e-9;         // sign classification
  double root_eps = 1e-12;   // residual bound for bisection roots
  double near_band = 1e-3;   // relative distance to a wall that raises NearDegenerate
  double witness_tol = 1e-8; // max entrywise residual accepted by witness checks
};

/// Reads METRICLASS_TOL if set; otherwise returns the defaults.
Tolerances default_tolerances();

// ---------------------------------------------------------------------------
// Exact scalars a + b*sqrt(3), a, b rational.
// ---------------------------------------------------------------------------

class QSqrt3 {
 public:
  QSqrt3() = default;
  QSqrt3(int a) : a_(a) {}  // NOLINT(google-explicit-constructor)
  QSqrt3(Rational a) : a_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  QSqrt3(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

  static QSqrt3 sqrt3() { return QSqrt3(Rational(0), Rational(1)); }
  static QSqrt3 fraction(std::int64_t num, std::int64_t den) {
    return QSqrt3(Rational(num, den));
  }

  const Rational& rational_part() const { return a_; }
  const Rational& sqrt3_part() const { return b_; }
  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  /// Exact sign: -1, 0 or +1.
  int sign() const;
  double to_double() const;

  QSqrt3 conjugate() const { return QSqrt3(a_, -b_); }
  /// a^2 - 3 b^2, the field norm.
  Rational norm() const { return a_ * a_ - 3 * b_ * b_; }

  QSqrt3 operator-() const { return QSqrt3(-a_, -b_); }
  QSqrt3& operator+=(const QSqrt3& o);
  QSqrt3& operator-=(const QSqrt3& o);
  QSqrt3& operator*=(const QSqrt3& o);
  QSqrt3& operator/=(const QSqrt3& o);

  friend QSqrt3 operator+(QSqrt3 x, const QSqrt3& y) { return x += y; }
  friend QSqrt3 operator-(QSqrt3 x, const QSqrt3& y) { return x -= y; }
  friend QSqrt3 operator*(QSqrt3 x, const QSqrt3& y) { return x *= y; }
  friend QSqrt3 operator/(QSqrt3 x, const QSqrt3& y) { return x /= y; }

  friend bool operator==(const QSqrt3& x, const QSqrt3& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend bool operator!=(const QSqrt3& x, const QSqrt3& y) { return !(x == y); }
  friend bool operator<(const QSqrt3& x, const QSqrt3& y) { return (x - y).sign() < 0; }
  friend bool operator>(const QSqrt3& x, const QSqrt3& y) { return y < x; }
  friend bool operator<=(const QSqrt3& x, const QSqrt3& y) { return !(y < x); }
  friend bool operator>=(const QSqrt3& x, const QSqrt3& y) { return !(x < y); }

  /// Canonical text form: "p", "p/q", "sqrt3", "-r/s*sqrt3", "p/q+r/s*sqrt3".
  std::string str() const;
  /// Inverse of str(); also accepts integers, decimals are rejected.
  static QSqrt3 parse(const std::string& text);

  friend std::ostream& operator<<(std::ostream& os, const QSqrt3& x) { return os << x.str(); }

 private:
  Rational a_{0};
  Rational b_{0};
};

/// Square root inside Q(sqrt3); throws SqrtUnsupportedExact when the value is
/// not a perfect square in the field and SqrtOfNegative for negative input.
QSqrt3 sqrt(const QSqrt3& x);

std::string rational_str(const Rational& r);
Rational parse_rational(const std::string& text);
/// Best rational approximation with denominator <= max_den (continued fractions).
Rational rationalize(double x, std::int64_t max_den);

// ---------------------------------------------------------------------------
// Backend traits.
// ---------------------------------------------------------------------------

enum class Sign { Negative = -1, Zero = 0, Positive = 1 };

std::string_view to_string(Sign s);

/// Zero iff |x| <= tol.
Sign sign_with_tol(double x, double tol);

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "approx";
  static double from_int(long v) { return static_cast<double>(v); }
  static double from_qsqrt3(const QSqrt3& v) { return v.to_double(); }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
  static Sign sign(double v, double tol) { return sign_with_tol(v, tol); }
  static bool is_zero(double v, double tol) { return std::fabs(v) <= tol; }
  /// Clamps [-tol, 0) to zero; throws below that.
  static double sqrt(double v, double tol) {
    if (v < -tol) throw Error(ErrorCode::SqrtOfNegative, std::to_string(v));
    return std::sqrt(v < 0.0 ? 0.0 : v);
  }
  static double sqrt3() { return std::sqrt(3.0); }
};

template <>
struct ScalarTraits<QSqrt3> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static QSqrt3 from_int(long v) { return QSqrt3(Rational(v)); }
  static QSqrt3 from_qsqrt3(const QSqrt3& v) { return v; }
  static double to_double(const QSqrt3& v) { return v.to_double(); }
  static QSqrt3 abs(const QSqrt3& v) { return v.sign() < 0 ? -v : v; }
  static Sign sign(const QSqrt3& v, double /*tol*/) { return static_cast<Sign>(v.sign()); }
  static bool is_zero(const QSqrt3& v, double /*tol*/) { return v.is_zero(); }
  static QSqrt3 sqrt(const QSqrt3& v, double /*tol*/) { return metriclass::sqrt(v); }
  static QSqrt3 sqrt3() { return QSqrt3::sqrt3(); }
};

template <class T>
inline T scalar_div(const T& x, const T& y, double tol = 0.0) {
  if (ScalarTraits<T>::is_zero(y, tol)) throw Error(ErrorCode::DivisionByZero, "scalar division");
  return x / y;
}

// ---------------------------------------------------------------------------
// Certified bisection.
// ---------------------------------------------------------------------------

template <class Real>
struct RootResult {
  Real root;
  Real residual;
  int iterations;
};

/// Midpoint bisection on a bracket with f(lo) * f(hi) <= 0. The returned root
/// lies in [lo, hi] and satisfies |f(root)| <= eps; at most max_iter halvings.
template <class Real>
RootResult<Real> bisect_root(const std::function<Real(Real)>& f, Real lo, Real hi, Real eps,
                             int max_iter = 200) {
  if (!(lo < hi)) throw Error(ErrorCode::NoSignChange, "empty bracket");
  Real flo = f(lo);
  Real fhi = f(hi);
  if (std::fabs(flo) <= eps) return {lo, std::fabs(flo), 0};
  if (std::fabs(fhi) <= eps) return {hi, std::fabs(fhi), 0};
  if ((flo < 0) == (fhi < 0)) throw Error(ErrorCode::NoSignChange, "f(lo) and f(hi) share a sign");

  for (int it = 1; it <= max_iter; ++it) {
    Real mid = lo + (hi - lo) / 2;
    Real fmid = f(mid);
    if (std::fabs(fmid) <= eps) return {mid, std::fabs(fmid), it};
    if (mid <= lo || mid >= hi) break;  // bracket exhausted at machine precision
    if ((fmid < 0) == (flo < 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorCode::NoConvergence, "bisection residual above eps");
}

}  // namespace metriclass
