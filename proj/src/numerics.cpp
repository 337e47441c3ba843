#include "metriclass/numerics.hpp"

#include <cctype>
#include <cstdlib>
#include <regex>

namespace metriclass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::SqrtOfNegative: return "SqrtOfNegative";
    case ErrorCode::SqrtUnsupportedExact: return "SqrtUnsupportedExact";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DependentBasis: return "DependentBasis";
    case ErrorCode::NotARepresentative: return "NotARepresentative";
    case ErrorCode::WrongSignature: return "WrongSignature";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotInG0: return "NotInG0";
    case ErrorCode::NotInGLambda: return "NotInGLambda";
    case ErrorCode::NegativeT: return "NegativeT";
    case ErrorCode::NoTableMatch: return "NoTableMatch";
    case ErrorCode::FrameNotPseudoOrthonormal: return "FrameNotPseudoOrthonormal";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::EvidenceFailure: return "EvidenceFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Tolerances default_tolerances() {
  Tolerances t;
  if (const char* env = std::getenv("METRICLASS_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0) t.tol = v;
  }
  return t;
}

std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::Negative: return "negative";
    case Sign::Zero: return "zero";
    case Sign::Positive: return "positive";
  }
  return "?";
}

Sign sign_with_tol(double x, double tol) {
  if (std::fabs(x) <= tol) return Sign::Zero;
  return x < 0 ? Sign::Negative : Sign::Positive;
}

// ---------------------------------------------------------------------------

int QSqrt3::sign() const {
  int sa = a_.sign();
  int sb = b_.sign();
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // opposite signs: compare a^2 with 3 b^2
  Rational lhs = a_ * a_;
  Rational rhs = 3 * b_ * b_;
  if (lhs == rhs) return 0;  // impossible for b != 0, kept for completeness
  return lhs > rhs ? sa : sb;
}

double QSqrt3::to_double() const {
  return a_.convert_to<double>() + b_.convert_to<double>() * std::sqrt(3.0);
}

QSqrt3& QSqrt3::operator+=(const QSqrt3& o) {
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QSqrt3& QSqrt3::operator-=(const QSqrt3& o) {
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QSqrt3& QSqrt3::operator*=(const QSqrt3& o) {
  Rational a = a_ * o.a_ + 3 * b_ * o.b_;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

QSqrt3& QSqrt3::operator/=(const QSqrt3& o) {
  if (o.is_zero()) throw Error(ErrorCode::DivisionByZero, "QSqrt3 division by zero");
  // x / y = x * conj(y) / norm(y)
  Rational n = o.norm();
  *this *= o.conjugate();
  a_ /= n;
  b_ /= n;
  return *this;
}

std::string rational_str(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  static const std::regex re(R"(^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw Error(ErrorCode::ParseError, "bad rational '" + text + "'");
  BigInt num(m[1].str());
  BigInt den = m[2].matched ? BigInt(m[2].str()) : BigInt(1);
  if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + text + "'");
  return Rational(num, den);
}

std::string QSqrt3::str() const {
  if (b_ == 0) return rational_str(a_);
  std::string radical;
  if (b_ == 1) {
    radical = "sqrt3";
  } else if (b_ == -1) {
    radical = "-sqrt3";
  } else {
    radical = rational_str(b_) + "*sqrt3";
  }
  if (a_ == 0) return radical;
  std::string out = rational_str(a_);
  if (radical.front() != '-') out += "+";
  return out + radical;
}

QSqrt3 QSqrt3::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  const std::string radical = "sqrt3";
  auto at = s.find(radical);
  if (at == std::string::npos) return QSqrt3(parse_rational(s));
  if (at + radical.size() != s.size() || s.find(radical, at + 1) != std::string::npos) {
    throw Error(ErrorCode::ParseError, "bad Q(sqrt3) literal '" + text + "'");
  }
  std::string head = s.substr(0, at);
  std::string rational_part;
  std::string coefficient = "1";
  char sign = '+';
  if (!head.empty() && head.back() == '*') {
    head.pop_back();
    std::size_t p = head.size();
    while (p > 0 && (std::isdigit(static_cast<unsigned char>(head[p - 1])) || head[p - 1] == '/')) --p;
    if (p == head.size()) throw Error(ErrorCode::ParseError, "missing coefficient in '" + text + "'");
    coefficient = head.substr(p);
    if (p > 0) {
      sign = head[p - 1];
      if (sign != '+' && sign != '-') throw Error(ErrorCode::ParseError, "bad literal '" + text + "'");
      rational_part = head.substr(0, p - 1);
    }
  } else if (!head.empty()) {
    sign = head.back();
    if (sign != '+' && sign != '-') throw Error(ErrorCode::ParseError, "bad literal '" + text + "'");
    rational_part = head.substr(0, head.size() - 1);
  }
  Rational a = rational_part.empty() ? Rational(0) : parse_rational(rational_part);
  Rational b = parse_rational(coefficient);
  if (sign == '-') b = -b;
  return QSqrt3(a, b);
}

namespace {

std::optional<Rational> rational_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  BigInt sn = boost::multiprecision::sqrt(num);
  BigInt sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

}  // namespace

QSqrt3 sqrt(const QSqrt3& x) {
  if (x.sign() < 0) throw Error(ErrorCode::SqrtOfNegative, x.str());
  if (x.is_zero()) return x;
  const Rational& a = x.rational_part();
  const Rational& b = x.sqrt3_part();
  // (p + q sqrt3)^2 = p^2 + 3 q^2 + 2 p q sqrt3
  // => p^2 = (a +- sqrt(a^2 - 3 b^2)) / 2
  if (auto d = rational_sqrt(a * a - 3 * b * b)) {
    for (const Rational& p2 : {(a + *d) / 2, (a - *d) / 2}) {
      auto p = rational_sqrt(p2);
      if (!p) continue;
      Rational q;
      if (*p != 0) {
        q = b / (2 * *p);
      } else {
        auto q2 = rational_sqrt(a / 3);
        if (!q2) continue;
        q = *q2;
      }
      QSqrt3 cand(*p, q);
      if (cand.sign() < 0) cand = -cand;
      if (cand * cand == x) return cand;
    }
  }
  throw Error(ErrorCode::SqrtUnsupportedExact, x.str() + " is not a square in Q(sqrt3)");
}

Rational rationalize(double x, std::int64_t max_den) {
  // continued fraction convergents
  long double v = x;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int i = 0; i < 64; ++i) {
    long double fl = std::floor(v);
    if (std::fabs(fl) > 1e15L) break;
    auto a = static_cast<std::int64_t>(fl);
    std::int64_t p2 = a * p1 + p0;
    std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    long double frac = v - fl;
    if (frac < 1e-15L) break;
    v = 1.0L / frac;
  }
  if (q1 == 0) return Rational(static_cast<std::int64_t>(std::llround(x)));
  return Rational(p1, q1);
}

}  // namespace metriclass
