#include "doctest.h"

#include <random>

#include "metriclass/serialize.hpp"

using namespace metriclass;

namespace {

using Q = QSqrt3;

void check_code(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("class pairs") {
  CHECK(class_to_json({2, Xi::Sqrt3}).dump() == R"({"lambda":2,"xi":"sqrt3"})");
  CHECK(class_to_json({0, Xi::Zero}).dump() == R"({"lambda":0,"xi":0})");
  for (const auto& c : all_classes()) CHECK(class_from_json(class_to_json(c)) == c);
  check_code(ErrorCode::NotARepresentative, [] { (void)class_from_json(json{{"lambda", 3}, {"xi", 3}}); });
  check_code(ErrorCode::ParseError, [] { (void)class_from_json(json{{"lambda", 2}}); });
}

TEST_CASE("exact scalars") {
  CHECK(scalar_to_json(Q(Rational(-1, 2))) == "-1/2");
  CHECK(scalar_to_json(Q(Rational(1, 2), Rational(-3, 4))) == "1/2-3/4*sqrt3");
  CHECK(exact_from_json(json(3)) == Q(3));
  CHECK(exact_from_json(json("2+sqrt3")) == Q(2) + Q::sqrt3());
  check_code(ErrorCode::ParseError, [] { (void)exact_from_json(json(0.5)); });
  check_code(ErrorCode::ParseError, [] { (void)exact_from_json(json("pi")); });
  CHECK(double_from_json(json("sqrt3")) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("metric documents") {
  for (const auto& c : all_classes()) {
    auto m = canonical_metric<Q>(c, 5).metric;
    auto j = metric_to_json(m);
    CHECK(j.at("backend") == "exact");
    CHECK(j.at("n") == 5);
    auto back = std::get<Metric<Q>>(metric_from_json(j));
    CHECK(back == m);
    CHECK(canonical_dump(metric_to_json(back)) == canonical_dump(j));
  }
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Matrix<double> g = Matrix<double>::identity(6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 6; ++k) g(i, k) += 0.3 * nd(rng);
  Metric<double> m(act(g, lorentz_form<double>(6)));
  auto j = metric_to_json(m);
  auto text = canonical_dump(j);
  auto back = std::get<Metric<double>>(parse_metric(text));
  CHECK(back.gram() == m.gram());
  CHECK(canonical_dump(metric_to_json(back)) == text);

  // backend override and mixed entry types
  auto exact = parse_metric(R"({"n":4,"gram":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,"-1"]],"backend":"approx"})", "exact");
  CHECK(std::holds_alternative<Metric<Q>>(exact));
  auto approx = parse_metric(R"({"n":4,"gram":[[1,0,0,0],[0,"sqrt3",0,0],[0,0,1,0],[0,0,0,-1]]})");
  CHECK(std::get<Metric<double>>(approx).gram()(1, 1) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("metric document errors") {
  check_code(ErrorCode::ParseError, [] { (void)parse_metric("{\"n\": 4, \"gram\": [[1,0"); });
  check_code(ErrorCode::ParseError, [] { (void)parse_metric(R"({"n":4})"); });
  check_code(ErrorCode::ParseError,
             [] { (void)parse_metric(R"({"gram":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,-1]],"backend":"fast"})"); });
  check_code(ErrorCode::ParseError,
             [] { (void)parse_metric(R"({"gram":[[1,0,0,0],[0,1,0,0],[0,0,0.5,0],[0,0,0,-1]],"backend":"exact"})"); });
  check_code(ErrorCode::DimensionMismatch,
             [] { (void)parse_metric(R"({"n":5,"gram":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,-1]]})"); });
  check_code(ErrorCode::DimensionMismatch,
             [] { (void)parse_metric(R"({"n":4,"gram":[[1,0,0,0],[0,1,0],[0,0,1,0],[0,0,0,-1]]})"); });
  check_code(ErrorCode::DimensionTooSmall, [] { (void)parse_metric(R"({"n":3,"gram":[[1,0,0],[0,1,0],[0,0,-1]]})"); });
  check_code(ErrorCode::AsymmetricInput,
             [] { (void)parse_metric(R"({"n":4,"gram":[[1,1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,-1]]})"); });
  auto msg = error_text([] {
    (void)parse_metric(
        R"({"n":5,"gram":[[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1]],"backend":"exact"})");
  });
  CHECK(msg.find("signature (5,0) unsupported") != std::string::npos);
}

TEST_CASE("classification round trip") {
  auto exact = classify(canonical_metric<Q>({2, Xi::Sqrt3}, 5).metric);
  auto j = classification_to_json(exact);
  CHECK(j.at("lambda") == 2);
  CHECK(j.at("xi") == "sqrt3");
  CHECK(j.at("exact_witness").is_object());
  CHECK(canonical_dump(classification_to_json(classification_from_json(j))) == canonical_dump(j));

  Matrix<double> g = Matrix<double>::identity(6);
  g(0, 1) = 0.4;
  g(2, 5) = -0.7;
  g(0, 0) = 2.0;
  auto m = act(g, canonical_metric<double>({2, Xi::Two}, 6).metric.gram());
  auto approx = classify(Metric<double>(m));
  auto ja = classification_to_json(approx);
  CHECK(ja.at("xi") == 2);
  CHECK(ja.at("backend") == "approx");
  auto back = classification_from_json(ja);
  CHECK(back.witness.left.size() == approx.witness.left.size());
  CHECK(canonical_dump(classification_to_json(back)) == canonical_dump(ja));
}

TEST_CASE("curvature report round trip") {
  for (std::size_t n : {4u, 5u})
    for (const auto& c : all_classes()) {
      auto rep = curvature_report(c, n);
      auto j = curvature_to_json(rep);
      auto back = curvature_from_json(j);
      CHECK(back.tables.u == rep.tables.u);
      CHECK(back.tables.nabla == rep.tables.nabla);
      CHECK(back.tables.r == rep.tables.r);
      CHECK(back.tables.ric == rep.tables.ric);
      CHECK(canonical_dump(curvature_to_json(back)) == canonical_dump(j));
    }
  auto j10 = curvature_to_json(curvature_report({1, Xi::Zero}, 4));
  CHECK(j10.contains("U[0][0]"));
  CHECK_FALSE(j10.contains("R[0][1]"));
  CHECK(j10.at("flat") == true);
  auto j2s = curvature_to_json(curvature_report({2, Xi::Sqrt3}, 4));
  CHECK(j2s.at("xi") == "sqrt3");
  CHECK(j2s.at("soliton").at("c").is_string());
}

TEST_CASE("orbit report and graph round trip") {
  for (const auto& c : all_classes()) {
    auto r = orbit_report(c, 6);
    auto j = orbit_to_json(r);
    CHECK(canonical_dump(orbit_to_json(orbit_from_json(j))) == canonical_dump(j));
  }
  auto g = degeneration_graph(5);
  auto j = graph_to_json(g);
  CHECK(j.at("edges").size() == 9);
  CHECK(j.at("non_edges").size() == 21);
  auto back = graph_from_json(j);
  CHECK(back.to_dot() == g.to_dot());
  CHECK(canonical_dump(graph_to_json(back)) == canonical_dump(j));
}
