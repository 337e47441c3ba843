#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "metriclass/curvature.hpp"
#include "metriclass/orbits.hpp"
#include "metriclass/reduction.hpp"

using namespace metriclass;

namespace {

const ClassPair c00{0, Xi::Zero};
const ClassPair c10{1, Xi::Zero};
const ClassPair c11{1, Xi::One};
const ClassPair c20{2, Xi::Zero};
const ClassPair c2s{2, Xi::Sqrt3};
const ClassPair c22{2, Xi::Two};

std::size_t expected_codim(const ClassPair& c, std::size_t n) {
  if (c == c10) return n - 2;
  if (c == c11 || c == c2s) return 1;
  return 0;
}

void check_code(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("dims_UW examples") {
  for (std::size_t n = 4; n <= 8; ++n) {
    auto d10 = dims_UW(c10, n);
    CHECK(d10.dim_u == 2);
    CHECK(d10.dim_w == 2 * (n - 4));
    auto d00 = dims_UW(c00, n);
    CHECK(d00.dim_u == 0);
    CHECK(d00.dim_w == n - 4);
    auto d22 = dims_UW(c22, n);
    CHECK(d22.dim_u == 0);
    CHECK(d22.dim_w == n - 4);
  }
  CHECK(stabilizer_dim(c00, 4) == 1);
  CHECK(stabilizer_dim(c10, 5) == 5);
}

TEST_CASE("stabilizer closed form equals the rank oracle") {
  for (std::size_t n = 4; n <= 8; ++n)
    for (const auto& c : all_classes()) {
      CAPTURE(c.str());
      CAPTURE(n);
      CHECK(stabilizer_dim_closed_form(c, n) == stabilizer_dim_generic(c, n));
    }
}

TEST_CASE("codimension table") {
  for (std::size_t n = 4; n <= 10; ++n)
    for (const auto& c : all_classes()) {
      CAPTURE(c.str());
      CAPTURE(n);
      auto d = dims_UW(c, n);
      std::size_t cd = codimension(c, n);
      CHECK(cd == expected_codim(c, n));
      CHECK(cd + (n - 4) == d.dim_u + d.dim_w);
    }
  CHECK(codimension(c10, 6) == 4);
  // dim(R id + Der) equals the number of free Aut-pattern slots
  for (std::size_t n = 4; n <= 8; ++n) {
    auto der = derivation_basis(build_algebra<QSqrt3>(n), 0.0);
    CHECK(dim_with_identity(der, n, 0.0) == n * n - 3 * n + 7);
    CHECK(BlockPattern(n).free_entries() == n * n - 3 * n + 7);
  }
  check_code(ErrorCode::DimensionTooSmall, [] { (void)codimension(c00, 3); });
}

TEST_CASE("curve samples") {
  CHECK(classify_by_invariants(curve_sample(Family::A, 0.5, 5)).cls == c00);
  CHECK(classify_by_invariants(curve_sample(Family::D, 1.5, 5)).cls == c2s);
  auto [l, x] = curve_parameters(Family::D, 1.5);
  CHECK(l == 1.5);
  CHECK(x == doctest::Approx(std::sqrt(1.25)));
  for (std::size_t n : {4u, 6u}) {
    CHECK(curve_endpoint(Family::A, n) == canonical_metric<QSqrt3>(c11, n).metric);
    CHECK(curve_sample(Family::A, 1.0, n).gram() == canonical_metric<double>(c11, n).metric.gram());
    for (Family f : all_families()) CHECK(curve_endpoint(f, n) == canonical_metric<QSqrt3>(family_spec(f).target, n).metric);
  }
  check_code(ErrorCode::ParameterOutOfRange, [] { (void)curve_sample(Family::A, 1.5, 4); });
  check_code(ErrorCode::ParameterOutOfRange, [] { (void)curve_sample(Family::F, 1.0, 4); });
  check_code(ErrorCode::ParameterOutOfRange, [] { (void)curve_sample(Family::B, std::nan(""), 4); });
  CHECK(parse_family('c') == Family::C);
  CHECK_FALSE(parse_family('G').has_value());
}

TEST_CASE("curve evidence") {
  for (std::size_t n : {4u, 5u, 8u})
    for (Family f : all_families()) {
      auto ev = sample_curve(f, n);
      CHECK(ev.interior.size() == 10);
      CHECK(ev.near_flagged);
      auto spec = family_spec(f);
      for (double t : ev.interior) {
        CHECK(t > spec.lo);
        CHECK(t < spec.hi);
      }
      CHECK(std::abs(ev.near_endpoint - (spec.endpoint_at_hi ? spec.hi : spec.lo)) <= 1e-4 + 1e-15);
    }
}

TEST_CASE("signature jumps") {
  CHECK(signature_jump(c00, c2s, 5));
  CHECK(signature_jump(c20, c11, 5));
  CHECK_FALSE(signature_jump(c00, c11, 5));
  CHECK_FALSE(signature_jump(c22, c10, 5));
}

TEST_CASE("degeneration graph") {
  const std::set<std::pair<std::size_t, std::size_t>> paper{
      {c00.index(), c11.index()}, {c11.index(), c10.index()}, {c20.index(), c2s.index()},
      {c2s.index(), c10.index()}, {c22.index(), c11.index()}, {c22.index(), c2s.index()}};
  for (std::size_t n = 4; n <= 8; ++n) {
    CAPTURE(n);
    auto g = degeneration_graph(n);
    std::set<std::pair<std::size_t, std::size_t>> direct;
    for (const auto& e : g.direct_edges()) direct.insert({e.from.index(), e.to.index()});
    CHECK(direct == paper);
    CHECK(g.edges.size() == 9);
    CHECK(g.has_edge(c00, c10));
    CHECK(g.has_edge(c22, c10));
    CHECK(g.has_edge(c20, c10));
    CHECK(g.non_edges.size() == 21);
    CHECK(g.acyclic());
    for (const auto& e : g.edges) CHECK(codimension(e.to, n) > codimension(e.from, n));

    std::map<std::pair<std::size_t, std::size_t>, Obstruction> obs;
    for (const auto& ne : g.non_edges) obs[{ne.from.index(), ne.to.index()}] = ne.obstruction;
    CHECK(obs.at({c00.index(), c2s.index()}) == Obstruction::SignatureJump);
    CHECK(obs.at({c20.index(), c11.index()}) == Obstruction::SignatureJump);
    std::size_t jumps = 0;
    for (const auto& ne : g.non_edges) {
      if (ne.obstruction == Obstruction::Dimension)
        CHECK(codimension(ne.to, n) <= codimension(ne.from, n));
      else {
        CHECK(signature_jump(ne.from, ne.to, n));
        ++jumps;
      }
    }
    CHECK(jumps == 2);

    auto edge_a = std::find_if(g.edges.begin(), g.edges.end(), [](const Edge& e) { return e.from == c00 && e.to == c11; });
    REQUIRE(edge_a != g.edges.end());
    CHECK(edge_a->kind == EdgeKind::Curve);
    CHECK(edge_a->family == Family::A);

    CHECK(g.sinks() == std::vector<ClassPair>{c10});
  }
  auto dot = degeneration_graph(4).to_dot();
  CHECK(dot.find("digraph") == 0);
  CHECK(dot.find("[label=\"A\"]") != std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);
}

TEST_CASE("closed orbits") {
  for (std::size_t n : {4u, 6u}) {
    for (const auto& c : all_classes()) {
      bool closed = is_closed(c, n);
      CHECK(closed == (c == c10));
      CHECK(closed == curvature_report(c, n).flat);
    }
  }
}

TEST_CASE("orbit report") {
  for (std::size_t n : {4u, 7u})
    for (const auto& c : all_classes()) {
      auto r = orbit_report(c, n);
      CHECK(r.codim + (n - 4) == r.dim_u + r.dim_w);
      CHECK(r.stab_dim == 1 + (n - 4) * (n - 5) / 2 + r.dim_u + r.dim_w);
      CHECK(r.closed == (c == c10));
      auto table = signature_table(n);
      auto row = std::find_if(table.begin(), table.end(), [&](const InvariantClass& t) { return t.cls == c; });
      CHECK(r.sig_center == row->center);
      CHECK(r.sig_derived == row->derived);
    }
}
