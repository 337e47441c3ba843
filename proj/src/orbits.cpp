#include "metriclass/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "metriclass/curvature.hpp"
#include "metriclass/reduction.hpp"

namespace metriclass {

namespace {

using Q = QSqrt3;

std::size_t pos_of(const ClassPair& c) { return c.index(); }

}  // namespace

UWDims dims_UW(const ClassPair& cls, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n must be at least 4");
  const Q l = cls.lambda_value<Q>();
  const Q x = cls.xi_value<Q>();
  const Q one(1);

  Matrix<Q> u(2, 2);
  u(0, 0) = l * l - x * x - one;
  u(0, 1) = l * x;
  u(1, 1) = l * l - one;

  UWDims out;
  out.dim_u = 2 - rank(u, 0.0);
  const std::size_t m = n - 4;
  if (m > 0) {
    Matrix<Q> w(m, 2 * m);
    for (std::size_t i = 0; i < m; ++i) {
      w(i, i) = l * l - one;
      w(i, m + i) = x;
    }
    out.dim_w = 2 * m - rank(w, 0.0);
  }
  return out;
}

std::size_t stabilizer_dim_closed_form(const ClassPair& cls, std::size_t n) {
  auto d = dims_UW(cls, n);
  return 1 + (n - 4) * (n - 5) / 2 + d.dim_u + d.dim_w;
}

namespace {

std::size_t stabilizer_rank_computation(const ClassPair& cls, std::size_t n) {
  const Matrix<Q> g = canonical_g(cls.lambda_value<Q>(), cls.xi_value<Q>(), n);
  const Matrix<Q> gi = inverse(g, 0.0);
  const Matrix<Q> j = lorentz_form<Q>(n);
  BlockPattern pattern(n);

  std::vector<Vec<Q>> columns;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (!pattern.allowed(a, b)) continue;
      Matrix<Q> e(n, n);
      e(a, b) = Q(1);
      Matrix<Q> y = gi * e * g;
      Matrix<Q> s = y.transpose() * j + j * y;
      Vec<Q> col;
      col.reserve(n * (n + 1) / 2);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) col.push_back(s(r, c));
      columns.push_back(std::move(col));
    }
  Matrix<Q> system = Matrix<Q>::from_columns(columns, n * (n + 1) / 2);
  return columns.size() - rank(system, 0.0);
}

}  // namespace

std::size_t stabilizer_dim_generic(const ClassPair& cls, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n must be at least 4");
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, std::size_t> cache;
  const auto key = std::make_pair(cls.index(), n);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::size_t d = stabilizer_rank_computation(cls, n);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, d);
  return d;
}

std::size_t stabilizer_dim(const ClassPair& cls, std::size_t n) {
  std::size_t a = stabilizer_dim_closed_form(cls, n);
  std::size_t b = stabilizer_dim_generic(cls, n);
  if (a != b)
    throw Error(ErrorCode::OracleMismatch, "stabilizer of " + cls.str() + " at n=" + std::to_string(n) +
                                               ": closed form " + std::to_string(a) + ", rank " +
                                               std::to_string(b));
  return a;
}

std::size_t codimension(const ClassPair& cls, std::size_t n) {
  const std::size_t stab = stabilizer_dim(cls, n);
  const std::size_t dim_h = n * n - 3 * n + 7;
  return n * (n + 1) / 2 + stab - dim_h;
}

const std::array<Family, 6>& all_families() {
  static const std::array<Family, 6> fs{Family::A, Family::B, Family::C, Family::D, Family::E, Family::F};
  return fs;
}

char family_name(Family f) { return static_cast<char>('A' + static_cast<int>(f)); }

std::optional<Family> parse_family(char c) {
  if (c >= 'a' && c <= 'f') c = static_cast<char>(c - 'a' + 'A');
  if (c < 'A' || c > 'F') return std::nullopt;
  return static_cast<Family>(c - 'A');
}

FamilySpec family_spec(Family f) {
  const double r3 = std::sqrt(3.0);
  switch (f) {
    case Family::A: return {f, {0, Xi::Zero}, {1, Xi::One}, 0.0, 1.0, true};
    case Family::B: return {f, {1, Xi::One}, {1, Xi::Zero}, 0.0, 1.0, false};
    case Family::C: return {f, {2, Xi::Zero}, {2, Xi::Sqrt3}, 0.0, r3, true};
    case Family::D: return {f, {2, Xi::Sqrt3}, {1, Xi::Zero}, 1.0, 2.0, false};
    case Family::E: return {f, {2, Xi::Two}, {1, Xi::One}, 1.0, 2.0, false};
    case Family::F: return {f, {2, Xi::Two}, {2, Xi::Sqrt3}, r3, 2.0, false};
  }
  throw Error(ErrorCode::ParameterOutOfRange, "unknown family");
}

std::pair<double, double> curve_parameters(Family f, double t) {
  switch (f) {
    case Family::A:
    case Family::E: return {t, t};
    case Family::B: return {1.0, t};
    case Family::C:
    case Family::F: return {2.0, t};
    case Family::D: return {t, std::sqrt(std::max(0.0, t * t - 1.0))};
  }
  throw Error(ErrorCode::ParameterOutOfRange, "unknown family");
}

Metric<double> curve_sample(Family f, double t, std::size_t n) {
  auto spec = family_spec(f);
  if (!(t >= spec.lo && t <= spec.hi)) {
    std::ostringstream os;
    os << "family " << family_name(f) << " parameter " << t << " outside [" << spec.lo << ", " << spec.hi << "]";
    throw Error(ErrorCode::ParameterOutOfRange, os.str());
  }
  auto [l, x] = curve_parameters(f, t);
  return Metric<double>(parametric_gram(l, x, n));
}

Metric<QSqrt3> curve_endpoint(Family f, std::size_t n) {
  auto target = family_spec(f).target;
  return Metric<QSqrt3>(parametric_gram(target.lambda_value<Q>(), target.xi_value<Q>(), n));
}

CurveEvidence sample_curve(Family f, std::size_t n) {
  auto spec = family_spec(f);
  CurveEvidence ev{f, spec.source, spec.target, {}, 0.0, false};
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::EvidenceFailure, std::string("family ") + family_name(f) + ": " + what);
  };
  for (int i = 1; i <= 10; ++i) {
    double t = spec.lo + (spec.hi - spec.lo) * i / 11.0;
    auto got = classify_by_invariants(curve_sample(f, t, n));
    if (got.cls != spec.source) fail("sample " + std::to_string(t) + " classified as " + got.cls.str());
    ev.interior.push_back(t);
  }
  ev.near_endpoint = spec.endpoint_at_hi ? spec.hi - 1e-4 : spec.lo + 1e-4;
  auto near = classify_by_invariants(curve_sample(f, ev.near_endpoint, n));
  if (near.cls != spec.source) fail("near-endpoint sample classified as " + near.cls.str());
  ev.near_flagged = near.near_degenerate;
  auto end = classify_by_invariants(curve_endpoint(f, n));
  if (end.cls != spec.target) fail("endpoint classified as " + end.cls.str());
  return ev;
}

std::string to_string(EdgeKind k) { return k == EdgeKind::Curve ? "curve" : "transitive"; }

std::string to_string(Obstruction o) { return o == Obstruction::Dimension ? "dimension" : "signature-jump"; }

bool DegenerationGraph::has_edge(const ClassPair& from, const ClassPair& to) const {
  return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.from == from && e.to == to; });
}

std::vector<ClassPair> DegenerationGraph::successors(const ClassPair& from) const {
  std::vector<ClassPair> out;
  for (const auto& e : edges)
    if (e.from == from) out.push_back(e.to);
  return out;
}

std::vector<Edge> DegenerationGraph::direct_edges() const {
  std::vector<Edge> out;
  for (const auto& e : edges)
    if (e.kind == EdgeKind::Curve) out.push_back(e);
  return out;
}

std::vector<ClassPair> DegenerationGraph::sinks() const {
  std::vector<ClassPair> out;
  for (const auto& v : nodes)
    if (successors(v).empty()) out.push_back(v);
  return out;
}

bool DegenerationGraph::acyclic() const {
  // Kahn's algorithm
  std::vector<int> indeg(nodes.size(), 0);
  for (const auto& e : edges) ++indeg[pos_of(e.to)];
  std::vector<ClassPair> ready;
  for (const auto& v : nodes)
    if (indeg[pos_of(v)] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    ClassPair v = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& w : successors(v))
      if (--indeg[pos_of(w)] == 0) ready.push_back(w);
  }
  return seen == nodes.size();
}

std::string DegenerationGraph::to_dot() const {
  std::ostringstream os;
  os << "digraph degenerations {\n";
  os << "  // n = " << n << "\n";
  for (const auto& v : nodes) os << "  \"" << v.str() << "\";\n";
  for (const auto& e : edges) {
    os << "  \"" << e.from.str() << "\" -> \"" << e.to.str() << "\"";
    if (e.kind == EdgeKind::Curve)
      os << " [label=\"" << family_name(*e.family) << "\"]";
    else
      os << " [style=dashed]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

bool signature_jump(const ClassPair& from, const ClassPair& to, std::size_t n) {
  auto table = signature_table(n);
  auto row = [&](const ClassPair& c) {
    return *std::find_if(table.begin(), table.end(), [&](const InvariantClass& r) { return r.cls == c; });
  };
  auto a = row(from);
  auto b = row(to);
  auto grows = [](const SignatureTriple& s, const SignatureTriple& t) { return t.plus > s.plus || t.minus > s.minus; };
  return grows(a.center, b.center) || grows(a.derived, b.derived);
}

DegenerationGraph degeneration_graph(std::size_t n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n must be at least 4");
  DegenerationGraph g;
  g.n = n;
  g.nodes.assign(all_classes().begin(), all_classes().end());

  std::vector<std::size_t> codim(g.nodes.size());
  for (const auto& v : g.nodes) codim[pos_of(v)] = codimension(v, n);

  auto admissible = [&](const ClassPair& a, const ClassPair& b) {
    return codim[pos_of(b)] > codim[pos_of(a)] && !signature_jump(a, b, n);
  };

  const std::size_t k = g.nodes.size();
  std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
  for (Family f : all_families()) {
    auto ev = sample_curve(f, n);
    if (!admissible(ev.source, ev.target))
      throw Error(ErrorCode::EvidenceFailure, std::string("curve ") + family_name(f) + " contradicts an obstruction");
    if (!reach[pos_of(ev.source)][pos_of(ev.target)]) {
      reach[pos_of(ev.source)][pos_of(ev.target)] = true;
      g.edges.push_back({ev.source, ev.target, EdgeKind::Curve, f});
    }
    g.evidence.push_back(std::move(ev));
  }

  auto closure = reach;
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (closure[i][m] && closure[m][j]) closure[i][j] = true;

  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const auto& a = g.nodes[i];
      const auto& b = g.nodes[j];
      if (closure[i][j]) {
        if (reach[i][j]) continue;
        if (!admissible(a, b))
          throw Error(ErrorCode::EvidenceFailure, "transitive edge " + a.str() + " -> " + b.str() +
                                                      " contradicts an obstruction");
        g.edges.push_back({a, b, EdgeKind::Transitive, std::nullopt});
      } else if (codim[j] <= codim[i]) {
        g.non_edges.push_back({a, b, Obstruction::Dimension});
      } else if (signature_jump(a, b, n)) {
        g.non_edges.push_back({a, b, Obstruction::SignatureJump});
      } else {
        throw Error(ErrorCode::EvidenceFailure, "no evidence either way for " + a.str() + " -> " + b.str());
      }
    }
  return g;
}

bool is_closed(const ClassPair& cls, std::size_t n) {
  bool closed = degeneration_graph(n).successors(cls).empty();
  bool flat = curvature_report(cls, n).flat;
  if (closed != flat)
    throw Error(ErrorCode::OracleMismatch, cls.str() + ": closed=" + (closed ? "true" : "false") +
                                               " but flat=" + (flat ? "true" : "false"));
  return closed;
}

OrbitReport orbit_report(const ClassPair& cls, std::size_t n) {
  OrbitReport r;
  r.cls = cls;
  r.n = n;
  auto d = dims_UW(cls, n);
  r.dim_u = d.dim_u;
  r.dim_w = d.dim_w;
  r.stab_dim = stabilizer_dim(cls, n);
  r.codim = codimension(cls, n);
  auto inv = classify_by_invariants(canonical_metric<Q>(cls, n).metric);
  r.sig_center = inv.center;
  r.sig_derived = inv.derived;
  r.closed = is_closed(cls, n);
  return r;
}

}  // namespace metriclass
