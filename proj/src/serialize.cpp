#include "metriclass/serialize.hpp"

#include <cmath>
#include <regex>

namespace metriclass {

namespace {

using Q = QSqrt3;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

// Wraps nlohmann's type/key errors into ParseError.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
}

std::optional<long long> as_small_integer(const Q& x) {
  if (!x.is_rational()) return std::nullopt;
  const Rational& r = x.rational_part();
  if (boost::multiprecision::denominator(r) != 1) return std::nullopt;
  BigInt num = boost::multiprecision::numerator(r);
  if (num > 1000000000 || num < -1000000000) return std::nullopt;
  return num.convert_to<long long>();
}

/// Integers as numbers, everything else as the exact string.
json param_to_json(const Q& x) {
  if (auto i = as_small_integer(x)) return *i;
  return x.str();
}

json vec_to_json(const Vec<Q>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(scalar_to_json(x));
  return out;
}

Vec<Q> vec_from_json(const json& j) {
  if (!j.is_array()) parse_fail("expected an array");
  Vec<Q> v;
  for (const auto& x : j) v.push_back(exact_from_json(x));
  return v;
}

template <class T>
json witness_to_json(const Witness<T>& w) {
  json left = json::array();
  json right = json::array();
  for (const auto& m : w.left) left.push_back(matrix_to_json(m));
  for (const auto& m : w.right) right.push_back(matrix_to_json(m));
  return {{"left", left}, {"right", right}, {"target", matrix_to_json(w.target)}};
}

template <class T>
Witness<T> witness_from_json(const json& j) {
  Witness<T> w;
  for (const auto& m : j.at("left")) w.left.push_back(matrix_from_json<T>(m));
  for (const auto& m : j.at("right")) w.right.push_back(matrix_from_json<T>(m));
  w.target = matrix_from_json<T>(j.at("target"));
  return w;
}

Flag flag_from_string(const std::string& s) {
  for (Flag f : {Flag::NearDegenerate, Flag::ClassifierDisagreement})
    if (to_string(f) == s) return f;
  parse_fail("unknown flag '" + s + "'");
}

template <class T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

json scalar_to_json(const Q& x) { return x.str(); }
json scalar_to_json(double x) { return x; }

Q exact_from_json(const json& j) {
  if (j.is_number_integer()) return Q(Rational(j.get<long long>()));
  if (j.is_string()) return Q::parse(j.get<std::string>());
  if (j.is_number_float())
    parse_fail("exact backend rejects the non-Q(sqrt3) entry " + j.dump() + "; write it as a fraction string");
  parse_fail("expected an exact scalar, got " + j.dump());
}

double double_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return Q::parse(j.get<std::string>()).to_double();
  parse_fail("expected a number, got " + j.dump());
}

template <class T>
json matrix_to_json(const Matrix<T>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(i, c)));
    out.push_back(row);
  }
  return out;
}

template <class T>
Matrix<T> matrix_from_json(const json& j) {
  if (!j.is_array()) parse_fail("matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : (j[0].is_array() ? j[0].size() : 0);
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array()) parse_fail("matrix row " + std::to_string(i) + " is not an array");
    if (j[i].size() != cols) throw Error(ErrorCode::DimensionMismatch, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if constexpr (ScalarTraits<T>::exact)
        m(i, c) = exact_from_json(j[i][c]);
      else
        m(i, c) = double_from_json(j[i][c]);
    }
  }
  return m;
}

template json matrix_to_json(const Matrix<double>&);
template json matrix_to_json(const Matrix<Q>&);
template Matrix<double> matrix_from_json(const json&);
template Matrix<Q> matrix_from_json(const json&);

json class_to_json(const ClassPair& c) {
  return {{"lambda", c.lambda}, {"xi", param_to_json(c.xi_value<Q>())}};
}

ClassPair class_from_json(const json& j) {
  return guarded([&] {
    Q l = exact_from_json(j.at("lambda"));
    Q x = exact_from_json(j.at("xi"));
    auto c = find_class(l, x);
    if (!c) throw Error(ErrorCode::NotARepresentative, "(" + l.str() + "," + x.str() + ") is not a representative");
    return *c;
  });
}

json signature_to_json(const SignatureTriple& s) { return json::array({s.plus, s.minus, s.zero}); }

SignatureTriple signature_from_json(const json& j) {
  return guarded([&] {
    if (!j.is_array() || j.size() != 3) parse_fail("signature must be [plus, minus, zero]");
    return SignatureTriple{j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
  });
}

json metric_to_json(const Metric<double>& m) {
  return {{"n", m.dim()}, {"gram", matrix_to_json(m.gram())}, {"backend", "approx"}};
}

json metric_to_json(const Metric<Q>& m) {
  return {{"n", m.dim()}, {"gram", matrix_to_json(m.gram())}, {"backend", "exact"}};
}

AnyMetric metric_from_json(const json& j, const std::string& backend, double tol) {
  if (!j.is_object()) parse_fail("metric document must be an object");
  if (!j.contains("gram")) parse_fail("missing \"gram\"");
  std::string be = backend;
  if (be.empty()) be = j.contains("backend") ? guarded([&] { return j.at("backend").get<std::string>(); }) : "approx";
  if (be != "exact" && be != "approx") parse_fail("unknown backend '" + be + "'");

  const json& gram = j.at("gram");
  if (!gram.is_array()) parse_fail("\"gram\" must be an array of rows");
  const std::size_t n = gram.size();
  if (j.contains("n")) {
    auto declared = guarded([&] { return j.at("n").get<long long>(); });
    if (declared < 0 || static_cast<std::size_t>(declared) != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "\"n\" is " + std::to_string(declared) + " but gram has " + std::to_string(n) + " rows");
  }
  for (const auto& row : gram)
    if (!row.is_array() || row.size() != n) throw Error(ErrorCode::DimensionMismatch, "gram must be n x n");
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");

  if (be == "exact") return Metric<Q>(matrix_from_json<Q>(gram), tol);
  return Metric<double>(matrix_from_json<double>(gram), tol);
}

AnyMetric parse_metric(const std::string& text, const std::string& backend, double tol) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  return metric_from_json(j, backend, tol);
}

json classification_to_json(const ClassificationResult& r) {
  json flags = json::array();
  for (Flag f : r.flags) flags.push_back(to_string(f));
  json out = class_to_json(r.cls);
  out["pipeline"] = class_to_json(r.pipeline_cls);
  out["n"] = r.n;
  out["k"] = r.k;
  out["phi"] = matrix_to_json(r.phi);
  out["frame"] = {{"columns", matrix_to_json(r.frame.columns)}, {"scale", r.frame.scale}};
  out["g"] = matrix_to_json(r.g);
  out["witness"] = witness_to_json(r.witness);
  out["exact_witness"] = r.exact_witness ? witness_to_json(*r.exact_witness) : json(nullptr);
  out["exact_g"] = r.exact_g ? matrix_to_json(*r.exact_g) : json(nullptr);
  out["center"] = signature_to_json(r.center);
  out["derived"] = signature_to_json(r.derived);
  out["t"] = optional_to_json(r.t);
  out["s"] = optional_to_json(r.s);
  out["flags"] = flags;
  out["backend"] = r.backend;
  return out;
}

ClassificationResult classification_from_json(const json& j) {
  return guarded([&] {
    ClassificationResult r;
    r.cls = class_from_json(j);
    r.pipeline_cls = class_from_json(j.at("pipeline"));
    r.n = j.at("n").get<std::size_t>();
    r.k = j.at("k").get<double>();
    r.phi = matrix_from_json<double>(j.at("phi"));
    r.frame.columns = matrix_from_json<double>(j.at("frame").at("columns"));
    r.frame.scale = j.at("frame").at("scale").get<double>();
    r.g = matrix_from_json<double>(j.at("g"));
    r.witness = witness_from_json<double>(j.at("witness"));
    if (!j.at("exact_witness").is_null()) r.exact_witness = witness_from_json<Q>(j.at("exact_witness"));
    if (!j.at("exact_g").is_null()) r.exact_g = matrix_from_json<Q>(j.at("exact_g"));
    r.center = signature_from_json(j.at("center"));
    r.derived = signature_from_json(j.at("derived"));
    r.t = optional_from_json<double>(j.at("t"));
    r.s = optional_from_json<double>(j.at("s"));
    for (const auto& f : j.at("flags")) r.flags.push_back(flag_from_string(f.get<std::string>()));
    r.backend = j.at("backend").get<std::string>();
    return r;
  });
}

json curvature_to_json(const CurvatureReport<Q>& r) {
  const std::size_t n = r.n;
  json out;
  out["lambda"] = param_to_json(r.lambda);
  out["xi"] = param_to_json(r.xi);
  out["n"] = n;
  auto key = [](const char* name, std::size_t i, std::size_t j) {
    return std::string(name) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
  };
  const Vec<Q> zero(n, Q(0));
  const Matrix<Q> zero_m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (r.tables.u.at(i, j) != zero) out[key("U", i, j)] = vec_to_json(r.tables.u.at(i, j));
      if (r.tables.nabla.at(i, j) != zero) out[key("nabla", i, j)] = vec_to_json(r.tables.nabla.at(i, j));
      if (r.tables.r.at(i, j) != zero_m) out[key("R", i, j)] = matrix_to_json(r.tables.r.at(i, j));
    }
  out["ric"] = matrix_to_json(r.tables.ric);
  out["flat"] = r.flat;
  out["einstein"] = r.einstein ? scalar_to_json(*r.einstein) : json(nullptr);
  if (r.soliton)
    out["soliton"] = {{"c", scalar_to_json(r.soliton->c)},
                      {"D", matrix_to_json(r.soliton->d)},
                      {"residual", r.soliton->residual}};
  else
    out["soliton"] = nullptr;
  json spec;
  spec["approx"] = r.spectrum.approx;
  if (r.spectrum.exact) {
    json e = json::array();
    for (const auto& x : *r.spectrum.exact) e.push_back(scalar_to_json(x));
    spec["exact"] = e;
  } else {
    spec["exact"] = nullptr;
  }
  out["spectrum"] = spec;
  return out;
}

CurvatureReport<Q> curvature_from_json(const json& j) {
  return guarded([&] {
    CurvatureReport<Q> r;
    r.lambda = exact_from_json(j.at("lambda"));
    r.xi = exact_from_json(j.at("xi"));
    r.n = j.at("n").get<std::size_t>();
    const std::size_t n = r.n;
    r.tables.u = BilinearTable<Q>(n, Symmetry::Symmetric);
    r.tables.nabla = BilinearTable<Q>(n, Symmetry::None);
    r.tables.r = OperatorTable<Q>(n);
    static const std::regex re(R"(^(U|nabla|R)\[(\d+)\]\[(\d+)\]$)");
    for (const auto& [k, v] : j.items()) {
      std::smatch m;
      if (!std::regex_match(k, m, re)) continue;
      std::size_t a = std::stoul(m[2].str());
      std::size_t b = std::stoul(m[3].str());
      if (a >= n || b >= n) parse_fail("index out of range in key " + k);
      if (m[1] == "U")
        r.tables.u.at(a, b) = vec_from_json(v);
      else if (m[1] == "nabla")
        r.tables.nabla.at(a, b) = vec_from_json(v);
      else
        r.tables.r.at(a, b) = matrix_from_json<Q>(v);
    }
    r.tables.ric = matrix_from_json<Q>(j.at("ric"));
    r.flat = j.at("flat").get<bool>();
    if (!j.at("einstein").is_null()) r.einstein = exact_from_json(j.at("einstein"));
    if (!j.at("soliton").is_null()) {
      const auto& s = j.at("soliton");
      r.soliton = SolitonCertificate<Q>{exact_from_json(s.at("c")), matrix_from_json<Q>(s.at("D")),
                                        s.at("residual").get<double>()};
    }
    const auto& sp = j.at("spectrum");
    r.spectrum.approx = sp.at("approx").get<std::vector<double>>();
    if (!sp.at("exact").is_null()) r.spectrum.exact = vec_from_json(sp.at("exact"));
    return r;
  });
}

json orbit_to_json(const OrbitReport& r) {
  json out = class_to_json(r.cls);
  out["n"] = r.n;
  out["dimU"] = r.dim_u;
  out["dimW"] = r.dim_w;
  out["stab_dim"] = r.stab_dim;
  out["codim"] = r.codim;
  out["sig_center"] = signature_to_json(r.sig_center);
  out["sig_derived"] = signature_to_json(r.sig_derived);
  out["closed"] = r.closed;
  return out;
}

OrbitReport orbit_from_json(const json& j) {
  return guarded([&] {
    OrbitReport r;
    r.cls = class_from_json(j);
    r.n = j.at("n").get<std::size_t>();
    r.dim_u = j.at("dimU").get<std::size_t>();
    r.dim_w = j.at("dimW").get<std::size_t>();
    r.stab_dim = j.at("stab_dim").get<std::size_t>();
    r.codim = j.at("codim").get<std::size_t>();
    r.sig_center = signature_from_json(j.at("sig_center"));
    r.sig_derived = signature_from_json(j.at("sig_derived"));
    r.closed = j.at("closed").get<bool>();
    return r;
  });
}

json graph_to_json(const DegenerationGraph& g) {
  json out;
  out["n"] = g.n;
  json nodes = json::array();
  for (const auto& v : g.nodes) nodes.push_back(class_to_json(v));
  out["nodes"] = nodes;
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"from", class_to_json(e.from)},
                     {"to", class_to_json(e.to)},
                     {"evidence", to_string(e.kind)},
                     {"family", e.family ? json(std::string(1, family_name(*e.family))) : json(nullptr)}});
  out["edges"] = edges;
  json non_edges = json::array();
  for (const auto& e : g.non_edges)
    non_edges.push_back(
        {{"from", class_to_json(e.from)}, {"to", class_to_json(e.to)}, {"obstruction", to_string(e.obstruction)}});
  out["non_edges"] = non_edges;
  json evidence = json::array();
  for (const auto& ev : g.evidence)
    evidence.push_back({{"family", std::string(1, family_name(ev.family))},
                        {"source", class_to_json(ev.source)},
                        {"target", class_to_json(ev.target)},
                        {"interior", ev.interior},
                        {"near_endpoint", ev.near_endpoint},
                        {"near_flagged", ev.near_flagged}});
  out["evidence"] = evidence;
  return out;
}

DegenerationGraph graph_from_json(const json& j) {
  return guarded([&] {
    auto family = [](const json& f) {
      auto s = f.get<std::string>();
      auto p = s.size() == 1 ? parse_family(s[0]) : std::nullopt;
      if (!p) parse_fail("unknown family '" + s + "'");
      return *p;
    };
    DegenerationGraph g;
    g.n = j.at("n").get<std::size_t>();
    for (const auto& v : j.at("nodes")) g.nodes.push_back(class_from_json(v));
    for (const auto& e : j.at("edges")) {
      Edge edge{class_from_json(e.at("from")), class_from_json(e.at("to")), EdgeKind::Curve, std::nullopt};
      auto kind = e.at("evidence").get<std::string>();
      if (kind == "transitive")
        edge.kind = EdgeKind::Transitive;
      else if (kind != "curve")
        parse_fail("unknown evidence '" + kind + "'");
      if (!e.at("family").is_null()) edge.family = family(e.at("family"));
      g.edges.push_back(edge);
    }
    for (const auto& e : j.at("non_edges")) {
      NonEdge ne{class_from_json(e.at("from")), class_from_json(e.at("to")), Obstruction::Dimension};
      auto o = e.at("obstruction").get<std::string>();
      if (o == "signature-jump")
        ne.obstruction = Obstruction::SignatureJump;
      else if (o != "dimension")
        parse_fail("unknown obstruction '" + o + "'");
      g.non_edges.push_back(ne);
    }
    for (const auto& ev : j.at("evidence"))
      g.evidence.push_back({family(ev.at("family")), class_from_json(ev.at("source")),
                            class_from_json(ev.at("target")), ev.at("interior").get<std::vector<double>>(),
                            ev.at("near_endpoint").get<double>(), ev.at("near_flagged").get<bool>()});
    return g;
  });
}

std::string canonical_dump(const json& j) { return j.dump(2); }

}  // namespace metriclass
