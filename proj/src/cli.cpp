#include "metriclass/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "metriclass/verify.hpp"

namespace metriclass {

namespace {

using Q = QSqrt3;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInvalid = 2;

struct Invalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Invalid("cannot open '" + path + "'");
    ss << in.rdbuf();
  }
  return ss.str();
}

Tolerances tolerances(double tol) {
  Tolerances t = default_tolerances();
  if (const char* env = std::getenv("METRICLASS_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) throw Invalid("METRICLASS_TOL must be a positive number");
  }
  if (tol != 0.0) {
    if (!(tol > 0.0)) throw Invalid("--tol must be positive");
    t.tol = tol;
  }
  return t;
}

ClassPair parse_class(const std::string& lambda, const std::string& xi) {
  Q l = Q::parse(lambda);
  Q x = Q::parse(xi);
  auto c = find_class(l, x);
  if (!c) throw Error(ErrorCode::NotARepresentative, "(" + l.str() + "," + x.str() + ") is not a representative");
  return *c;
}

void check_n(std::size_t n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooSmall, "n = " + std::to_string(n) + " < 4");
}

std::string flags_text(const std::vector<Flag>& flags) {
  std::string s;
  for (Flag f : flags) s += (s.empty() ? "" : ";") + to_string(f);
  return s;
}

// ---------------------------------------------------------------------------

struct ClassifyOptions {
  std::size_t n = 0;
  std::string backend;
  double tol = 0.0;
  std::string input = "-";
  std::string format = "json";
  bool full = false;
};

int cmd_classify(const ClassifyOptions& o, std::ostream& out) {
  Tolerances tol = tolerances(o.tol);
  AnyMetric metric = parse_metric(read_input(o.input), o.backend, tol.tol);
  std::size_t dim = std::visit([](const auto& m) { return m.dim(); }, metric);
  if (o.n != 0 && o.n != dim)
    throw Error(ErrorCode::DimensionMismatch, "--n " + std::to_string(o.n) + " but the metric is " +
                                                  std::to_string(dim) + "-dimensional");

  ClassificationResult r = std::visit([&](const auto& m) { return classify(m, tol); }, metric);
  WitnessCheck chk = r.exact_witness ? verify_witness(*r.exact_g, *r.exact_witness, 0.0)
                                     : verify_witness(r.g, r.witness, tol.witness_tol);
  const Witness<double>& w = r.witness;
  const std::size_t left = r.exact_witness ? r.exact_witness->left.size() : w.left.size();
  const std::size_t right = r.exact_witness ? r.exact_witness->right.size() : w.right.size();

  if (o.format == "json") {
    json j;
    if (o.full) {
      j = classification_to_json(r);
    } else {
      j = class_to_json(r.cls);
      j["n"] = r.n;
      j["backend"] = r.backend;
      j["k"] = r.k;
      j["center"] = signature_to_json(r.center);
      j["derived"] = signature_to_json(r.derived);
      json flags = json::array();
      for (Flag f : r.flags) flags.push_back(to_string(f));
      j["flags"] = flags;
    }
    j["witness_check"] = {{"ok", chk.ok}, {"residual", chk.residual}, {"left_factors", left}, {"right_factors", right},
                          {"exact", r.exact_witness.has_value()}};
    out << canonical_dump(j) << "\n";
  } else if (o.format == "csv") {
    out << "lambda,xi,n,backend,k,witness_ok,witness_residual,center,derived,flags\n";
    out << r.cls.lambda << "," << to_string(r.cls.xi) << "," << r.n << "," << r.backend << ","
        << std::setprecision(17) << r.k << "," << (chk.ok ? "true" : "false") << "," << chk.residual << ",\""
        << r.center.str() << "\",\"" << r.derived.str() << "\"," << flags_text(r.flags) << "\n";
  } else {
    out << "class    " << r.cls.str() << "\n";
    out << "n        " << r.n << " (" << r.backend << ")\n";
    out << "k        " << std::setprecision(12) << r.k << "\n";
    out << "witness  " << (chk.ok ? "ok" : "FAILED") << ", residual " << chk.residual << ", " << left << " left / "
        << right << " right factors\n";
    out << "center   " << r.center.str() << "\n";
    out << "derived  " << r.derived.str() << "\n";
    out << "flags    " << (r.flags.empty() ? "-" : flags_text(r.flags)) << "\n";
  }
  return chk.ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct ReportOptions {
  std::string lambda;
  std::string xi;
  std::size_t n = 4;
  std::string format = "json";
};

void curvature_text(const CurvatureReport<Q>& r, std::ostream& out) {
  out << "metric (" << r.lambda << "," << r.xi << "), n = " << r.n << "\n";
  out << "flat      " << (r.flat ? "yes" : "no") << "\n";
  out << "Einstein  " << (r.einstein ? "yes, c = " + r.einstein->str() : std::string("no")) << "\n";
  if (r.soliton) {
    out << "soliton   c = " << r.soliton->c << ", D diagonal:";
    for (std::size_t i = 0; i < r.n; ++i) out << " " << r.soliton->d(i, i);
    out << "\n";
  } else {
    out << "soliton   none\n";
  }
  out << "spectrum ";
  if (r.spectrum.exact)
    for (const auto& v : *r.spectrum.exact) out << " " << v;
  else
    for (double v : r.spectrum.approx) out << " " << v;
  out << "\nRic\n";
  for (std::size_t i = 0; i < r.n; ++i) {
    out << " ";
    for (std::size_t j = 0; j < r.n; ++j) out << " " << std::setw(6) << r.tables.ric(i, j).str();
    out << "\n";
  }
}

void tables_text(const ClassPair& sel, std::size_t n, std::ostream& out) {
  out << "restricted signatures and codimensions, n = " << n << "\n";
  out << "  class      center     derived    dimU dimW codim closed\n";
  for (const auto& c : all_classes()) {
    auto r = orbit_report(c, n);
    out << (c == sel ? "* " : "  ") << std::left << std::setw(11) << c.str() << std::setw(11) << r.sig_center.str()
        << std::setw(11) << r.sig_derived.str() << std::right << std::setw(4) << r.dim_u << std::setw(5) << r.dim_w
        << std::setw(6) << r.codim << "  " << (r.closed ? "yes" : "no") << "\n";
  }
}

int cmd_curvature(const ReportOptions& o, std::ostream& out, bool with_orbit) {
  check_n(o.n);
  ClassPair c = parse_class(o.lambda, o.xi);
  auto rep = curvature_report(c, o.n);
  if (o.format == "json") {
    json j = curvature_to_json(rep);
    if (with_orbit) j = {{"curvature", j}, {"orbit", orbit_to_json(orbit_report(c, o.n))}};
    out << canonical_dump(j) << "\n";
  } else {
    curvature_text(rep, out);
    if (with_orbit) {
      out << "\n";
      tables_text(c, o.n, out);
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct OrbitOptions {
  std::size_t n = 4;
  bool dot = false;
  std::string format = "json";
};

int cmd_orbits(const OrbitOptions& o, std::ostream& out) {
  check_n(o.n);
  auto g = degeneration_graph(o.n);
  if (o.dot || o.format == "dot") {
    out << g.to_dot();
    return kOk;
  }
  if (o.format == "json") {
    json reports = json::array();
    for (const auto& c : all_classes()) reports.push_back(orbit_to_json(orbit_report(c, o.n)));
    out << canonical_dump({{"graph", graph_to_json(g)}, {"orbits", reports}}) << "\n";
    return kOk;
  }
  tables_text(ClassPair{-1, Xi::Zero}, o.n, out);
  out << "\ndegenerations\n";
  for (const auto& e : g.edges)
    out << "  " << e.from.str() << " -> " << e.to.str() << "  "
        << (e.family ? std::string("curve ") + family_name(*e.family) : to_string(e.kind)) << "\n";
  out << "obstructed pairs\n";
  for (const auto& e : g.non_edges)
    out << "  " << e.from.str() << " -/-> " << e.to.str() << "  " << to_string(e.obstruction) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::size_t n_min = 4;
  std::size_t n_max = 8;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  bool serial = false;
  std::string mutate = "none";
  double tol = 0.0;
  std::string format = "json";
};

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  VerifyConfig cfg;
  cfg.n_min = o.n_min;
  cfg.n_max = o.n_max;
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  cfg.parallel = !o.serial;
  cfg.tol = tolerances(o.tol);
  cfg.mutation = o.mutate == "curvature-sign" ? Mutation::CurvatureSign : Mutation::None;
  auto rep = run_verify(cfg);
  if (o.format == "json") {
    json j = rep.to_json();
    j["n_min"] = o.n_min;
    j["n_max"] = o.n_max;
    out << canonical_dump(j) << "\n";
  } else {
    for (const auto& c : rep.checks)
      out << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(24) << c.name << std::right << c.detail << "\n";
  }
  return rep.passed() ? kOk : kCheckFailed;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::OracleMismatch:
    case ErrorCode::EvidenceFailure:
    case ErrorCode::NoConvergence: return kCheckFailed;
    default: return kInvalid;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify left-invariant Lorentzian metrics on H3 x R^(n-3)", "metriclass"};
  app.require_subcommand(1);

  ClassifyOptions co;
  auto* classify_cmd = app.add_subcommand("classify", "classify a metric given as JSON");
  classify_cmd->add_option("--n", co.n, "expected dimension");
  classify_cmd->add_option("--backend", co.backend, "exact or approx (default: the document's)")
      ->check(CLI::IsMember({"exact", "approx"}));
  classify_cmd->add_option("--tol", co.tol, "sign tolerance");
  classify_cmd->add_option("--input", co.input, "metric JSON file, - for stdin");
  classify_cmd->add_option("--format", co.format)->check(CLI::IsMember({"json", "csv", "text"}));
  classify_cmd->add_flag("--full", co.full, "include every witness factor");

  ReportOptions cv;
  auto* curvature_cmd = app.add_subcommand("curvature", "curvature of a representative");
  curvature_cmd->add_option("--lambda", cv.lambda)->required();
  curvature_cmd->add_option("--xi", cv.xi, "0, 1, sqrt3 or 2")->required();
  curvature_cmd->add_option("--n", cv.n);
  curvature_cmd->add_option("--format", cv.format)->check(CLI::IsMember({"json", "text"}));

  ReportOptions rp;
  auto* report_cmd = app.add_subcommand("report", "curvature and orbit data of a representative");
  report_cmd->add_option("--lambda", rp.lambda)->required();
  report_cmd->add_option("--xi", rp.xi, "0, 1, sqrt3 or 2")->required();
  report_cmd->add_option("--n", rp.n);
  report_cmd->add_option("--format", rp.format)->check(CLI::IsMember({"json", "text"}));

  OrbitOptions oo;
  auto* orbits_cmd = app.add_subcommand("orbits", "codimensions and the degeneration graph");
  orbits_cmd->add_option("--n", oo.n);
  orbits_cmd->add_flag("--dot", oo.dot, "emit the graph as DOT");
  orbits_cmd->add_option("--format", oo.format)->check(CLI::IsMember({"json", "text", "dot"}));

  VerifyOptions vo;
  auto* verify_cmd = app.add_subcommand("verify", "run the reproduction suite");
  verify_cmd->add_option("--n-min", vo.n_min);
  verify_cmd->add_option("--n-max", vo.n_max);
  verify_cmd->add_option("--samples", vo.samples, "random metrics per class and n");
  verify_cmd->add_option("--seed", vo.seed);
  verify_cmd->add_option("--tol", vo.tol);
  verify_cmd->add_flag("--serial", vo.serial, "no worker threads");
  verify_cmd->add_option("--mutate", vo.mutate, "inject a fault (smoke test)")
      ->check(CLI::IsMember({"none", "curvature-sign"}));
  verify_cmd->add_option("--format", vo.format)->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*classify_cmd) return cmd_classify(co, out);
    if (*curvature_cmd) return cmd_curvature(cv, out, false);
    if (*report_cmd) return cmd_curvature(rp, out, true);
    if (*orbits_cmd) return cmd_orbits(oo, out);
    if (*verify_cmd) return cmd_verify(vo, out);
  } catch (const Invalid& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kInvalid;
}

}  // namespace metriclass
