#include "metriclass/verify.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <set>
#include <sstream>

namespace metriclass {

namespace {

using Q = QSqrt3;
using Clock = std::chrono::steady_clock;

const ClassPair c00{0, Xi::Zero};
const ClassPair c10{1, Xi::Zero};
const ClassPair c11{1, Xi::One};
const ClassPair c20{2, Xi::Zero};
const ClassPair c2s{2, Xi::Sqrt3};
const ClassPair c22{2, Xi::Two};

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void fail(const std::string& what) {
    if (passed) detail << what;
    passed = false;
  }
};

template <class F>
CheckResult timed(const std::string& name, F&& body) {
  auto start = Clock::now();
  CheckResult r{name, false, "", 0.0};
  try {
    Outcome o;
    body(o);
    r.passed = o.passed;
    r.detail = o.detail.str();
  } catch (const Error& e) {
    r.passed = false;
    r.detail = e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::vector<std::size_t> n_range(const VerifyConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) out.push_back(n);
  return out;
}

std::vector<std::size_t> table_range(const VerifyConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t n = cfg.n_min; n <= std::max<std::size_t>(cfg.n_max, 10); ++n) out.push_back(n);
  return out;
}

std::vector<std::size_t> with_required(std::vector<std::size_t> ns, std::initializer_list<std::size_t> req) {
  for (auto n : req)
    if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
  std::sort(ns.begin(), ns.end());
  return ns;
}

std::string case_key(const ClassPair& c, std::size_t n) { return c.str() + " n=" + std::to_string(n); }

std::vector<Q> expected_spectrum(const ClassPair& c) {
  const Q h(Rational(1, 2));
  if (c == c00) return {h, h, Q(0), -h};
  if (c == c20) return {Q(9) * h, Q(9) * h, Q(0), Q(-9) * h};
  if (c == c22) return {Q(3) * h, Q(0), Q(-3) * h, Q(-3) * h};
  return {Q(0), Q(0), Q(0), Q(0)};
}

std::size_t expected_codim(const ClassPair& c, std::size_t n) {
  if (c == c10) return n - 2;
  if (c == c11 || c == c2s) return 1;
  return 0;
}

const std::set<std::pair<std::size_t, std::size_t>>& expected_edges() {
  static const std::set<std::pair<std::size_t, std::size_t>> e{
      {c00.index(), c11.index()}, {c11.index(), c10.index()}, {c20.index(), c2s.index()},
      {c2s.index(), c10.index()}, {c22.index(), c11.index()}, {c22.index(), c2s.index()}};
  return e;
}

SamplingStats sample_case(const ClassPair& cls, std::size_t n, const VerifyConfig& cfg) {
  SamplingStats s;
  std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(cls.index()), static_cast<std::uint64_t>(n)};
  std::mt19937_64 rng(seq);
  auto note = [&](const std::string& what) {
    if (s.first_failure.empty()) s.first_failure = case_key(cls, n) + ": " + what;
  };
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    ++s.total;
    Matrix<double> m = random_orbit_point(cls, n, rng);
    ClassificationResult r;
    try {
      r = classify(Metric<double>(m), cfg.tol);
    } catch (const Error& e) {
      ++s.wrong_invariant;
      ++s.wrong_pipeline;
      note(e.what());
      continue;
    }
    if (r.cls != cls) {
      ++s.wrong_invariant;
      note("invariants gave " + r.cls.str());
    }
    if (r.pipeline_cls != cls) {
      ++s.wrong_pipeline;
      note("reduction reached " + r.pipeline_cls.str());
    }
    if (r.has_flag(Flag::ClassifierDisagreement)) ++s.disagreements;
    auto chk = verify_witness(r.g, r.witness, cfg.tol.witness_tol);
    s.max_residual = std::max(s.max_residual, chk.residual);
    if (!chk.ok || chk.residual > cfg.tol.witness_tol) {
      ++s.witness_failures;
      note("witness: " + chk.message);
    }
  }
  // the exact backend on the representative itself
  auto exact = classify(canonical_metric<Q>(cls, n).metric, cfg.tol);
  ++s.exact_witnesses;
  if (!exact.exact_witness || !exact.exact_g || !verify_witness(*exact.exact_g, *exact.exact_witness, 0.0).ok) {
    ++s.exact_failures;
    note("exact witness failed");
  }
  return s;
}

void merge(SamplingStats& into, const SamplingStats& s) {
  into.total += s.total;
  into.wrong_invariant += s.wrong_invariant;
  into.wrong_pipeline += s.wrong_pipeline;
  into.disagreements += s.disagreements;
  into.witness_failures += s.witness_failures;
  into.max_residual = std::max(into.max_residual, s.max_residual);
  into.exact_witnesses += s.exact_witnesses;
  into.exact_failures += s.exact_failures;
  if (into.first_failure.empty()) into.first_failure = s.first_failure;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

json VerifyReport::to_json() const {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
  return {{"checks", arr}, {"passed", passed()}};
}

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

SamplingStats sample_orbits(const VerifyConfig& cfg) {
  auto start = Clock::now();
  std::vector<std::pair<ClassPair, std::size_t>> cases;
  for (std::size_t n : n_range(cfg))
    for (const auto& c : all_classes()) cases.emplace_back(c, n);

  std::vector<SamplingStats> parts(cases.size());
  if (cfg.parallel) {
    std::vector<std::future<SamplingStats>> futures;
    for (const auto& [c, n] : cases)
      futures.push_back(std::async(std::launch::async, [&, c = c, n = n] { return sample_case(c, n, cfg); }));
    for (std::size_t i = 0; i < cases.size(); ++i) parts[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < cases.size(); ++i) parts[i] = sample_case(cases[i].first, cases[i].second, cfg);
  }

  SamplingStats total;
  for (const auto& p : parts) merge(total, p);
  total.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return total;
}

CheckResult check_six_classes(const SamplingStats& s, const VerifyConfig&) {
  auto r = timed("six-class-theorem", [&](Outcome& o) {
    if (s.wrong_invariant || s.wrong_pipeline || s.disagreements) o.fail(s.first_failure + "; ");
    if (s.seconds >= 60.0) o.fail("too slow; ");
    o.detail << s.total << " samples, " << s.wrong_invariant << " misclassified by invariants, " << s.wrong_pipeline
             << " by reduction, " << s.disagreements << " disagreements, " << s.seconds << " s";
  });
  r.seconds = s.seconds;
  return r;
}

CheckResult check_witnesses(const SamplingStats& s, const VerifyConfig& cfg) {
  return timed("witness-soundness", [&](Outcome& o) {
    if (s.witness_failures || s.exact_failures) o.fail(s.first_failure + "; ");
    o.detail << s.total << " approx witnesses (max residual " << s.max_residual << ", bound " << cfg.tol.witness_tol
             << "), " << s.exact_witnesses << " exact witnesses, " << s.witness_failures + s.exact_failures
             << " failures";
  });
}

CheckResult check_restricted_signatures(const VerifyConfig& cfg) {
  return timed("restricted-signatures", [&](Outcome& o) {
    std::size_t cases = 0;
    for (std::size_t n : table_range(cfg)) {
      auto table = signature_table(n);
      for (const auto& row : table) {
        ++cases;
        auto inv = classify_by_invariants(canonical_metric<Q>(row.cls, n).metric);
        if (inv.center != row.center || inv.derived != row.derived || inv.cls != row.cls)
          o.fail(case_key(row.cls, n) + ": center " + inv.center.str() + ", derived " + inv.derived.str() + "; ");
      }
    }
    o.detail << cases << " cases, exact backend";
  });
}

CheckResult check_curvature_tables(const VerifyConfig& cfg) {
  return timed("curvature-tables", [&](Outcome& o) {
    std::size_t cases = 0;
    for (std::size_t n : with_required(n_range(cfg), {4, 6})) {
      for (const auto& c : all_classes()) {
        ++cases;
        Q l = c.lambda_value<Q>();
        Q x = c.xi_value<Q>();
        auto g = generic_tables(l, x, n);
        auto f = closed_form_tables(l, x, n);
        if (cfg.mutation == Mutation::CurvatureSign) {
          f.r.at(0, 1) = Q(-1) * f.r.at(0, 1);
          f.r.at(1, 0) = Q(-1) * f.r.at(1, 0);
        }
        const char* part = !(g.u == f.u)           ? "U"
                           : !(g.nabla == f.nabla) ? "nabla"
                           : !(g.r == f.r)         ? "R"
                           : !(g.ric == f.ric)     ? "Ric"
                                                   : nullptr;
        if (part) o.fail(case_key(c, n) + ": closed-form " + part + " differs from the generic pipeline; ");
      }
    }
    o.detail << cases << " cases compared exactly";
  });
}

CheckResult check_flat_einstein_soliton(const VerifyConfig& cfg) {
  return timed("flat-einstein-soliton", [&](Outcome& o) {
    std::size_t cases = 0;
    for (std::size_t n : n_range(cfg))
      for (const auto& c : all_classes()) {
        ++cases;
        auto rep = curvature_report(c, n);
        bool is10 = c == c10;
        if (rep.flat != is10) o.fail(case_key(c, n) + ": flat=" + (rep.flat ? "true" : "false") + "; ");
        if (rep.einstein.has_value() != is10) o.fail(case_key(c, n) + ": Einstein test wrong; ");
        if (!rep.soliton) {
          o.fail(case_key(c, n) + ": no soliton certificate; ");
          continue;
        }
        const auto& sol = *rep.soliton;
        if (sol.residual != 0.0 || !(rep.tables.ric == sol.c * Matrix<Q>::identity(n) + sol.d))
          o.fail(case_key(c, n) + ": soliton residual; ");
        if (!is_derivation(frame_algebra(c.lambda_value<Q>(), c.xi_value<Q>(), n), sol.d, 0.0))
          o.fail(case_key(c, n) + ": D is not a derivation; ");
      }
    o.detail << cases << " cases; flat and Einstein only at (1,0); zero-residual certificates";
  });
}

CheckResult check_ricci_spectra(const VerifyConfig& cfg) {
  return timed("ricci-spectra", [&](Outcome& o) {
    std::size_t cases = 0;
    for (std::size_t n : n_range(cfg))
      for (const auto& c : all_classes()) {
        ++cases;
        auto rep = curvature_report(c, n);
        if (!rep.spectrum.exact || *rep.spectrum.exact != expected_spectrum(c)) {
          std::string got;
          for (double v : rep.spectrum.approx) got += std::to_string(v) + " ";
          o.fail(case_key(c, n) + ": spectrum " + got + "; ");
        }
      }
    o.detail << cases << " spectra, exact";
  });
}

CheckResult check_codimensions(const VerifyConfig& cfg) {
  return timed("codimension-table", [&](Outcome& o) {
    std::size_t cases = 0;
    for (std::size_t n : table_range(cfg)) {
      for (const auto& c : all_classes()) {
        ++cases;
        std::size_t closed = stabilizer_dim_closed_form(c, n);
        std::size_t generic = stabilizer_dim_generic(c, n);
        if (closed != generic)
          o.fail(case_key(c, n) + ": stabilizer " + std::to_string(closed) + " vs " + std::to_string(generic) + "; ");
        std::size_t cd = codimension(c, n);
        if (cd != expected_codim(c, n)) o.fail(case_key(c, n) + ": codim " + std::to_string(cd) + "; ");
      }
      auto der = derivation_basis(build_algebra<Q>(n), 0.0);
      std::size_t dh = dim_with_identity(der, n, 0.0);
      if (dh != n * n - 3 * n + 7) o.fail("n=" + std::to_string(n) + ": dim(R id + Der) = " + std::to_string(dh) + "; ");
    }
    o.detail << cases << " cases; stabilizer closed form matches the rank computation";
  });
}

CheckResult check_degeneration_graph(const VerifyConfig& cfg) {
  return timed("degeneration-diagram", [&](Outcome& o) {
    for (std::size_t n : n_range(cfg)) {
      const std::string at = "n=" + std::to_string(n) + ": ";
      auto g = degeneration_graph(n);
      std::set<std::pair<std::size_t, std::size_t>> direct;
      for (const auto& e : g.direct_edges()) direct.insert({e.from.index(), e.to.index()});
      if (direct != expected_edges()) o.fail(at + "direct edge set differs; ");
      if (!g.acyclic()) o.fail(at + "cycle; ");
      if (g.edges.size() + g.non_edges.size() != 30) o.fail(at + "ordered pairs not covered; ");
      for (const auto& e : g.edges)
        if (codimension(e.to, n) <= codimension(e.from, n)) o.fail(at + "edge does not raise codimension; ");
      for (const auto& ne : g.non_edges) {
        bool ok = ne.obstruction == Obstruction::Dimension ? codimension(ne.to, n) <= codimension(ne.from, n)
                                                           : signature_jump(ne.from, ne.to, n);
        if (!ok) o.fail(at + ne.from.str() + " -> " + ne.to.str() + " obstruction unverified; ");
      }
      if (g.sinks() != std::vector<ClassPair>{c10}) o.fail(at + "sink set is not {(1,0)}; ");
      for (const auto& c : all_classes())
        if (g.successors(c).empty() != curvature_report(c, n).flat) o.fail(at + c.str() + ": closed != flat; ");
    }
    o.detail << "six direct edges, 3 transitive, 21 obstructed pairs; unique closed node (1,0) is the flat class";
  });
}

CheckResult check_ivt_roots(const VerifyConfig& cfg) {
  return timed("ivt-roots", [&](Outcome& o) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> lo(0.0, std::sqrt(3.0) - 1e-3);
    std::uniform_real_distribution<double> hi(std::sqrt(3.0) + 1e-3, 10.0);
    long double worst = 0;
    for (int branch = 1; branch <= 2; ++branch)
      for (int i = 0; i < 100; ++i) {
        double t = branch == 1 ? lo(rng) : hi(rng);
        auto r = lambda2_root(branch, t, cfg.tol.root_eps);
        long double res = std::fabs(lambda2_equation(branch, r.root, t));
        worst = std::max(worst, res);
        if (res > 1e-12L || r.root < 5.0L / 3.0L)
          o.fail("branch " + std::to_string(branch) + " t=" + std::to_string(t) + "; ");
      }
    auto s0 = lambda2_root(1, 0.0, cfg.tol.root_eps).root;
    auto s1 = lambda2_root(2, 2.0, cfg.tol.root_eps).root;
    if (std::fabs(s0 - 5.0L / 3.0L) > 1e-10L) o.fail("s(t=0) off; ");
    if (std::fabs(s1 - 11.0L / 3.0L) > 1e-10L) o.fail("s(t=2) off; ");
    o.detail << "200 roots, worst residual " << static_cast<double>(worst) << ", s(0)=" << static_cast<double>(s0)
             << ", s(2)=" << static_cast<double>(s1);
  });
}

VerifyReport run_verify(const VerifyConfig& cfg) {
  if (cfg.n_min < 4) throw Error(ErrorCode::DimensionTooSmall, "n_min = " + std::to_string(cfg.n_min) + " < 4");
  if (cfg.n_max > 12 || cfg.n_max < cfg.n_min)
    throw Error(ErrorCode::ParameterOutOfRange, "n range must lie within [4, 12]");

  VerifyReport rep;
  auto stats = sample_orbits(cfg);
  rep.checks.push_back(check_six_classes(stats, cfg));
  rep.checks.push_back(check_restricted_signatures(cfg));
  rep.checks.push_back(check_curvature_tables(cfg));
  rep.checks.push_back(check_flat_einstein_soliton(cfg));
  rep.checks.push_back(check_ricci_spectra(cfg));
  rep.checks.push_back(check_codimensions(cfg));
  rep.checks.push_back(check_degeneration_graph(cfg));
  rep.checks.push_back(check_ivt_roots(cfg));
  rep.checks.push_back(check_witnesses(stats, cfg));
  return rep;
}

}  // namespace metriclass
