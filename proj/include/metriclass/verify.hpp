#pragma once

#include <random>
#include <string>
#include <vector>

#include "metriclass/serialize.hpp"

namespace metriclass {

enum class Mutation { None, CurvatureSign };

struct VerifyConfig {
  std::size_t n_min = 4;
  std::size_t n_max = 8;
  /// Randomized metrics per (class, n) for the orbit-sampling check.
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  bool parallel = true;
  /// Deliberately corrupts the closed-form curvature tables (smoke test).
  Mutation mutation = Mutation::None;
  Tolerances tol = default_tolerances();
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  json to_json() const;
};

/// Random element of the Aut pattern with a dominant diagonal.
Matrix<double> random_aut(std::size_t n, std::mt19937_64& rng);
/// act(c phi, representative) for random c != 0 and phi from random_aut.
Matrix<double> random_orbit_point(const ClassPair& cls, std::size_t n, std::mt19937_64& rng);

/// Aggregate over the randomized orbit sampling.
struct SamplingStats {
  std::size_t total = 0;
  std::size_t wrong_invariant = 0;
  std::size_t wrong_pipeline = 0;
  std::size_t disagreements = 0;
  std::size_t witness_failures = 0;
  double max_residual = 0.0;
  std::size_t exact_witnesses = 0;
  std::size_t exact_failures = 0;
  double seconds = 0.0;
  std::string first_failure;
};

SamplingStats sample_orbits(const VerifyConfig& cfg);

CheckResult check_six_classes(const SamplingStats& s, const VerifyConfig& cfg);
CheckResult check_restricted_signatures(const VerifyConfig& cfg);
CheckResult check_curvature_tables(const VerifyConfig& cfg);
CheckResult check_flat_einstein_soliton(const VerifyConfig& cfg);
CheckResult check_ricci_spectra(const VerifyConfig& cfg);
CheckResult check_codimensions(const VerifyConfig& cfg);
CheckResult check_degeneration_graph(const VerifyConfig& cfg);
CheckResult check_ivt_roots(const VerifyConfig& cfg);
CheckResult check_witnesses(const SamplingStats& s, const VerifyConfig& cfg);

/// Every check above, in that order. Throws DimensionTooSmall for n_min < 4.
VerifyReport run_verify(const VerifyConfig& cfg);

}  // namespace metriclass
