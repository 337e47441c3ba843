#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metriclass/metrics.hpp"

namespace metriclass {

enum class Flag { NearDegenerate, ClassifierDisagreement };

std::string to_string(Flag f);

/// Chain of factors with (left[m-1] ... left[0]) g (right[0] ... right[k-1]) = target.
/// Left factors live in H' (transposed automorphism pattern), right factors in O(n-1,1).
template <class T>
struct Witness {
  std::vector<Matrix<T>> left;
  std::vector<Matrix<T>> right;
  Matrix<T> target;

  Matrix<T> left_product(std::size_t n) const;
  Matrix<T> right_product(std::size_t n) const;
  /// Appends the factors of a later stage.
  void append(const Witness& later);
};

struct WitnessCheck {
  bool ok = false;
  double residual = 0.0;
  std::string message;
};

/// Re-multiplies the chain and checks every factor's group membership.
/// Exact backend: ok only when the product equals the target exactly.
template <class T>
WitnessCheck verify_witness(const Matrix<T>& g, const Witness<T>& w, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Stages.
// ---------------------------------------------------------------------------

struct O11Normal {
  double a = 0.0;
  int lambda = 0;
  Matrix<double> g;  // 2x2, coordinates (spacelike, timelike)
};

/// (x, y) g = (-lambda a, a), a > 0, g in O(1,1).
O11Normal o11_normalize(double x, double y, double tol = 1e-9);

/// Embeds a k x k block at the given coordinates of the n x n identity.
template <class T>
Matrix<T> embed(const Matrix<T>& block, const std::vector<std::size_t>& coords, std::size_t n);

struct StageResult {
  int lambda = 0;
  double t = 0.0;
  Matrix<double> reached;
  Witness<double> witness;
};

/// Reaches G_lambda: last row (-lambda, 0, ..., 0, 1), last column e_n.
StageResult reduce_last_row(const Matrix<double>& g, double tol = 1e-9);

/// g in G_0 -> witness with target I.
Witness<double> reduce_lambda0(const Matrix<double>& g, double tol = 1e-9);

/// g in G_lambda, lambda in {1,2} -> I + |t| E_{n-1,1} - lambda E_{n,1} (1-based).
StageResult reduce_to_t(const Matrix<double>& g, int lambda, double tol = 1e-9);

/// I + t E_{n-1,1} - lambda E_{n,1} (1-based).
template <class T>
Matrix<T> t_normal_form(const T& t, int lambda, std::size_t n);

/// I + xi E_{n-1,1} - lambda E_{n,1}; the transposed-inverse representative.
template <class T>
Matrix<T> dual_representative(const ClassPair& cls, std::size_t n);

template <class T>
struct BranchResult {
  ClassPair cls;
  Witness<T> witness;
  std::optional<double> s;
  bool near_degenerate = false;
};

/// From t_normal_form(t, 1, n) to the dual representative of (1,0) or (1,1).
/// On the floating backend t below small_t is treated as 0 and flagged.
template <class T>
BranchResult<T> reduce_lambda1(const T& t, std::size_t n, double small_t = 1e-6);

/// From t_normal_form(t, 2, n) to the dual representative of (2,0), (2,sqrt3) or (2,2).
BranchResult<double> reduce_lambda2(double t, std::size_t n, double tol = 1e-9, double root_eps = 1e-12);

/// The equations solved for s >= 5/3: branch 1 (t < sqrt3) and branch 2 (t > sqrt3).
long double lambda2_equation(int branch, long double s, long double t);
/// Root of lambda2_equation on s >= 5/3.
RootResult<long double> lambda2_root(int branch, double t, double root_eps = 1e-12);

// ---------------------------------------------------------------------------
// Classification.
// ---------------------------------------------------------------------------

struct InvariantClass {
  ClassPair cls;
  SignatureTriple center;
  SignatureTriple derived;
  bool near_degenerate = false;
};

/// Restricted signatures of each representative at dimension n, in the order of all_classes().
std::vector<InvariantClass> signature_table(std::size_t n);

template <class T>
InvariantClass classify_by_invariants(const Metric<T>& m, const Tolerances& tol = default_tolerances());

struct ClassificationResult {
  /// Invariant-based class; authoritative when the two classifiers disagree.
  ClassPair cls;
  /// Class reached by the witness chain.
  ClassPair pipeline_cls;
  std::size_t n = 0;
  /// The representative is k times the pullback of M by phi.
  double k = 1.0;
  Matrix<double> phi;
  Frame<double> frame;
  /// Witness on g = m^{-T}, m the factorization of M.
  Matrix<double> g;
  Witness<double> witness;
  /// Exact backend on canonical input.
  std::optional<Witness<QSqrt3>> exact_witness;
  std::optional<Matrix<QSqrt3>> exact_g;
  SignatureTriple center;
  SignatureTriple derived;
  std::optional<double> t;
  std::optional<double> s;
  std::vector<Flag> flags;
  std::string backend = "approx";

  bool has_flag(Flag f) const;
};

ClassificationResult classify(const Metric<double>& m, const Tolerances& tol = default_tolerances());
ClassificationResult classify(const Metric<QSqrt3>& m, const Tolerances& tol = default_tolerances());

}  // namespace metriclass
