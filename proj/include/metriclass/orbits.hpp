#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "metriclass/metrics.hpp"

namespace metriclass {

struct UWDims {
  std::size_t dim_u = 0;
  std::size_t dim_w = 0;
};

/// Ranks of the two linear systems cutting out U and W inside the stabilizer.
UWDims dims_UW(const ClassPair& cls, std::size_t n);

/// 1 + (n-4)(n-5)/2 + dimU + dimW.
std::size_t stabilizer_dim_closed_form(const ClassPair& cls, std::size_t n);

/// Dimension of {X in the Aut pattern : (g^-1 X g)^T J + J (g^-1 X g) = 0}, exact.
std::size_t stabilizer_dim_generic(const ClassPair& cls, std::size_t n);

/// Both of the above; throws OracleMismatch if they differ.
std::size_t stabilizer_dim(const ClassPair& cls, std::size_t n);

/// n(n+1)/2 - (n^2 - 3n + 7 - stab).
std::size_t codimension(const ClassPair& cls, std::size_t n);

enum class Family { A, B, C, D, E, F };

const std::array<Family, 6>& all_families();
char family_name(Family f);
std::optional<Family> parse_family(char c);

struct FamilySpec {
  Family family;
  ClassPair source;
  ClassPair target;
  /// Parameter interval; the endpoint is excluded from the family itself.
  double lo = 0.0;
  double hi = 0.0;
  bool endpoint_at_hi = true;
};

FamilySpec family_spec(Family f);

/// (lambda, xi) along the family. D is parametrized by s with xi = sqrt(s^2 - 1).
std::pair<double, double> curve_parameters(Family f, double t);

/// parametric metric at parameter t; t must lie in the closed interval.
Metric<double> curve_sample(Family f, double t, std::size_t n);

/// Exact metric at the limit endpoint.
Metric<QSqrt3> curve_endpoint(Family f, std::size_t n);

struct CurveEvidence {
  Family family;
  ClassPair source;
  ClassPair target;
  std::vector<double> interior;
  double near_endpoint = 0.0;
  bool near_flagged = false;
};

/// Samples 10 interior points and one point 1e-4 from the endpoint, and
/// classifies the exact endpoint; throws EvidenceFailure on any disagreement
/// with the declared classes.
CurveEvidence sample_curve(Family f, std::size_t n);

enum class EdgeKind { Curve, Transitive };
enum class Obstruction { Dimension, SignatureJump };

std::string to_string(EdgeKind k);
std::string to_string(Obstruction o);

struct Edge {
  ClassPair from;
  ClassPair to;
  EdgeKind kind = EdgeKind::Curve;
  std::optional<Family> family;
};

struct NonEdge {
  ClassPair from;
  ClassPair to;
  Obstruction obstruction = Obstruction::Dimension;
};

struct DegenerationGraph {
  std::size_t n = 0;
  std::vector<ClassPair> nodes;
  std::vector<Edge> edges;
  std::vector<NonEdge> non_edges;
  std::vector<CurveEvidence> evidence;

  bool has_edge(const ClassPair& from, const ClassPair& to) const;
  std::vector<ClassPair> successors(const ClassPair& from) const;
  std::vector<Edge> direct_edges() const;
  std::vector<ClassPair> sinks() const;
  bool acyclic() const;
  std::string to_dot() const;
};

/// True if a restricted form would need a new positive or negative direction.
bool signature_jump(const ClassPair& from, const ClassPair& to, std::size_t n);

DegenerationGraph degeneration_graph(std::size_t n);

/// No outgoing edge in the graph; throws OracleMismatch unless this agrees
/// with flatness.
bool is_closed(const ClassPair& cls, std::size_t n = 4);

struct OrbitReport {
  ClassPair cls;
  std::size_t n = 0;
  std::size_t dim_u = 0;
  std::size_t dim_w = 0;
  std::size_t stab_dim = 0;
  std::size_t codim = 0;
  SignatureTriple sig_center;
  SignatureTriple sig_derived;
  bool closed = false;
};

OrbitReport orbit_report(const ClassPair& cls, std::size_t n);

}  // namespace metriclass
