#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "metriclass/curvature.hpp"
#include "metriclass/orbits.hpp"
#include "metriclass/reduction.hpp"

namespace metriclass {

using json = nlohmann::json;

/// Exact scalars are strings ("a/b", "a/b+c/d*sqrt3"); floats stay numbers.
json scalar_to_json(const QSqrt3& x);
json scalar_to_json(double x);
QSqrt3 exact_from_json(const json& j);
double double_from_json(const json& j);

template <class T>
json matrix_to_json(const Matrix<T>& m);
template <class T>
Matrix<T> matrix_from_json(const json& j);

/// {"lambda": 2, "xi": "sqrt3"}; integer values are plain numbers.
json class_to_json(const ClassPair& c);
ClassPair class_from_json(const json& j);

json signature_to_json(const SignatureTriple& s);
SignatureTriple signature_from_json(const json& j);

// Metric: {"n": int, "gram": [[...]], "backend": "exact"|"approx"}.
json metric_to_json(const Metric<double>& m);
json metric_to_json(const Metric<QSqrt3>& m);

using AnyMetric = std::variant<Metric<double>, Metric<QSqrt3>>;

/// Malformed documents raise ParseError; the Metric checks raise their own codes.
/// A non-empty backend overrides the document's.
AnyMetric metric_from_json(const json& j, const std::string& backend = "", double tol = 1e-9);
AnyMetric parse_metric(const std::string& text, const std::string& backend = "", double tol = 1e-9);

json classification_to_json(const ClassificationResult& r);
ClassificationResult classification_from_json(const json& j);

json curvature_to_json(const CurvatureReport<QSqrt3>& r);
CurvatureReport<QSqrt3> curvature_from_json(const json& j);

json orbit_to_json(const OrbitReport& r);
OrbitReport orbit_from_json(const json& j);

json graph_to_json(const DegenerationGraph& g);
DegenerationGraph graph_from_json(const json& j);

/// Sorted keys, two-space indent.
std::string canonical_dump(const json& j);

}  // namespace metriclass
