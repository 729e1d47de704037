#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pdtune/bounds.hpp"
#include "pdtune/gj.hpp"
#include "pdtune/harness.hpp"
#include "pdtune/piecewise.hpp"
#include "pdtune/polynomial.hpp"
#include "pdtune/regularization.hpp"
#include "pdtune/shatter.hpp"

// JSON forms of the library's value types. Writers are deterministic (terms
// in exponent order, maps in key order); readers validate and throw
// std::invalid_argument with the offending field in the message.

namespace pdtune {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j);

json to_json(const RationalFunction& r);
RationalFunction rational_from_json(const json& j);

json to_json(const SignPattern& s);
SignPattern sign_pattern_from_json(const json& j);

json to_json(const DomainBox& b);
DomainBox domain_box_from_json(const json& j);

json to_json(const Complexity& c);

json to_json(const PiecewisePolyFn& f);
PiecewisePolyFn piecewise_from_json(const json& j, PiecewiseOptions opts = {});

json to_json(const PiecewiseRationalPath& path);
PiecewiseRationalPath path_from_json(const json& j);

json to_json(const GjProgram& prog);
GjProgram gj_from_json(const json& j);

json to_json(const BoundReport& r);
BoundReport bound_report_from_json(const json& j);

json to_json(const FolComplexity& fc);
FolComplexity fol_from_json(const json& j);

json to_json(const ProblemInstance& x);
ProblemInstance instance_from_json(const json& j);
ProblemInstance load_instance(const std::filesystem::path& path);

json to_json(const DualSolution& s);

json to_json(const DistributionSpec& s);
DistributionSpec distribution_from_json(const json& j);

json to_json(const AlphaGrid& g);
AlphaGrid grid_from_json(const json& j);

json to_json(const TuneResult& r);
json to_json(const GapCurveResult& r);
json to_json(const ShatterWitness& w);
json to_json(const ShatterResult& r);

json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j, const std::string& field);
json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field);

/// 17 significant digits, the shortest form that round-trips every double.
std::string format_real(double v);

}  // namespace pdtune
