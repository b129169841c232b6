#pragma once

#include "volalab/diagnostics.hpp"
#include "volalab/estimate.hpp"
#include "volalab/inference.hpp"
#include "volalab/montecarlo.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace volalab {

inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Finite values as numbers, +-inf as strings, NaN as null.
Json json_number(double v);
Json json_vector(const Eigen::VectorXd& v);
Json json_matrix(const Eigen::MatrixXd& m);

Json to_json(const DiagnosticsReport& rep);
Json to_json(const WaldReport& wald);
Json to_json(const ComparisonReport& cmp);
/// Fit report; residuals are left out unless `with_residuals`.
Json to_json(const FitResult& fit, const std::optional<WaldReport>& wald = std::nullopt, bool with_residuals = false);
Json to_json(const McReport& mc);

/// Table-1 style rows: estimates with bracketed standard errors, symmetry p-value, log-likelihood.
std::string fit_table(const std::vector<FitResult>& fits, const std::vector<std::optional<WaldReport>>& walds);
std::string diagnostics_table(const DiagnosticsReport& rep);
std::string montecarlo_table(const McReport& mc);

} // namespace volalab
