#pragma once

#include <string>

#include "affqetu/aff.hpp"

namespace aff {

/// Structured run document: config echo, per-stage records, metrics, seeds
/// and estimator results. Additive schema, version field "schema_version".
std::string report_to_json(const RunReport& report);

/// stages table, one row per stage: i, lambda_lb, lambda_ub, mu, p, overlap.
std::string stages_to_csv(const RunReport& report);

/// 17-significant-digit decimal formatting used by every emitted file.
std::string format_value(double v);

} // namespace aff
