#pragma once

// CSV and JSON writers for certificates, fields, traces, policies and
// verification reports.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsplan/monotone.hpp"
#include "rsplan/pipeline.hpp"
#include "rsplan/simulate.hpp"

namespace rsplan {

nlohmann::json certificate_to_json(const SubSuperCertificate& cert);

/// Columns x0[,x1,x2],u1,u2,z1,z2, one row per interior node.
void write_field_csv(std::ostream& out, const GridField& u1, const GridField& u2, const ValueFields& values);

/// Grid layout, tolerance, iteration count, residuals and certificates.
nlohmann::json field_metadata(const Solution& solution, const MonotoneOptions& options);

void write_trace_csv(std::ostream& out, const IterationTrace& trace);

/// Columns x0[,x1,x2],p1_0[,...],p2_0[,...] over interior nodes.
void write_policy_csv(std::ostream& out, const PolicyField& policy);

/// Columns path,t,regime,y0[,y1,y2],discount,cost.
void write_path_csv(std::ostream& out, int dim, const std::vector<StepRecord>& samples);

nlohmann::json estimate_to_json(const PolicyEstimate& e);
nlohmann::json report_to_json(const VerificationReport& report);

/// Writes text to a file, creating parent directories.
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace rsplan
