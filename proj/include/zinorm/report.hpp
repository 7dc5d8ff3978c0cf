#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zinorm/indicators.hpp"
#include "zinorm/inference.hpp"
#include "zinorm/model.hpp"
#include "zinorm/profiles.hpp"

namespace zinorm {

struct ReportOptions {
  std::vector<IndicatorKind> indicators;
  FilterConfig filter;
  BuildOptions build;
  IndicatorOptions indicator;
  /// Group pairs to compare with classify_overlap, for every indicator.
  std::vector<std::pair<std::string, std::string>> compare;
  /// Emit the world-vs-world reference row.
  bool include_world_row = true;
};

struct ReportRow {
  std::string group_id;
  IndicatorResult result;
  /// Absent when the value is 2 or more.
  std::optional<double> percent_vs_world;
};

struct ComparisonRow {
  IndicatorKind kind = IndicatorKind::mhq;
  std::string group_a;
  std::string group_b;
  OverlapVerdict verdict;
};

struct ProfileSummary {
  double papers = 0.0;
  double mentioned = 0.0;
  std::size_t strata = 0;
};

struct AuditSummary {
  /// Ingested counts, before filtering and correction.
  ProfileSummary world_ingested;
  std::map<std::string, ProfileSummary> groups_ingested;
  /// World after filtering, before correction.
  ProfileSummary world_analyzed;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<ComparisonRow> comparisons;
  AuditSummary audit;
};

/// Filters, corrects, and evaluates every requested indicator for every
/// group of freshly built (unfiltered) profiles. Rows are sorted by
/// (group_id, kind).
Report compute_report(const Profiles& built, const ReportOptions& options);

struct ReportConfig {
  std::filesystem::path publications;
  std::filesystem::path membership;
  ReportOptions options;
};

/// Parses both input files and runs compute_report.
Report run_report(const ReportConfig& config);

/// Parses "G1:G2".
std::pair<std::string, std::string> parse_group_pair(const std::string& text);

nlohmann::json report_to_json(const Report& report);
std::string render_json(const Report& report);
std::string render_table(const Report& report);

}  // namespace zinorm
