#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "zinorm/indicators.hpp"
#include "zinorm/model.hpp"
#include "zinorm/report.hpp"

namespace zinorm {

enum class QualityLabel { q0, q1, q2 };

std::string to_string(QualityLabel label);

struct QualityGroup {
  QualityLabel label = QualityLabel::q0;
  double ffa = 0.0;
};

/// Mean recommendation score (1..3) of one paper, bucketed into
/// Q0 (never recommended), Q1 (mean <= 1) or Q2 (mean > 1).
QualityGroup ffa_group(std::span<const int> scores);

struct StratumSpec {
  StratumKey key;
  /// World papers in the stratum, groups included.
  std::size_t size = 0;
  /// World mention probability.
  double probability = 0.0;
};

struct GroupSpec {
  std::string label;
  /// Per-stratum sizes and odds multipliers, aligned with WorldSpec::strata.
  std::vector<std::size_t> sizes;
  std::vector<double> theta;
};

struct WorldSpec {
  std::vector<StratumSpec> strata;
  std::vector<GroupSpec> groups;
  std::uint64_t seed = 0;
};

/// Accepts scalar or per-stratum arrays for a group's "sizes" and "theta".
WorldSpec parse_world_spec(const nlohmann::json& doc);
WorldSpec load_world_spec(const std::string& path);

/// Probabilities implied by a spec: each group's odds are theta times the
/// world odds; the background absorbs the rest of the world.
struct StratumDesign {
  std::vector<double> group_probability;
  std::size_t background_size = 0;
  double background_probability = 0.0;
};

/// Throws InputError for invalid specs or a derived probability outside
/// [0, 1].
std::vector<StratumDesign> derive_design(const WorldSpec& spec);

struct SyntheticData {
  std::vector<PublicationRecord> records;
  std::vector<Membership> memberships;
};

SyntheticData generate_synthetic(const WorldSpec& spec);

/// splitmix64 step applied to (master, index); used for per-replication
/// seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct CoverageCell {
  double truth = 0.0;
  std::size_t covered = 0;
  std::size_t valid = 0;
  std::size_t degenerate = 0;
  double mean_value = 0.0;

  double fraction() const {
    return valid == 0 ? 0.0 : static_cast<double>(covered) / valid;
  }
};

struct CoverageReport {
  std::size_t replications = 0;
  double nominal = 0.95;
  /// group label -> indicator -> tallies
  std::map<std::string, std::map<IndicatorKind, CoverageCell>> cells;
};

/// Analytic large-sample targets of each indicator for one group.
std::map<IndicatorKind, double> true_indicator_values(const WorldSpec& spec,
                                                      std::size_t group_index);

/// Simulates the spec `replications` times (>= 100) and counts how often
/// each 95% interval contains the analytic target. Degenerate replications
/// are tallied separately and excluded.
CoverageReport coverage_experiment(const WorldSpec& spec,
                                   std::size_t replications,
                                   double nominal = 0.95,
                                   unsigned threads = 0);

nlohmann::json coverage_to_json(const CoverageReport& report);

struct ValidityResult {
  /// One report per publication year; groups compared with their neighbour
  /// in spec order.
  std::map<int, Report> years;
};

ValidityResult convergent_validity_run(const WorldSpec& spec,
                                       const FilterConfig& filter = {});

nlohmann::json validity_to_json(const ValidityResult& result);

}  // namespace zinorm
