#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace zinorm {

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;
/// Year used for every stratum when publication years are collapsed.
inline constexpr int kAllYears = 0;

/// A (field, publication year) combination: the unit of normalization.
struct StratumKey {
  std::string field_id;
  int year = 0;

  auto operator<=>(const StratumKey&) const = default;
  bool operator==(const StratumKey&) const = default;
};

/// Throws InputError unless field_id is non-empty and year lies in
/// [min_year, max_year] (or equals kAllYears).
StratumKey make_stratum_key(std::string field_id, int year,
                            int min_year = kMinYear, int max_year = kMaxYear);

std::string to_string(const StratumKey& key);

/// Mentioned / not-mentioned papers in one stratum. Half-integers appear
/// only after continuity correction.
struct CellCounts {
  double mentioned = 0.0;
  double not_mentioned = 0.0;

  double total() const { return mentioned + not_mentioned; }
  double proportion() const { return mentioned / total(); }

  bool operator==(const CellCounts&) const = default;
};

struct CountProfile {
  std::string label;
  std::map<StratumKey, CellCounts> cells;

  double total() const;
  double mentioned() const;
  bool contains(const StratumKey& key) const { return cells.contains(key); }

  bool operator==(const CountProfile&) const = default;
};

using GroupProfiles = std::map<std::string, CountProfile>;

inline constexpr const char* kWorldLabel = "(world)";

/// One input row: a paper assigned to one field in one year.
struct PublicationRecord {
  std::string paper_id;
  std::string field_id;
  int year = 0;
  std::int64_t mentions = 0;
};

struct Membership {
  std::string paper_id;
  std::string group_id;

  auto operator<=>(const Membership&) const = default;
};

}  // namespace zinorm
