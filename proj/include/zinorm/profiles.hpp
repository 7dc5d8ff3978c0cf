#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zinorm/model.hpp"

namespace zinorm {

enum class ZeroHandling { correct, drop };

ZeroHandling parse_zero_handling(const std::string& text);
std::string to_string(ZeroHandling policy);

struct FilterConfig {
  std::size_t min_stratum_papers = 10;
  bool require_nonzero_world_cells = true;
  std::optional<std::string> restrict_to_group_strata;
  ZeroHandling zero_handling = ZeroHandling::correct;
};

struct Profiles {
  CountProfile world;
  GroupProfiles groups;
  /// Human-readable record of every stratum removed or corrected.
  std::vector<std::string> audit;
};

struct BuildOptions {
  /// Pool all publication years of a field into one stratum.
  bool collapse_years = false;
};

/// Dichotomizes mention counts and counts every (paper, field) assignment
/// once in the world and once in each group the paper belongs to.
Profiles build_profiles(std::span<const PublicationRecord> records,
                        std::span<const Membership> memberships,
                        const BuildOptions& options = {});

/// Removes strata per the filter rules. Order: group-strata restriction,
/// then the minimum world size, then (drop policy only) zero world cells.
Profiles apply_filters(Profiles profiles, const FilterConfig& cfg);

/// Adds 0.5 to the mentioned and not-mentioned cells wherever a mentioned
/// count is zero. A zero world stratum corrects every group present in it;
/// the world cell becomes the sum of the corrected groups when the groups
/// partition it, otherwise it is corrected on its own. A zero group
/// stratum under a positive world corrects that group only.
Profiles continuity_correct(Profiles profiles);

/// Removes group strata with no mentioned papers (drop policy for MNPC).
CountProfile drop_unmentioned_strata(CountProfile group,
                                     std::vector<std::string>* audit = nullptr);

}  // namespace zinorm
