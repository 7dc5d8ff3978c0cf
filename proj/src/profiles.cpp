#include "zinorm/profiles.hpp"

#include <map>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "zinorm/errors.hpp"

namespace zinorm {

ZeroHandling parse_zero_handling(const std::string& text) {
  if (text == "correct") return ZeroHandling::correct;
  if (text == "drop") return ZeroHandling::drop;
  throw InputError(fmt::format("unknown zero handling '{}'", text));
}

std::string to_string(ZeroHandling policy) {
  return policy == ZeroHandling::correct ? "correct" : "drop";
}

Profiles build_profiles(std::span<const PublicationRecord> records,
                        std::span<const Membership> memberships,
                        const BuildOptions& options) {
  // paper_id -> strata the paper is assigned to, with its dichotomized flag
  std::map<std::string, std::vector<std::pair<StratumKey, bool>>> assignments;
  std::set<std::pair<std::string, std::string>> seen;

  Profiles out;
  out.world.label = kWorldLabel;
  for (const auto& rec : records) {
    if (rec.mentions < 0) {
      throw InputError(fmt::format("negative mentions for ({}, {})",
                                   rec.paper_id, rec.field_id));
    }
    if (rec.paper_id.empty()) throw InputError("empty paper_id");
    if (!seen.emplace(rec.paper_id, rec.field_id).second) {
      throw InputError(fmt::format("duplicate (paper_id, field_id) = ({}, {})",
                                   rec.paper_id, rec.field_id));
    }
    StratumKey key = options.collapse_years
                         ? make_stratum_key(rec.field_id, kAllYears)
                         : make_stratum_key(rec.field_id, rec.year);
    const bool mentioned = rec.mentions > 0;
    CellCounts& cell = out.world.cells[key];
    (mentioned ? cell.mentioned : cell.not_mentioned) += 1.0;
    assignments[rec.paper_id].emplace_back(std::move(key), mentioned);
  }

  std::set<Membership> unique_members(memberships.begin(), memberships.end());
  for (const auto& m : unique_members) {
    auto it = assignments.find(m.paper_id);
    if (it == assignments.end()) {
      throw InputError(fmt::format(
          "membership references unknown paper_id '{}' (group '{}')",
          m.paper_id, m.group_id));
    }
    if (m.group_id.empty()) throw InputError("empty group_id");
    CountProfile& group = out.groups[m.group_id];
    group.label = m.group_id;
    for (const auto& [key, mentioned] : it->second) {
      CellCounts& cell = group.cells[key];
      (mentioned ? cell.mentioned : cell.not_mentioned) += 1.0;
    }
  }
  return out;
}

namespace {

void erase_stratum(Profiles& p, const StratumKey& key) {
  p.world.cells.erase(key);
  for (auto& [id, group] : p.groups) group.cells.erase(key);
}

}  // namespace

Profiles apply_filters(Profiles p, const FilterConfig& cfg) {
  std::vector<StratumKey> doomed;

  if (cfg.restrict_to_group_strata) {
    auto it = p.groups.find(*cfg.restrict_to_group_strata);
    if (it == p.groups.end()) {
      throw InputError(fmt::format("restrict-to-group-strata: unknown group '{}'",
                                   *cfg.restrict_to_group_strata));
    }
    for (const auto& [key, cell] : p.world.cells) {
      if (!it->second.contains(key)) {
        p.audit.push_back(fmt::format("dropped {}: no papers of group '{}'",
                                      to_string(key), it->first));
        doomed.push_back(key);
      }
    }
    for (const auto& key : doomed) erase_stratum(p, key);
    doomed.clear();
  }

  for (const auto& [key, cell] : p.world.cells) {
    if (cell.total() < static_cast<double>(cfg.min_stratum_papers)) {
      p.audit.push_back(fmt::format("dropped {}: {} papers < {}",
                                    to_string(key), cell.total(),
                                    cfg.min_stratum_papers));
      doomed.push_back(key);
    }
  }
  for (const auto& key : doomed) erase_stratum(p, key);
  doomed.clear();

  if (cfg.require_nonzero_world_cells &&
      cfg.zero_handling == ZeroHandling::drop) {
    for (const auto& [key, cell] : p.world.cells) {
      if (cell.mentioned == 0.0 || cell.not_mentioned == 0.0) {
        p.audit.push_back(fmt::format(
            "dropped {}: zero world cell ({} mentioned, {} not mentioned)",
            to_string(key), cell.mentioned, cell.not_mentioned));
        doomed.push_back(key);
      }
    }
    for (const auto& key : doomed) erase_stratum(p, key);
  }

  if (p.world.cells.empty()) throw InputError("no strata remain");
  return p;
}

namespace {

void add_half(CellCounts& cell) {
  cell.mentioned += 0.5;
  cell.not_mentioned += 0.5;
}

}  // namespace

Profiles continuity_correct(Profiles p) {
  for (auto& [key, world_cell] : p.world.cells) {
    if (world_cell.mentioned == 0.0) {
      CellCounts group_sum;
      CellCounts corrected_sum;
      std::size_t present = 0;
      for (auto& [id, group] : p.groups) {
        auto it = group.cells.find(key);
        if (it == group.cells.end()) continue;
        ++present;
        group_sum.mentioned += it->second.mentioned;
        group_sum.not_mentioned += it->second.not_mentioned;
        add_half(it->second);
        corrected_sum.mentioned += it->second.mentioned;
        corrected_sum.not_mentioned += it->second.not_mentioned;
      }
      if (present > 0 && group_sum == world_cell) {
        world_cell = corrected_sum;
        p.audit.push_back(fmt::format(
            "continuity correction {}: {} group(s) +0.5/+0.5, world rebuilt "
            "as their sum",
            to_string(key), present));
      } else {
        add_half(world_cell);
        p.audit.push_back(fmt::format(
            "continuity correction {}: world +0.5/+0.5 independently of "
            "{} group(s)",
            to_string(key), present));
      }
      continue;
    }
    for (auto& [id, group] : p.groups) {
      auto it = group.cells.find(key);
      if (it == group.cells.end() || it->second.mentioned != 0.0) continue;
      add_half(it->second);
      p.audit.push_back(fmt::format(
          "continuity correction {}: group '{}' +0.5/+0.5", to_string(key), id));
    }
  }
  return p;
}

CountProfile drop_unmentioned_strata(CountProfile group,
                                     std::vector<std::string>* audit) {
  std::erase_if(group.cells, [&](const auto& entry) {
    if (entry.second.mentioned != 0.0) return false;
    if (audit) {
      audit->push_back(fmt::format("dropped {} for group '{}': no mentioned papers",
                                   to_string(entry.first), group.label));
    }
    return true;
  });
  return group;
}

}  // namespace zinorm
