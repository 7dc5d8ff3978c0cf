#include "zinorm/report.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iterator>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "zinorm/csv_io.hpp"
#include "zinorm/errors.hpp"

namespace zinorm {
namespace {

ProfileSummary summarize(const CountProfile& p) {
  return ProfileSummary{p.total(), p.mentioned(), p.cells.size()};
}

bool wants(const ReportOptions& options, IndicatorKind kind) {
  return std::find(options.indicators.begin(), options.indicators.end(), kind) !=
         options.indicators.end();
}

struct Stages {
  const Profiles& filtered;
  const Profiles* corrected;  // null unless MNPC runs with correction
};

const CountProfile& pick(const Profiles& p, const std::string& id) {
  return id == kWorldLabel ? p.world : p.groups.at(id);
}

std::vector<std::string> corrected_strata_notes(const CountProfile& before,
                                                const CountProfile& after) {
  std::vector<std::string> notes;
  for (const auto& [key, cell] : after.cells) {
    auto it = before.cells.find(key);
    if (it != before.cells.end() && !(it->second == cell)) {
      notes.push_back(fmt::format("continuity correction in {}: {}/{} -> {}/{}",
                                  to_string(key), it->second.mentioned,
                                  it->second.not_mentioned, cell.mentioned,
                                  cell.not_mentioned));
    }
  }
  return notes;
}

std::vector<ReportRow> rows_for(const std::string& id, const Stages& st,
                                const ReportOptions& options) {
  const bool is_world = id == kWorldLabel;
  const CountProfile& group = pick(st.filtered, id);
  const CountProfile& world = st.filtered.world;

  std::vector<ReportRow> rows;
  auto push = [&](IndicatorResult r) {
    ReportRow row{id, std::move(r), std::nullopt};
    if (row.result.value < 2.0) {
      row.percent_vs_world = percent_vs_world(row.result.value);
    }
    rows.push_back(std::move(row));
  };

  for (IndicatorKind kind : options.indicators) {
    switch (kind) {
      case IndicatorKind::emnpc:
        push(emnpc(group, world, options.indicator));
        break;
      case IndicatorKind::mnpc:
        if (st.corrected) {
          const CountProfile& cg = pick(*st.corrected, id);
          IndicatorResult r = mnpc(cg, st.corrected->world);
          r.notes = corrected_strata_notes(group, cg);
          push(std::move(r));
        } else {
          std::vector<std::string> notes;
          IndicatorResult r = mnpc(drop_unmentioned_strata(group, &notes), world);
          r.notes = std::move(notes);
          push(std::move(r));
        }
        break;
      case IndicatorKind::mhq:
        push(mhq(group, world));
        break;
      case IndicatorKind::mhq_prime:
        if (!is_world) push(mhq_prime(group, world));
        break;
    }
  }
  return rows;
}

const ReportRow* find_row(const std::vector<ReportRow>& rows,
                          const std::string& id, IndicatorKind kind) {
  for (const auto& r : rows) {
    if (r.group_id == id && r.result.kind == kind) return &r;
  }
  return nullptr;
}

}  // namespace

Report compute_report(const Profiles& built, const ReportOptions& options) {
  if (options.indicators.empty()) throw InputError("no indicators requested");
  for (const auto& [a, b] : options.compare) {
    for (const auto& id : {a, b}) {
      if (!built.groups.contains(id)) {
        throw InputError(fmt::format("--compare: unknown group '{}'", id));
      }
    }
  }

  Report report;
  report.audit.world_ingested = summarize(built.world);
  for (const auto& [id, g] : built.groups) {
    report.audit.groups_ingested[id] = summarize(g);
  }

  const Profiles filtered = apply_filters(built, options.filter);
  report.audit.world_analyzed = summarize(filtered.world);
  report.audit.notes = filtered.audit;

  std::optional<Profiles> corrected;
  if (wants(options, IndicatorKind::mnpc) &&
      options.filter.zero_handling == ZeroHandling::correct) {
    corrected = continuity_correct(filtered);
    report.audit.notes.insert(report.audit.notes.end(),
                              corrected->audit.begin() + filtered.audit.size(),
                              corrected->audit.end());
  }
  const Stages stages{filtered, corrected ? &*corrected : nullptr};

  std::vector<std::string> ids;
  if (options.include_world_row) ids.emplace_back(kWorldLabel);
  for (const auto& [id, g] : filtered.groups) ids.push_back(id);

  // Groups are independent; results are joined in sorted order so the
  // first failure reported is deterministic.
  const std::size_t workers =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < ids.size(); begin += workers) {
    const std::size_t end = std::min(ids.size(), begin + workers);
    std::vector<std::future<std::vector<ReportRow>>> pending;
    for (std::size_t i = begin; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, [&, i] {
        return rows_for(ids[i], stages, options);
      }));
    }
    for (auto& f : pending) f.wait();
    for (auto& f : pending) {
      auto rows = f.get();
      std::move(rows.begin(), rows.end(), std::back_inserter(report.rows));
    }
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& x, const ReportRow& y) {
                     return std::tie(x.group_id, x.result.kind) <
                            std::tie(y.group_id, y.result.kind);
                   });

  for (const auto& [a, b] : options.compare) {
    for (IndicatorKind kind : options.indicators) {
      const ReportRow* ra = find_row(report.rows, a, kind);
      const ReportRow* rb = find_row(report.rows, b, kind);
      if (!ra || !rb) continue;
      report.comparisons.push_back(
          ComparisonRow{kind, a, b, classify_overlap(ra->result, rb->result)});
    }
  }
  return report;
}

Report run_report(const ReportConfig& config) {
  std::ifstream pubs(config.publications);
  if (!pubs) {
    throw InputError(fmt::format("cannot open publications file '{}'",
                                 config.publications.string()));
  }
  std::ifstream members(config.membership);
  if (!members) {
    throw InputError(fmt::format("cannot open membership file '{}'",
                                 config.membership.string()));
  }
  const auto records = parse_publications(pubs);
  const auto membership = parse_membership(members);
  for (const auto& w : membership.warnings) spdlog::warn("{}", w);
  spdlog::debug("read {} publication rows and {} memberships", records.size(),
               membership.pairs.size());

  const Profiles built =
      build_profiles(records, membership.pairs, config.options.build);
  Report report = compute_report(built, config.options);
  report.audit.warnings = membership.warnings;
  return report;
}

std::pair<std::string, std::string> parse_group_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size() ||
      text.find(':', colon + 1) != std::string::npos) {
    throw InputError(fmt::format("expected G1:G2, got '{}'", text));
  }
  return {text.substr(0, colon), text.substr(colon + 1)};
}

nlohmann::json report_to_json(const Report& report) {
  using nlohmann::json;
  json doc;
  json groups = json::object();
  for (const auto& row : report.rows) {
    const auto& r = row.result;
    json entry = {{"value", r.value},
                  {"ci", {r.ci_lower, r.ci_upper}},
                  {"strata_used", r.strata_used},
                  {"notes", r.notes}};
    if (row.percent_vs_world) entry["percent_vs_world"] = *row.percent_vs_world;
    groups[row.group_id][to_string(r.kind)] = std::move(entry);
  }
  doc["groups"] = std::move(groups);

  json comparisons = json::array();
  for (const auto& c : report.comparisons) {
    comparisons.push_back({{"indicator", to_string(c.kind)},
                           {"groups", {c.group_a, c.group_b}},
                           {"category", to_string(c.verdict.category)},
                           {"significance", significance_label(c.verdict.category)},
                           {"overlap_length", c.verdict.overlap_length},
                           {"overlap_proportion", c.verdict.overlap_proportion},
                           {"arm_ratio", c.verdict.arm_ratio},
                           {"caveat", c.verdict.caveat}});
  }
  doc["comparisons"] = std::move(comparisons);

  auto summary = [](const ProfileSummary& s) {
    return json{{"papers", s.papers}, {"mentioned", s.mentioned},
                {"strata", s.strata}};
  };
  json audit;
  audit["world_ingested"] = summary(report.audit.world_ingested);
  audit["world_analyzed"] = summary(report.audit.world_analyzed);
  audit["groups_ingested"] = json::object();
  for (const auto& [id, s] : report.audit.groups_ingested) {
    audit["groups_ingested"][id] = summary(s);
  }
  audit["notes"] = report.audit.notes;
  audit["warnings"] = report.audit.warnings;
  doc["audit"] = std::move(audit);
  return doc;
}

std::string render_json(const Report& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string render_table(const Report& report) {
  std::string out;
  std::size_t width = 5;
  for (const auto& row : report.rows) width = std::max(width, row.group_id.size());

  out += fmt::format("{:<{}}  {:<9}  {:>6}  {:<16}  {:>6}  {:>8}\n", "group",
                     width, "indicator", "value", "95% CI", "strata", "vs world");
  for (const auto& row : report.rows) {
    const auto& r = row.result;
    const std::string pct = row.percent_vs_world
                                ? fmt::format("{:+.0f}%", *row.percent_vs_world)
                                : std::string("-");
    out += fmt::format("{:<{}}  {:<9}  {:>6.2f}  {:<16}  {:>6}  {:>8}\n",
                       row.group_id, width, to_string(r.kind), r.value,
                       fmt::format("[{:.2f}, {:.2f}]", r.ci_lower, r.ci_upper),
                       r.strata_used, pct);
    for (const auto& note : r.notes) out += fmt::format("    note: {}\n", note);
  }

  if (!report.comparisons.empty()) {
    out += "\ncomparisons\n";
    for (const auto& c : report.comparisons) {
      out += fmt::format(
          "  {} {} vs {}: {} ({}), overlap {:.2f} of mean arm, arm ratio {:.2f}{}\n",
          to_string(c.kind), c.group_a, c.group_b, to_string(c.verdict.category),
          significance_label(c.verdict.category), c.verdict.overlap_proportion,
          c.verdict.arm_ratio, c.verdict.caveat ? " [arms differ > 2x]" : "");
    }
  }

  const auto& a = report.audit;
  out += "\naudit\n";
  out += fmt::format("  world ingested: {} papers, {} mentioned, {} strata\n",
                     a.world_ingested.papers, a.world_ingested.mentioned,
                     a.world_ingested.strata);
  out += fmt::format("  world analyzed: {} papers, {} mentioned, {} strata\n",
                     a.world_analyzed.papers, a.world_analyzed.mentioned,
                     a.world_analyzed.strata);
  for (const auto& [id, s] : a.groups_ingested) {
    out += fmt::format("  group {}: {} papers, {} mentioned, {} strata\n", id,
                       s.papers, s.mentioned, s.strata);
  }
  for (const auto& n : a.notes) out += fmt::format("  {}\n", n);
  for (const auto& w : a.warnings) out += fmt::format("  warning: {}\n", w);
  return out;
}

}  // namespace zinorm
