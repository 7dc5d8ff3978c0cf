#include "zinorm/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "zinorm/errors.hpp"

namespace zinorm {

std::string to_string(IndicatorKind kind) {
  switch (kind) {
    case IndicatorKind::emnpc: return "emnpc";
    case IndicatorKind::mnpc: return "mnpc";
    case IndicatorKind::mhq: return "mhq";
    case IndicatorKind::mhq_prime: return "mhq_prime";
  }
  return "?";
}

IndicatorKind parse_indicator_kind(const std::string& text) {
  for (auto kind : {IndicatorKind::emnpc, IndicatorKind::mnpc,
                    IndicatorKind::mhq, IndicatorKind::mhq_prime}) {
    if (text == to_string(kind)) return kind;
  }
  throw InputError(fmt::format("unknown indicator '{}'", text));
}

std::vector<IndicatorKind> parse_indicator_list(const std::string& text) {
  std::vector<IndicatorKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    IndicatorKind kind = parse_indicator_kind(item);
    if (std::find(kinds.begin(), kinds.end(), kind) != kinds.end()) {
      throw InputError(fmt::format("indicator '{}' listed twice", item));
    }
    kinds.push_back(kind);
  }
  if (kinds.empty()) throw InputError("no indicators requested");
  return kinds;
}

namespace {

void require_subset(const CountProfile& group, const CountProfile& world) {
  for (const auto& [key, cell] : group.cells) {
    if (!world.contains(key)) {
      throw InputError(fmt::format("group '{}' has stratum {} missing from world",
                                   group.label, to_string(key)));
    }
  }
}

void require_nonempty(const CountProfile& profile) {
  if (profile.cells.empty() || profile.total() <= 0.0) {
    throw DegenerateError(fmt::format("profile '{}' has no papers", profile.label));
  }
}

IndicatorResult finish(IndicatorKind kind, double value, double lower,
                       double upper, std::size_t strata,
                       std::vector<std::string> notes) {
  if (!(value > 0.0) || !(lower > 0.0) || !(lower <= value) ||
      !(value <= upper) || !std::isfinite(upper)) {
    throw DegenerateError(fmt::format(
        "{}: invalid interval {} [{}, {}]", to_string(kind), value, lower, upper));
  }
  if (strata == 0) {
    throw DegenerateError(fmt::format("{}: no strata used", to_string(kind)));
  }
  return IndicatorResult{kind, value, lower, upper, strata, std::move(notes)};
}

/// ((1 - p) / p) / n: the log-ratio variance contribution of one proportion.
double log_ratio_term(double p, double n) { return ((1.0 - p) / p) / n; }

}  // namespace

double pooled_proportion(const CountProfile& profile) {
  const double n = profile.total();
  if (n <= 0.0) {
    throw DegenerateError(fmt::format("profile '{}' has no papers", profile.label));
  }
  return profile.mentioned() / n;
}

double equalized_proportion(const CountProfile& profile) {
  if (profile.cells.empty()) {
    throw DegenerateError(fmt::format("profile '{}' is empty", profile.label));
  }
  double sum = 0.0;
  for (const auto& [key, cell] : profile.cells) {
    if (cell.total() <= 0.0) {
      throw DegenerateError(fmt::format("stratum {} of '{}' has no papers",
                                        to_string(key), profile.label));
    }
    sum += cell.proportion();
  }
  return sum / static_cast<double>(profile.cells.size());
}

IndicatorResult emnpc(const CountProfile& group, const CountProfile& world,
                      const IndicatorOptions& options) {
  require_nonempty(group);
  require_subset(group, world);

  CountProfile world_used;
  if (options.restrict_world_to_group_strata) {
    world_used.label = world.label;
    for (const auto& [key, cell] : group.cells) {
      world_used.cells.emplace(key, world.cells.at(key));
    }
  }
  const CountProfile& w = options.restrict_world_to_group_strata ? world_used : world;

  const double pg = equalized_proportion(group);
  const double pw = equalized_proportion(w);
  if (pg <= 0.0 || pw <= 0.0) {
    throw DegenerateError(
        "EMNPC undefined; apply continuity correction or drop strata");
  }
  const double ng = group.total();
  const double nw = w.total();
  const double value = pg / pw;
  const double half =
      kZ95 * std::sqrt(log_ratio_term(pg, ng) + log_ratio_term(pw, nw));

  std::vector<std::string> notes;
  notes.push_back(fmt::format(
      "interval uses pooled sizes n_g={} and n_w={} with equalized proportions",
      ng, nw));
  if (options.restrict_world_to_group_strata) {
    notes.push_back("world averaged over the group's strata only");
  }
  return finish(IndicatorKind::emnpc, value, std::exp(std::log(value) - half),
                std::exp(std::log(value) + half), group.cells.size(),
                std::move(notes));
}

IndicatorResult mnpc(const CountProfile& group, const CountProfile& world) {
  require_nonempty(group);
  require_subset(group, world);
  const double ng = group.total();

  // Each term is weighted by n_gf; dividing once by n_g keeps the
  // world-vs-world value exactly 1.
  double weighted_ratio = 0.0;
  double weighted_lower_dev = 0.0;
  double weighted_upper_dev = 0.0;
  for (const auto& [key, gcell] : group.cells) {
    const CellCounts& wcell = world.cells.at(key);
    const double ngf = gcell.total();
    const double nwf = wcell.total();
    if (nwf <= 0.0 || wcell.mentioned <= 0.0) {
      throw DegenerateError(fmt::format(
          "MNPC undefined: world proportion is zero in {}; apply zero handling",
          to_string(key)));
    }
    if (gcell.mentioned <= 0.0) {
      throw DegenerateError(fmt::format(
          "MNPC interval undefined: group '{}' has no mentioned papers in {}; "
          "apply zero handling",
          group.label, to_string(key)));
    }
    const double pgf = gcell.mentioned / ngf;
    const double pwf = wcell.mentioned / nwf;
    const double ratio = pgf / pwf;
    const double half =
        kZ95 * std::sqrt(log_ratio_term(pgf, ngf) + log_ratio_term(pwf, nwf));
    const double lower = std::exp(std::log(ratio) - half);
    const double upper = std::exp(std::log(ratio) + half);
    weighted_ratio += ngf * ratio;
    weighted_lower_dev += ngf * (ratio - lower);
    weighted_upper_dev += ngf * (upper - ratio);
  }
  const double value = weighted_ratio / ng;
  return finish(IndicatorKind::mnpc, value, value - weighted_lower_dev / ng,
                value + weighted_upper_dev / ng, group.cells.size(), {});
}

void MhAccumulator::add(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  if (!(n > 0.0)) throw DegenerateError("empty 2x2 table");
  const double rf = a * d / n;
  const double sf = b * c / n;
  const double pf = (a + d) / n;
  const double qf = 1.0 - pf;
  r_ += rf;
  s_ += sf;
  sum_pr_ += pf * rf;
  sum_ps_qr_ += pf * sf + qf * rf;
  sum_qs_ += qf * sf;
  if (rf > 0.0 || sf > 0.0) ++informative_;
}

MhAccumulator::Estimate MhAccumulator::finalize() const {
  if (!(r_ > 0.0) || !(s_ > 0.0)) {
    throw DegenerateError("MHq degenerate; all-or-none mentioning");
  }
  const double value = r_ / s_;
  const double var = 0.5 * (sum_pr_ / (r_ * r_) + sum_ps_qr_ / (r_ * s_) +
                            sum_qs_ / (s_ * s_));
  const double half = kZ95 * std::sqrt(var);
  const double log_value = std::log(value);
  return Estimate{value, var, std::exp(log_value - half),
                  std::exp(log_value + half)};
}

namespace {

struct Row {
  double mentioned;
  double not_mentioned;
};

Row group_row(const CountProfile& group, const StratumKey& key) {
  auto it = group.cells.find(key);
  if (it == group.cells.end()) return {0.0, 0.0};
  return {it->second.mentioned, it->second.not_mentioned};
}

void require_contained(const Row& g, const CellCounts& w,
                       const CountProfile& group, const StratumKey& key) {
  if (g.mentioned > w.mentioned || g.not_mentioned > w.not_mentioned) {
    throw InputError(fmt::format("group '{}' exceeds the world in {}",
                                 group.label, to_string(key)));
  }
}

}  // namespace

IndicatorResult mhq(const CountProfile& group, const CountProfile& world) {
  require_subset(group, world);
  MhAccumulator acc;
  for (const auto& [key, wcell] : world.cells) {
    const Row g = group_row(group, key);
    require_contained(g, wcell, group, key);
    acc.add(g.mentioned, g.not_mentioned, wcell.mentioned, wcell.not_mentioned);
  }
  const auto est = acc.finalize();
  return finish(IndicatorKind::mhq, est.value, est.ci_lower, est.ci_upper,
                acc.informative_strata(), {});
}

IndicatorResult mhq_prime(const CountProfile& group, const CountProfile& world) {
  require_subset(group, world);
  MhAccumulator acc;
  std::vector<std::string> notes;
  std::size_t with_complement = 0;
  for (const auto& [key, wcell] : world.cells) {
    const Row g = group_row(group, key);
    require_contained(g, wcell, group, key);
    const double c = wcell.mentioned - g.mentioned;
    const double d = wcell.not_mentioned - g.not_mentioned;
    if (c + d <= 0.0) {
      notes.push_back(fmt::format("skipped {}: no papers outside the group",
                                  to_string(key)));
      continue;
    }
    ++with_complement;
    acc.add(g.mentioned, g.not_mentioned, c, d);
  }
  if (with_complement == 0) {
    throw DegenerateError("MHq' undefined: the group is the whole world");
  }
  const auto est = acc.finalize();
  return finish(IndicatorKind::mhq_prime, est.value, est.ci_lower, est.ci_upper,
                acc.informative_strata(), std::move(notes));
}

double percent_vs_world(double value) { return 100.0 * (value - 1.0); }

}  // namespace zinorm
