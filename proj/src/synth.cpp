#include "zinorm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "zinorm/errors.hpp"
#include "zinorm/profiles.hpp"

namespace zinorm {

using Engine = boost::random::mt19937_64;

std::string to_string(QualityLabel label) {
  switch (label) {
    case QualityLabel::q0: return "Q0";
    case QualityLabel::q1: return "Q1";
    case QualityLabel::q2: return "Q2";
  }
  return "?";
}

QualityGroup ffa_group(std::span<const int> scores) {
  double sum = 0.0;
  for (int s : scores) {
    if (s < 1 || s > 3) {
      throw InputError(fmt::format("recommendation score {} outside 1..3", s));
    }
    sum += s;
  }
  QualityGroup q;
  q.ffa = scores.empty() ? 0.0 : sum / static_cast<double>(scores.size());
  if (q.ffa == 0.0) {
    q.label = QualityLabel::q0;
  } else if (q.ffa <= 1.0) {
    q.label = QualityLabel::q1;
  } else {
    q.label = QualityLabel::q2;
  }
  return q;
}

namespace {

template <typename T>
std::vector<T> scalar_or_array(const nlohmann::json& value, std::size_t n,
                               const std::string& what) {
  if (value.is_array()) {
    if (value.size() != n) {
      throw InputError(fmt::format("{} has {} entries, expected {}", what,
                                   value.size(), n));
    }
    return value.get<std::vector<T>>();
  }
  return std::vector<T>(n, value.get<T>());
}

void require_csv_safe(const std::string& text, const std::string& what) {
  if (text.empty() || text.find_first_of(",\n\r") != std::string::npos) {
    throw InputError(fmt::format("{} '{}' must be non-empty without commas",
                                 what, text));
  }
}

}  // namespace

WorldSpec parse_world_spec(const nlohmann::json& doc) {
  try {
    WorldSpec spec;
    spec.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& s : doc.at("strata")) {
      StratumSpec st;
      st.key = make_stratum_key(s.at("field").get<std::string>(),
                                s.at("year").get<int>());
      st.size = s.at("size").get<std::size_t>();
      st.probability = s.at("probability").get<double>();
      spec.strata.push_back(std::move(st));
    }
    for (const auto& g : doc.at("groups")) {
      GroupSpec gs;
      gs.label = g.at("label").get<std::string>();
      gs.sizes = scalar_or_array<std::size_t>(g.at("sizes"), spec.strata.size(),
                                              "sizes of " + gs.label);
      gs.theta = scalar_or_array<double>(g.at("theta"), spec.strata.size(),
                                         "theta of " + gs.label);
      spec.groups.push_back(std::move(gs));
    }
    derive_design(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("invalid world spec: {}", e.what()));
  }
}

WorldSpec load_world_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open spec file '{}'", path));
  try {
    return parse_world_spec(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

std::vector<StratumDesign> derive_design(const WorldSpec& spec) {
  if (spec.strata.empty()) throw InputError("world spec has no strata");
  std::set<StratumKey> keys;
  for (const auto& st : spec.strata) {
    require_csv_safe(st.key.field_id, "field");
    if (!keys.insert(st.key).second) {
      throw InputError(fmt::format("duplicate stratum {}", to_string(st.key)));
    }
    if (!(st.probability >= 0.0 && st.probability <= 1.0)) {
      throw InputError(fmt::format("probability {} of {} outside [0, 1]",
                                   st.probability, to_string(st.key)));
    }
  }
  std::set<std::string> labels;
  for (const auto& g : spec.groups) {
    require_csv_safe(g.label, "group label");
    if (!labels.insert(g.label).second) {
      throw InputError(fmt::format("duplicate group '{}'", g.label));
    }
    if (g.sizes.size() != spec.strata.size() ||
        g.theta.size() != spec.strata.size()) {
      throw InputError(fmt::format("group '{}' must give one size and theta per "
                                   "stratum",
                                   g.label));
    }
    for (double t : g.theta) {
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw InputError(fmt::format("theta {} of '{}' must be positive", t,
                                     g.label));
      }
    }
  }

  std::vector<StratumDesign> design(spec.strata.size());
  for (std::size_t i = 0; i < spec.strata.size(); ++i) {
    const auto& st = spec.strata[i];
    const double pw = st.probability;
    const double world_odds = pw / (1.0 - pw);
    std::size_t group_papers = 0;
    double group_mentioned = 0.0;
    for (const auto& g : spec.groups) {
      double pg = 0.0;
      if (pw >= 1.0) {
        pg = 1.0;
      } else if (pw > 0.0) {
        const double odds = g.theta[i] * world_odds;
        pg = odds / (1.0 + odds);
      }
      design[i].group_probability.push_back(pg);
      group_papers += g.sizes[i];
      group_mentioned += static_cast<double>(g.sizes[i]) * pg;
    }
    if (group_papers > st.size) {
      throw InputError(fmt::format("groups hold {} papers in {} but the world "
                                   "has only {}",
                                   group_papers, to_string(st.key), st.size));
    }
    const double world_mentioned = static_cast<double>(st.size) * pw;
    design[i].background_size = st.size - group_papers;
    if (design[i].background_size == 0) {
      if (std::abs(world_mentioned - group_mentioned) >
          1e-9 * static_cast<double>(st.size)) {
        throw InputError(fmt::format(
            "derived probabilities in {} cannot reproduce the world probability "
            "without background papers",
            to_string(st.key)));
      }
      continue;
    }
    double pb = (world_mentioned - group_mentioned) /
                static_cast<double>(design[i].background_size);
    if (pb < -1e-12 || pb > 1.0 + 1e-12) {
      throw InputError(fmt::format(
          "derived background probability {} in {} is outside [0, 1]", pb,
          to_string(st.key)));
    }
    design[i].background_probability = std::clamp(pb, 0.0, 1.0);
  }
  return design;
}

SyntheticData generate_synthetic(const WorldSpec& spec) {
  const auto design = derive_design(spec);
  Engine engine(spec.seed);
  boost::random::uniform_int_distribution<std::int64_t> extra(0, 9);

  SyntheticData data;
  auto emit = [&](const StratumKey& key, const std::string& prefix,
                  std::size_t count, double p, const std::string* group) {
    boost::random::bernoulli_distribution<double> coin(p);
    for (std::size_t j = 0; j < count; ++j) {
      std::string id = fmt::format("{}-{}-{}-{}", prefix, key.field_id, key.year, j);
      const std::int64_t mentions = coin(engine) ? 1 + extra(engine) : 0;
      if (group) data.memberships.push_back(Membership{id, *group});
      data.records.push_back(
          PublicationRecord{std::move(id), key.field_id, key.year, mentions});
    }
  };

  for (std::size_t i = 0; i < spec.strata.size(); ++i) {
    const auto& key = spec.strata[i].key;
    for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
      const auto& g = spec.groups[gi];
      emit(key, g.label, g.sizes[i], design[i].group_probability[gi], &g.label);
    }
    emit(key, "bg", design[i].background_size, design[i].background_probability,
         nullptr);
  }
  return data;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::map<IndicatorKind, double> true_indicator_values(const WorldSpec& spec,
                                                      std::size_t group_index) {
  const auto design = derive_design(spec);
  const auto& g = spec.groups.at(group_index);

  double r = 0.0, s = 0.0;
  double group_prop_sum = 0.0, world_prop_sum = 0.0;
  std::size_t group_strata = 0, world_strata = 0;
  double mnpc_num = 0.0, mnpc_den = 0.0;
  for (std::size_t i = 0; i < spec.strata.size(); ++i) {
    const auto& st = spec.strata[i];
    if (st.size == 0) continue;
    ++world_strata;
    world_prop_sum += st.probability;
    const double ng = static_cast<double>(g.sizes[i]);
    if (ng == 0.0) continue;
    const double pg = design[i].group_probability[group_index];
    const double nw = static_cast<double>(st.size);
    const double a = ng * pg, b = ng * (1.0 - pg);
    const double c = nw * st.probability, d = nw * (1.0 - st.probability);
    r += a * d / (a + b + c + d);
    s += b * c / (a + b + c + d);
    ++group_strata;
    group_prop_sum += pg;
    if (st.probability > 0.0) {
      mnpc_num += ng * pg / st.probability;
      mnpc_den += ng;
    }
  }
  std::map<IndicatorKind, double> truth;
  if (r > 0.0 && s > 0.0) truth[IndicatorKind::mhq] = r / s;
  if (group_strata > 0 && world_prop_sum > 0.0) {
    truth[IndicatorKind::emnpc] = (group_prop_sum / group_strata) /
                                  (world_prop_sum / world_strata);
  }
  if (mnpc_den > 0.0) truth[IndicatorKind::mnpc] = mnpc_num / mnpc_den;
  return truth;
}

namespace {

struct Outcome {
  bool degenerate = true;
  bool covered = false;
  double value = 0.0;
};

constexpr IndicatorKind kCoverageKinds[] = {IndicatorKind::emnpc,
                                            IndicatorKind::mnpc,
                                            IndicatorKind::mhq};

std::size_t draw_binomial(Engine& engine, std::size_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  boost::random::binomial_distribution<std::int64_t, double> dist(
      static_cast<std::int64_t>(n), p);
  return static_cast<std::size_t>(dist(engine));
}

Profiles simulate_counts(const WorldSpec& spec,
                         const std::vector<StratumDesign>& design,
                         std::uint64_t seed) {
  Engine engine(seed);
  Profiles p;
  p.world.label = kWorldLabel;
  for (const auto& g : spec.groups) p.groups[g.label].label = g.label;
  for (std::size_t i = 0; i < spec.strata.size(); ++i) {
    const auto& key = spec.strata[i].key;
    CellCounts world;
    for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
      const std::size_t n = spec.groups[gi].sizes[i];
      if (n == 0) continue;
      const double k = static_cast<double>(
          draw_binomial(engine, n, design[i].group_probability[gi]));
      const CellCounts cell{k, static_cast<double>(n) - k};
      p.groups[spec.groups[gi].label].cells[key] = cell;
      world.mentioned += cell.mentioned;
      world.not_mentioned += cell.not_mentioned;
    }
    const std::size_t nb = design[i].background_size;
    const double kb = static_cast<double>(
        draw_binomial(engine, nb, design[i].background_probability));
    world.mentioned += kb;
    world.not_mentioned += static_cast<double>(nb) - kb;
    if (world.total() > 0.0) p.world.cells[key] = world;
  }
  return p;
}

Outcome evaluate(IndicatorKind kind, const std::string& label,
                 const Profiles& raw, const Profiles& corrected, double truth) {
  Outcome out;
  try {
    IndicatorResult r;
    switch (kind) {
      case IndicatorKind::emnpc:
        r = emnpc(raw.groups.at(label), raw.world);
        break;
      case IndicatorKind::mnpc:
        r = mnpc(corrected.groups.at(label), corrected.world);
        break;
      default:
        r = mhq(raw.groups.at(label), raw.world);
        break;
    }
    out.degenerate = false;
    out.value = r.value;
    out.covered = r.ci_lower <= truth && truth <= r.ci_upper;
  } catch (const DegenerateError&) {
    out.degenerate = true;
  }
  return out;
}

}  // namespace

CoverageReport coverage_experiment(const WorldSpec& spec,
                                   std::size_t replications, double nominal,
                                   unsigned threads) {
  if (replications < 100) {
    throw InputError(fmt::format("coverage needs at least 100 replications, "
                                 "got {}",
                                 replications));
  }
  if (!(nominal > 0.0 && nominal < 1.0)) {
    throw InputError(fmt::format("nominal level {} outside (0, 1)", nominal));
  }
  if (spec.groups.empty()) throw InputError("world spec has no groups");
  const auto design = derive_design(spec);

  std::vector<std::map<IndicatorKind, double>> truths;
  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
    truths.push_back(true_indicator_values(spec, gi));
  }

  const std::size_t per_rep = spec.groups.size() * std::size(kCoverageKinds);
  std::vector<Outcome> outcomes(replications * per_rep);

  auto run = [&](std::size_t rep) {
    const Profiles raw = simulate_counts(spec, design, derive_seed(spec.seed, rep));
    const Profiles corrected = continuity_correct(raw);
    std::size_t slot = rep * per_rep;
    for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
      for (IndicatorKind kind : kCoverageKinds) {
        auto t = truths[gi].find(kind);
        if (t != truths[gi].end()) {
          outcomes[slot] =
              evaluate(kind, spec.groups[gi].label, raw, corrected, t->second);
        }
        ++slot;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t rep = t; rep < replications; rep += threads) run(rep);
      });
    }
  }

  CoverageReport report;
  report.replications = replications;
  report.nominal = nominal;
  std::size_t slot = 0;
  for (std::size_t rep = 0; rep < replications; ++rep) {
    for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
      for (IndicatorKind kind : kCoverageKinds) {
        const Outcome& o = outcomes[slot++];
        auto t = truths[gi].find(kind);
        if (t == truths[gi].end()) continue;
        CoverageCell& cell = report.cells[spec.groups[gi].label][kind];
        cell.truth = t->second;
        if (o.degenerate) {
          ++cell.degenerate;
          continue;
        }
        ++cell.valid;
        if (o.covered) ++cell.covered;
        cell.mean_value += o.value;
      }
    }
  }
  for (auto& [label, kinds] : report.cells) {
    for (auto& [kind, cell] : kinds) {
      if (cell.valid > 0) cell.mean_value /= static_cast<double>(cell.valid);
    }
  }
  return report;
}

nlohmann::json coverage_to_json(const CoverageReport& report) {
  nlohmann::json doc;
  doc["replications"] = report.replications;
  doc["nominal"] = report.nominal;
  doc["groups"] = nlohmann::json::object();
  for (const auto& [label, kinds] : report.cells) {
    for (const auto& [kind, cell] : kinds) {
      doc["groups"][label][to_string(kind)] = {
          {"truth", cell.truth},           {"coverage", cell.fraction()},
          {"covered", cell.covered},       {"valid", cell.valid},
          {"degenerate", cell.degenerate}, {"mean_value", cell.mean_value}};
    }
  }
  return doc;
}

ValidityResult convergent_validity_run(const WorldSpec& spec,
                                       const FilterConfig& filter) {
  if (spec.groups.size() < 2) {
    throw InputError("validity run needs at least two quality groups");
  }
  double previous = 0.0;
  for (const auto& g : spec.groups) {
    double mean = 0.0;
    for (double t : g.theta) mean += t;
    mean /= static_cast<double>(g.theta.size());
    if (mean < previous) {
      throw InputError("validity groups must be listed in ascending theta");
    }
    previous = mean;
  }

  const SyntheticData data = generate_synthetic(spec);
  const Profiles built = build_profiles(data.records, data.memberships);

  std::set<int> years;
  for (const auto& st : spec.strata) years.insert(st.key.year);

  ValidityResult result;
  for (int year : years) {
    Profiles slice;
    slice.world.label = kWorldLabel;
    for (const auto& [key, cell] : built.world.cells) {
      if (key.year == year) slice.world.cells.emplace(key, cell);
    }
    std::vector<std::string> present;
    for (const auto& g : spec.groups) {
      auto it = built.groups.find(g.label);
      if (it == built.groups.end()) continue;
      CountProfile part;
      part.label = g.label;
      for (const auto& [key, cell] : it->second.cells) {
        if (key.year == year) part.cells.emplace(key, cell);
      }
      if (part.cells.empty()) continue;
      slice.groups.emplace(g.label, std::move(part));
      present.push_back(g.label);
    }

    ReportOptions options;
    options.indicators = {IndicatorKind::emnpc, IndicatorKind::mnpc,
                          IndicatorKind::mhq};
    options.filter = filter;
    for (std::size_t i = 1; i < present.size(); ++i) {
      options.compare.emplace_back(present[i - 1], present[i]);
    }
    result.years.emplace(year, compute_report(slice, options));
  }
  return result;
}

nlohmann::json validity_to_json(const ValidityResult& result) {
  nlohmann::json doc;
  doc["years"] = nlohmann::json::object();
  for (const auto& [year, report] : result.years) {
    doc["years"][std::to_string(year)] = report_to_json(report);
  }
  return doc;
}

}  // namespace zinorm
