// zinorm: normalized indicators for zero-inflated mention data.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "zinorm/csv_io.hpp"
#include "zinorm/errors.hpp"
#include "zinorm/report.hpp"
#include "zinorm/synth.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("zinorm");
  logger->set_pattern("%l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("ZINORM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw zinorm::InputError(fmt::format("cannot write '{}'", path));
  out << text;
}

std::string single_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Field- and time-normalized indicators for zero-inflated counts"};
  app.require_subcommand(1);

  // compute
  auto* compute = app.add_subcommand("compute", "Compute indicators for groups");
  std::string publications, membership, indicators = "emnpc,mnpc,mhq";
  std::size_t min_papers = 10;
  std::string zero_handling = "correct";
  std::string restrict_group;
  std::vector<std::string> compare;
  std::string output, format = "table";
  bool collapse_years = false, allow_zero_world = false;
  bool emnpc_group_strata = false, no_world_row = false;
  compute->add_option("--publications", publications, "paper_id,field_id,year,mentions CSV")
      ->required();
  compute->add_option("--membership", membership, "paper_id,group_id CSV")->required();
  compute->add_option("--indicators", indicators,
                      "Comma list of emnpc, mnpc, mhq, mhq_prime");
  compute->add_option("--min-stratum-papers", min_papers,
                      "Drop world strata with fewer papers");
  compute->add_option("--zero-handling", zero_handling, "correct or drop")
      ->check(CLI::IsMember({"correct", "drop"}));
  compute->add_option("--restrict-to-group-strata", restrict_group,
                      "Keep only strata where this group publishes");
  compute->add_option("--compare", compare, "Group pair G1:G2 (repeatable)");
  compute->add_option("--output", output, "Output path (default stdout)");
  compute->add_option("--format", format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
  compute->add_flag("--collapse-years", collapse_years,
                    "Pool publication years of each field");
  compute->add_flag("--allow-zero-world-cells", allow_zero_world,
                    "Keep world strata with zero cells under --zero-handling drop");
  compute->add_flag("--emnpc-world-group-strata", emnpc_group_strata,
                    "Average the EMNPC world over the group's strata only");
  compute->add_flag("--no-world-row", no_world_row, "Omit the world reference row");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string spec_path, out_dir;
  std::optional<std::uint64_t> seed;
  synth->add_option("--spec", spec_path, "World spec JSON")->required();
  synth->add_option("--seed", seed, "Override the spec seed");
  synth->add_option("--out", out_dir, "Output directory")->required();

  // coverage
  auto* coverage = app.add_subcommand("coverage", "Monte-Carlo CI coverage");
  std::size_t reps = 2000;
  double nominal = 0.95;
  unsigned threads = 0;
  coverage->add_option("--spec", spec_path, "World spec JSON")->required();
  coverage->add_option("--reps", reps, "Replications (>= 100)");
  coverage->add_option("--nominal", nominal, "Nominal coverage level");
  coverage->add_option("--threads", threads, "Worker threads (0 = all cores)");
  coverage->add_option("--output", output, "Output path (default stdout)");

  // validity
  auto* validity = app.add_subcommand("validity", "Convergent-validity run");
  validity->add_option("--spec", spec_path, "World spec JSON")->required();
  validity->add_option("--output", output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR: " << single_line(e.what()) << "\n";
    return kExitInput;
  }

  try {
    if (*compute) {
      zinorm::ReportConfig cfg;
      cfg.publications = publications;
      cfg.membership = membership;
      auto& o = cfg.options;
      o.indicators = zinorm::parse_indicator_list(indicators);
      o.filter.min_stratum_papers = min_papers;
      o.filter.zero_handling = zinorm::parse_zero_handling(zero_handling);
      o.filter.require_nonzero_world_cells = !allow_zero_world;
      if (!restrict_group.empty()) o.filter.restrict_to_group_strata = restrict_group;
      o.build.collapse_years = collapse_years;
      o.indicator.restrict_world_to_group_strata = emnpc_group_strata;
      o.include_world_row = !no_world_row;
      for (const auto& pair : compare) o.compare.push_back(zinorm::parse_group_pair(pair));

      const auto report = zinorm::run_report(cfg);
      write_output(output, format == "json" ? zinorm::render_json(report)
                                            : zinorm::render_table(report));
    } else if (*synth) {
      auto spec = zinorm::load_world_spec(spec_path);
      if (seed) spec.seed = *seed;
      const auto data = zinorm::generate_synthetic(spec);
      std::filesystem::create_directories(out_dir);
      std::ofstream pubs(std::filesystem::path(out_dir) / "publications.csv",
                         std::ios::binary);
      std::ofstream members(std::filesystem::path(out_dir) / "membership.csv",
                            std::ios::binary);
      if (!pubs || !members) {
        throw zinorm::InputError(fmt::format("cannot write into '{}'", out_dir));
      }
      zinorm::write_publications(pubs, data.records);
      zinorm::write_membership(members, data.memberships);
      spdlog::info("wrote {} records and {} memberships to {}", data.records.size(),
                   data.memberships.size(), out_dir);
    } else if (*coverage) {
      const auto spec = zinorm::load_world_spec(spec_path);
      const auto result = zinorm::coverage_experiment(spec, reps, nominal, threads);
      write_output(output, zinorm::coverage_to_json(result).dump(2) + "\n");
    } else if (*validity) {
      const auto spec = zinorm::load_world_spec(spec_path);
      const auto result = zinorm::convergent_validity_run(spec);
      write_output(output, zinorm::validity_to_json(result).dump(2) + "\n");
    }
  } catch (const zinorm::InputError& e) {
    std::cerr << "ERROR: " << single_line(e.what()) << "\n";
    return kExitInput;
  } catch (const zinorm::DegenerateError& e) {
    std::cerr << "ERROR: " << single_line(e.what()) << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "ERROR: " << single_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
