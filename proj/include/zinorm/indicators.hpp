#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "zinorm/model.hpp"

namespace zinorm {

/// Two-sided 95% normal quantile used by every interval.
inline constexpr double kZ95 = 1.96;

enum class IndicatorKind { emnpc, mnpc, mhq, mhq_prime };

std::string to_string(IndicatorKind kind);
IndicatorKind parse_indicator_kind(const std::string& text);
/// Parses a comma-separated list such as "emnpc,mhq"; rejects empty lists
/// and duplicates.
std::vector<IndicatorKind> parse_indicator_list(const std::string& text);

struct IndicatorResult {
  IndicatorKind kind = IndicatorKind::mhq;
  double value = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::size_t strata_used = 0;
  std::vector<std::string> notes;
};

struct IndicatorOptions {
  /// Average the world's equalized proportion (and n_w) over the group's
  /// strata only, instead of all world strata.
  bool restrict_world_to_group_strata = false;
};

/// Sum of mentioned over sum of papers.
double pooled_proportion(const CountProfile& profile);

/// Unweighted mean of the per-stratum mentioned proportions.
double equalized_proportion(const CountProfile& profile);

IndicatorResult emnpc(const CountProfile& group, const CountProfile& world,
                      const IndicatorOptions& options = {});

/// Expects zero handling to have been applied: every world proportion used
/// must be positive, and every group proportion positive for the interval.
IndicatorResult mnpc(const CountProfile& group, const CountProfile& world);

IndicatorResult mhq(const CountProfile& group, const CountProfile& world);

/// MHq against the world with the group's own papers removed.
IndicatorResult mhq_prime(const CountProfile& group, const CountProfile& world);

/// 100 * (value - 1).
double percent_vs_world(double value);

/// Running Mantel-Haenszel sums over 2x2 tables (group row a, b; reference
/// row c, d) with the Robins-Breslow-Greenland variance terms.
class MhAccumulator {
 public:
  struct Estimate {
    double value;
    double log_variance;
    double ci_lower;
    double ci_upper;
  };

  void add(double a, double b, double c, double d);

  double r() const { return r_; }
  double s() const { return s_; }
  std::size_t informative_strata() const { return informative_; }

  /// Throws DegenerateError when R or S is zero.
  Estimate finalize() const;

 private:
  double r_ = 0.0;
  double s_ = 0.0;
  double sum_pr_ = 0.0;
  double sum_ps_qr_ = 0.0;
  double sum_qs_ = 0.0;
  std::size_t informative_ = 0;
};

}  // namespace zinorm
