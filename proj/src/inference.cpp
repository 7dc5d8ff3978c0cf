#include "zinorm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "zinorm/errors.hpp"

namespace zinorm {

std::string to_string(OverlapCategory category) {
  switch (category) {
    case OverlapCategory::gap: return "GAP";
    case OverlapCategory::touch: return "TOUCH";
    case OverlapCategory::moderate: return "MODERATE";
    case OverlapCategory::substantial: return "SUBSTANTIAL";
  }
  return "?";
}

std::string significance_label(OverlapCategory category) {
  switch (category) {
    case OverlapCategory::gap: return "p < .01";
    case OverlapCategory::touch: return "p ~ .01";
    case OverlapCategory::moderate: return "p < .05";
    case OverlapCategory::substantial: return "not significant";
  }
  return "?";
}

OverlapVerdict classify_overlap(const IndicatorResult& first,
                                const IndicatorResult& second) {
  auto order = [](const IndicatorResult& r) {
    return std::tie(r.value, r.ci_lower, r.ci_upper);
  };
  const bool swap = order(second) < order(first);
  const IndicatorResult& lo = swap ? second : first;
  const IndicatorResult& hi = swap ? first : second;

  const double lo_arm = lo.ci_upper - lo.value;
  const double hi_arm = hi.value - hi.ci_lower;
  if (!(lo_arm > 0.0) || !(hi_arm > 0.0)) {
    throw DegenerateError("cannot compare intervals with a zero-length arm");
  }

  OverlapVerdict v;
  v.overlap_length = std::min(lo.ci_upper, hi.ci_upper) -
                     std::max(lo.ci_lower, hi.ci_lower);
  v.overlap_proportion = v.overlap_length / (0.5 * (lo_arm + hi_arm));
  v.arm_ratio = std::max(lo_arm, hi_arm) / std::min(lo_arm, hi_arm);
  v.caveat = v.arm_ratio > 2.0;

  if (std::abs(v.overlap_length) <= kTouchTolerance) {
    v.category = OverlapCategory::touch;
  } else if (v.overlap_length < 0.0) {
    v.category = OverlapCategory::gap;
  } else if (v.overlap_proportion <= 0.5) {
    v.category = OverlapCategory::moderate;
  } else {
    v.category = OverlapCategory::substantial;
  }
  return v;
}

}  // namespace zinorm
