#pragma once

#include <string>

#include "zinorm/indicators.hpp"

namespace zinorm {

/// Cumming's confidence-interval overlap rules for two independent
/// estimates.
enum class OverlapCategory {
  gap,          // p < .01
  touch,        // p ~ .01
  moderate,     // overlap at most half the mean facing arm: p < .05
  substantial,  // not significant
};

std::string to_string(OverlapCategory category);
std::string significance_label(OverlapCategory category);

struct OverlapVerdict {
  OverlapCategory category = OverlapCategory::substantial;
  /// Negative when the intervals are separated by a gap.
  double overlap_length = 0.0;
  double overlap_proportion = 0.0;
  /// Larger facing arm over smaller facing arm (>= 1).
  double arm_ratio = 1.0;
  /// Set when the facing arms differ by more than a factor of two, where
  /// the overlap rules lose accuracy.
  bool caveat = false;
};

inline constexpr double kTouchTolerance = 1e-9;

OverlapVerdict classify_overlap(const IndicatorResult& a,
                                const IndicatorResult& b);

}  // namespace zinorm
