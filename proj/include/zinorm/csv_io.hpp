#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "zinorm/model.hpp"

namespace zinorm {

struct YearRange {
  int min_year = kMinYear;
  int max_year = kMaxYear;
};

/// Reads `paper_id,field_id,year,mentions` CSV. Errors carry the 1-based
/// line number; a repeated (paper_id, field_id) names both lines.
std::vector<PublicationRecord> parse_publications(std::istream& in,
                                                  YearRange years = {});

struct MembershipData {
  std::vector<Membership> pairs;
  std::vector<std::string> warnings;
};

/// Reads `paper_id,group_id` CSV. Repeated pairs are collapsed, each
/// repetition adding one warning; an empty body also warns.
MembershipData parse_membership(std::istream& in);

void write_publications(std::ostream& out,
                        std::span<const PublicationRecord> records);
void write_membership(std::ostream& out, std::span<const Membership> pairs);

}  // namespace zinorm
