#include "zinorm/model.hpp"

#include <fmt/format.h>

#include "zinorm/errors.hpp"

namespace zinorm {

StratumKey make_stratum_key(std::string field_id, int year, int min_year,
                            int max_year) {
  if (field_id.empty()) throw InputError("empty field_id");
  if (year != kAllYears && (year < min_year || year > max_year)) {
    throw InputError(fmt::format("year {} outside [{}, {}]", year, min_year,
                                 max_year));
  }
  return StratumKey{std::move(field_id), year};
}

std::string to_string(const StratumKey& key) {
  if (key.year == kAllYears) return key.field_id + "/all";
  return fmt::format("{}/{}", key.field_id, key.year);
}

double CountProfile::total() const {
  double sum = 0.0;
  for (const auto& [key, cell] : cells) sum += cell.total();
  return sum;
}

double CountProfile::mentioned() const {
  double sum = 0.0;
  for (const auto& [key, cell] : cells) sum += cell.mentioned;
  return sum;
}

}  // namespace zinorm
