#include "zinorm/csv_io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>
#include <utility>

#include <fmt/format.h>

#include "zinorm/errors.hpp"

namespace zinorm {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

/// Line reader that strips CR and a leading UTF-8 BOM and tracks 1-based
/// line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (number_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

[[noreturn]] void fail(std::size_t line, std::string_view what) {
  throw InputError(fmt::format("line {}: {}", line, what));
}

void expect_header(LineReader& reader, std::string_view header) {
  std::string line;
  if (!reader.next(line)) fail(1, fmt::format("missing header '{}'", header));
  if (line != header) {
    fail(reader.number(),
         fmt::format("expected header '{}', got '{}'", header, line));
  }
}

template <typename Int>
Int parse_int(std::string_view text, std::size_t line, std::string_view column) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    fail(line, fmt::format("{} is not an integer: '{}'", column, text));
  }
  return value;
}

}  // namespace

std::vector<PublicationRecord> parse_publications(std::istream& in,
                                                  YearRange years) {
  LineReader reader(in);
  expect_header(reader, "paper_id,field_id,year,mentions");

  std::vector<PublicationRecord> records;
  std::map<std::pair<std::string, std::string>, std::size_t> first_line;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const std::size_t n = reader.number();
    const auto cols = split_commas(line);
    if (cols.size() != 4) {
      fail(n, fmt::format("expected 4 columns, got {}", cols.size()));
    }
    if (cols[0].empty()) fail(n, "empty paper_id");
    if (cols[1].empty()) fail(n, "empty field_id");

    PublicationRecord rec;
    rec.paper_id = std::string(cols[0]);
    rec.field_id = std::string(cols[1]);
    rec.year = parse_int<int>(cols[2], n, "year");
    rec.mentions = parse_int<std::int64_t>(cols[3], n, "mentions");
    if (rec.year < years.min_year || rec.year > years.max_year) {
      fail(n, fmt::format("year {} outside [{}, {}]", rec.year, years.min_year,
                          years.max_year));
    }
    if (rec.mentions < 0) fail(n, "negative mentions");

    auto [it, inserted] = first_line.emplace(
        std::make_pair(rec.paper_id, rec.field_id), n);
    if (!inserted) {
      fail(n, fmt::format("duplicate (paper_id, field_id) = ({}, {}), first at "
                          "line {}",
                          rec.paper_id, rec.field_id, it->second));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

MembershipData parse_membership(std::istream& in) {
  LineReader reader(in);
  expect_header(reader, "paper_id,group_id");

  MembershipData data;
  std::set<Membership> seen;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const std::size_t n = reader.number();
    const auto cols = split_commas(line);
    if (cols.size() != 2) {
      fail(n, fmt::format("expected 2 columns, got {}", cols.size()));
    }
    if (cols[0].empty()) fail(n, "empty paper_id");
    if (cols[1].empty()) fail(n, "empty group_id");
    Membership m{std::string(cols[0]), std::string(cols[1])};
    if (!seen.insert(m).second) {
      data.warnings.push_back(fmt::format(
          "line {}: repeated membership ({}, {}) ignored", n, m.paper_id,
          m.group_id));
      continue;
    }
    data.pairs.push_back(std::move(m));
  }
  if (data.pairs.empty()) data.warnings.emplace_back("membership file is empty");
  return data;
}

void write_publications(std::ostream& out,
                        std::span<const PublicationRecord> records) {
  out << "paper_id,field_id,year,mentions\n";
  for (const auto& r : records) {
    out << r.paper_id << ',' << r.field_id << ',' << r.year << ',' << r.mentions
        << '\n';
  }
}

void write_membership(std::ostream& out, std::span<const Membership> pairs) {
  out << "paper_id,group_id\n";
  for (const auto& m : pairs) out << m.paper_id << ',' << m.group_id << '\n';
}

}  // namespace zinorm
