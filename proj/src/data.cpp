#include "newsprop/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace newsprop {

namespace {

constexpr std::array<ColorRange, 5> kColorRanges = {{
    {0.0, 0.1},  // black
    {0.1, 0.2},  // red
    {0.2, 0.3},  // orange
    {0.3, 0.6},  // yellow
    {0.6, 0.8},  // green
}};

constexpr std::array<std::string_view, 5> kColorNames = {
    "black", "red", "orange", "yellow", "green",
};

constexpr std::array<std::string_view, 5> kCategoryNames = {
    "very_low", "low", "mixed", "high", "very_high",
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double_field(const std::string& field, int line, const char* what) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw CsvError(line, std::string("invalid ") + what + " value '" + field + "'");
  }
  return value;
}

std::int64_t parse_count_field(const std::string& field, int line,
                               const char* what) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw CsvError(line, std::string("invalid ") + what + " count '" + field + "'");
  }
  return value;
}

std::string format_exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

struct ObservationRow {
  std::string domain_id;
  double bias = 0.0;
  double truth = 0.0;
  BeliefGroup group = BeliefGroup::kCenter;
  std::int64_t exposures = 0;
  std::int64_t shares = 0;
  bool extreme = false;
};

// Shared row reader for the observation/domain schema. `allow_extreme`
// controls whether a 7th `extreme` column is accepted.
std::vector<ObservationRow> read_rows(std::istream& in, bool allow_extreme) {
  std::vector<ObservationRow> rows;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  bool has_extreme_column = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (!saw_header) {
      if (fields.size() < 6 || fields[0] != "domain_id" || fields[1] != "bias" ||
          fields[2] != "truth" || fields[3] != "group" ||
          fields[4] != "exposures" || fields[5] != "shares") {
        throw CsvError(line_no,
                       "expected header domain_id,bias,truth,group,exposures,"
                       "shares[,extreme]");
      }
      if (fields.size() == 7 && fields[6] == "extreme") {
        if (!allow_extreme) {
          throw CsvError(line_no, "extreme column not allowed here");
        }
        has_extreme_column = true;
      } else if (fields.size() != 6) {
        throw CsvError(line_no, "unexpected extra header fields");
      }
      saw_header = true;
      continue;
    }
    const std::size_t expected = has_extreme_column ? 7 : 6;
    if (fields.size() != expected) {
      throw CsvError(line_no, "wrong field count");
    }
    ObservationRow row;
    row.domain_id = fields[0];
    if (row.domain_id.empty()) {
      throw CsvError(line_no, "empty domain_id");
    }
    row.bias = parse_double_field(fields[1], line_no, "bias");
    row.truth = parse_double_field(fields[2], line_no, "truth");
    if (row.bias < -1.0 || row.bias > 1.0) {
      throw CsvError(line_no, "bias out of [-1, 1]");
    }
    if (row.truth < 0.0 || row.truth > 1.0) {
      throw CsvError(line_no, "truth out of [0, 1]");
    }
    const auto group = parse_group(fields[3]);
    if (!group) {
      throw CsvError(line_no, "unknown group '" + fields[3] + "'");
    }
    row.group = *group;
    row.exposures = parse_count_field(fields[4], line_no, "exposures");
    row.shares = parse_count_field(fields[5], line_no, "shares");
    if (row.shares > row.exposures) {
      throw CsvError(line_no, "shares exceed exposures");
    }
    if (has_extreme_column) {
      if (fields[6] == "0") {
        row.extreme = false;
      } else if (fields[6] == "1") {
        row.extreme = true;
      } else {
        throw CsvError(line_no, "extreme flag must be 0 or 1");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!saw_header) {
    throw CsvError(line_no == 0 ? 1 : line_no, "missing header row");
  }
  return rows;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open '" + path + "' for reading");
  }
  return in;
}

}  // namespace

ColorRange color_range(TruthColor color) {
  return kColorRanges[static_cast<std::size_t>(color)];
}

std::string_view color_name(TruthColor color) {
  return kColorNames[static_cast<std::size_t>(color)];
}

std::optional<TruthColor> parse_color(std::string_view name) {
  for (std::size_t i = 0; i < kColorNames.size(); ++i) {
    if (kColorNames[i] == name) {
      return static_cast<TruthColor>(i);
    }
  }
  return std::nullopt;
}

double truthfulness_score(std::span<const Justification> justifications) {
  if (justifications.empty()) {
    throw std::invalid_argument("truthfulness_score: empty justification list");
  }
  double total = 0.0;
  for (const Justification& j : justifications) {
    if (!(j.fraction >= 0.0) || !(j.fraction <= 1.0)) {
      throw std::domain_error("truthfulness_score: fraction must be in [0, 1]");
    }
    const ColorRange range = color_range(j.color);
    total += range.low + j.fraction * (range.high - range.low);
  }
  return total / static_cast<double>(justifications.size());
}

std::string_view category_name(TruthCategory category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

TruthCategory truthfulness_category(double truth) {
  if (!(truth >= 0.0) || !(truth <= 0.8)) {
    throw std::domain_error("truthfulness_category: score must be in [0, 0.8]");
  }
  if (truth < 0.1) return TruthCategory::kVeryLow;
  if (truth < 0.3) return TruthCategory::kLow;
  if (truth < 0.5) return TruthCategory::kMixed;
  if (truth < 0.7) return TruthCategory::kHigh;
  return TruthCategory::kVeryHigh;
}

void validate(const DomainRecord& record) {
  if (record.domain_id.empty()) {
    throw std::domain_error("DomainRecord: empty domain_id");
  }
  if (!(record.bias >= -1.0) || !(record.bias <= 1.0)) {
    throw std::domain_error("DomainRecord: bias must be in [-1, 1]");
  }
  if (!(record.truth >= 0.0) || !(record.truth <= 1.0)) {
    throw std::domain_error("DomainRecord: truth must be in [0, 1]");
  }
  for (const GroupCounts& counts : record.groups) {
    if (counts.exposures < 0 || counts.shares < 0) {
      throw std::domain_error("DomainRecord: counts must be non-negative");
    }
    if (counts.shares > counts.exposures) {
      throw std::domain_error("DomainRecord: shares cannot exceed exposures");
    }
  }
}

std::vector<Observation> build_observations(
    std::span<const DomainRecord> records) {
  std::vector<Observation> out;
  for (const DomainRecord& record : records) {
    validate(record);
    for (std::size_t g = 0; g < kGroupCount; ++g) {
      const GroupCounts& counts = record.groups[g];
      if (counts.exposures <= 0) {
        continue;
      }
      Observation obs;
      obs.bias = record.bias;
      obs.truth = record.truth;
      obs.belief = belief_center(static_cast<BeliefGroup>(g));
      obs.exposures = counts.exposures;
      obs.shares = counts.shares;
      out.push_back(obs);
    }
  }
  return out;
}

CsvError::CsvError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

std::vector<DomainRecord> read_domain_records(std::istream& in) {
  const std::vector<ObservationRow> rows = read_rows(in, false);
  std::vector<DomainRecord> records;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::array<bool, kGroupCount>> seen;
  for (const ObservationRow& row : rows) {
    auto [it, inserted] = index.try_emplace(row.domain_id, records.size());
    if (inserted) {
      DomainRecord record;
      record.domain_id = row.domain_id;
      record.bias = row.bias;
      record.truth = row.truth;
      records.push_back(std::move(record));
    }
    DomainRecord& record = records[it->second];
    if (record.bias != row.bias || record.truth != row.truth) {
      throw std::invalid_argument("domain '" + row.domain_id +
                                  "' has inconsistent bias/truth across rows");
    }
    auto& seen_groups = seen[row.domain_id];
    const auto g = static_cast<std::size_t>(row.group);
    if (seen_groups[g]) {
      throw std::invalid_argument("duplicate (domain, group) cell for '" +
                                  row.domain_id + "'");
    }
    seen_groups[g] = true;
    record.groups[g] = GroupCounts{row.exposures, row.shares};
  }
  return records;
}

std::vector<DomainRecord> read_domain_records_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_domain_records(in);
}

void write_domain_records(std::ostream& out,
                          std::span<const DomainRecord> records) {
  out << "domain_id,bias,truth,group,exposures,shares\n";
  for (const DomainRecord& record : records) {
    validate(record);
    for (std::size_t g = 0; g < kGroupCount; ++g) {
      const GroupCounts& counts = record.groups[g];
      out << record.domain_id << ',' << format_exact(record.bias) << ','
          << format_exact(record.truth) << ','
          << group_name(static_cast<BeliefGroup>(g)) << ',' << counts.exposures
          << ',' << counts.shares << '\n';
    }
  }
}

std::vector<Observation> read_observations(std::istream& in) {
  const std::vector<ObservationRow> rows = read_rows(in, true);
  std::vector<Observation> out;
  for (const ObservationRow& row : rows) {
    if (row.exposures <= 0) {
      continue;
    }
    Observation obs;
    obs.bias = row.bias;
    obs.truth = row.truth;
    obs.belief = belief_center(row.group);
    obs.exposures = row.exposures;
    obs.shares = row.shares;
    obs.extreme = row.extreme;
    out.push_back(obs);
  }
  return out;
}

std::vector<Observation> read_observations_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_observations(in);
}

std::vector<std::pair<std::string, double>> read_truth_scores(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::vector<std::string> order;
  std::map<std::string, std::vector<Justification>> by_domain;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (!saw_header) {
      if (fields.size() != 3 || fields[0] != "domain_id" ||
          fields[1] != "color" || fields[2] != "fraction") {
        throw CsvError(line_no, "expected header domain_id,color,fraction");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw CsvError(line_no, "wrong field count");
    }
    if (fields[0].empty()) {
      throw CsvError(line_no, "empty domain_id");
    }
    const auto color = parse_color(fields[1]);
    if (!color) {
      throw CsvError(line_no, "unknown color '" + fields[1] + "'");
    }
    Justification j;
    j.color = *color;
    if (!fields[2].empty()) {
      j.fraction = parse_double_field(fields[2], line_no, "fraction");
      if (j.fraction < 0.0 || j.fraction > 1.0) {
        throw CsvError(line_no, "fraction out of [0, 1]");
      }
    }
    auto [it, inserted] = by_domain.try_emplace(fields[0]);
    if (inserted) {
      order.push_back(fields[0]);
    }
    it->second.push_back(j);
  }
  if (!saw_header) {
    throw CsvError(line_no == 0 ? 1 : line_no, "missing header row");
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(order.size());
  for (const std::string& domain : order) {
    out.emplace_back(domain, truthfulness_score(by_domain[domain]));
  }
  return out;
}

}  // namespace newsprop
