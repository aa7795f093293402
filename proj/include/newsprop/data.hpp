#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newsprop/fitting.hpp"
#include "newsprop/model.hpp"

namespace newsprop {

/// Domain truthfulness color codes and their numeric score ranges.
enum class TruthColor { kBlack, kRed, kOrange, kYellow, kGreen };

struct ColorRange {
  double low = 0.0;
  double high = 0.0;
};

ColorRange color_range(TruthColor color);
std::string_view color_name(TruthColor color);
std::optional<TruthColor> parse_color(std::string_view name);

/// One truthfulness justification: a color code plus the position within the
/// color's numeric range (0 = range floor, 1 = range ceiling).
struct Justification {
  TruthColor color = TruthColor::kBlack;
  double fraction = 0.5;
};

/// Mean of the justifications' numeric scores; always lands in [0, 0.8].
double truthfulness_score(std::span<const Justification> justifications);

enum class TruthCategory { kVeryLow, kLow, kMixed, kHigh, kVeryHigh };

std::string_view category_name(TruthCategory category);

/// Bins a truthfulness score: very_low [0, 0.1), low [0.1, 0.3),
/// mixed [0.3, 0.5), high [0.5, 0.7), very_high [0.7, 0.8]. Boundary values
/// go to the upper bin. Throws outside [0, 0.8].
TruthCategory truthfulness_category(double truth);

struct GroupCounts {
  std::int64_t exposures = 0;
  std::int64_t shares = 0;
};

/// Per-domain data: one bias/truth pair plus exposure and share counts for
/// each belief group.
struct DomainRecord {
  std::string domain_id;
  double bias = 0.0;
  double truth = 0.0;
  std::array<GroupCounts, kGroupCount> groups{};
};

void validate(const DomainRecord& record);

/// One Observation per (domain, group) cell with exposures > 0, in domain
/// order then group order. Belief is the group's center point.
std::vector<Observation> build_observations(std::span<const DomainRecord> records);

/// Parse error carrying the 1-based line number of the offending row.
class CsvError : public std::runtime_error {
 public:
  CsvError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads rows of `domain_id,bias,truth,group,exposures,shares` and aggregates
/// them into per-domain records. Duplicate (domain, group) cells are errors.
std::vector<DomainRecord> read_domain_records(std::istream& in);
std::vector<DomainRecord> read_domain_records_file(const std::string& path);

/// Serializes records row-wise with round-trip-exact number formatting.
void write_domain_records(std::ostream& out,
                          std::span<const DomainRecord> records);

/// Reads observations row-wise from the same schema, honoring an optional
/// trailing `extreme` column (0/1). Rows with zero exposures are skipped.
std::vector<Observation> read_observations(std::istream& in);
std::vector<Observation> read_observations_file(const std::string& path);

/// Reads `domain_id,color,fraction` justification rows (empty fraction means
/// the range midpoint) and returns each domain's averaged truthfulness score
/// in first-appearance order.
std::vector<std::pair<std::string, double>> read_truth_scores(std::istream& in);

}  // namespace newsprop
