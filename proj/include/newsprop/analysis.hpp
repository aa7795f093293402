#pragma once

#include <array>
#include <string>
#include <vector>

#include "newsprop/fitting.hpp"
#include "newsprop/model.hpp"
#include "newsprop/optimizer.hpp"

namespace newsprop {

struct ParameterInterval {
  double low = 0.0;
  double high = 0.0;
};

/// Low/high levels used by the sensitivity grid, one interval per scaling
/// parameter. Defaults are the standard analysis ranges.
struct SensitivityRange {
  ParameterInterval f_left{0.005, 0.014};
  ParameterInterval k_left{2.232, 6.697};
  ParameterInterval f_right{0.004, 0.011};
  ParameterInterval k_right{2.791, 8.372};
};

/// Throws unless low < high per parameter and the base value lies inside
/// each interval.
void validate(const SensitivityRange& range, const ModelParams& base);

/// One of the 16 low/high level assignments, ordered as a binary counter
/// over (f_l, k_l, f_r, k_r) with f_l the most significant bit and low = 0.
struct ParamCombination {
  std::array<bool, 4> high{};  // f_left, k_left, f_right, k_right

  int index() const;
  /// Bit string, e.g. "1001" for f_l high, k_l low, f_r low, k_r high.
  std::string bits() const;
};

std::array<ParamCombination, 16> all_combinations();
ModelParams combination_params(const SensitivityRange& range,
                               const ParamCombination& combo);

/// Argmax of the population sharing probability along the fixed-truth slice,
/// restricted to one side of the bias axis (right: b in [0, 1 - truth]).
FixedTruthOptimum low_truth_argmax(const BeliefDistribution& dist, double truth,
                                   const ModelParams& params, ReaderSide side,
                                   double grid_step = 0.005);

struct SensitivityOptions {
  double truth = 0.1;
  double grid_step = 0.005;
  double flag_threshold = 0.15;
  ReaderSide side = ReaderSide::kRight;
};

struct SensitivityCell {
  double bias_star = 0.0;
  double probability_star = 0.0;
  double shift_from_base = 0.0;
};

struct SensitivityResult {
  std::vector<std::string> distribution_names;
  std::vector<FixedTruthOptimum> base;                 // per distribution
  std::array<std::vector<SensitivityCell>, 16> cells;  // [combo][distribution]
  std::array<double, 16> mean_shift{};
  std::array<bool, 16> flagged{};  // mean shift across distributions > threshold
};

/// Runs the low-truth argmax classification for every parameter combination
/// and flags the ones whose mean argmax shift from the base scenario exceeds
/// the threshold.
SensitivityResult sensitivity_scan(const ModelParams& base,
                                   const SensitivityRange& range,
                                   const std::vector<BuiltinDistribution>& dists,
                                   const SensitivityOptions& options = {});

struct PartisanGapRow {
  double truth = 0.0;
  double p_unimodal = 0.0;
  double p_partisan = 0.0;
  double abs_gap = 0.0;
  double rel_gap = 0.0;
};

/// Compares sharing in a population concentrated at one belief against a
/// two-point population with mass q at that belief and 1 - q at its mirror,
/// using one symmetric (f, k) pair for both sides. Rows cover a uniform
/// truth grid on [0, 1].
std::vector<PartisanGapRow> partisan_gap_table(double bias, double belief,
                                               double mix_q, double f, double k,
                                               int truth_points = 21);

}  // namespace newsprop
