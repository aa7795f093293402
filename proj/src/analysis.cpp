#include "newsprop/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace newsprop {

namespace {

void check_interval(const ParameterInterval& interval, double base,
                    const char* name) {
  if (!(interval.low < interval.high)) {
    throw std::invalid_argument(std::string("SensitivityRange: ") + name +
                                " low must be below high");
  }
  if (!(base >= interval.low) || !(base <= interval.high)) {
    throw std::invalid_argument(std::string("SensitivityRange: base ") + name +
                                " lies outside its interval");
  }
}

}  // namespace

void validate(const SensitivityRange& range, const ModelParams& base) {
  validate(base);
  check_interval(range.f_left, base.f_left, "f_left");
  check_interval(range.k_left, base.k_left, "k_left");
  check_interval(range.f_right, base.f_right, "f_right");
  check_interval(range.k_right, base.k_right, "k_right");
}

int ParamCombination::index() const {
  return (high[0] ? 8 : 0) + (high[1] ? 4 : 0) + (high[2] ? 2 : 0) +
         (high[3] ? 1 : 0);
}

std::string ParamCombination::bits() const {
  std::string out(4, '0');
  for (std::size_t i = 0; i < 4; ++i) {
    if (high[i]) out[i] = '1';
  }
  return out;
}

std::array<ParamCombination, 16> all_combinations() {
  std::array<ParamCombination, 16> out;
  for (int i = 0; i < 16; ++i) {
    out[i].high = {(i & 8) != 0, (i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
  }
  return out;
}

ModelParams combination_params(const SensitivityRange& range,
                               const ParamCombination& combo) {
  ModelParams params;
  params.f_left = combo.high[0] ? range.f_left.high : range.f_left.low;
  params.k_left = combo.high[1] ? range.k_left.high : range.k_left.low;
  params.f_right = combo.high[2] ? range.f_right.high : range.f_right.low;
  params.k_right = combo.high[3] ? range.k_right.high : range.k_right.low;
  return params;
}

FixedTruthOptimum low_truth_argmax(const BeliefDistribution& dist, double truth,
                                   const ModelParams& params, ReaderSide side,
                                   double grid_step) {
  const double lo = side == ReaderSide::kLeft ? -1.0 : 0.0;
  const double hi = side == ReaderSide::kLeft ? 0.0 : 1.0;
  return optimize_population_fixed_truth(dist, truth, params, grid_step, lo, hi);
}

SensitivityResult sensitivity_scan(const ModelParams& base,
                                   const SensitivityRange& range,
                                   const std::vector<BuiltinDistribution>& dists,
                                   const SensitivityOptions& options) {
  validate(range, base);
  if (dists.empty()) {
    throw std::invalid_argument("sensitivity_scan: no distributions given");
  }
  if (!(options.flag_threshold > 0.0)) {
    throw std::invalid_argument("sensitivity_scan: threshold must be positive");
  }

  SensitivityResult result;
  std::vector<BeliefDistribution> resolved;
  for (BuiltinDistribution which : dists) {
    result.distribution_names.emplace_back(builtin_name(which));
    resolved.push_back(builtin_distribution(which));
  }
  for (const BeliefDistribution& dist : resolved) {
    result.base.push_back(low_truth_argmax(dist, options.truth, base,
                                           options.side, options.grid_step));
  }

  for (const ParamCombination& combo : all_combinations()) {
    const ModelParams params = combination_params(range, combo);
    auto& row = result.cells[combo.index()];
    row.resize(resolved.size());
    double total_shift = 0.0;
    for (std::size_t d = 0; d < resolved.size(); ++d) {
      const FixedTruthOptimum opt = low_truth_argmax(
          resolved[d], options.truth, params, options.side, options.grid_step);
      row[d].bias_star = opt.bias_star;
      row[d].probability_star = opt.probability_star;
      row[d].shift_from_base =
          std::abs(opt.bias_star - result.base[d].bias_star);
      total_shift += row[d].shift_from_base;
    }
    const double mean_shift = total_shift / static_cast<double>(resolved.size());
    result.mean_shift[combo.index()] = mean_shift;
    result.flagged[combo.index()] = mean_shift > options.flag_threshold;
  }
  return result;
}

std::vector<PartisanGapRow> partisan_gap_table(double bias, double belief,
                                               double mix_q, double f, double k,
                                               int truth_points) {
  validate_belief(belief);
  if (!(bias >= -1.0) || !(bias <= 1.0)) {
    throw std::domain_error("partisan_gap_table: bias must be in [-1, 1]");
  }
  if (!(mix_q >= 0.0) || !(mix_q <= 1.0)) {
    throw std::domain_error("partisan_gap_table: q must be in [0, 1]");
  }
  if (truth_points < 2) {
    throw std::invalid_argument("partisan_gap_table: need at least 2 points");
  }
  const ModelParams params{f, k, f, k};
  validate(params);

  std::vector<PartisanGapRow> rows;
  rows.reserve(static_cast<std::size_t>(truth_points));
  for (int i = 0; i < truth_points; ++i) {
    const double t =
        static_cast<double>(i) / static_cast<double>(truth_points - 1);
    const double p_same = sharing_probability({bias, t}, belief, params);
    const double p_mirror = sharing_probability({bias, t}, -belief, params);
    PartisanGapRow row;
    row.truth = t;
    row.p_unimodal = p_same;
    row.p_partisan = mix_q * p_same + (1.0 - mix_q) * p_mirror;
    row.abs_gap = row.p_unimodal - row.p_partisan;
    row.rel_gap = row.abs_gap / row.p_unimodal;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace newsprop
