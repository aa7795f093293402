#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "newsprop/model.hpp"

namespace newsprop {

/// Which part of the feasible-region boundary the optimum sits on.
enum class ActiveBoundary {
  kTruthBiasTradeoff,  // |b| + t = 1
  kZeroBias,           // b = 0 (includes the (0, 1) apex)
  kZeroTruth,          // t = 0
  kInterior,
  kBoxEdge,  // |b| = 1
};

std::string_view to_string(ActiveBoundary boundary);

struct OptimizationResult {
  double bias_star = 0.0;
  double truth_star = 0.0;
  double probability_star = 0.0;
  ActiveBoundary active_boundary = ActiveBoundary::kInterior;
};

/// Propagation-maximizing (b, t) over |b| + t <= 1 for a single reader.
/// For |B| < 0.5 the optimum is the apex (0, 1); for B >= 0.5 it is
/// (B - 1/2, 3/2 - B) and mirrored for B <= -0.5.
OptimizationResult optimize_single_reader_closed_form(double belief,
                                                      const ModelParams& params);

/// Best bias at fixed truth for a single reader: B itself when
/// |B| + t <= 1, otherwise the feasible endpoint sign(B) * (1 - t).
double optimize_fixed_truth(double truth, double belief,
                            const ModelParams& params);

struct PopulationOptimizerOptions {
  double grid_step = 0.005;
  double refine_tol = 1e-8;
  /// When set, receives the best probability after the grid pass and after
  /// each refinement round.
  std::vector<double>* probability_trace = nullptr;
};

/// Deterministic global maximum of the population sharing probability over
/// the feasible triangle: exhaustive grid scan followed by per-coordinate
/// bisection refinement. Ties resolve toward smaller |b|, then smaller b,
/// then larger t.
OptimizationResult optimize_population(
    const BeliefDistribution& dist, const ModelParams& params,
    const PopulationOptimizerOptions& options = {});

/// Same optimizer over a mixture with arbitrary belief points.
OptimizationResult optimize_mixture(
    std::span<const double> centers, std::span<const double> weights,
    const ModelParams& params, const PopulationOptimizerOptions& options = {});

struct FixedTruthOptimum {
  double bias_star = 0.0;
  double probability_star = 0.0;
};

/// One-dimensional grid + refinement maximum over b in
/// [-(1 - truth), 1 - truth].
FixedTruthOptimum optimize_population_fixed_truth(const BeliefDistribution& dist,
                                                  double truth,
                                                  const ModelParams& params,
                                                  double grid_step = 0.005);

/// Restricted variant; the bias interval is intersected with the feasible
/// range at the given truth.
FixedTruthOptimum optimize_population_fixed_truth(const BeliefDistribution& dist,
                                                  double truth,
                                                  const ModelParams& params,
                                                  double grid_step,
                                                  double bias_lo, double bias_hi);

FixedTruthOptimum optimize_mixture_fixed_truth(std::span<const double> centers,
                                               std::span<const double> weights,
                                               double truth,
                                               const ModelParams& params,
                                               double grid_step,
                                               double bias_lo, double bias_hi);

struct MomentSweepRow {
  std::array<double, kGroupCount> weights{};
  double expectation = 0.0;
  double variance = 0.0;
  double bias_star = 0.0;
  double truth_star = 0.0;
  double probability_star = 0.0;
};

struct MomentSweepOptions {
  double weight_step = 0.1;
  double grid_step = 0.005;
  double refine_tol = 1e-8;
  std::size_t max_rows = 1000000;
};

/// Enumerates every weight vector with entries in multiples of weight_step
/// summing to 1 (lexicographic order) and optimizes each resulting
/// distribution. weight_step must divide 1 evenly; the enumeration is
/// rejected up front if it would exceed max_rows.
std::vector<MomentSweepRow> sweep_moment_space(
    const ModelParams& params, const MomentSweepOptions& options = {});

/// Number of rows sweep_moment_space would produce for a given step.
std::size_t moment_sweep_row_count(double weight_step);

}  // namespace newsprop
