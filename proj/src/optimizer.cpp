#include "newsprop/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace newsprop {

namespace {

// Probabilities within kTieEps are treated as tied and resolved by the
// coordinate tie-break. Large enough to absorb summation-order noise,
// far below any genuine grid-level difference.
constexpr double kTieEps = 1e-13;

constexpr double kGoldenInv = 0.6180339887498949;

struct Candidate {
  double bias = 0.0;
  double truth = 0.0;
  double p = -std::numeric_limits<double>::infinity();
};

// Strictly better probability wins; ties prefer smaller |b|, then smaller b,
// then larger t.
bool improves(const Candidate& cand, const Candidate& best) {
  if (cand.p > best.p + kTieEps) return true;
  if (cand.p < best.p - kTieEps) return false;
  const double ca = std::abs(cand.bias);
  const double ba = std::abs(best.bias);
  if (ca != ba) return ca < ba;
  if (cand.bias != best.bias) return cand.bias < best.bias;
  return cand.truth > best.truth;
}

void consider(Candidate& best, const Candidate& cand) {
  if (improves(cand, best)) best = cand;
}

// Visits the feasible triangle |b| + t <= 1 on a grid of the given step,
// bias-major, truth ascending, always including the exact boundary point
// t = 1 - |b| for every bias column.
template <class Visit>
void for_each_triangle_point(double step, Visit&& visit) {
  const int nb = static_cast<int>(std::lround(2.0 / step));
  for (int i = 0; i <= nb; ++i) {
    double b = -1.0 + i * step;
    if (i == nb) b = 1.0;
    const double tmax = 1.0 - std::abs(b);
    const int nt = static_cast<int>(std::floor(tmax / step + 1e-9));
    double tlast = 0.0;
    for (int j = 0; j <= nt; ++j) {
      const double t = j * step;
      if (t > tmax) break;
      tlast = t;
      visit(b, tlast);
    }
    if (tmax - tlast > 1e-12) {
      visit(b, tmax);
    }
  }
}

// Golden-section maximization over [lo, hi]; endpoints and all probes
// compete against the incumbent through the tie-break comparator.
template <class Make>
Candidate golden_max(double lo, double hi, Candidate best, Make&& make) {
  if (hi < lo) return best;
  consider(best, make(lo));
  consider(best, make(hi));
  double x1 = hi - kGoldenInv * (hi - lo);
  double x2 = lo + kGoldenInv * (hi - lo);
  Candidate c1 = make(x1);
  Candidate c2 = make(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    if (c1.p >= c2.p) {
      hi = x2;
      x2 = x1;
      c2 = c1;
      x1 = hi - kGoldenInv * (hi - lo);
      c1 = make(x1);
    } else {
      lo = x1;
      x1 = x2;
      c1 = c2;
      x2 = lo + kGoldenInv * (hi - lo);
      c2 = make(x2);
    }
  }
  consider(best, c1);
  consider(best, c2);
  return best;
}

template <class Eval>
Candidate refine_bias(const Candidate& cur, double step, Eval&& eval) {
  const double bmax = 1.0 - cur.truth;
  const double lo = std::max(-bmax, cur.bias - step);
  const double hi = std::min(bmax, cur.bias + step);
  return golden_max(lo, hi, cur, [&](double b) {
    return Candidate{b, cur.truth, eval(b, cur.truth)};
  });
}

template <class Eval>
Candidate refine_truth(const Candidate& cur, double step, Eval&& eval) {
  const double tmax = 1.0 - std::abs(cur.bias);
  const double lo = std::max(0.0, cur.truth - step);
  const double hi = std::min(tmax, cur.truth + step);
  return golden_max(lo, hi, cur, [&](double t) {
    return Candidate{cur.bias, t, eval(cur.bias, t)};
  });
}

template <class Eval>
Candidate refine_to_tolerance(Candidate best, double step, double refine_tol,
                              std::vector<double>* trace, Eval&& eval) {
  for (int round = 0; round < 60; ++round) {
    const double before = best.p;
    best = refine_bias(best, step, eval);
    best = refine_truth(best, step, eval);
    if (trace != nullptr) trace->push_back(best.p);
    if (best.p - before < refine_tol) break;
  }
  return best;
}

ActiveBoundary classify_point(double bias, double truth) {
  constexpr double tol = 1e-9;
  const double ab = std::abs(bias);
  if (ab <= tol && truth >= 1.0 - tol) return ActiveBoundary::kZeroBias;
  if (ab + truth >= 1.0 - tol) return ActiveBoundary::kTruthBiasTradeoff;
  if (ab <= tol) return ActiveBoundary::kZeroBias;
  if (truth <= tol) return ActiveBoundary::kZeroTruth;
  if (ab >= 1.0 - tol) return ActiveBoundary::kBoxEdge;
  return ActiveBoundary::kInterior;
}

void check_grid_step(double grid_step) {
  if (!(grid_step > 0.0) || !(grid_step <= 0.1)) {
    throw std::invalid_argument("grid_step must be in (0, 0.1]");
  }
}

void check_refine_tol(double refine_tol) {
  if (!(refine_tol > 0.0)) {
    throw std::invalid_argument("refine_tol must be positive");
  }
}

void check_truth(double truth) {
  if (!(truth >= 0.0) || !(truth <= 1.0)) {
    throw std::domain_error("truth must be in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(ActiveBoundary boundary) {
  switch (boundary) {
    case ActiveBoundary::kTruthBiasTradeoff:
      return "truth_bias_tradeoff";
    case ActiveBoundary::kZeroBias:
      return "zero_bias";
    case ActiveBoundary::kZeroTruth:
      return "zero_truth";
    case ActiveBoundary::kInterior:
      return "interior";
    case ActiveBoundary::kBoxEdge:
      return "box_edge";
  }
  return "unknown";
}

OptimizationResult optimize_single_reader_closed_form(double belief,
                                                      const ModelParams& params) {
  validate_belief(belief);
  validate(params);
  double bias = 0.0;
  double truth = 1.0;
  if (belief >= 0.5) {
    bias = belief - 0.5;
    truth = 1.5 - belief;
  } else if (belief <= -0.5) {
    bias = belief + 0.5;
    truth = 1.5 + belief;
  }
  OptimizationResult result;
  result.bias_star = bias;
  result.truth_star = truth;
  result.probability_star =
      sharing_probability({bias, truth}, belief, params);
  result.active_boundary = classify_point(bias, truth);
  return result;
}

double optimize_fixed_truth(double truth, double belief,
                            const ModelParams& params) {
  check_truth(truth);
  validate_belief(belief);
  validate(params);
  if (std::abs(belief) + truth <= 1.0) {
    return belief;
  }
  return std::copysign(1.0 - truth, belief);
}

OptimizationResult optimize_mixture(std::span<const double> centers,
                                    std::span<const double> weights,
                                    const ModelParams& params,
                                    const PopulationOptimizerOptions& options) {
  check_grid_step(options.grid_step);
  check_refine_tol(options.refine_tol);
  auto eval = [&](double b, double t) {
    return mixture_sharing_probability({b, t}, centers, weights, params);
  };
  Candidate best;
  for_each_triangle_point(options.grid_step, [&](double b, double t) {
    consider(best, Candidate{b, t, eval(b, t)});
  });
  if (options.probability_trace != nullptr) {
    options.probability_trace->push_back(best.p);
  }
  best = refine_to_tolerance(best, options.grid_step, options.refine_tol,
                             options.probability_trace, eval);
  OptimizationResult result;
  result.bias_star = best.bias;
  result.truth_star = best.truth;
  result.probability_star = best.p;
  result.active_boundary = classify_point(best.bias, best.truth);
  return result;
}

OptimizationResult optimize_population(const BeliefDistribution& dist,
                                       const ModelParams& params,
                                       const PopulationOptimizerOptions& options) {
  return optimize_mixture(belief_centers(), dist.weights(), params, options);
}

FixedTruthOptimum optimize_mixture_fixed_truth(std::span<const double> centers,
                                               std::span<const double> weights,
                                               double truth,
                                               const ModelParams& params,
                                               double grid_step,
                                               double bias_lo, double bias_hi) {
  check_grid_step(grid_step);
  check_truth(truth);
  const double bmax = 1.0 - truth;
  const double lo = std::max(bias_lo, -bmax);
  const double hi = std::min(bias_hi, bmax);
  if (lo > hi) {
    throw std::invalid_argument("fixed-truth bias interval is empty");
  }
  auto eval = [&](double b, double t) {
    return mixture_sharing_probability({b, t}, centers, weights, params);
  };
  Candidate best;
  const int n = static_cast<int>(std::floor((hi - lo) / grid_step + 1e-9));
  double blast = lo;
  for (int i = 0; i <= n; ++i) {
    const double b = lo + i * grid_step;
    if (b > hi) break;
    blast = b;
    consider(best, Candidate{blast, truth, eval(blast, truth)});
  }
  if (hi - blast > 1e-12) {
    consider(best, Candidate{hi, truth, eval(hi, truth)});
  }
  const double rlo = std::max(lo, best.bias - grid_step);
  const double rhi = std::min(hi, best.bias + grid_step);
  best = golden_max(rlo, rhi, best, [&](double b) {
    return Candidate{b, truth, eval(b, truth)};
  });
  return FixedTruthOptimum{best.bias, best.p};
}

FixedTruthOptimum optimize_population_fixed_truth(const BeliefDistribution& dist,
                                                  double truth,
                                                  const ModelParams& params,
                                                  double grid_step) {
  return optimize_mixture_fixed_truth(belief_centers(), dist.weights(), truth,
                                      params, grid_step, -1.0, 1.0);
}

FixedTruthOptimum optimize_population_fixed_truth(const BeliefDistribution& dist,
                                                  double truth,
                                                  const ModelParams& params,
                                                  double grid_step,
                                                  double bias_lo, double bias_hi) {
  return optimize_mixture_fixed_truth(belief_centers(), dist.weights(), truth,
                                      params, grid_step, bias_lo, bias_hi);
}

std::size_t moment_sweep_row_count(double weight_step) {
  if (!(weight_step > 0.0) || !(weight_step <= 1.0)) {
    throw std::invalid_argument("weight_step must be in (0, 1]");
  }
  const double n_real = 1.0 / weight_step;
  const auto n = static_cast<long long>(std::llround(n_real));
  if (std::abs(n * weight_step - 1.0) > 1e-9) {
    throw std::invalid_argument("weight_step must divide 1 evenly");
  }
  // compositions of n into 7 non-negative parts: C(n + 6, 6)
  long double count = 1.0L;
  for (int i = 1; i <= 6; ++i) {
    count = count * static_cast<long double>(n + i) / i;
  }
  if (count > 1e18L) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(std::llroundl(count));
}

std::vector<MomentSweepRow> sweep_moment_space(const ModelParams& params,
                                               const MomentSweepOptions& options) {
  validate(params);
  check_grid_step(options.grid_step);
  check_refine_tol(options.refine_tol);
  const std::size_t rows = moment_sweep_row_count(options.weight_step);
  if (rows > options.max_rows) {
    throw std::invalid_argument(
        "weight_step would produce more rows than max_rows allows");
  }
  const auto n =
      static_cast<int>(std::llround(1.0 / options.weight_step));

  // Per-group probabilities cached over the shared grid. Point layout and
  // value arithmetic match mixture_sharing_probability exactly so sweep rows
  // agree with optimize_population on the same weights.
  std::vector<double> grid_b;
  std::vector<double> grid_t;
  for_each_triangle_point(options.grid_step, [&](double b, double t) {
    grid_b.push_back(b);
    grid_t.push_back(t);
  });
  const std::size_t npts = grid_b.size();
  const auto centers = belief_centers();
  std::vector<double> group_p(npts * kGroupCount);
  for (std::size_t i = 0; i < npts; ++i) {
    for (std::size_t g = 0; g < kGroupCount; ++g) {
      const double f = centers[g] < 0.0 ? params.f_left : params.f_right;
      const double k = centers[g] < 0.0 ? params.k_left : params.k_right;
      const double mismatch = grid_b[i] - centers[g];
      group_p[i * kGroupCount + g] =
          f * logistic(k * (grid_t[i] - mismatch * mismatch));
    }
  }

  std::vector<MomentSweepRow> out;
  out.reserve(rows);

  std::array<int, kGroupCount> units{};
  auto emit = [&]() {
    MomentSweepRow row;
    for (std::size_t g = 0; g < kGroupCount; ++g) {
      row.weights[g] = units[g] * options.weight_step;
    }
    const BeliefDistribution dist = BeliefDistribution::normalized(row.weights);
    const Moments m = distribution_moments(dist);
    row.expectation = m.expectation;
    row.variance = m.variance;

    const auto& w = dist.weights();
    Candidate best;
    for (std::size_t i = 0; i < npts; ++i) {
      double total = 0.0;
      const double* p = &group_p[i * kGroupCount];
      for (std::size_t g = 0; g < kGroupCount; ++g) {
        if (w[g] == 0.0) continue;
        total += w[g] * p[g];
      }
      consider(best, Candidate{grid_b[i], grid_t[i], total});
    }
    auto eval = [&](double b, double t) {
      return mixture_sharing_probability({b, t}, centers, w, params);
    };
    best = refine_to_tolerance(best, options.grid_step, options.refine_tol,
                               nullptr, eval);
    row.bias_star = best.bias;
    row.truth_star = best.truth;
    row.probability_star = best.p;
    out.push_back(row);
  };

  // lexicographic enumeration of weight-unit vectors summing to n
  auto recurse = [&](auto&& self, std::size_t g, int remaining) -> void {
    if (g == kGroupCount - 1) {
      units[g] = remaining;
      emit();
      return;
    }
    for (int u = 0; u <= remaining; ++u) {
      units[g] = u;
      self(self, g + 1, remaining - u);
    }
  };
  recurse(recurse, 0, n);
  return out;
}

}  // namespace newsprop
