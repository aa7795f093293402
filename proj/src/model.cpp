#include "newsprop/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace newsprop {

namespace {

// Table of group centers, extreme-left to extreme-right. Stored to the three
// printed decimals; moment values downstream depend on these exact numbers.
constexpr std::array<double, kGroupCount> kCenters = {
    -0.857, -0.571, -0.286, 0.0, 0.286, 0.571, 0.857,
};

constexpr std::array<std::string_view, kGroupCount> kGroupNames = {
    "extreme_left", "left",  "lean_left", "center",
    "lean_right",   "right", "extreme_right",
};

constexpr double kWeightSumTol = 1e-9;

}  // namespace

ModelParams base_params() { return ModelParams{}; }

void validate(const ModelParams& params) {
  auto check_side = [](double f, double k, const char* side) {
    if (!(f > 0.0) || !(f <= 1.0)) {
      throw std::domain_error(std::string("ModelParams: f_") + side +
                              " must be in (0, 1]");
    }
    if (!(k > 0.0)) {
      throw std::domain_error(std::string("ModelParams: k_") + side +
                              " must be positive");
    }
  };
  check_side(params.f_left, params.k_left, "left");
  check_side(params.f_right, params.k_right, "right");
}

void validate(const Article& article) {
  if (!(article.bias >= -1.0) || !(article.bias <= 1.0)) {
    throw std::domain_error("Article: bias must be in [-1, 1]");
  }
  if (!(article.truth >= 0.0) || !(article.truth <= 1.0)) {
    throw std::domain_error("Article: truth must be in [0, 1]");
  }
}

bool feasible(const Article& article, double tol) {
  return std::abs(article.bias) + article.truth <= 1.0 + tol;
}

void validate_belief(double belief) {
  if (!(belief >= -1.0) || !(belief <= 1.0)) {
    throw std::domain_error("belief must be in [-1, 1]");
  }
}

double logistic(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sharing_probability(const Article& article, double belief,
                           const ModelParams& params) {
  validate(article);
  validate_belief(belief);
  validate(params);
  // B = 0 takes the right branch.
  const double f = belief < 0.0 ? params.f_left : params.f_right;
  const double k = belief < 0.0 ? params.k_left : params.k_right;
  const double mismatch = article.bias - belief;
  return f * logistic(k * (article.truth - mismatch * mismatch));
}

double belief_center(BeliefGroup group) {
  return kCenters[static_cast<std::size_t>(group)];
}

std::span<const double, kGroupCount> belief_centers() { return kCenters; }

std::string_view group_name(BeliefGroup group) {
  return kGroupNames[static_cast<std::size_t>(group)];
}

std::optional<BeliefGroup> parse_group(std::string_view name) {
  for (std::size_t i = 0; i < kGroupCount; ++i) {
    if (kGroupNames[i] == name) {
      return static_cast<BeliefGroup>(i);
    }
  }
  return std::nullopt;
}

BeliefDistribution::BeliefDistribution(const Weights& weights)
    : weights_(weights) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) {
      throw std::domain_error("BeliefDistribution: weights must be >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw std::domain_error("BeliefDistribution: weights must sum to 1");
  }
}

BeliefDistribution BeliefDistribution::normalized(Weights weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::domain_error("BeliefDistribution: weights must be >= 0");
    }
    sum += w;
  }
  if (!(sum > 0.0)) {
    throw std::domain_error("BeliefDistribution: weight sum must be positive");
  }
  for (double& w : weights) {
    w /= sum;
  }
  return BeliefDistribution(weights);
}

Moments distribution_moments(const BeliefDistribution& dist) {
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < kGroupCount; ++i) {
    mean += dist.weights()[i] * kCenters[i];
    second += dist.weights()[i] * kCenters[i] * kCenters[i];
  }
  return Moments{mean, second - mean * mean};
}

namespace {

constexpr std::array<std::string_view, 6> kBuiltinNames = {
    "empirical",        "partisan",          "hyperpartisan",
    "left_unimodal",    "centrist_unimodal", "right_unimodal",
};

// Weight columns as printed. The empirical column sums to 0.999 due to
// rounding in the source table and is renormalized on construction.
constexpr std::array<std::array<double, kGroupCount>, 6> kBuiltinWeights = {{
    {0.092, 0.230, 0.225, 0.184, 0.131, 0.091, 0.046},  // empirical
    {0.080, 0.400, 0.020, 0.000, 0.020, 0.400, 0.080},  // partisan
    {0.400, 0.080, 0.020, 0.000, 0.020, 0.080, 0.400},  // hyperpartisan
    {0.200, 0.400, 0.200, 0.080, 0.060, 0.040, 0.020},  // left_unimodal
    {0.020, 0.080, 0.200, 0.400, 0.200, 0.080, 0.020},  // centrist_unimodal
    {0.020, 0.040, 0.060, 0.080, 0.200, 0.400, 0.200},  // right_unimodal
}};

}  // namespace

BeliefDistribution builtin_distribution(BuiltinDistribution which) {
  const auto idx = static_cast<std::size_t>(which);
  if (idx >= kBuiltinWeights.size()) {
    throw std::domain_error("unknown builtin distribution");
  }
  return BeliefDistribution::normalized(kBuiltinWeights[idx]);
}

std::string_view builtin_name(BuiltinDistribution which) {
  return kBuiltinNames[static_cast<std::size_t>(which)];
}

std::optional<BuiltinDistribution> parse_builtin(std::string_view name) {
  for (std::size_t i = 0; i < kBuiltinNames.size(); ++i) {
    if (kBuiltinNames[i] == name) {
      return static_cast<BuiltinDistribution>(i);
    }
  }
  return std::nullopt;
}

double population_sharing_probability(const Article& article,
                                      const BeliefDistribution& dist,
                                      const ModelParams& params) {
  return mixture_sharing_probability(article, belief_centers(),
                                     dist.weights(), params);
}

double mixture_sharing_probability(const Article& article,
                                   std::span<const double> centers,
                                   std::span<const double> weights,
                                   const ModelParams& params) {
  if (centers.size() != weights.size() || centers.empty()) {
    throw std::domain_error("mixture: centers/weights size mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::domain_error("mixture: weights must be >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw std::domain_error("mixture: weights must sum to 1");
  }
  validate(article);
  validate(params);
  double total = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (weights[i] == 0.0) {
      continue;
    }
    total += weights[i] * sharing_probability(article, centers[i], params);
  }
  return total;
}

}  // namespace newsprop
