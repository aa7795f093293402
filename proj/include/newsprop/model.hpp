#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace newsprop {

/// Scaling parameters of the sharing-probability curve, one (f, k) pair per
/// political side of the readership. f scales the overall sharing rate, k the
/// decay associated with truthfulness and bias-belief mismatch.
struct ModelParams {
  double f_left = 0.010;
  double k_left = 4.465;
  double f_right = 0.007;
  double k_right = 5.581;
};

/// Base-scenario estimates used as defaults throughout the analyses.
ModelParams base_params();

/// Throws std::domain_error unless 0 < f <= 1 and k > 0 on both sides.
void validate(const ModelParams& params);

/// An article: political bias on [-1, 1] (negative = liberal) and
/// truthfulness on [0, 1] (0 = fully false).
struct Article {
  double bias = 0.0;
  double truth = 0.0;
};

/// Throws std::domain_error if bias or truth is out of range.
void validate(const Article& article);

/// Bias/truth tradeoff region |bias| + truth <= 1 used by the optimizers.
/// Not required for raw probability evaluation.
bool feasible(const Article& article, double tol = 0.0);

/// Reader beliefs live on [-1, 1]; throws std::domain_error otherwise.
void validate_belief(double belief);

/// Numerically stable 1 / (1 + exp(-z)).
double logistic(double z);

/// Probability that a reader with the given belief shares the article:
/// f / (1 + exp(-k (t - (b - B)^2))), using the left (f, k) pair when
/// B < 0 and the right pair when B >= 0.
double sharing_probability(const Article& article, double belief,
                           const ModelParams& params);

enum class BeliefGroup : std::size_t {
  kExtremeLeft = 0,
  kLeft,
  kLeanLeft,
  kCenter,
  kLeanRight,
  kRight,
  kExtremeRight,
};

inline constexpr std::size_t kGroupCount = 7;

inline constexpr std::array<BeliefGroup, kGroupCount> kAllGroups = {
    BeliefGroup::kExtremeLeft, BeliefGroup::kLeft,      BeliefGroup::kLeanLeft,
    BeliefGroup::kCenter,      BeliefGroup::kLeanRight, BeliefGroup::kRight,
    BeliefGroup::kExtremeRight,
};

/// Representative belief value of a political affiliation group.
double belief_center(BeliefGroup group);

/// All seven group centers, extreme-left first.
std::span<const double, kGroupCount> belief_centers();

std::string_view group_name(BeliefGroup group);
std::optional<BeliefGroup> parse_group(std::string_view name);

/// Discrete distribution of reader beliefs over the seven affiliation groups.
class BeliefDistribution {
 public:
  using Weights = std::array<double, kGroupCount>;

  /// Weights must be non-negative and sum to 1 within 1e-9.
  explicit BeliefDistribution(const Weights& weights);

  /// Rescales non-negative weights with positive sum so they total 1.
  static BeliefDistribution normalized(Weights weights);

  const Weights& weights() const { return weights_; }
  double weight(BeliefGroup group) const {
    return weights_[static_cast<std::size_t>(group)];
  }

 private:
  Weights weights_;
};

struct Moments {
  double expectation = 0.0;
  double variance = 0.0;
};

Moments distribution_moments(const BeliefDistribution& dist);

enum class BuiltinDistribution {
  kEmpirical,
  kPartisan,
  kHyperpartisan,
  kLeftUnimodal,
  kCentristUnimodal,
  kRightUnimodal,
};

inline constexpr std::array<BuiltinDistribution, 6> kAllBuiltins = {
    BuiltinDistribution::kEmpirical,       BuiltinDistribution::kPartisan,
    BuiltinDistribution::kHyperpartisan,   BuiltinDistribution::kLeftUnimodal,
    BuiltinDistribution::kCentristUnimodal, BuiltinDistribution::kRightUnimodal,
};

BeliefDistribution builtin_distribution(BuiltinDistribution which);
std::string_view builtin_name(BuiltinDistribution which);
std::optional<BuiltinDistribution> parse_builtin(std::string_view name);

/// Probability that a reader drawn from the distribution shares the article:
/// the weight-mixture of sharing_probability over the group centers.
double population_sharing_probability(const Article& article,
                                      const BeliefDistribution& dist,
                                      const ModelParams& params);

/// Mixture probability over arbitrary belief points. centers and weights must
/// have equal length; weights non-negative and summing to 1 within 1e-9.
double mixture_sharing_probability(const Article& article,
                                   std::span<const double> centers,
                                   std::span<const double> weights,
                                   const ModelParams& params);

}  // namespace newsprop
