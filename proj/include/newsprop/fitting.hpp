#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "newsprop/model.hpp"

namespace newsprop {

enum class ReaderSide { kLeft, kRight };

std::string_view to_string(ReaderSide side);

/// One (domain, belief group) sharing-rate record.
struct Observation {
  double bias = 0.0;
  double truth = 0.0;
  double belief = 0.0;
  std::int64_t exposures = 0;
  std::int64_t shares = 0;
  bool extreme = false;  // extreme-activity user cell (indicator I_e)

  double rate() const { return static_cast<double>(shares) / exposures; }
};

/// Throws std::domain_error on range violations or shares > exposures.
void validate(const Observation& obs);

struct FitOptions {
  int max_iterations = 500;
  double loss_tol = 1e-10;  // relative loss decrease per accepted step
  double grad_tol = 1e-10;  // infinity norm of J^T r
  bool weight_by_exposures = false;
  /// When set, receives the loss after the initial point and after each
  /// accepted step.
  std::vector<double>* loss_trace = nullptr;
};

struct FitReport {
  std::vector<std::string> parameter_names;
  std::vector<double> estimates;
  std::vector<double> standard_errors;
  std::vector<double> p_values;  // two-sided t tests, n - p degrees of freedom
  double residual_standard_error = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Least-squares fit of (f, k) to the observed sharing rates on one reader
/// side (B < 0 selects left, B >= 0 right) via damped Gauss-Newton steps.
/// Requires at least 4 usable observations on the requested side.
FitReport fit_parameters(std::span<const Observation> observations,
                         ReaderSide side, const FitOptions& options = {});

/// Four-parameter variant (f, k, f_e, k_e) where extreme-flagged cells get
/// amplitude f + f_e and rate k + k_e. Requires observations in both flag
/// classes.
FitReport fit_extreme_user_model(std::span<const Observation> observations,
                                 ReaderSide side,
                                 const FitOptions& options = {});

struct SlopeTest {
  double coefficient = 0.0;
  double p_value = 1.0;
};

struct AssumptionReport {
  SlopeTest misalignment_left;   // rate on |b - B|, B < 0
  SlopeTest misalignment_right;  // rate on |b - B|, B >= 0
  SlopeTest truth_left;          // rate on t, B < 0
  SlopeTest truth_right;         // rate on t, B >= 0
};

/// Ordinary least-squares slope tests backing the model's two shape
/// assumptions, computed separately per reader side. Requires at least 3
/// usable observations per side.
AssumptionReport validate_assumptions(std::span<const Observation> observations);

/// OLS slope of y on x with a two-sided t-test p-value.
SlopeTest ols_slope(std::span<const double> x, std::span<const double> y);

namespace detail {

/// Model value at one observation for theta = (f, k) or (f, k, f_e, k_e).
double curve_value(const Observation& obs, std::span<const double> theta,
                   bool extreme_model);

/// Analytic gradient of curve_value with respect to theta.
void curve_gradient(const Observation& obs, std::span<const double> theta,
                    bool extreme_model, std::span<double> grad);

}  // namespace detail

}  // namespace newsprop
