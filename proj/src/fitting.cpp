#include "newsprop/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace newsprop {

namespace {

constexpr double kFMin = 1e-12;
constexpr double kFMax = 1.0;
constexpr double kKMin = 1e-9;
constexpr double kKMax = 100.0;

bool on_side(const Observation& obs, ReaderSide side) {
  return side == ReaderSide::kLeft ? obs.belief < 0.0 : obs.belief >= 0.0;
}

std::vector<Observation> usable_side_observations(
    std::span<const Observation> observations, ReaderSide side) {
  std::vector<Observation> out;
  for (const Observation& obs : observations) {
    validate(obs);
    if (obs.exposures > 0 && on_side(obs, side)) {
      out.push_back(obs);
    }
  }
  return out;
}

double two_sided_p_value(double t_statistic, double dof) {
  if (!std::isfinite(t_statistic)) {
    return 0.0;
  }
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(dist, -std::abs(t_statistic));
}

struct Projector {
  bool extreme_model = false;

  void operator()(std::span<double> theta) const {
    theta[0] = std::clamp(theta[0], kFMin, kFMax);
    theta[1] = std::clamp(theta[1], kKMin, kKMax);
    if (extreme_model) {
      // keep the combined extreme-user parameters in the valid region
      theta[2] = std::clamp(theta[2], kFMin - theta[0], kFMax - theta[0]);
      theta[3] = std::clamp(theta[3], kKMin - theta[1], kKMax - theta[1]);
    }
  }
};

// Levenberg-style damped Gauss-Newton minimization of the (optionally
// weighted) sum of squared rate residuals.
FitReport run_fit(const std::vector<Observation>& obs,
                  std::vector<std::string> names, std::vector<double> theta,
                  bool extreme_model, const FitOptions& options) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto p = static_cast<Eigen::Index>(theta.size());
  const Projector project{extreme_model};
  project(theta);

  std::vector<double> weights(obs.size(), 1.0);
  if (options.weight_by_exposures) {
    double mean = 0.0;
    for (const Observation& o : obs) mean += static_cast<double>(o.exposures);
    mean /= static_cast<double>(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      weights[i] = static_cast<double>(obs[i].exposures) / mean;
    }
  }

  auto loss_at = [&](const std::vector<double>& th) {
    double total = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double r = obs[i].rate() - detail::curve_value(obs[i], th, extreme_model);
      total += weights[i] * r * r;
    }
    return total;
  };

  auto fill_system = [&](const std::vector<double>& th, Eigen::MatrixXd& jac,
                         Eigen::VectorXd& res) {
    std::vector<double> grad(theta.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sw = std::sqrt(weights[static_cast<std::size_t>(i)]);
      const Observation& o = obs[static_cast<std::size_t>(i)];
      res(i) = sw * (o.rate() - detail::curve_value(o, th, extreme_model));
      detail::curve_gradient(o, th, extreme_model, grad);
      for (Eigen::Index j = 0; j < p; ++j) {
        jac(i, j) = sw * grad[static_cast<std::size_t>(j)];
      }
    }
  };

  Eigen::MatrixXd jac(n, p);
  Eigen::VectorXd res(n);

  double loss = loss_at(theta);
  if (options.loss_trace != nullptr) options.loss_trace->push_back(loss);
  double lambda = 1e-3;
  bool converged = false;
  int iterations = 0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    iterations = iter + 1;
    fill_system(theta, jac, res);
    const Eigen::VectorXd gradient = jac.transpose() * res;
    if (gradient.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;

    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = normal;
      for (Eigen::Index j = 0; j < p; ++j) {
        damped(j, j) += lambda * std::max(normal(j, j), 1e-12);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(gradient);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> trial = theta;
      for (Eigen::Index j = 0; j < p; ++j) {
        trial[static_cast<std::size_t>(j)] += step(j);
      }
      project(trial);
      const double trial_loss = loss_at(trial);
      if (trial_loss < loss) {
        const double rel_drop = (loss - trial_loss) / std::max(loss, 1e-300);
        theta = std::move(trial);
        loss = trial_loss;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (options.loss_trace != nullptr) options.loss_trace->push_back(loss);
        if (rel_drop < options.loss_tol) {
          converged = true;
        }
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      // no descent direction left at any damping level
      fill_system(theta, jac, res);
      converged = (jac.transpose() * res).lpNorm<Eigen::Infinity>() <
                  std::max(options.grad_tol, 1e-8);
      break;
    }
    if (converged) {
      break;
    }
  }

  // asymptotic standard errors via s^2 (J^T J)^-1 at the final iterate
  fill_system(theta, jac, res);
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  const auto dof = static_cast<double>(n - p);
  const double s2 = res.squaredNorm() / dof;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible()) {
    throw std::domain_error(
        "fit: rank-deficient Jacobian; parameters are not identifiable from "
        "this design");
  }
  const Eigen::MatrixXd covariance = lu.inverse() * s2;

  FitReport report;
  report.parameter_names = std::move(names);
  report.estimates = theta;
  report.standard_errors.resize(theta.size());
  report.p_values.resize(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double var = covariance(static_cast<Eigen::Index>(j),
                                  static_cast<Eigen::Index>(j));
    const double se = var > 0.0 ? std::sqrt(var) : 0.0;
    report.standard_errors[j] = se;
    if (se == 0.0) {
      report.p_values[j] = theta[j] == 0.0 ? 1.0 : 0.0;
    } else {
      report.p_values[j] = two_sided_p_value(theta[j] / se, dof);
    }
  }
  report.residual_standard_error = std::sqrt(s2);
  report.iterations = iterations;
  report.converged = converged;
  return report;
}

}  // namespace

std::string_view to_string(ReaderSide side) {
  return side == ReaderSide::kLeft ? "left" : "right";
}

void validate(const Observation& obs) {
  if (!(obs.bias >= -1.0) || !(obs.bias <= 1.0)) {
    throw std::domain_error("Observation: bias must be in [-1, 1]");
  }
  if (!(obs.truth >= 0.0) || !(obs.truth <= 1.0)) {
    throw std::domain_error("Observation: truth must be in [0, 1]");
  }
  if (!(obs.belief >= -1.0) || !(obs.belief <= 1.0)) {
    throw std::domain_error("Observation: belief must be in [-1, 1]");
  }
  if (obs.exposures < 0 || obs.shares < 0) {
    throw std::domain_error("Observation: counts must be non-negative");
  }
  if (obs.shares > obs.exposures) {
    throw std::domain_error("Observation: shares cannot exceed exposures");
  }
}

namespace detail {

double curve_value(const Observation& obs, std::span<const double> theta,
                   bool extreme_model) {
  const double ind = extreme_model && obs.extreme ? 1.0 : 0.0;
  const double amplitude = theta[0] + (extreme_model ? theta[2] * ind : 0.0);
  const double rate_k = theta[1] + (extreme_model ? theta[3] * ind : 0.0);
  const double mismatch = obs.bias - obs.belief;
  return amplitude * logistic(rate_k * (obs.truth - mismatch * mismatch));
}

void curve_gradient(const Observation& obs, std::span<const double> theta,
                    bool extreme_model, std::span<double> grad) {
  const double ind = extreme_model && obs.extreme ? 1.0 : 0.0;
  const double amplitude = theta[0] + (extreme_model ? theta[2] * ind : 0.0);
  const double rate_k = theta[1] + (extreme_model ? theta[3] * ind : 0.0);
  const double mismatch = obs.bias - obs.belief;
  const double u = obs.truth - mismatch * mismatch;
  const double sig = logistic(rate_k * u);
  const double dsig = sig * (1.0 - sig);
  grad[0] = sig;
  grad[1] = amplitude * u * dsig;
  if (extreme_model) {
    grad[2] = ind * sig;
    grad[3] = ind * amplitude * u * dsig;
  }
}

}  // namespace detail

FitReport fit_parameters(std::span<const Observation> observations,
                         ReaderSide side, const FitOptions& options) {
  const std::vector<Observation> obs = usable_side_observations(observations, side);
  if (obs.size() < 4) {
    throw std::invalid_argument(
        "fit: need at least 4 observations with exposures > 0 on the "
        "requested side");
  }
  double max_rate = 0.0;
  for (const Observation& o : obs) max_rate = std::max(max_rate, o.rate());
  const double f0 = std::clamp(max_rate, 1e-3, 1.0);
  return run_fit(obs, {"f", "k"}, {f0, 5.0}, false, options);
}

FitReport fit_extreme_user_model(std::span<const Observation> observations,
                                 ReaderSide side, const FitOptions& options) {
  const std::vector<Observation> obs = usable_side_observations(observations, side);
  std::size_t n_extreme = 0;
  for (const Observation& o : obs) n_extreme += o.extreme ? 1 : 0;
  if (n_extreme == 0 || n_extreme == obs.size()) {
    throw std::invalid_argument(
        "fit: degenerate design; extreme-user parameters need observations "
        "in both flag classes");
  }
  if (obs.size() < 5) {
    throw std::invalid_argument(
        "fit: need at least 5 usable observations for the extreme-user model");
  }
  double max_typical = 0.0;
  double max_extreme = 0.0;
  for (const Observation& o : obs) {
    double& slot = o.extreme ? max_extreme : max_typical;
    slot = std::max(slot, o.rate());
  }
  const double f0 = std::clamp(max_typical, 1e-3, 1.0);
  const double fe0 = max_extreme - f0;
  return run_fit(obs, {"f", "k", "f_e", "k_e"}, {f0, 5.0, fe0, 0.0}, true,
                 options);
}

SlopeTest ols_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) {
    throw std::invalid_argument("ols_slope: need at least 3 paired points");
  }
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("ols_slope: regressor has no variation");
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - intercept - slope * x[i];
    rss += r * r;
  }
  const double dof = static_cast<double>(n) - 2.0;
  const double se = std::sqrt(rss / dof / sxx);
  if (se == 0.0) {
    return SlopeTest{slope, slope == 0.0 ? 1.0 : 0.0};
  }
  return SlopeTest{slope, two_sided_p_value(slope / se, dof)};
}

AssumptionReport validate_assumptions(std::span<const Observation> observations) {
  AssumptionReport report;
  for (ReaderSide side : {ReaderSide::kLeft, ReaderSide::kRight}) {
    const std::vector<Observation> obs = usable_side_observations(observations, side);
    if (obs.size() < 3) {
      throw std::invalid_argument(
          std::string("validate_assumptions: need at least 3 observations "
                      "with exposures > 0 on the ") +
          std::string(to_string(side)) + " side");
    }
    std::vector<double> misalignment;
    std::vector<double> truth;
    std::vector<double> rate;
    misalignment.reserve(obs.size());
    truth.reserve(obs.size());
    rate.reserve(obs.size());
    for (const Observation& o : obs) {
      misalignment.push_back(std::abs(o.bias - o.belief));
      truth.push_back(o.truth);
      rate.push_back(o.rate());
    }
    const SlopeTest mis = ols_slope(misalignment, rate);
    const SlopeTest tr = ols_slope(truth, rate);
    if (side == ReaderSide::kLeft) {
      report.misalignment_left = mis;
      report.truth_left = tr;
    } else {
      report.misalignment_right = mis;
      report.truth_right = tr;
    }
  }
  return report;
}

}  // namespace newsprop
