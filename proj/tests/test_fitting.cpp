#include "newsprop/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "synthetic.hpp"

using namespace newsprop;

TEST_CASE("noiseless generate-then-fit recovers the curve exactly") {
  const auto obs = testutil::synthetic_basic(ReaderSide::kLeft, 0.010, 4.465, 50);
  const FitReport report = fit_parameters(obs, ReaderSide::kLeft);
  REQUIRE(report.converged);
  CHECK(std::abs(report.estimates[0] - 0.010) <= 1e-6);
  CHECK(std::abs(report.estimates[1] - 4.465) <= 1e-6);
  CHECK(report.parameter_names == std::vector<std::string>{"f", "k"});
}

TEST_CASE("fit selects observations on the requested side") {
  auto obs = testutil::synthetic_basic(ReaderSide::kLeft, 0.010, 4.465, 50);
  const auto right = testutil::synthetic_basic(ReaderSide::kRight, 0.007, 5.581, 50);
  obs.insert(obs.end(), right.begin(), right.end());

  const FitReport left = fit_parameters(obs, ReaderSide::kLeft);
  const FitReport rght = fit_parameters(obs, ReaderSide::kRight);
  CHECK(std::abs(left.estimates[0] - 0.010) <= 1e-6);
  CHECK(std::abs(left.estimates[1] - 4.465) <= 1e-6);
  CHECK(std::abs(rght.estimates[0] - 0.007) <= 1e-6);
  CHECK(std::abs(rght.estimates[1] - 5.581) <= 1e-6);
}

TEST_CASE("fit requires enough usable observations") {
  const auto obs = testutil::synthetic_basic(ReaderSide::kLeft, 0.01, 4.0, 3);
  CHECK_THROWS_AS(fit_parameters(obs, ReaderSide::kLeft), std::invalid_argument);
  CHECK_THROWS_AS(fit_parameters(obs, ReaderSide::kRight), std::invalid_argument);
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937 rng(1001);
  int checked = 0;
  while (checked < 100) {
    Observation obs;
    obs.bias = testutil::uniform(rng, -1.0, 1.0);
    obs.truth = testutil::uniform(rng, 0.0, 1.0);
    obs.belief = testutil::uniform(rng, -1.0, 1.0);
    obs.extreme = testutil::uniform01(rng) < 0.5;
    const bool extreme_model = testutil::uniform01(rng) < 0.5;
    std::vector<double> theta{testutil::uniform(rng, 0.01, 0.9),
                              testutil::uniform(rng, 1.0, 10.0)};
    if (extreme_model) {
      theta.push_back(testutil::uniform(rng, -0.005, 0.05));
      theta.push_back(testutil::uniform(rng, -0.5, 0.5));
    }
    std::vector<double> grad(theta.size());
    detail::curve_gradient(obs, theta, extreme_model, grad);
    bool informative = true;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double h = 1e-6;
      std::vector<double> up = theta;
      std::vector<double> down = theta;
      up[j] += h;
      down[j] -= h;
      const double fd = (detail::curve_value(obs, up, extreme_model) -
                         detail::curve_value(obs, down, extreme_model)) /
                        (2.0 * h);
      const double scale = std::max({std::abs(fd), std::abs(grad[j]), 1e-6});
      if (scale == 1e-6) {
        informative = false;
        continue;
      }
      CHECK(std::abs(grad[j] - fd) / scale <= 1e-5);
    }
    if (informative) ++checked;
  }
}

TEST_CASE("doubling every rate doubles f and leaves k untouched") {
  auto obs = testutil::synthetic_basic(ReaderSide::kRight, 0.2, 3.0, 60);
  auto doubled = obs;
  for (Observation& o : doubled) o.shares *= 2;

  const FitReport base = fit_parameters(obs, ReaderSide::kRight);
  const FitReport twice = fit_parameters(doubled, ReaderSide::kRight);
  CHECK(std::abs(twice.estimates[0] - 2.0 * base.estimates[0]) <= 1e-6);
  CHECK(std::abs(twice.estimates[1] - base.estimates[1]) <= 1e-6);
}

TEST_CASE("loss never increases across accepted steps") {
  const auto obs =
      testutil::synthetic_basic(ReaderSide::kLeft, 0.012, 3.7, 80, 0.002, 11);
  std::vector<double> trace;
  FitOptions options;
  options.loss_trace = &trace;
  fit_parameters(obs, ReaderSide::kLeft, options);
  REQUIRE(trace.size() >= 2);
  CHECK(std::is_sorted(trace.rbegin(), trace.rend()));
}

TEST_CASE("parameter error shrinks as the sample grows") {
  const double true_k = 4.465;
  std::vector<double> medians;
  for (std::size_t n : {std::size_t{50}, std::size_t{500}, std::size_t{5000}}) {
    std::vector<double> errors;
    for (std::uint32_t seed = 1; seed <= 21; ++seed) {
      const auto obs = testutil::synthetic_basic(ReaderSide::kLeft, 0.010,
                                                 true_k, n, 0.002, seed);
      const FitReport report = fit_parameters(obs, ReaderSide::kLeft);
      errors.push_back(std::abs(report.estimates[1] - true_k));
    }
    std::sort(errors.begin(), errors.end());
    medians.push_back(errors[errors.size() / 2]);
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("extreme-user model recovers a pure amplitude shift") {
  const auto obs = testutil::synthetic_extreme(ReaderSide::kLeft, 0.010, 4.465,
                                               0.15, 0.0, 50);
  const FitReport report = fit_extreme_user_model(obs, ReaderSide::kLeft);
  REQUIRE(report.converged);
  REQUIRE(report.parameter_names ==
          std::vector<std::string>{"f", "k", "f_e", "k_e"});
  CHECK(std::abs(report.estimates[2] - 0.15) <= 1e-4);
  CHECK(std::abs(report.estimates[3]) <= 1e-6);
}

TEST_CASE("extreme-user model rejects single-class designs") {
  const auto obs = testutil::synthetic_basic(ReaderSide::kLeft, 0.01, 4.0, 40);
  CHECK_THROWS_WITH_AS(fit_extreme_user_model(obs, ReaderSide::kLeft),
                       doctest::Contains("degenerate"), std::invalid_argument);
}

TEST_CASE("exposure weighting is available and converges") {
  auto obs = testutil::synthetic_basic(ReaderSide::kRight, 0.02, 5.0, 60, 0.001, 3);
  // make exposure counts uneven
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (i % 2 == 0) {
      obs[i].exposures /= 100;
      obs[i].shares /= 100;
    }
  }
  FitOptions options;
  options.weight_by_exposures = true;
  const FitReport report = fit_parameters(obs, ReaderSide::kRight, options);
  CHECK(report.converged);
  CHECK(std::abs(report.estimates[0] - 0.02) < 0.005);
}

TEST_CASE("iteration cap reports non-convergence instead of throwing") {
  const auto obs =
      testutil::synthetic_basic(ReaderSide::kLeft, 0.015, 6.0, 60, 0.002, 7);
  FitOptions options;
  options.max_iterations = 2;
  const FitReport report = fit_parameters(obs, ReaderSide::kLeft, options);
  CHECK(!report.converged);
  CHECK(report.iterations <= 2);
  CHECK(report.estimates.size() == 2);
}

TEST_CASE("assumption slopes carry the model's signs on generated data") {
  std::vector<Observation> obs =
      testutil::synthetic_basic(ReaderSide::kLeft, 0.010, 4.465, 75);
  const auto right =
      testutil::synthetic_basic(ReaderSide::kRight, 0.007, 5.581, 100);
  obs.insert(obs.end(), right.begin(), right.end());

  const AssumptionReport report = validate_assumptions(obs);
  CHECK(report.misalignment_left.coefficient < 0.0);
  CHECK(report.misalignment_right.coefficient < 0.0);
  CHECK(report.truth_left.coefficient > 0.0);
  CHECK(report.truth_right.coefficient > 0.0);
  CHECK(report.misalignment_left.p_value < 0.01);
  CHECK(report.misalignment_right.p_value < 0.01);
  CHECK(report.truth_left.p_value < 0.01);
  CHECK(report.truth_right.p_value < 0.01);
}

TEST_CASE("constant rates produce zero slopes with p = 1") {
  std::vector<Observation> obs;
  for (double belief : {-0.857, -0.286, -0.571, 0.0, 0.286, 0.571}) {
    for (int i = 0; i < 4; ++i) {
      Observation o;
      o.bias = -0.6 + 0.4 * i;
      o.truth = 0.1 + 0.2 * i;
      o.belief = belief;
      o.exposures = 400;
      o.shares = 100;  // rate exactly 0.25
      obs.push_back(o);
    }
  }
  const AssumptionReport report = validate_assumptions(obs);
  CHECK(report.misalignment_left.coefficient == 0.0);
  CHECK(report.misalignment_left.p_value == 1.0);
  CHECK(report.truth_right.coefficient == 0.0);
  CHECK(report.truth_right.p_value == 1.0);
}

TEST_CASE("assumption validation needs both sides populated") {
  const auto obs = testutil::synthetic_basic(ReaderSide::kLeft, 0.01, 4.0, 30);
  CHECK_THROWS_AS(validate_assumptions(obs), std::invalid_argument);
}

TEST_CASE("observation invariants are enforced") {
  Observation obs;
  obs.bias = 0.0;
  obs.truth = 0.5;
  obs.belief = 0.0;
  obs.exposures = 5;
  obs.shares = 6;
  CHECK_THROWS_AS(validate(obs), std::domain_error);
  obs.shares = -1;
  CHECK_THROWS_AS(validate(obs), std::domain_error);
  obs.shares = 2;
  CHECK_NOTHROW(validate(obs));
  CHECK(obs.rate() == 0.4);
}
