// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "json.hpp"
#include "newsprop/analysis.hpp"
#include "newsprop/data.hpp"
#include "newsprop/fitting.hpp"
#include "newsprop/model.hpp"
#include "newsprop/optimizer.hpp"
#include "synthetic.hpp"

using namespace newsprop;
namespace fs = std::filesystem;

namespace {

struct Harness {
  int failed = 0;

  void report(int number, const std::string& name, bool pass,
              const std::string& detail) {
    std::printf("%s  criterion %2d: %s%s%s%s\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.empty() ? "" : " [", detail.c_str(),
                detail.empty() ? "" : "]");
    std::fflush(stdout);
    if (!pass) ++failed;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f s", s);
  return buf;
}

// ---------------------------------------------------------------------------
// criterion 1: closed-form single-reader optima vs a brute-force grid oracle

bool criterion_closed_form_oracle(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  constexpr double kStep = 1e-3;
  double worst_coord = 0.0;
  double worst_prob = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams params = testutil::random_params(rng);
    const double belief = testutil::uniform(rng, -1.0, 1.0);
    const auto closed = optimize_single_reader_closed_form(belief, params);

    double best_b = 0.0, best_t = 0.0, best_p = -1.0;
    const int nb = static_cast<int>(std::lround(2.0 / kStep));
    for (int i = 0; i <= nb; ++i) {
      const double b = -1.0 + i * kStep;
      const double tmax = 1.0 - std::abs(b);
      const int nt = static_cast<int>(std::lround(tmax / kStep));
      for (int j = 0; j <= nt; ++j) {
        const double t = std::min(j * kStep, tmax);
        const double p = sharing_probability({b, t}, belief, params);
        if (p > best_p) {
          best_b = b;
          best_t = t;
          best_p = p;
        }
      }
    }
    worst_coord = std::max({worst_coord, std::abs(best_b - closed.bias_star),
                            std::abs(best_t - closed.truth_star)});
    worst_prob = std::max(worst_prob, std::abs(best_p - closed.probability_star));
  }
  const double elapsed = seconds_since(start);
  detail = "max coord dev " + std::to_string(worst_coord) + ", max prob dev " +
           std::to_string(worst_prob) + ", " + fmt_seconds(elapsed);
  return worst_coord <= 2e-3 && worst_prob <= 1e-6 && elapsed < 10.0;
}

// ---------------------------------------------------------------------------
// criterion 2: published expectation/variance rows

bool criterion_moments(std::string& detail) {
  struct Row {
    BuiltinDistribution which;
    double expectation;
    double variance;
  };
  const Row rows[] = {
      {BuiltinDistribution::kEmpirical, -0.146, 0.214},
      {BuiltinDistribution::kPartisan, 0.0, 0.382},
      {BuiltinDistribution::kHyperpartisan, 0.0, 0.643},
      {BuiltinDistribution::kLeftUnimodal, -0.400, 0.167},
      {BuiltinDistribution::kCentristUnimodal, 0.0, 0.114},
      {BuiltinDistribution::kRightUnimodal, 0.400, 0.167},
  };
  double worst = 0.0;
  for (const Row& row : rows) {
    const Moments m = distribution_moments(builtin_distribution(row.which));
    worst = std::max({worst, std::abs(m.expectation - row.expectation),
                      std::abs(m.variance - row.variance)});
  }
  detail = "max moment dev " + std::to_string(worst);
  return worst <= 1e-3;
}

// ---------------------------------------------------------------------------
// criterion 3: population optima sit on the tradeoff boundary

bool criterion_boundary(std::string& detail) {
  double worst = 0.0;
  for (BuiltinDistribution which : kAllBuiltins) {
    const auto result =
        optimize_population(builtin_distribution(which), base_params());
    worst = std::max(worst,
                     std::abs(std::abs(result.bias_star) + result.truth_star - 1.0));
  }
  detail = "max |b*|+t* deviation " + std::to_string(worst);
  return worst <= 1e-6;
}

// ---------------------------------------------------------------------------
// criterion 4: low-truth argmax classification per distribution

bool criterion_low_truth_classification(std::string& detail) {
  const ModelParams base = base_params();
  auto argmax = [&](BuiltinDistribution which) {
    return low_truth_argmax(builtin_distribution(which), 0.1, base,
                            ReaderSide::kRight, 0.005)
        .bias_star;
  };
  const double empirical = argmax(BuiltinDistribution::kEmpirical);
  const double centrist = argmax(BuiltinDistribution::kCentristUnimodal);
  const double left_uni = argmax(BuiltinDistribution::kLeftUnimodal);
  const double partisan = argmax(BuiltinDistribution::kPartisan);
  const double right_uni = argmax(BuiltinDistribution::kRightUnimodal);
  const double hyper = argmax(BuiltinDistribution::kHyperpartisan);

  std::ostringstream os;
  os << "empirical " << empirical << ", centrist " << centrist << ", left "
     << left_uni << ", partisan " << partisan << ", right " << right_uni
     << ", hyper " << hyper;
  detail = os.str();
  return empirical <= 0.05 && centrist <= 0.05 && left_uni <= 0.05 &&
         partisan >= 0.35 && partisan <= 0.65 && right_uni >= 0.35 &&
         right_uni <= 0.65 && hyper >= 0.6 && hyper <= 0.9;
}

// ---------------------------------------------------------------------------
// criterion 5: sharing falls with belief variance at fixed expectation

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
    sxy += (rx[i] - mx) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

bool criterion_variance_effect(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = sweep_moment_space(base_params());
  if (rows.size() != 8008) {
    detail = "unexpected sweep size " + std::to_string(rows.size());
    return false;
  }
  std::map<int, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    buckets[static_cast<int>(std::floor(rows[i].expectation / 0.05 + 1e-9))]
        .push_back(i);
  }
  int evaluated = 0;
  double worst_rho = -1.0;
  for (const auto& [bucket, members] : buckets) {
    if (members.size() < 3) continue;
    std::vector<double> variance, probability;
    for (std::size_t i : members) {
      variance.push_back(rows[i].variance);
      probability.push_back(rows[i].probability_star);
    }
    if (*std::max_element(variance.begin(), variance.end()) ==
        *std::min_element(variance.begin(), variance.end())) {
      continue;
    }
    const double rho = spearman(variance, probability);
    worst_rho = std::max(worst_rho, rho);
    ++evaluated;
  }
  std::ostringstream os;
  os << evaluated << " buckets, max rho " << worst_rho << ", "
     << fmt_seconds(seconds_since(start));
  detail = os.str();
  return evaluated >= 30 && worst_rho < 0.0;
}

// ---------------------------------------------------------------------------
// criterion 6: unimodal population dominates its mirrored-partisan variant

bool criterion_partisan_dominance(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  bool dominance = true;
  bool strictly_decreasing = true;
  for (double q : {0.3, 0.5, 0.7}) {
    for (int ib = 1; ib <= 50; ++ib) {
      for (int iB = 1; iB <= 50; ++iB) {
        const double b = 0.02 * ib;
        const double belief = 0.02 * iB;
        const auto table = partisan_gap_table(b, belief, q, 0.010, 4.465, 21);
        for (std::size_t i = 0; i < table.size(); ++i) {
          if (!(table[i].p_unimodal >= table[i].p_partisan)) dominance = false;
          if (i > 0 && !(table[i].rel_gap < table[i - 1].rel_gap)) {
            strictly_decreasing = false;
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  detail = std::string(dominance ? "p_U >= p_P everywhere" : "dominance FAILED") +
           (strictly_decreasing ? ", rel gap strictly decreasing"
                                : ", rel gap NOT strictly decreasing") +
           ", " + fmt_seconds(elapsed);
  return dominance && strictly_decreasing && elapsed < 5.0;
}

// ---------------------------------------------------------------------------
// criterion 7: generate-then-fit recovery and standard-error coverage

bool criterion_fit_recovery(std::string& detail) {
  const double true_f = 0.010;
  const double true_k = 4.465;
  const auto noiseless =
      testutil::synthetic_basic(ReaderSide::kLeft, true_f, true_k, 50);
  const FitReport exact = fit_parameters(noiseless, ReaderSide::kLeft);
  const double err_f = std::abs(exact.estimates[0] - true_f);
  const double err_k = std::abs(exact.estimates[1] - true_k);

  int covered = 0;
  for (std::uint32_t seed = 1; seed <= 200; ++seed) {
    const auto noisy = testutil::synthetic_basic(ReaderSide::kLeft, true_f,
                                                 true_k, 50, 0.001, seed);
    const FitReport fit = fit_parameters(noisy, ReaderSide::kLeft);
    const bool f_in = std::abs(fit.estimates[0] - true_f) <=
                      3.0 * fit.standard_errors[0];
    const bool k_in = std::abs(fit.estimates[1] - true_k) <=
                      3.0 * fit.standard_errors[1];
    if (fit.converged && f_in && k_in) ++covered;
  }
  std::ostringstream os;
  os << "noiseless err f " << err_f << " k " << err_k << "; coverage "
     << covered << "/200";
  detail = os.str();
  return exact.converged && err_f <= 1e-6 && err_k <= 1e-6 && covered >= 190;
}

// ---------------------------------------------------------------------------
// criterion 8: extreme-user fit mirrors the significant-f_e / flat-k_e pattern

bool criterion_extreme_user(std::string& detail) {
  const double true_fe = 0.15;
  const auto obs = testutil::synthetic_extreme(ReaderSide::kLeft, 0.010, 4.465,
                                               true_fe, 0.0, 50, 0.001, 42);
  const FitReport fit = fit_extreme_user_model(obs, ReaderSide::kLeft);
  const double fe = fit.estimates[2];
  const double fe_se = fit.standard_errors[2];
  const double ke_p = fit.p_values[3];
  std::ostringstream os;
  os << "f_e " << fe << " (SE " << fe_se << "), k_e p-value " << ke_p;
  detail = os.str();
  return fit.converged && std::abs(fe - true_fe) <= 3.0 * fe_se && ke_p > 0.5;
}

// ---------------------------------------------------------------------------
// criterion 9: assumption slopes on model-generated observations

bool criterion_assumption_slopes(std::string& detail) {
  std::vector<Observation> obs =
      testutil::synthetic_basic(ReaderSide::kLeft, 0.010, 4.465, 75);
  const auto right =
      testutil::synthetic_basic(ReaderSide::kRight, 0.007, 5.581, 100);
  obs.insert(obs.end(), right.begin(), right.end());
  const AssumptionReport report = validate_assumptions(obs);
  std::ostringstream os;
  os << "misalign p " << report.misalignment_left.p_value << "/"
     << report.misalignment_right.p_value << ", truth p "
     << report.truth_left.p_value << "/" << report.truth_right.p_value;
  detail = os.str();
  return report.misalignment_left.coefficient < 0.0 &&
         report.misalignment_right.coefficient < 0.0 &&
         report.truth_left.coefficient > 0.0 &&
         report.truth_right.coefficient > 0.0 &&
         report.misalignment_left.p_value < 0.01 &&
         report.misalignment_right.p_value < 0.01 &&
         report.truth_left.p_value < 0.01 && report.truth_right.p_value < 0.01;
}

// ---------------------------------------------------------------------------
// CLI plumbing for criteria 10 and 11

int run_cli(const std::string& arguments, const fs::path& stdout_path) {
  const std::string command = std::string(NEWSPROP_CLI_PATH) + " " + arguments +
                              " > " + stdout_path.string() + " 2> " +
                              stdout_path.string() + ".err";
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// criterion 10: sensitivity grid runs fully and flags exactly the known pair

bool criterion_sensitivity(const fs::path& scratch, std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = scratch / "sensitivity";
  const int rc =
      run_cli("sensitivity --out-dir " + dir.string(), scratch / "sens_stdout");
  if (rc != 0) {
    detail = "CLI exit code " + std::to_string(rc);
    return false;
  }
  const double elapsed = seconds_since(start);

  std::size_t curve_files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("curves_", 0) == 0) ++curve_files;
  }
  nlohmann::json manifest;
  {
    std::ifstream in(dir / "manifest.json");
    in >> manifest;
  }
  std::vector<std::string> flagged =
      manifest.at("flagged_combinations").get<std::vector<std::string>>();
  std::sort(flagged.begin(), flagged.end());
  const std::vector<std::string> expected{"1000", "1001"};

  std::ostringstream os;
  os << curve_files << " curve tables, flagged {";
  for (const std::string& bits : flagged) os << ' ' << bits;
  os << " }, " << fmt_seconds(elapsed);
  detail = os.str();
  return curve_files == 96 && flagged == expected && elapsed < 60.0;
}

// ---------------------------------------------------------------------------
// criterion 11: byte-identical reruns for every CLI command

bool criterion_determinism(const fs::path& scratch, std::string& detail) {
  // deterministic fixture with both reader sides and extreme flags
  const fs::path fixture = scratch / "fixture.csv";
  {
    std::vector<Observation> obs =
        testutil::synthetic_basic(ReaderSide::kLeft, 0.010, 4.465, 40);
    const auto right = testutil::synthetic_extreme(ReaderSide::kRight, 0.007,
                                                   5.581, 0.1, 0.0, 30);
    obs.insert(obs.end(), right.begin(), right.end());
    std::ofstream out(fixture, std::ios::binary);
    testutil::write_observations_csv(out, obs);
  }

  struct Command {
    std::string name;
    std::string arguments;  // {DIR} expands to the per-run scratch directory
  };
  const std::vector<Command> commands = {
      {"eval", "eval --b 0.2 --t 0.3 --dist empirical"},
      {"optimize", "optimize --dist partisan"},
      {"sweep-levels", "sweep-levels --fixed belief --value 0.45 --fr 1 --kr 10"},
      {"population-curves",
       "population-curves --dist hyperpartisan --out {DIR}/pc"},
      {"sweep-moments", "sweep-moments --weight-step 0.2"},
      {"sensitivity", "sensitivity --grid-step 0.02 --out-dir {DIR}/sens"},
      {"partisan-report", "partisan-report --b 0.5 --belief 0.7 --q 0.5"},
      {"fit", "fit --data " + fixture.string() + " --side right"},
      {"validate", "validate --data " + fixture.string()},
  };

  for (const Command& command : commands) {
    std::vector<std::string> digests;
    for (int run = 0; run < 2; ++run) {
      const fs::path run_dir =
          scratch / ("det_" + command.name + "_" + std::to_string(run));
      fs::create_directories(run_dir);
      std::string arguments = command.arguments;
      const std::string placeholder = "{DIR}";
      for (std::size_t pos = arguments.find(placeholder);
           pos != std::string::npos; pos = arguments.find(placeholder)) {
        arguments.replace(pos, placeholder.size(), run_dir.string());
      }
      const fs::path stdout_path = run_dir / "stdout.txt";
      const int rc = run_cli(arguments, stdout_path);
      if (rc != 0) {
        detail = command.name + " exited with " + std::to_string(rc);
        return false;
      }
      // digest = stdout bytes plus the bytes of every produced file, in
      // path-sorted order (relative paths so runs are comparable)
      std::string digest = "stdout:" + slurp(stdout_path) + "\n";
      std::vector<fs::path> files;
      for (const auto& entry : fs::recursive_directory_iterator(run_dir)) {
        if (entry.is_regular_file() &&
            entry.path().filename() != "stdout.txt" &&
            entry.path().extension() != ".err") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files) {
        digest += "file:" + fs::relative(file, run_dir).string() + "\n";
        digest += slurp(file);
      }
      digests.push_back(std::move(digest));
    }
    if (digests[0] != digests[1]) {
      detail = command.name + " output differs between runs";
      return false;
    }
  }
  detail = std::to_string(commands.size()) + " commands byte-identical";
  return true;
}

}  // namespace

int main() {
  Harness harness;
  const fs::path scratch =
      fs::temp_directory_path() /
      ("newsprop_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(scratch);

  std::string detail;

  detail.clear();
  harness.report(1, "closed-form optima match the brute-force oracle",
                 criterion_closed_form_oracle(detail), detail);

  detail.clear();
  harness.report(2, "built-in distributions reproduce the published moments",
                 criterion_moments(detail), detail);

  detail.clear();
  harness.report(3, "population optima lie on the |b|+t=1 boundary",
                 criterion_boundary(detail), detail);

  detail.clear();
  harness.report(4, "low-truth argmax classification per distribution",
                 criterion_low_truth_classification(detail), detail);

  detail.clear();
  harness.report(5, "sharing decreases with variance at fixed expectation",
                 criterion_variance_effect(detail), detail);

  detail.clear();
  harness.report(6, "unimodal dominance with shrinking relative gap",
                 criterion_partisan_dominance(detail), detail);

  detail.clear();
  harness.report(7, "fit recovery and 3-SE coverage on synthetic data",
                 criterion_fit_recovery(detail), detail);

  detail.clear();
  harness.report(8, "extreme-user fit: significant f_e, flat k_e",
                 criterion_extreme_user(detail), detail);

  detail.clear();
  harness.report(9, "assumption slopes carry the expected signs",
                 criterion_assumption_slopes(detail), detail);

  detail.clear();
  harness.report(10, "sensitivity grid flags exactly the known pair",
                 criterion_sensitivity(scratch, detail), detail);

  detail.clear();
  harness.report(11, "every CLI command is byte-identical across reruns",
                 criterion_determinism(scratch, detail), detail);

  std::error_code cleanup_error;
  fs::remove_all(scratch, cleanup_error);

  if (harness.failed > 0) {
    std::printf("%d criterion(s) FAILED\n", harness.failed);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
