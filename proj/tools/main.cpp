// newsprop command-line tool: model evaluation, adversarial optimization,
// parameter fitting, and the sweep/sensitivity tables behind the analyses.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "newsprop/analysis.hpp"
#include "newsprop/data.hpp"
#include "newsprop/fitting.hpp"
#include "newsprop/model.hpp"
#include "newsprop/optimizer.hpp"

namespace {

using nlohmann::ordered_json;
using namespace newsprop;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNonConvergence = 4;

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string fmt6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

// Flat JSON object as a CLI11 configuration source; command-line flags
// override config values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* /*app*/, bool /*default_also*/,
                        bool /*write_description*/,
                        std::string /*prefix*/) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(input);
    } catch (const nlohmann::json::parse_error& err) {
      throw CLI::FileError(std::string("config parse error: ") + err.what());
    }
    if (!parsed.is_object()) {
      throw CLI::FileError("config must be a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : parsed.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& element : value) {
          item.inputs.push_back(element.is_string()
                                    ? element.get<std::string>()
                                    : element.dump());
        }
      } else {
        item.inputs.push_back(value.is_string() ? value.get<std::string>()
                                                : value.dump());
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) {
        throw std::ios_base::failure("cannot open '" + path + "' for writing");
      }
      use_file_ = true;
    }
  }

  std::ostream& stream() { return use_file_ ? file_ : std::cout; }

 private:
  std::ofstream file_;
  bool use_file_ = false;
};

std::ofstream open_output_file(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::ios_base::failure("cannot open '" + path.string() +
                                 "' for writing");
  }
  return out;
}

using MetaList = std::vector<std::pair<std::string, std::string>>;

void write_metadata(std::ostream& os, const std::string& command,
                    const MetaList& entries) {
  os << "# newsprop " << command;
  for (const auto& [key, value] : entries) {
    os << ' ' << key << '=' << value;
  }
  os << '\n';
}

struct ParamFlags {
  double fl = 0.010;
  double kl = 4.465;
  double fr = 0.007;
  double kr = 5.581;

  ModelParams params() const { return ModelParams{fl, kl, fr, kr}; }

  MetaList meta() const {
    return {{"fl", fmt(fl)}, {"kl", fmt(kl)}, {"fr", fmt(fr)}, {"kr", fmt(kr)}};
  }
};

void add_param_flags(CLI::App* cmd, ParamFlags& flags) {
  cmd->add_option("--fl", flags.fl, "left-reader amplitude f_l")
      ->capture_default_str();
  cmd->add_option("--kl", flags.kl, "left-reader rate k_l")
      ->capture_default_str();
  cmd->add_option("--fr", flags.fr, "right-reader amplitude f_r")
      ->capture_default_str();
  cmd->add_option("--kr", flags.kr, "right-reader rate k_r")
      ->capture_default_str();
}

void add_config_flag(CLI::App* cmd) {
  cmd->set_config("--config", "", "JSON file supplying any flag of this command");
  cmd->config_formatter(std::make_shared<JsonConfig>());
}

ordered_json params_json(const ModelParams& params) {
  return ordered_json{{"f_left", params.f_left},
                      {"k_left", params.k_left},
                      {"f_right", params.f_right},
                      {"k_right", params.k_right}};
}

BuiltinDistribution parse_dist_or_throw(const std::string& name) {
  const auto parsed = parse_builtin(name);
  if (!parsed) {
    throw std::invalid_argument(
        "unknown distribution '" + name +
        "' (expected empirical, partisan, hyperpartisan, left_unimodal, "
        "centrist_unimodal or right_unimodal)");
  }
  return *parsed;
}

ReaderSide parse_side_or_throw(const std::string& name) {
  if (name == "left") return ReaderSide::kLeft;
  if (name == "right") return ReaderSide::kRight;
  throw std::invalid_argument("side must be 'left' or 'right'");
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  double b = 0.0;
  double t = 0.0;
  std::optional<double> belief;
  std::string dist;
  ParamFlags params;
  std::string out;
};

void run_eval(const EvalArgs& args) {
  if (args.belief.has_value() == !args.dist.empty()) {
    throw std::invalid_argument("provide exactly one of --belief or --dist");
  }
  const ModelParams params = args.params.params();
  double probability = 0.0;
  if (args.belief) {
    probability = sharing_probability({args.b, args.t}, *args.belief, params);
  } else {
    probability = population_sharing_probability(
        {args.b, args.t}, builtin_distribution(parse_dist_or_throw(args.dist)),
        params);
  }
  Output output(args.out);
  output.stream() << fmt6(probability) << '\n';
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  std::optional<double> belief;
  std::string dist;
  std::optional<double> truth;
  double grid_step = 0.005;
  double refine_tol = 1e-8;
  std::string side = "full";
  ParamFlags params;
  std::string out;
};

void run_optimize(const OptimizeArgs& args) {
  if (args.belief.has_value() == !args.dist.empty()) {
    throw std::invalid_argument("provide exactly one of --belief or --dist");
  }
  const ModelParams params = args.params.params();
  ordered_json report;
  if (args.belief) {
    if (args.truth) {
      const double bias = optimize_fixed_truth(*args.truth, *args.belief, params);
      report = ordered_json{
          {"mode", "single_reader_fixed_truth"},
          {"belief", *args.belief},
          {"truth", *args.truth},
          {"bias_star", bias},
          {"probability_star",
           sharing_probability({bias, *args.truth}, *args.belief, params)},
      };
    } else {
      const auto result = optimize_single_reader_closed_form(*args.belief, params);
      report = ordered_json{
          {"mode", "single_reader_closed_form"},
          {"belief", *args.belief},
          {"bias_star", result.bias_star},
          {"truth_star", result.truth_star},
          {"probability_star", result.probability_star},
          {"active_boundary", to_string(result.active_boundary)},
      };
    }
  } else {
    const BeliefDistribution dist =
        builtin_distribution(parse_dist_or_throw(args.dist));
    if (args.truth) {
      double lo = -1.0;
      double hi = 1.0;
      if (args.side == "left") {
        hi = 0.0;
      } else if (args.side == "right") {
        lo = 0.0;
      } else if (args.side != "full") {
        throw std::invalid_argument("side must be left, right or full");
      }
      const auto result = optimize_population_fixed_truth(
          dist, *args.truth, params, args.grid_step, lo, hi);
      report = ordered_json{
          {"mode", "population_fixed_truth"},
          {"dist", args.dist},
          {"truth", *args.truth},
          {"side", args.side},
          {"grid_step", args.grid_step},
          {"bias_star", result.bias_star},
          {"probability_star", result.probability_star},
      };
    } else {
      PopulationOptimizerOptions options;
      options.grid_step = args.grid_step;
      options.refine_tol = args.refine_tol;
      const auto result = optimize_population(dist, params, options);
      report = ordered_json{
          {"mode", "population"},
          {"dist", args.dist},
          {"grid_step", args.grid_step},
          {"refine_tol", args.refine_tol},
          {"bias_star", result.bias_star},
          {"truth_star", result.truth_star},
          {"probability_star", result.probability_star},
          {"active_boundary", to_string(result.active_boundary)},
      };
    }
  }
  report["params"] = params_json(params);
  Output output(args.out);
  output.stream() << report.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// sweep-levels

struct SweepLevelsArgs {
  std::string fixed;
  double value = 0.0;
  int points = 201;
  ParamFlags params;
  std::string out;
};

void run_sweep_levels(const SweepLevelsArgs& args) {
  if (args.points < 2) {
    throw std::invalid_argument("--points must be at least 2");
  }
  struct Axis {
    std::string name;
    double lo;
    double hi;
  };
  const Axis bias_axis{"bias", -1.0, 1.0};
  const Axis truth_axis{"truth", 0.0, 1.0};
  const Axis belief_axis{"belief", -1.0, 1.0};

  Axis outer{}, inner{};
  if (args.fixed == "b" || args.fixed == "bias") {
    if (args.value < -1.0 || args.value > 1.0) {
      throw std::invalid_argument("fixed bias must be in [-1, 1]");
    }
    outer = truth_axis;
    inner = belief_axis;
  } else if (args.fixed == "t" || args.fixed == "truth") {
    if (args.value < 0.0 || args.value > 1.0) {
      throw std::invalid_argument("fixed truth must be in [0, 1]");
    }
    outer = bias_axis;
    inner = belief_axis;
  } else if (args.fixed == "B" || args.fixed == "belief") {
    if (args.value < -1.0 || args.value > 1.0) {
      throw std::invalid_argument("fixed belief must be in [-1, 1]");
    }
    outer = bias_axis;
    inner = truth_axis;
  } else {
    throw std::invalid_argument("--fixed must be one of b, t, belief");
  }

  const ModelParams params = args.params.params();
  auto coordinate = [&](const Axis& axis, int index) {
    return axis.lo +
           (axis.hi - axis.lo) * index / static_cast<double>(args.points - 1);
  };
  auto probability_at = [&](double outer_value, double inner_value) {
    double b = 0.0, t = 0.0, belief = 0.0;
    auto assign = [&](const std::string& name, double value) {
      if (name == "bias") b = value;
      else if (name == "truth") t = value;
      else belief = value;
    };
    assign(outer.name, outer_value);
    assign(inner.name, inner_value);
    assign(args.fixed == "b" || args.fixed == "bias"     ? "bias"
           : args.fixed == "t" || args.fixed == "truth" ? "truth"
                                                        : "belief",
           args.value);
    return sharing_probability({b, t}, belief, params);
  };

  Output output(args.out);
  std::ostream& os = output.stream();
  MetaList meta{{"fixed", args.fixed},
                {"value", fmt(args.value)},
                {"points", std::to_string(args.points)}};
  const MetaList params_meta = args.params.meta();
  meta.insert(meta.end(), params_meta.begin(), params_meta.end());
  write_metadata(os, "sweep-levels", meta);
  os << outer.name << ',' << inner.name << ",probability\n";
  for (int i = 0; i < args.points; ++i) {
    const double outer_value = coordinate(outer, i);
    for (int j = 0; j < args.points; ++j) {
      const double inner_value = coordinate(inner, j);
      os << fmt(outer_value) << ',' << fmt(inner_value) << ','
         << fmt(probability_at(outer_value, inner_value)) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// population-curves

struct CurveRow {
  double bias;
  double truth;
  double probability;
};

std::vector<CurveRow> population_curve_rows(const BeliefDistribution& dist,
                                            ReaderSide side,
                                            const ModelParams& params,
                                            double grid_step) {
  if (!(grid_step >= 1e-4) || !(grid_step <= 0.1)) {
    throw std::invalid_argument("grid step must be in [1e-4, 0.1]");
  }
  const double lo = side == ReaderSide::kLeft ? -1.0 : 0.0;
  const int n = static_cast<int>(std::lround(1.0 / grid_step));
  std::vector<CurveRow> rows;
  for (int ti = 0; ti <= n; ++ti) {
    const double t = std::min(1.0, ti * grid_step);
    for (int bi = 0; bi <= n; ++bi) {
      const double b = std::min(1.0, lo + bi * grid_step);
      if (std::abs(b) + t > 1.0 + 1e-12) {
        continue;
      }
      rows.push_back(
          {b, t, population_sharing_probability({b, t}, dist, params)});
    }
  }
  return rows;
}

void write_bias_table(std::ostream& os, const std::string& command,
                      const MetaList& meta, const std::vector<CurveRow>& rows) {
  write_metadata(os, command, meta);
  os << "bias,truth,probability\n";
  for (const CurveRow& row : rows) {
    os << fmt(row.bias) << ',' << fmt(row.truth) << ',' << fmt(row.probability)
       << '\n';
  }
}

struct PopulationCurvesArgs {
  std::string dist;
  std::string side = "right";
  double grid_step = 0.005;
  ParamFlags params;
  std::string out;
};

void run_population_curves(const PopulationCurvesArgs& args) {
  const BuiltinDistribution which = parse_dist_or_throw(args.dist);
  const ReaderSide side = parse_side_or_throw(args.side);
  const ModelParams params = args.params.params();
  std::vector<CurveRow> rows = population_curve_rows(
      builtin_distribution(which), side, params, args.grid_step);

  const std::string prefix =
      args.out.empty() ? "population_curves_" + args.dist + "_" + args.side
                       : args.out;
  MetaList meta{{"dist", args.dist},
                {"side", args.side},
                {"grid_step", fmt(args.grid_step)}};
  const MetaList params_meta = args.params.meta();
  meta.insert(meta.end(), params_meta.begin(), params_meta.end());

  std::ofstream bias_os = open_output_file(prefix + "_bias.csv");
  write_bias_table(bias_os, "population-curves", meta, rows);

  // transposed orientation: truth on the x axis, bias as the level variable
  std::vector<CurveRow> transposed = rows;
  std::stable_sort(transposed.begin(), transposed.end(),
                   [](const CurveRow& a, const CurveRow& b) {
                     if (a.bias != b.bias) return a.bias < b.bias;
                     return a.truth < b.truth;
                   });
  std::ofstream truth_os = open_output_file(prefix + "_truth.csv");
  write_metadata(truth_os, "population-curves", meta);
  truth_os << "truth,bias,probability\n";
  for (const CurveRow& row : transposed) {
    truth_os << fmt(row.truth) << ',' << fmt(row.bias) << ','
             << fmt(row.probability) << '\n';
  }
}

// ---------------------------------------------------------------------------
// sweep-moments

struct SweepMomentsArgs {
  double weight_step = 0.1;
  double grid_step = 0.005;
  double refine_tol = 1e-8;
  std::size_t max_rows = 1000000;
  ParamFlags params;
  std::string out;
};

void run_sweep_moments(const SweepMomentsArgs& args) {
  MomentSweepOptions options;
  options.weight_step = args.weight_step;
  options.grid_step = args.grid_step;
  options.refine_tol = args.refine_tol;
  options.max_rows = args.max_rows;
  const auto rows = sweep_moment_space(args.params.params(), options);

  Output output(args.out);
  std::ostream& os = output.stream();
  MetaList meta{{"weight_step", fmt(args.weight_step)},
                {"grid_step", fmt(args.grid_step)},
                {"refine_tol", fmt(args.refine_tol)}};
  const MetaList params_meta = args.params.meta();
  meta.insert(meta.end(), params_meta.begin(), params_meta.end());
  write_metadata(os, "sweep-moments", meta);
  os << "w_extreme_left,w_left,w_lean_left,w_center,w_lean_right,w_right,"
        "w_extreme_right,expectation,variance,bias_star,truth_star,"
        "probability_star\n";
  for (const MomentSweepRow& row : rows) {
    for (double w : row.weights) {
      os << fmt(w) << ',';
    }
    os << fmt(row.expectation) << ',' << fmt(row.variance) << ','
       << fmt(row.bias_star) << ',' << fmt(row.truth_star) << ','
       << fmt(row.probability_star) << '\n';
  }
}

// ---------------------------------------------------------------------------
// sensitivity

struct SensitivityArgs {
  std::vector<std::string> dists;
  std::string out_dir = "sensitivity_output";
  double truth = 0.1;
  double grid_step = 0.005;
  double threshold = 0.15;
  double fl_low = 0.005, fl_high = 0.014;
  double kl_low = 2.232, kl_high = 6.697;
  double fr_low = 0.004, fr_high = 0.011;
  double kr_low = 2.791, kr_high = 8.372;
  ParamFlags params;
};

void run_sensitivity(const SensitivityArgs& args) {
  std::vector<BuiltinDistribution> dists;
  if (args.dists.empty()) {
    dists.assign(kAllBuiltins.begin(), kAllBuiltins.end());
  } else {
    for (const std::string& name : args.dists) {
      dists.push_back(parse_dist_or_throw(name));
    }
  }
  SensitivityRange range;
  range.f_left = {args.fl_low, args.fl_high};
  range.k_left = {args.kl_low, args.kl_high};
  range.f_right = {args.fr_low, args.fr_high};
  range.k_right = {args.kr_low, args.kr_high};

  SensitivityOptions options;
  options.truth = args.truth;
  options.grid_step = args.grid_step;
  options.flag_threshold = args.threshold;

  const ModelParams base = args.params.params();
  const SensitivityResult result = sensitivity_scan(base, range, dists, options);

  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);

  ordered_json manifest;
  manifest["command"] = "sensitivity";
  manifest["truth"] = args.truth;
  manifest["grid_step"] = args.grid_step;
  manifest["threshold"] = args.threshold;
  manifest["base_params"] = params_json(base);
  manifest["ranges"] = ordered_json{
      {"f_left", {args.fl_low, args.fl_high}},
      {"k_left", {args.kl_low, args.kl_high}},
      {"f_right", {args.fr_low, args.fr_high}},
      {"k_right", {args.kr_low, args.kr_high}},
  };
  manifest["distributions"] = result.distribution_names;

  std::ofstream summary = open_output_file(dir / "summary.csv");
  write_metadata(summary, "sensitivity",
                 {{"truth", fmt(args.truth)},
                  {"grid_step", fmt(args.grid_step)},
                  {"threshold", fmt(args.threshold)}});
  summary << "combo,fl_level,kl_level,fr_level,kr_level,dist,bias_star,"
             "probability_star,base_bias_star,shift,combo_mean_shift,flagged\n";

  ordered_json combos_json = ordered_json::array();
  std::vector<std::string> flagged_bits;
  for (const ParamCombination& combo : all_combinations()) {
    const ModelParams combo_params = combination_params(range, combo);
    const std::string bits = combo.bits();
    const int index = combo.index();
    ordered_json combo_json;
    combo_json["bits"] = bits;
    combo_json["params"] = params_json(combo_params);
    combo_json["mean_shift"] = result.mean_shift[index];
    combo_json["flagged"] = result.flagged[index];
    ordered_json files = ordered_json::array();

    for (std::size_t d = 0; d < dists.size(); ++d) {
      const std::string& dist_name = result.distribution_names[d];
      const SensitivityCell& cell = result.cells[index][d];

      const std::string file_name = "curves_" + bits + "_" + dist_name + ".csv";
      std::ofstream curve = open_output_file(dir / file_name);
      MetaList meta{{"combo", bits},
                    {"dist", dist_name},
                    {"fl", fmt(combo_params.f_left)},
                    {"kl", fmt(combo_params.k_left)},
                    {"fr", fmt(combo_params.f_right)},
                    {"kr", fmt(combo_params.k_right)}};
      write_bias_table(curve, "sensitivity", meta,
                       population_curve_rows(builtin_distribution(dists[d]),
                                             ReaderSide::kRight, combo_params,
                                             args.grid_step));
      files.push_back(file_name);

      summary << bits << ',' << (combo.high[0] ? "high" : "low") << ','
              << (combo.high[1] ? "high" : "low") << ','
              << (combo.high[2] ? "high" : "low") << ','
              << (combo.high[3] ? "high" : "low") << ',' << dist_name << ','
              << fmt(cell.bias_star) << ',' << fmt(cell.probability_star) << ','
              << fmt(result.base[d].bias_star) << ',' << fmt(cell.shift_from_base)
              << ',' << fmt(result.mean_shift[index]) << ','
              << (result.flagged[index] ? 1 : 0) << '\n';
    }
    combo_json["files"] = files;
    combos_json.push_back(combo_json);
    if (result.flagged[index]) {
      flagged_bits.push_back(bits);
    }
  }
  manifest["combinations"] = combos_json;
  manifest["flagged_combinations"] = flagged_bits;

  std::ofstream manifest_os = open_output_file(dir / "manifest.json");
  manifest_os << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// partisan-report

struct PartisanReportArgs {
  double b = 0.0;
  double belief = 0.0;
  double q = 0.5;
  double f = 0.010;
  double k = 4.465;
  int t_points = 21;
  std::string out;
};

void run_partisan_report(const PartisanReportArgs& args) {
  if (args.b * args.belief < 0.0) {
    std::cerr << "warning: bias and belief have opposite signs; the "
                 "unimodal-dominance guarantee does not apply\n";
  }
  const auto rows = partisan_gap_table(args.b, args.belief, args.q, args.f,
                                       args.k, args.t_points);
  Output output(args.out);
  std::ostream& os = output.stream();
  write_metadata(os, "partisan-report",
                 {{"b", fmt(args.b)},
                  {"belief", fmt(args.belief)},
                  {"q", fmt(args.q)},
                  {"f", fmt(args.f)},
                  {"k", fmt(args.k)},
                  {"t_points", std::to_string(args.t_points)}});
  os << "truth,p_unimodal,p_partisan,abs_gap,rel_gap\n";
  for (const PartisanGapRow& row : rows) {
    os << fmt(row.truth) << ',' << fmt(row.p_unimodal) << ','
       << fmt(row.p_partisan) << ',' << fmt(row.abs_gap) << ','
       << fmt(row.rel_gap) << '\n';
  }
}

// ---------------------------------------------------------------------------
// fit / validate

struct FitArgs {
  std::string data;
  std::string side;
  bool extreme_model = false;
  bool weighted = false;
  int max_iterations = 500;
  std::string out;
};

int run_fit(const FitArgs& args) {
  const ReaderSide side = parse_side_or_throw(args.side);
  const auto observations = read_observations_file(args.data);
  FitOptions options;
  options.max_iterations = args.max_iterations;
  options.weight_by_exposures = args.weighted;
  const FitReport report =
      args.extreme_model ? fit_extreme_user_model(observations, side, options)
                         : fit_parameters(observations, side, options);

  ordered_json out_json;
  out_json["command"] = "fit";
  out_json["data"] = args.data;
  out_json["side"] = std::string(to_string(side));
  out_json["model"] = args.extreme_model ? "extreme" : "basic";
  out_json["weighted"] = args.weighted;
  ordered_json estimates, errors, pvalues;
  for (std::size_t i = 0; i < report.parameter_names.size(); ++i) {
    estimates[report.parameter_names[i]] = report.estimates[i];
    errors[report.parameter_names[i]] = report.standard_errors[i];
    pvalues[report.parameter_names[i]] = report.p_values[i];
  }
  out_json["estimates"] = estimates;
  out_json["standard_errors"] = errors;
  out_json["p_values"] = pvalues;
  out_json["residual_standard_error"] = report.residual_standard_error;
  out_json["iterations"] = report.iterations;
  out_json["converged"] = report.converged;

  Output output(args.out);
  output.stream() << out_json.dump(2) << '\n';
  return report.converged ? 0 : kExitNonConvergence;
}

struct ValidateArgs {
  std::string data;
  std::string out;
};

void run_validate(const ValidateArgs& args) {
  const auto observations = read_observations_file(args.data);
  const AssumptionReport report = validate_assumptions(observations);
  auto slope_json = [](const SlopeTest& test) {
    return ordered_json{{"coefficient", test.coefficient},
                        {"p_value", test.p_value}};
  };
  ordered_json out_json;
  out_json["command"] = "validate";
  out_json["data"] = args.data;
  out_json["slope_misalignment_left"] = slope_json(report.misalignment_left);
  out_json["slope_misalignment_right"] = slope_json(report.misalignment_right);
  out_json["slope_truth_left"] = slope_json(report.truth_left);
  out_json["slope_truth_right"] = slope_json(report.truth_right);

  Output output(args.out);
  output.stream() << out_json.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"political-news sharing model toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  EvalArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate the sharing probability");
  eval_cmd->add_option("--b", eval_args.b, "article bias")
      ->required()
      ->check(CLI::Range(-1.0, 1.0));
  eval_cmd->add_option("--t", eval_args.t, "article truthfulness")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--belief", eval_args.belief, "single reader belief")
      ->check(CLI::Range(-1.0, 1.0));
  eval_cmd->add_option("--dist", eval_args.dist, "built-in belief distribution");
  add_param_flags(eval_cmd, eval_args.params);
  eval_cmd->add_option("--out", eval_args.out, "output file ('-' = stdout)");
  add_config_flag(eval_cmd);
  eval_cmd->callback([&] { run_eval(eval_args); });

  OptimizeArgs optimize_args;
  auto* optimize_cmd = app.add_subcommand(
      "optimize", "find the propagation-maximizing article");
  optimize_cmd->add_option("--belief", optimize_args.belief, "single reader belief")
      ->check(CLI::Range(-1.0, 1.0));
  optimize_cmd->add_option("--dist", optimize_args.dist,
                           "built-in belief distribution");
  optimize_cmd->add_option("--t", optimize_args.truth, "fix truth at this value")
      ->check(CLI::Range(0.0, 1.0));
  optimize_cmd
      ->add_option("--grid-step", optimize_args.grid_step, "search grid spacing")
      ->capture_default_str();
  optimize_cmd
      ->add_option("--refine-tol", optimize_args.refine_tol,
                   "refinement stopping tolerance")
      ->capture_default_str();
  optimize_cmd
      ->add_option("--side", optimize_args.side,
                   "bias range restriction for fixed-truth search")
      ->capture_default_str();
  add_param_flags(optimize_cmd, optimize_args.params);
  optimize_cmd->add_option("--out", optimize_args.out, "output file");
  add_config_flag(optimize_cmd);
  optimize_cmd->callback([&] { run_optimize(optimize_args); });

  SweepLevelsArgs sweep_levels_args;
  auto* sweep_levels_cmd = app.add_subcommand(
      "sweep-levels", "tabulate the probability surface with one input fixed");
  sweep_levels_cmd
      ->add_option("--fixed", sweep_levels_args.fixed,
                   "which input to fix: b, t or belief")
      ->required();
  sweep_levels_cmd
      ->add_option("--value", sweep_levels_args.value, "value of the fixed input")
      ->required();
  sweep_levels_cmd
      ->add_option("--points", sweep_levels_args.points, "points per free axis")
      ->capture_default_str();
  add_param_flags(sweep_levels_cmd, sweep_levels_args.params);
  sweep_levels_cmd->add_option("--out", sweep_levels_args.out, "output file");
  add_config_flag(sweep_levels_cmd);
  sweep_levels_cmd->callback([&] { run_sweep_levels(sweep_levels_args); });

  PopulationCurvesArgs curves_args;
  auto* curves_cmd = app.add_subcommand(
      "population-curves", "population sharing tables over bias and truth");
  curves_cmd->add_option("--dist", curves_args.dist, "built-in distribution")
      ->required();
  curves_cmd->add_option("--side", curves_args.side, "bias side: left or right")
      ->capture_default_str();
  curves_cmd->add_option("--grid-step", curves_args.grid_step, "grid spacing")
      ->capture_default_str();
  add_param_flags(curves_cmd, curves_args.params);
  curves_cmd->add_option("--out", curves_args.out,
                         "output prefix (writes <prefix>_bias.csv and "
                         "<prefix>_truth.csv)");
  add_config_flag(curves_cmd);
  curves_cmd->callback([&] { run_population_curves(curves_args); });

  SweepMomentsArgs sweep_moments_args;
  auto* sweep_moments_cmd = app.add_subcommand(
      "sweep-moments",
      "optimize over every belief distribution on a weight lattice");
  sweep_moments_cmd
      ->add_option("--weight-step", sweep_moments_args.weight_step,
                   "weight lattice spacing (must divide 1)")
      ->capture_default_str();
  sweep_moments_cmd
      ->add_option("--grid-step", sweep_moments_args.grid_step, "grid spacing")
      ->capture_default_str();
  sweep_moments_cmd
      ->add_option("--refine-tol", sweep_moments_args.refine_tol,
                   "refinement stopping tolerance")
      ->capture_default_str();
  sweep_moments_cmd
      ->add_option("--max-rows", sweep_moments_args.max_rows,
                   "row-count guard for small steps")
      ->capture_default_str();
  add_param_flags(sweep_moments_cmd, sweep_moments_args.params);
  sweep_moments_cmd->add_option("--out", sweep_moments_args.out, "output file");
  add_config_flag(sweep_moments_cmd);
  sweep_moments_cmd->callback([&] { run_sweep_moments(sweep_moments_args); });

  SensitivityArgs sensitivity_args;
  auto* sensitivity_cmd = app.add_subcommand(
      "sensitivity", "low/high parameter grid across belief distributions");
  sensitivity_cmd->add_option("--dist", sensitivity_args.dists,
                              "distributions to analyze (default: all six)");
  sensitivity_cmd
      ->add_option("--out-dir", sensitivity_args.out_dir, "output directory")
      ->capture_default_str();
  sensitivity_cmd
      ->add_option("--truth", sensitivity_args.truth,
                   "low-truth slice for the argmax classification")
      ->capture_default_str();
  sensitivity_cmd
      ->add_option("--grid-step", sensitivity_args.grid_step, "grid spacing")
      ->capture_default_str();
  sensitivity_cmd
      ->add_option("--threshold", sensitivity_args.threshold,
                   "mean argmax-shift needed to flag a combination")
      ->capture_default_str();
  sensitivity_cmd->add_option("--fl-low", sensitivity_args.fl_low, "f_l low level")
      ->capture_default_str();
  sensitivity_cmd->add_option("--fl-high", sensitivity_args.fl_high, "f_l high level")
      ->capture_default_str();
  sensitivity_cmd->add_option("--kl-low", sensitivity_args.kl_low, "k_l low level")
      ->capture_default_str();
  sensitivity_cmd->add_option("--kl-high", sensitivity_args.kl_high, "k_l high level")
      ->capture_default_str();
  sensitivity_cmd->add_option("--fr-low", sensitivity_args.fr_low, "f_r low level")
      ->capture_default_str();
  sensitivity_cmd->add_option("--fr-high", sensitivity_args.fr_high, "f_r high level")
      ->capture_default_str();
  sensitivity_cmd->add_option("--kr-low", sensitivity_args.kr_low, "k_r low level")
      ->capture_default_str();
  sensitivity_cmd->add_option("--kr-high", sensitivity_args.kr_high, "k_r high level")
      ->capture_default_str();
  add_param_flags(sensitivity_cmd, sensitivity_args.params);
  add_config_flag(sensitivity_cmd);
  sensitivity_cmd->callback([&] { run_sensitivity(sensitivity_args); });

  PartisanReportArgs partisan_args;
  auto* partisan_cmd = app.add_subcommand(
      "partisan-report",
      "compare sharing in unimodal and two-point mirrored populations");
  partisan_cmd->add_option("--b", partisan_args.b, "article bias")
      ->required()
      ->check(CLI::Range(-1.0, 1.0));
  partisan_cmd->add_option("--belief", partisan_args.belief, "reader belief")
      ->required()
      ->check(CLI::Range(-1.0, 1.0));
  partisan_cmd
      ->add_option("--q", partisan_args.q, "population share at +belief")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  partisan_cmd->add_option("--f", partisan_args.f, "shared amplitude f")
      ->capture_default_str();
  partisan_cmd->add_option("--k", partisan_args.k, "shared rate k")
      ->capture_default_str();
  partisan_cmd
      ->add_option("--t-points", partisan_args.t_points, "rows on the truth grid")
      ->capture_default_str();
  partisan_cmd->add_option("--out", partisan_args.out, "output file");
  add_config_flag(partisan_cmd);
  partisan_cmd->callback([&] { run_partisan_report(partisan_args); });

  FitArgs fit_args;
  auto* fit_cmd =
      app.add_subcommand("fit", "nonlinear least-squares parameter estimation");
  fit_cmd->add_option("--data", fit_args.data, "observations CSV")->required();
  fit_cmd->add_option("--side", fit_args.side, "reader side: left or right")
      ->required();
  fit_cmd->add_flag("--extreme-model", fit_args.extreme_model,
                    "fit the four-parameter extreme-user curve");
  fit_cmd->add_flag("--weighted", fit_args.weighted,
                    "weight squared residuals by exposure counts");
  fit_cmd
      ->add_option("--max-iterations", fit_args.max_iterations,
                   "iteration budget")
      ->capture_default_str();
  fit_cmd->add_option("--out", fit_args.out, "output file");
  add_config_flag(fit_cmd);
  fit_cmd->callback([&] { exit_code = run_fit(fit_args); });

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand(
      "validate", "slope tests for the model's shape assumptions");
  validate_cmd->add_option("--data", validate_args.data, "observations CSV")
      ->required();
  validate_cmd->add_option("--out", validate_args.out, "output file");
  add_config_flag(validate_cmd);
  validate_cmd->callback([&] { run_validate(validate_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitValidation;
  } catch (const CsvError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::ios_base::failure& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::domain_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitValidation;
  }
  return exit_code;
}
