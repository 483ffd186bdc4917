// Command-line driver: simulate sensor campaigns, run cross-validation,
// sweep hyperparameters, and export variable-importance reports.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "senselab/dataset.hpp"
#include "senselab/eval.hpp"
#include "senselab/manifest.hpp"
#include "senselab/sim.hpp"
#include "senselab/svg.hpp"

namespace {

using namespace senselab;

// Usage-level problems exit with code 2; I/O and data problems with 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> parse_value_list(const std::string& text,
                                     const std::string& flag) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    pos = comma + 1;
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    const std::string trimmed = item.substr(begin, end - begin + 1);
    char* stop = nullptr;
    const double v = std::strtod(trimmed.c_str(), &stop);
    if (stop != trimmed.c_str() + trimmed.size()) {
      throw UsageError(flag + ": cannot parse '" + trimmed + "'");
    }
    values.push_back(v);
  }
  return values;
}

ClassifierKind require_classifier(const std::string& name) {
  const auto kind = parse_classifier_kind(name);
  if (!kind) {
    throw UsageError("unknown classifier '" + name +
                     "'; valid kinds: forest, samme, logreg, trivial, random");
  }
  return *kind;
}

EvalMode require_mode(const std::string& name) {
  if (name == "3class") return EvalMode::ThreeClass;
  if (name == "2class") return EvalMode::TwoClass;
  throw UsageError("unknown mode '" + name + "'; valid modes: 3class, 2class");
}

Penalty require_penalty(const std::string& name) {
  if (name == "l1" || name == "L1") return Penalty::L1;
  if (name == "l2" || name == "L2") return Penalty::L2;
  throw UsageError("unknown penalty '" + name + "'; valid: l1, l2");
}

struct CommonClassifierFlags {
  std::string classifier = "forest";
  int trees = 100;
  int mtry = 4;
  int rounds = 50;
  int weak_depth = 3;
  std::string penalty = "l2";
  double lambda = 1e-3;
};

ClassifierSpec build_spec(const CommonClassifierFlags& flags,
                          std::uint64_t seed) {
  ClassifierSpec spec;
  spec.kind = require_classifier(flags.classifier);
  spec.seed = seed;
  spec.forest.n_trees = flags.trees;
  spec.forest.m_try = flags.mtry;
  spec.samme.rounds = flags.rounds;
  spec.samme.weak.max_depth = flags.weak_depth;
  spec.logreg.penalty = require_penalty(flags.penalty);
  spec.logreg.lambda = flags.lambda;
  if (flags.trees < 1) throw UsageError("--trees must be >= 1");
  if (flags.mtry < 1 || flags.mtry > kSensorCount) {
    throw UsageError("--mtry must be in 1..15");
  }
  if (flags.rounds < 1) throw UsageError("--rounds must be >= 1");
  if (flags.lambda <= 0.0) throw UsageError("--lambda must be > 0");
  return spec;
}

FoldPlan folds_for(const Dataset& ds, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 7001));
  return make_folds(ds, 10, rng);
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

int cmd_simulate(std::uint64_t seed, const std::string& config_path,
                 const std::string& out_path) {
  SimConfig cfg;
  if (!config_path.empty()) {
    cfg = load_sim_config(config_path);
  } else {
    validate_sim_config(cfg);
  }

  const Dataset ds = simulate_campaign(cfg, seed);
  save_dataset(ds, out_path);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = seed;
  manifest.config_digest = ds.config_digest;
  if (!config_path.empty()) manifest.inputs.push_back(config_path);
  manifest.timestamp_utc = utc_timestamp_now();
  add_output_checksum(manifest, out_path);
  write_manifest(manifest, out_path + ".manifest.json");

  std::printf("simulate: %zu experiments -> %s\n", ds.experiments.size(),
              out_path.c_str());
  return 0;
}

// --------------------------------------------------------------------------
// crossval
// --------------------------------------------------------------------------

int cmd_crossval(const std::string& data_path,
                 const CommonClassifierFlags& flags, const std::string& mode,
                 std::uint64_t seed, const std::string& out_path) {
  const ClassifierSpec spec = build_spec(flags, seed);
  const EvalMode eval_mode = require_mode(mode);

  const Dataset ds = load_dataset(data_path);
  const FoldPlan plan = folds_for(ds, seed);
  const auto cv = cross_validate(ds, spec, plan, eval_mode);

  write_text_file(out_path, report_to_csv(cv.report, flags.classifier));
  const std::string folds_path = out_path + ".folds.txt";
  write_text_file(folds_path, foldplan_to_text(plan));

  RunManifest manifest;
  manifest.command = "crossval";
  manifest.seed = seed;
  manifest.config_digest = ds.config_digest;
  manifest.inputs.push_back(data_path);
  manifest.timestamp_utc = utc_timestamp_now();
  add_output_checksum(manifest, out_path);
  add_output_checksum(manifest, folds_path);
  write_manifest(manifest, out_path + ".manifest.json");

  if (eval_mode == EvalMode::ThreeClass) {
    std::printf("crossval %s 3class: obs_error %.3f ± %.3f, exp_error %.3f ± %.3f\n",
                flags.classifier.c_str(), cv.report.obs_error.mean,
                cv.report.obs_error.half_width, cv.report.exp_error.mean,
                cv.report.exp_error.half_width);
  } else {
    std::printf("crossval %s 2class: obs_accuracy %.3f ± %.3f, exp_accuracy %.3f ± %.3f\n",
                flags.classifier.c_str(), cv.report.obs_binary->accuracy.mean,
                cv.report.obs_binary->accuracy.half_width,
                cv.report.exp_binary->accuracy.mean,
                cv.report.exp_binary->accuracy.half_width);
  }
  return 0;
}

// --------------------------------------------------------------------------
// sweep
// --------------------------------------------------------------------------

struct SweepFlags {
  std::string classifier = "forest";
  std::string trees = "1,5,10,25,50,100,150";
  std::string mtry = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15";
  std::string rounds = "1,5,10,25,50,100,150";
  std::string weak_depth = "3";
  std::string lambda = "0.0001,0.001,0.01,0.1,1,10,100";
  std::string penalty = "l1,l2";
};

int cmd_sweep(const std::string& data_path, const SweepFlags& flags,
              std::uint64_t seed, const std::string& out_prefix) {
  const ClassifierKind kind = require_classifier(flags.classifier);
  if (kind == ClassifierKind::Trivial || kind == ClassifierKind::RandomNull) {
    throw UsageError("sweep requires forest, samme, or logreg");
  }

  std::vector<SweepPoint> grid;
  std::string primary_name;
  std::string secondary_name;
  bool log_x = false;
  std::vector<std::pair<double, std::string>> series_values;  // secondary

  auto base_flags = CommonClassifierFlags{};
  base_flags.classifier = flags.classifier;

  if (kind == ClassifierKind::Forest) {
    primary_name = "m_try";
    secondary_name = "n_trees";
    const auto trees = parse_value_list(flags.trees, "--trees");
    const auto mtry = parse_value_list(flags.mtry, "--mtry");
    if (trees.empty() || mtry.empty()) throw UsageError("empty sweep grid");
    for (double t : trees) {
      series_values.emplace_back(t, std::to_string(static_cast<int>(t)) +
                                        " trees");
      for (double m : mtry) {
        auto f = base_flags;
        f.trees = static_cast<int>(t);
        f.mtry = static_cast<int>(m);
        grid.push_back({m, t, build_spec(f, seed)});
      }
    }
  } else if (kind == ClassifierKind::Samme) {
    primary_name = "rounds";
    secondary_name = "weak_depth";
    const auto rounds = parse_value_list(flags.rounds, "--rounds");
    const auto depths = parse_value_list(flags.weak_depth, "--weak-depth");
    if (rounds.empty() || depths.empty()) throw UsageError("empty sweep grid");
    for (double d : depths) {
      series_values.emplace_back(d, "depth " +
                                        std::to_string(static_cast<int>(d)));
      for (double r : rounds) {
        auto f = base_flags;
        f.rounds = static_cast<int>(r);
        f.weak_depth = static_cast<int>(d);
        grid.push_back({r, d, build_spec(f, seed)});
      }
    }
  } else {
    primary_name = "lambda";
    secondary_name = "penalty";
    log_x = true;
    const auto lambdas = parse_value_list(flags.lambda, "--lambda");
    if (lambdas.empty()) throw UsageError("empty sweep grid");
    std::vector<std::string> penalties;
    std::size_t pos = 0;
    const std::string& ptext = flags.penalty;
    while (pos <= ptext.size()) {
      auto comma = ptext.find(',', pos);
      if (comma == std::string::npos) comma = ptext.size();
      const std::string item = ptext.substr(pos, comma - pos);
      if (!item.empty()) penalties.push_back(item);
      pos = comma + 1;
    }
    if (penalties.empty()) throw UsageError("empty sweep grid");
    for (const auto& p : penalties) {
      const Penalty pen = require_penalty(p);
      const double code = pen == Penalty::L1 ? 1.0 : 2.0;
      series_values.emplace_back(code, pen == Penalty::L1 ? "L1" : "L2");
      for (double l : lambdas) {
        auto f = base_flags;
        f.penalty = p;
        f.lambda = l;
        grid.push_back({l, code, build_spec(f, seed)});
      }
    }
  }

  const Dataset ds = load_dataset(data_path);
  const FoldPlan plan = folds_for(ds, seed);
  const SweepTable table =
      sweep(ds, grid, plan, EvalMode::ThreeClass, primary_name, secondary_name);

  const std::string csv_path = out_prefix + ".csv";
  write_text_file(csv_path, sweep_to_csv(table));

  auto make_chart = [&](bool experiment_level) {
    LineChart chart;
    chart.title = std::string(flags.classifier) + " cross-validation error (" +
                  (experiment_level ? "experiments" : "observations") + ")";
    chart.x_label = primary_name;
    chart.y_label = "mean misclassification error";
    chart.log_x = log_x;
    for (const auto& [value, name] : series_values) {
      Series s;
      s.name = name;
      for (const auto& row : table.rows) {
        if (row.secondary == value) {
          s.points.emplace_back(row.primary, experiment_level
                                                 ? row.exp_error.mean
                                                 : row.obs_error.mean);
        }
      }
      chart.series.push_back(std::move(s));
    }
    return chart.render();
  };
  const std::string obs_svg = out_prefix + "_obs.svg";
  const std::string exp_svg = out_prefix + "_exp.svg";
  write_text_file(obs_svg, make_chart(false));
  write_text_file(exp_svg, make_chart(true));

  RunManifest manifest;
  manifest.command = "sweep";
  manifest.seed = seed;
  manifest.config_digest = ds.config_digest;
  manifest.inputs.push_back(data_path);
  manifest.timestamp_utc = utc_timestamp_now();
  add_output_checksum(manifest, csv_path);
  add_output_checksum(manifest, obs_svg);
  add_output_checksum(manifest, exp_svg);
  write_manifest(manifest, out_prefix + ".manifest.json");

  std::printf("sweep %s: %zu grid points -> %s\n", flags.classifier.c_str(),
              table.rows.size(), csv_path.c_str());
  return 0;
}

// --------------------------------------------------------------------------
// importance
// --------------------------------------------------------------------------

int cmd_importance(const std::string& data_path,
                   const CommonClassifierFlags& flags, std::uint64_t seed,
                   const std::string& out_prefix) {
  const ClassifierKind kind = require_classifier(flags.classifier);
  if (kind == ClassifierKind::Trivial || kind == ClassifierKind::RandomNull) {
    throw UsageError("null models have no variable importances; use forest, "
                     "samme, or logreg");
  }
  const ClassifierSpec spec = build_spec(flags, seed);

  const Dataset ds = load_dataset(data_path);
  const FoldPlan plan = folds_for(ds, seed);
  const auto cv = cross_validate(ds, spec, plan, EvalMode::ThreeClass);

  const std::string csv_path = out_prefix + ".csv";
  const std::string svg_path = out_prefix + ".svg";

  if (kind == ClassifierKind::LogReg) {
    write_text_file(csv_path, coefficients_to_csv(cv.report.mean_coefficients,
                                                  EvalMode::ThreeClass));
    BarChart chart;
    chart.title = "logreg mean coefficient magnitude by scenario";
    chart.y_label = "|coefficient|";
    chart.series_names = {"scenario 0", "scenario 1", "scenario 2"};
    const auto& table = sensor_table();
    for (int f = 0; f < kSensorCount; ++f) {
      BarGroup group;
      group.label = std::string(table[static_cast<std::size_t>(f)].name);
      for (const auto& row : cv.report.mean_coefficients) {
        group.values.push_back(std::fabs(row[static_cast<std::size_t>(f)]));
      }
      chart.groups.push_back(std::move(group));
    }
    write_text_file(svg_path, chart.render());
  } else {
    write_text_file(csv_path, importance_to_csv(cv.report.mean_importance));
    BarChart chart;
    chart.title = std::string(flags.classifier) + " variable importance";
    chart.y_label = "importance";
    chart.series_names = {std::string(flags.classifier)};
    const auto& table = sensor_table();
    for (int f = 0; f < kSensorCount; ++f) {
      BarGroup group;
      group.label = std::string(table[static_cast<std::size_t>(f)].name);
      group.values.push_back(
          cv.report.mean_importance[static_cast<std::size_t>(f)]);
      chart.groups.push_back(std::move(group));
    }
    write_text_file(svg_path, chart.render());
  }

  RunManifest manifest;
  manifest.command = "importance";
  manifest.seed = seed;
  manifest.config_digest = ds.config_digest;
  manifest.inputs.push_back(data_path);
  manifest.timestamp_utc = utc_timestamp_now();
  add_output_checksum(manifest, csv_path);
  add_output_checksum(manifest, svg_path);
  write_manifest(manifest, out_prefix + ".manifest.json");

  std::printf("importance %s -> %s\n", flags.classifier.c_str(),
              csv_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sensor-scenario simulation and classification bench"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string config_path;
  std::string data_path;
  std::string out_path;
  std::string mode = "3class";
  CommonClassifierFlags cls;
  SweepFlags sweep_flags;

  auto* simulate = app.add_subcommand("simulate", "generate a 150-experiment campaign");
  simulate->add_option("--seed", seed, "campaign seed")->required();
  simulate->add_option("--config", config_path, "simulator config file");
  simulate->add_option("--out", out_path, "output dataset CSV")->required();

  auto* crossval = app.add_subcommand("crossval", "10-fold cross-validation report");
  crossval->add_option("--data", data_path, "dataset CSV")->required();
  crossval->add_option("--classifier", cls.classifier,
                       "forest|samme|logreg|trivial|random");
  crossval->add_option("--mode", mode, "3class|2class");
  crossval->add_option("--seed", seed, "fold/classifier seed")->required();
  crossval->add_option("--out", out_path, "report CSV path")->required();
  crossval->add_option("--trees", cls.trees, "forest size");
  crossval->add_option("--mtry", cls.mtry, "variables tried per split");
  crossval->add_option("--rounds", cls.rounds, "boosting rounds");
  crossval->add_option("--weak-depth", cls.weak_depth, "boosting tree depth");
  crossval->add_option("--penalty", cls.penalty, "l1|l2");
  crossval->add_option("--lambda", cls.lambda, "penalty strength");

  auto* sweep_cmd = app.add_subcommand("sweep", "hyperparameter sweep with plots");
  sweep_cmd->add_option("--data", data_path, "dataset CSV")->required();
  sweep_cmd->add_option("--classifier", sweep_flags.classifier,
                        "forest|samme|logreg");
  sweep_cmd->add_option("--seed", seed, "fold/classifier seed")->required();
  sweep_cmd->add_option("--out", out_path, "output path prefix")->required();
  sweep_cmd->add_option("--trees", sweep_flags.trees, "comma list");
  sweep_cmd->add_option("--mtry", sweep_flags.mtry, "comma list");
  sweep_cmd->add_option("--rounds", sweep_flags.rounds, "comma list");
  sweep_cmd->add_option("--weak-depth", sweep_flags.weak_depth, "comma list");
  sweep_cmd->add_option("--lambda", sweep_flags.lambda, "comma list");
  sweep_cmd->add_option("--penalty", sweep_flags.penalty, "comma list of l1,l2");

  auto* importance =
      app.add_subcommand("importance", "aggregated variable importance");
  importance->add_option("--data", data_path, "dataset CSV")->required();
  importance->add_option("--classifier", cls.classifier,
                         "forest|samme|logreg");
  importance->add_option("--seed", seed, "fold/classifier seed")->required();
  importance->add_option("--out", out_path, "output path prefix")->required();
  importance->add_option("--trees", cls.trees, "forest size");
  importance->add_option("--mtry", cls.mtry, "variables tried per split");
  importance->add_option("--rounds", cls.rounds, "boosting rounds");
  importance->add_option("--weak-depth", cls.weak_depth, "boosting tree depth");
  importance->add_option("--penalty", cls.penalty, "l1|l2");
  importance->add_option("--lambda", cls.lambda, "penalty strength");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(seed, config_path, out_path);
    if (crossval->parsed()) {
      return cmd_crossval(data_path, cls, mode, seed, out_path);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(data_path, sweep_flags, seed, out_path);
    }
    if (importance->parsed()) {
      return cmd_importance(data_path, cls, seed, out_path);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
