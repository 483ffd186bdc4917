#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "senselab/dataset.hpp"
#include "senselab/logreg.hpp"
#include "senselab/rng.hpp"
#include "senselab/sensors.hpp"
#include "senselab/stats.hpp"
#include "senselab/trees.hpp"

namespace senselab {

// ---------------------------------------------------------------------------
// Classifier specifications
// ---------------------------------------------------------------------------

enum class ClassifierKind { Forest, Samme, LogReg, Trivial, RandomNull };

inline const char* classifier_kind_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Forest: return "forest";
    case ClassifierKind::Samme: return "samme";
    case ClassifierKind::LogReg: return "logreg";
    case ClassifierKind::Trivial: return "trivial";
    case ClassifierKind::RandomNull: return "random";
  }
  return "?";
}

inline std::optional<ClassifierKind> parse_classifier_kind(
    std::string_view name) {
  if (name == "forest") return ClassifierKind::Forest;
  if (name == "samme") return ClassifierKind::Samme;
  if (name == "logreg") return ClassifierKind::LogReg;
  if (name == "trivial") return ClassifierKind::Trivial;
  if (name == "random") return ClassifierKind::RandomNull;
  return std::nullopt;
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Forest;
  ForestParams forest;
  SammeParams samme;
  LogRegParams logreg;
  std::uint64_t seed = 0;  // per-fold streams are derived from this
};

enum class EvalMode { ThreeClass, TwoClass };

inline const char* eval_mode_name(EvalMode m) {
  return m == EvalMode::ThreeClass ? "3class" : "2class";
}

// ---------------------------------------------------------------------------
// Null models
// ---------------------------------------------------------------------------

// Modal label, ties to the lowest label.
inline int modal_label(std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("modal_label: empty");
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  int best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

// Constant prediction of the training modal label.
inline std::vector<int> null_trivial(std::span<const int> train_labels,
                                     std::size_t n_validation) {
  const int label = modal_label(train_labels);
  return std::vector<int>(n_validation, label);
}

// I.i.d. draws from the training label frequencies.
inline std::vector<int> null_random(std::span<const int> train_labels,
                                    std::size_t n_validation, Rng& rng) {
  if (train_labels.empty()) throw std::invalid_argument("null_random: empty");
  std::map<int, double> freq;
  for (int l : train_labels) freq[l] += 1.0;
  std::vector<int> labels;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& [label, count] : freq) {
    acc += count / static_cast<double>(train_labels.size());
    labels.push_back(label);
    cumulative.push_back(acc);
  }
  cumulative.back() = 1.0;
  std::vector<int> out;
  out.reserve(n_validation);
  for (std::size_t i = 0; i < n_validation; ++i) {
    const double u = rng.uniform();
    std::size_t k = 0;
    while (u >= cumulative[k]) ++k;
    out.push_back(labels[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// A trained model with the uniform predict contract
// ---------------------------------------------------------------------------

struct TrainedClassifier {
  ClassifierKind kind = ClassifierKind::Trivial;
  int n_classes = 0;
  std::optional<Forest> forest;
  std::optional<BoostEnsemble> boost;
  std::optional<LogRegModel> logreg;
  int trivial_class = 0;
  std::vector<double> class_frequencies;  // for the random null

  // rng feeds only the random null's draws; other kinds ignore it.
  int predict(std::span<const double> row, Rng& rng) const {
    switch (kind) {
      case ClassifierKind::Forest: return forest->predict(row);
      case ClassifierKind::Samme: return boost->predict(row);
      case ClassifierKind::LogReg: return logreg->predict(row);
      case ClassifierKind::Trivial: return trivial_class;
      case ClassifierKind::RandomNull: {
        const double u = rng.uniform();
        double acc = 0.0;
        for (int c = 0; c < n_classes; ++c) {
          acc += class_frequencies[static_cast<std::size_t>(c)];
          if (u < acc) return c;
        }
        return n_classes - 1;
      }
    }
    return 0;
  }

  bool importance_capable() const {
    return kind == ClassifierKind::Forest || kind == ClassifierKind::Samme;
  }
};

inline TrainedClassifier train_classifier(const ClassifierSpec& spec,
                                          const DataTable& x,
                                          std::span<const int> y,
                                          int n_classes,
                                          std::uint64_t fold_seed) {
  TrainedClassifier out;
  out.kind = spec.kind;
  out.n_classes = n_classes;
  switch (spec.kind) {
    case ClassifierKind::Forest:
      out.forest = fit_forest(x, y, n_classes, spec.forest, fold_seed);
      break;
    case ClassifierKind::Samme:
      out.boost = fit_samme(x, y, n_classes, spec.samme, fold_seed);
      break;
    case ClassifierKind::LogReg:
      out.logreg = fit_logreg(x, y, n_classes, spec.logreg);
      break;
    case ClassifierKind::Trivial:
      out.trivial_class = modal_label(y);
      break;
    case ClassifierKind::RandomNull: {
      out.class_frequencies.assign(static_cast<std::size_t>(n_classes), 0.0);
      for (int label : y) {
        out.class_frequencies[static_cast<std::size_t>(label)] += 1.0;
      }
      for (auto& f : out.class_frequencies) {
        f /= static_cast<double>(y.size());
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct FoldResult {
  int fold_index = 0;
  std::vector<int> obs_predictions;  // scenario labels
  std::vector<int> obs_labels;
  std::vector<int> exp_predictions;  // voted per experiment
  std::vector<int> exp_labels;
  double obs_error = 0.0;
  double exp_error = 0.0;
  std::optional<BinaryMetrics> obs_binary;  // 2-class mode only
  std::optional<BinaryMetrics> exp_binary;
  std::vector<double> importance;                  // trees only
  std::vector<std::vector<double>> coefficients;   // logreg only
};

struct MetricValue {
  double mean = 0.0;
  double half_width = 0.0;
};

struct BinaryAggregate {
  MetricValue accuracy;
  MetricValue f1;
  std::optional<MetricValue> mcc;  // undefined when any fold's MCC is
};

struct MetricReport {
  EvalMode mode = EvalMode::ThreeClass;
  int n_folds = 0;
  MetricValue obs_error;
  MetricValue exp_error;
  std::optional<BinaryAggregate> obs_binary;
  std::optional<BinaryAggregate> exp_binary;
  std::vector<double> mean_importance;                // trees only
  std::vector<std::vector<double>> mean_coefficients; // logreg only
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  MetricReport report;
};

namespace eval_detail {

inline int label_to_class(int scenario, EvalMode mode) {
  return mode == EvalMode::ThreeClass ? scenario : scenario - 1;
}

inline int class_to_label(int cls, EvalMode mode) {
  return mode == EvalMode::ThreeClass ? cls : cls + 1;
}

inline bool mode_keeps(int scenario, EvalMode mode) {
  return mode == EvalMode::ThreeClass ||
         (scenario == kScenarioWalkAcross || scenario == kScenarioWalkAround);
}

inline MetricValue aggregate(std::span<const double> per_fold) {
  const auto ci = t_confidence_interval(per_fold);
  return {ci.mean, ci.half_width};
}

// Element-wise mean of per-fold vectors.
inline std::vector<double> mean_vectors(
    const std::vector<std::vector<double>>& vs) {
  std::vector<double> out(vs.front().size(), 0.0);
  for (const auto& v : vs) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  for (auto& o : out) o /= static_cast<double>(vs.size());
  return out;
}

}  // namespace eval_detail

// Arithmetic mean of per-fold importance vectors (or coefficient matrices
// flattened per class).
inline std::vector<double> aggregate_importance(
    const std::vector<FoldResult>& folds) {
  std::vector<std::vector<double>> vs;
  for (const auto& f : folds) {
    if (!f.importance.empty()) vs.push_back(f.importance);
  }
  if (vs.empty()) {
    throw std::invalid_argument(
        "aggregate_importance: no importance-capable folds");
  }
  return eval_detail::mean_vectors(vs);
}

// The full per-fold protocol: normalization stats from the fold's training
// observations only, fit, per-observation predictions, majority vote per
// experiment, both error levels, binary metrics in 2-class mode.
inline CrossValidationResult cross_validate(const Dataset& dataset,
                                            const ClassifierSpec& spec,
                                            const FoldPlan& plan,
                                            EvalMode mode) {
  std::map<int, const Experiment*> by_id;
  for (const auto& exp : dataset.experiments) by_id[exp.id] = &exp;

  const int n_classes = mode == EvalMode::ThreeClass ? 3 : 2;
  CrossValidationResult result;

  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    try {
      const auto& fold = plan.folds[f];

      std::vector<FeatureRow> train_rows;
      std::vector<int> train_classes;
      for (int id : fold.training_ids) {
        const Experiment* exp = by_id.at(id);
        if (!eval_detail::mode_keeps(exp->scenario, mode)) continue;
        for (const auto& obs : exp->observations) {
          train_rows.push_back(obs.features());
          train_classes.push_back(
              eval_detail::label_to_class(exp->scenario, mode));
        }
      }

      const NormalizationStats stats =
          compute_stats(std::span<const FeatureRow>(train_rows));
      DataTable x(kSensorCount);
      for (const auto& row : train_rows) x.push_row(normalize(row, stats));

      const std::uint64_t fold_seed =
          derive_seed(spec.seed, 1000 + static_cast<std::uint64_t>(f));
      const TrainedClassifier model =
          train_classifier(spec, x, train_classes, n_classes, fold_seed);
      Rng predict_rng(derive_seed(spec.seed, 2000 + static_cast<std::uint64_t>(f)));

      FoldResult fr;
      fr.fold_index = static_cast<int>(f);
      for (int id : fold.validation_ids) {
        const Experiment* exp = by_id.at(id);
        if (!eval_detail::mode_keeps(exp->scenario, mode)) continue;
        std::vector<int> exp_preds;
        exp_preds.reserve(exp->observations.size());
        for (const auto& obs : exp->observations) {
          const FeatureRow row = normalize(obs, stats);
          const int cls = model.predict(row, predict_rng);
          const int label = eval_detail::class_to_label(cls, mode);
          exp_preds.push_back(label);
          fr.obs_predictions.push_back(label);
          fr.obs_labels.push_back(exp->scenario);
        }
        fr.exp_predictions.push_back(experiment_vote(exp_preds));
        fr.exp_labels.push_back(exp->scenario);
      }

      fr.obs_error = misclassification_error(fr.obs_predictions, fr.obs_labels);
      fr.exp_error = misclassification_error(fr.exp_predictions, fr.exp_labels);
      if (mode == EvalMode::TwoClass) {
        fr.obs_binary =
            binary_metrics(fr.obs_predictions, fr.obs_labels, kScenarioWalkAround);
        fr.exp_binary =
            binary_metrics(fr.exp_predictions, fr.exp_labels, kScenarioWalkAround);
      }
      if (model.importance_capable()) {
        fr.importance = model.kind == ClassifierKind::Forest
                            ? variable_importance(*model.forest)
                            : variable_importance(*model.boost);
      }
      if (model.kind == ClassifierKind::LogReg) {
        fr.coefficients = coefficient_report(*model.logreg).rows;
      }
      result.folds.push_back(std::move(fr));
    } catch (const std::exception& e) {
      throw std::runtime_error("cross_validate: fold " + std::to_string(f) +
                               " failed: " + e.what());
    }
  }

  // aggregate
  MetricReport& rep = result.report;
  rep.mode = mode;
  rep.n_folds = static_cast<int>(result.folds.size());
  std::vector<double> obs_errs;
  std::vector<double> exp_errs;
  for (const auto& fr : result.folds) {
    obs_errs.push_back(fr.obs_error);
    exp_errs.push_back(fr.exp_error);
  }
  rep.obs_error = eval_detail::aggregate(obs_errs);
  rep.exp_error = eval_detail::aggregate(exp_errs);

  if (mode == EvalMode::TwoClass) {
    auto aggregate_binary = [&](auto getter) {
      BinaryAggregate agg;
      std::vector<double> acc;
      std::vector<double> f1;
      std::vector<double> mcc;
      bool mcc_defined = true;
      for (const auto& fr : result.folds) {
        const BinaryMetrics& m = *getter(fr);
        acc.push_back(m.accuracy);
        f1.push_back(m.f1);
        if (m.mcc) {
          mcc.push_back(*m.mcc);
        } else {
          mcc_defined = false;
        }
      }
      agg.accuracy = eval_detail::aggregate(acc);
      agg.f1 = eval_detail::aggregate(f1);
      if (mcc_defined) agg.mcc = eval_detail::aggregate(mcc);
      return agg;
    };
    rep.obs_binary =
        aggregate_binary([](const FoldResult& fr) { return &*fr.obs_binary; });
    rep.exp_binary =
        aggregate_binary([](const FoldResult& fr) { return &*fr.exp_binary; });
  }

  if (!result.folds.empty() && !result.folds.front().importance.empty()) {
    rep.mean_importance = aggregate_importance(result.folds);
  }
  if (!result.folds.empty() && !result.folds.front().coefficients.empty()) {
    const auto n_rows = result.folds.front().coefficients.size();
    for (std::size_t c = 0; c < n_rows; ++c) {
      std::vector<std::vector<double>> per_fold;
      for (const auto& fr : result.folds) per_fold.push_back(fr.coefficients[c]);
      rep.mean_coefficients.push_back(eval_detail::mean_vectors(per_fold));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Hyperparameter sweeps
// ---------------------------------------------------------------------------

struct SweepPoint {
  double primary = 0.0;    // x-axis value
  double secondary = 0.0;  // one curve per distinct value
  ClassifierSpec spec;
};

struct SweepRow {
  double primary = 0.0;
  double secondary = 0.0;
  MetricValue obs_error;
  MetricValue exp_error;
};

struct SweepTable {
  std::string primary_name;
  std::string secondary_name;
  std::vector<SweepRow> rows;
};

// Full cross-validation at every grid point.
inline SweepTable sweep(const Dataset& dataset,
                        std::span<const SweepPoint> grid, const FoldPlan& plan,
                        EvalMode mode, std::string primary_name,
                        std::string secondary_name) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  SweepTable table;
  table.primary_name = std::move(primary_name);
  table.secondary_name = std::move(secondary_name);
  for (const auto& point : grid) {
    try {
      const auto cv = cross_validate(dataset, point.spec, plan, mode);
      table.rows.push_back({point.primary, point.secondary,
                            cv.report.obs_error, cv.report.exp_error});
    } catch (const std::exception& e) {
      char ctx[128];
      std::snprintf(ctx, sizeof(ctx), "sweep point (%s=%g, %s=%g): ",
                    table.primary_name.c_str(), point.primary,
                    table.secondary_name.c_str(), point.secondary);
      throw std::runtime_error(ctx + std::string(e.what()));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// CSV report emission (mirrors the result tables' column layout)
// ---------------------------------------------------------------------------

namespace eval_detail {

inline std::string pm(const MetricValue& v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f ± %.3f", v.mean, v.half_width);
  return buf;
}

inline std::string pm_or_undefined(const std::optional<MetricValue>& v) {
  return v ? pm(*v) : "undefined";
}

}  // namespace eval_detail

inline std::string report_to_csv(const MetricReport& rep,
                                 std::string_view classifier_name) {
  std::ostringstream out;
  if (rep.mode == EvalMode::ThreeClass) {
    out << "classifier,obs_error,exp_error\n";
    out << classifier_name << ',' << eval_detail::pm(rep.obs_error) << ','
        << eval_detail::pm(rep.exp_error) << "\n";
  } else {
    out << "classifier,obs_accuracy,obs_f1,obs_mcc,exp_accuracy,exp_f1,"
           "exp_mcc\n";
    out << classifier_name << ',' << eval_detail::pm(rep.obs_binary->accuracy)
        << ',' << eval_detail::pm(rep.obs_binary->f1) << ','
        << eval_detail::pm_or_undefined(rep.obs_binary->mcc) << ','
        << eval_detail::pm(rep.exp_binary->accuracy) << ','
        << eval_detail::pm(rep.exp_binary->f1) << ','
        << eval_detail::pm_or_undefined(rep.exp_binary->mcc) << "\n";
  }
  return out.str();
}

inline std::string sweep_to_csv(const SweepTable& table) {
  std::ostringstream out;
  out << table.secondary_name << ',' << table.primary_name
      << ",obs_error,exp_error\n";
  char buf[40];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%g", row.secondary);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%g", row.primary);
    out << buf << ',' << eval_detail::pm(row.obs_error) << ','
        << eval_detail::pm(row.exp_error) << "\n";
  }
  return out.str();
}

inline std::string importance_to_csv(std::span<const double> importance) {
  std::ostringstream out;
  out << "variable,importance\n";
  char buf[40];
  const auto& table = sensor_table();
  for (std::size_t i = 0; i < importance.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", importance[i]);
    out << table[i].name << ',' << buf << "\n";
  }
  return out.str();
}

// Mean per-class logreg coefficients; one column per scenario class.
inline std::string coefficients_to_csv(
    const std::vector<std::vector<double>>& mean_coefficients, EvalMode mode) {
  std::ostringstream out;
  out << "variable";
  for (std::size_t c = 0; c < mean_coefficients.size(); ++c) {
    out << ",coef_scenario"
        << eval_detail::class_to_label(static_cast<int>(c), mode);
  }
  out << "\n";
  char buf[40];
  const auto& table = sensor_table();
  const auto n_features = mean_coefficients.front().size() - 1;
  for (std::size_t f = 0; f <= n_features; ++f) {
    out << (f < n_features
                ? std::string(table[f].name)
                : std::string("(intercept)"));
    for (const auto& row : mean_coefficients) {
      std::snprintf(buf, sizeof(buf), "%.6f", row[f]);
      out << ',' << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace senselab
