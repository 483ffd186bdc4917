#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "senselab/eval.hpp"
#include "senselab/sim.hpp"

using namespace senselab;

namespace {

// Hand-built miniature campaign: the condition grid and label structure of
// the real one, but only a handful of observations per experiment, with
// class signal planted in the photo and thermometer channels. Fast enough
// for harness-level tests.
Dataset tiny_campaign(std::uint64_t seed, int obs_per_experiment = 6) {
  Dataset ds;
  ds.seed = seed;
  Rng rng(seed);
  int id = 0;
  for (int s = 0; s < 3; ++s) {
    for (int b = 0; b < 5; ++b) {
      for (int rep = 0; rep < 10; ++rep) {
        Experiment exp;
        exp.id = id++;
        exp.scenario = s;
        exp.proximity = b;
        exp.door_start = 0;
        exp.door_end = 1;
        for (int i = 0; i < obs_per_experiment; ++i) {
          Observation o;
          o.t = 0.15 * (i + 1);
          o.photo = static_cast<int>(
              std::lround(600.0 - 45.0 * s + rng.normal(0.0, 6.0)));
          o.therm_a = 21.0 + 1.5 * s + rng.normal(0.0, 0.1);
          o.therm_b = 21.0 + 1.1 * s + rng.normal(0.0, 0.1);
          o.ir_rear_medium = 90;
          o.ir_rear_long = 80;
          o.cliff_left = 1180;
          o.cliff_front_left = 1210;
          o.cliff_front_right = 1190;
          o.cliff_right = 1205;
          o.wall = 30;
          exp.observations.push_back(o);
        }
        ds.experiments.push_back(std::move(exp));
      }
    }
  }
  return ds;
}

FoldPlan plan_for(const Dataset& ds, std::uint64_t seed) {
  Rng rng(seed);
  return make_folds(ds, 10, rng);
}

}  // namespace

TEST_CASE("null_trivial predicts the modal training label everywhere") {
  const std::vector<int> train = {0, 0, 0, 1, 1, 2};
  const auto preds = null_trivial(train, 4);
  REQUIRE(preds == std::vector<int>{0, 0, 0, 0});
  const std::vector<int> single = {2, 2};
  REQUIRE(null_trivial(single, 3) == std::vector<int>{2, 2, 2});
  // tie between labels 1 and 2 goes to the lowest
  const std::vector<int> tied = {1, 2, 2, 1};
  REQUIRE(null_trivial(tied, 1) == std::vector<int>{1});
}

TEST_CASE("null_random matches its analytic error expectation") {
  // training frequencies p = (0.5, 0.3, 0.2); the expected error of
  // frequency-matched random labels against labels with the same
  // distribution is 1 - sum p^2 = 0.62
  std::vector<int> train;
  for (int i = 0; i < 500; ++i) train.push_back(0);
  for (int i = 0; i < 300; ++i) train.push_back(1);
  for (int i = 0; i < 200; ++i) train.push_back(2);
  Rng label_rng(1);
  Rng pred_rng(2);
  const int n = 60000;
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    const double u = label_rng.uniform();
    labels.push_back(u < 0.5 ? 0 : (u < 0.8 ? 1 : 2));
  }
  const auto preds = null_random(train, labels.size(), pred_rng);
  const double err = misclassification_error(preds, labels);
  REQUIRE(err == Catch::Approx(0.62).margin(0.01));

  const std::vector<int> single = {1, 1, 1};
  Rng rng(3);
  REQUIRE(null_random(single, 4, rng) == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("random-label votes collapse toward the modal class") {
  // 90 experiments of 100 observations each, labels balanced over 3
  // classes; training frequencies lean toward class 0 as in the campaign
  std::vector<int> train;
  for (int i = 0; i < 550; ++i) train.push_back(0);
  for (int i = 0; i < 160; ++i) train.push_back(1);
  for (int i = 0; i < 290; ++i) train.push_back(2);
  Rng rng(5);
  std::vector<int> exp_preds;
  std::vector<int> exp_labels;
  for (int e = 0; e < 90; ++e) {
    const auto obs_preds = null_random(train, 100, rng);
    exp_preds.push_back(experiment_vote(obs_preds));
    exp_labels.push_back(e % 3);
  }
  const double err = misclassification_error(exp_preds, exp_labels);
  REQUIRE(err == Catch::Approx(2.0 / 3.0).margin(0.05));
}

TEST_CASE("trivial null on the simulated campaign hits the exact table value") {
  const SimConfig cfg;
  const auto ds = simulate_campaign(cfg, 42);
  const auto plan = plan_for(ds, 42);

  ClassifierSpec spec;
  spec.kind = ClassifierKind::Trivial;
  spec.seed = 42;

  const auto cv = cross_validate(ds, spec, plan, EvalMode::ThreeClass);
  REQUIRE(cv.folds.size() == 10);
  for (const auto& fold : cv.folds) {
    REQUIRE(fold.exp_labels.size() == 15);
    REQUIRE(fold.exp_error == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  REQUIRE(cv.report.exp_error.mean == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(cv.report.exp_error.half_width == 0.0);
  // observation error tracks the empty-room share of observations
  REQUIRE(cv.report.obs_error.mean == Catch::Approx(0.447).margin(0.04));

  const auto two = cross_validate(ds, spec, plan, EvalMode::TwoClass);
  for (const auto& fold : two.folds) {
    REQUIRE(fold.exp_labels.size() == 10);
    for (int l : fold.exp_labels) REQUIRE((l == 1 || l == 2));
    for (int l : fold.obs_labels) REQUIRE((l == 1 || l == 2));
  }
  REQUIRE(two.report.exp_binary->accuracy.mean ==
          Catch::Approx(0.5).epsilon(1e-12));
  REQUIRE(two.report.exp_binary->accuracy.half_width == 0.0);
  // single-class predictions leave the MCC undefined, never zero
  REQUIRE_FALSE(two.report.exp_binary->mcc.has_value());
  REQUIRE_FALSE(two.report.obs_binary->mcc.has_value());
}

TEST_CASE("cross-validation is deterministic for a fixed spec seed") {
  const auto ds = tiny_campaign(3);
  const auto plan = plan_for(ds, 9);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::Forest;
  spec.forest.n_trees = 7;
  spec.forest.m_try = 3;
  spec.seed = 123;
  const auto a = cross_validate(ds, spec, plan, EvalMode::ThreeClass);
  const auto b = cross_validate(ds, spec, plan, EvalMode::ThreeClass);
  REQUIRE(a.report.obs_error.mean == b.report.obs_error.mean);
  REQUIRE(a.report.exp_error.mean == b.report.exp_error.mean);
  REQUIRE(report_to_csv(a.report, "forest") ==
          report_to_csv(b.report, "forest"));
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    REQUIRE(a.folds[f].obs_predictions == b.folds[f].obs_predictions);
  }
}

TEST_CASE("random null MCC centers on zero across seeds") {
  const auto ds = tiny_campaign(17);
  const auto plan = plan_for(ds, 17);
  double mcc_sum = 0.0;
  int mcc_count = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    ClassifierSpec spec;
    spec.kind = ClassifierKind::RandomNull;
    spec.seed = seed;
    const auto cv = cross_validate(ds, spec, plan, EvalMode::TwoClass);
    for (const auto& fold : cv.folds) {
      if (fold.obs_binary->mcc) {
        mcc_sum += *fold.obs_binary->mcc;
        ++mcc_count;
      }
    }
  }
  REQUIRE(mcc_count > 50);
  REQUIRE(std::fabs(mcc_sum / mcc_count) < 0.02);
}

TEST_CASE("voted experiment predictions are a pure function of votes") {
  const auto ds = tiny_campaign(23);
  const auto plan = plan_for(ds, 23);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::Trivial;
  spec.seed = 1;
  const auto cv = cross_validate(ds, spec, plan, EvalMode::ThreeClass);
  for (const auto& fold : cv.folds) {
    // reconstruct votes from the stored observation predictions
    std::size_t cursor = 0;
    for (std::size_t e = 0; e < fold.exp_predictions.size(); ++e) {
      // tiny_campaign has constant-size experiments
      const std::size_t count = 6;
      std::vector<int> obs(fold.obs_predictions.begin() + cursor,
                           fold.obs_predictions.begin() + cursor + count);
      cursor += count;
      REQUIRE(experiment_vote(obs) == fold.exp_predictions[e]);
    }
  }
}

TEST_CASE("forest cross-validation beats the nulls on planted structure") {
  const auto ds = tiny_campaign(29);
  const auto plan = plan_for(ds, 29);

  ClassifierSpec forest;
  forest.kind = ClassifierKind::Forest;
  forest.forest.n_trees = 15;
  forest.forest.m_try = 4;
  forest.seed = 5;
  const auto cv_forest = cross_validate(ds, forest, plan, EvalMode::ThreeClass);

  ClassifierSpec trivial;
  trivial.kind = ClassifierKind::Trivial;
  trivial.seed = 5;
  const auto cv_trivial =
      cross_validate(ds, trivial, plan, EvalMode::ThreeClass);

  REQUIRE(cv_forest.report.obs_error.mean <
          cv_trivial.report.obs_error.mean - 0.2);
  REQUIRE(cv_forest.report.mean_importance.size() == kSensorCount);
  double total = 0.0;
  for (double v : cv_forest.report.mean_importance) total += v;
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-9));
  // wheel switches are constant and can never be chosen by a split
  REQUIRE(cv_forest.report.mean_importance[kWheelLeft] == 0.0);
  REQUIRE(cv_forest.report.mean_importance[kWheelRight] == 0.0);
  REQUIRE(cv_forest.report.mean_importance[kWheelCaster] == 0.0);
}

TEST_CASE("logreg cross-validation fills the coefficient table") {
  const auto ds = tiny_campaign(31);
  const auto plan = plan_for(ds, 31);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::LogReg;
  spec.logreg.lambda = 1e-3;
  spec.seed = 2;
  const auto cv = cross_validate(ds, spec, plan, EvalMode::ThreeClass);
  REQUIRE(cv.report.mean_coefficients.size() == 3);
  for (const auto& row : cv.report.mean_coefficients) {
    REQUIRE(row.size() == kSensorCount + 1);
  }
  REQUIRE(cv.report.obs_error.mean < 0.35);
  const auto csv = coefficients_to_csv(cv.report.mean_coefficients,
                                       EvalMode::ThreeClass);
  REQUIRE(csv.find("variable,coef_scenario0,coef_scenario1,coef_scenario2") ==
          0);
  REQUIRE(csv.find("(intercept)") != std::string::npos);
}

TEST_CASE("aggregate_importance averages per-fold vectors") {
  std::vector<FoldResult> folds(3);
  folds[0].importance = {0.5, 0.5};
  folds[1].importance = {0.5, 0.5};
  folds[2].importance = {0.5, 0.5};
  const auto mean_imp = aggregate_importance(folds);
  REQUIRE(mean_imp == std::vector<double>{0.5, 0.5});
  folds[2].importance = {1.0, 0.0};
  const auto mixed = aggregate_importance(folds);
  REQUIRE(mixed[0] == Catch::Approx(2.0 / 3.0));
  std::vector<FoldResult> empty(2);
  REQUIRE_THROWS_AS(aggregate_importance(empty), std::invalid_argument);
}

TEST_CASE("sweep over a degenerate grid equals a single cross-validation") {
  const auto ds = tiny_campaign(37);
  const auto plan = plan_for(ds, 37);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::Forest;
  spec.forest.n_trees = 3;
  spec.forest.m_try = 15;
  spec.seed = 4;

  const std::vector<SweepPoint> grid = {{15.0, 3.0, spec}};
  const auto table =
      sweep(ds, grid, plan, EvalMode::ThreeClass, "m_try", "n_trees");
  REQUIRE(table.rows.size() == 1);
  const auto cv = cross_validate(ds, spec, plan, EvalMode::ThreeClass);
  REQUIRE(table.rows[0].obs_error.mean == cv.report.obs_error.mean);
  REQUIRE(table.rows[0].exp_error.mean == cv.report.exp_error.mean);

  REQUIRE_THROWS_AS(
      sweep(ds, {}, plan, EvalMode::ThreeClass, "m_try", "n_trees"),
      std::invalid_argument);
}

TEST_CASE("logreg sweep has one row per penalty-lambda pair") {
  const auto ds = tiny_campaign(41, 4);
  const auto plan = plan_for(ds, 41);
  std::vector<SweepPoint> grid;
  for (double code : {1.0, 2.0}) {
    for (double lambda : {1e-3, 1e-1}) {
      ClassifierSpec spec;
      spec.kind = ClassifierKind::LogReg;
      spec.logreg.penalty = code == 1.0 ? Penalty::L1 : Penalty::L2;
      spec.logreg.lambda = lambda;
      spec.logreg.max_iter = 60;
      spec.seed = 6;
      grid.push_back({lambda, code, spec});
    }
  }
  const auto table =
      sweep(ds, grid, plan, EvalMode::ThreeClass, "lambda", "penalty");
  REQUIRE(table.rows.size() == 4);
  const auto csv = sweep_to_csv(table);
  REQUIRE(csv.find("penalty,lambda,obs_error,exp_error") == 0);
}

TEST_CASE("fold confusion cells sum to the validation size") {
  const auto ds = tiny_campaign(43);
  const auto plan = plan_for(ds, 43);
  ClassifierSpec spec;
  spec.kind = ClassifierKind::RandomNull;
  spec.seed = 3;
  const auto cv = cross_validate(ds, spec, plan, EvalMode::TwoClass);
  for (const auto& fold : cv.folds) {
    REQUIRE(fold.obs_binary->confusion.total() ==
            static_cast<std::int64_t>(fold.obs_labels.size()));
    REQUIRE(fold.exp_binary->confusion.total() ==
            static_cast<std::int64_t>(fold.exp_labels.size()));
  }
}

TEST_CASE("bigger forests smooth the error curve across m_try") {
  const auto ds = tiny_campaign(47);
  const auto plan = plan_for(ds, 47);
  auto curve_variance = [&](int n_trees) {
    std::vector<double> errors;
    for (int m_try : {1, 4, 8, 12, 15}) {
      ClassifierSpec spec;
      spec.kind = ClassifierKind::Forest;
      spec.forest.n_trees = n_trees;
      spec.forest.m_try = m_try;
      spec.seed = 11;
      errors.push_back(
          cross_validate(ds, spec, plan, EvalMode::ThreeClass)
              .report.obs_error.mean);
    }
    const double s = sample_std(errors);
    return s * s;
  };
  REQUIRE(curve_variance(25) < curve_variance(1));
}

TEST_CASE("report CSV mirrors the result-table layout") {
  MetricReport rep;
  rep.mode = EvalMode::ThreeClass;
  rep.obs_error = {0.182, 0.041};
  rep.exp_error = {0.273, 0.094};
  const auto csv3 = report_to_csv(rep, "forest");
  REQUIRE(csv3 ==
          "classifier,obs_error,exp_error\nforest,0.182 ± 0.041,0.273 ± "
          "0.094\n");

  MetricReport rep2;
  rep2.mode = EvalMode::TwoClass;
  rep2.obs_binary = BinaryAggregate{{0.874, 0.077}, {0.893, 0.079},
                                    MetricValue{0.765, 0.118}};
  rep2.exp_binary = BinaryAggregate{{0.5, 0.0}, {0.667, 0.0}, std::nullopt};
  const auto csv2 = report_to_csv(rep2, "trivial");
  REQUIRE(csv2.find("classifier,obs_accuracy,obs_f1,obs_mcc,exp_accuracy,"
                    "exp_f1,exp_mcc") == 0);
  REQUIRE(csv2.find("undefined") != std::string::npos);
}
