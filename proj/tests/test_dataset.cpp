#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>

#include "senselab/dataset.hpp"
#include "senselab/sim.hpp"

using namespace senselab;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Dataset small_campaign() {
  SimConfig cfg;
  return simulate_campaign(cfg, 11);
}

}  // namespace

TEST_CASE("dataset CSV round-trips losslessly") {
  const auto ds = small_campaign();
  const auto path = temp_path("senselab_roundtrip.csv");
  save_dataset(ds, path);
  const auto loaded = load_dataset(path);
  REQUIRE(loaded == ds);
  std::filesystem::remove(path);
}

TEST_CASE("dataset CSV parse errors carry line numbers") {
  const auto ds = small_campaign();
  auto csv = dataset_to_csv(ds);

  SECTION("header mismatch (missing sensor column)") {
    auto broken = csv;
    const auto at = broken.find(",wheel_caster");
    broken.erase(at, std::string(",wheel_caster").size());
    REQUIRE_THROWS_WITH(parse_dataset_csv(broken),
                        Catch::Matchers::ContainsSubstring("header mismatch"));
  }
  SECTION("non-numeric photo value names the line") {
    // header is line 2, first data row is line 3
    auto lines_start = csv.find('\n', csv.find('\n') + 1) + 1;
    auto row_end = csv.find('\n', lines_start);
    std::string row = csv.substr(lines_start, row_end - lines_start);
    // photo is the 9th field
    std::size_t pos = 0;
    for (int i = 0; i < 8; ++i) pos = row.find(',', pos) + 1;
    auto next = row.find(',', pos);
    row.replace(pos, next - pos, "abc");
    auto broken = csv.substr(0, lines_start) + row +
                  csv.substr(row_end);
    REQUIRE_THROWS_WITH(parse_dataset_csv(broken),
                        Catch::Matchers::ContainsSubstring("line 3"));
  }
  SECTION("wrong field count is rejected") {
    auto lines_start = csv.find('\n', csv.find('\n') + 1) + 1;
    auto broken = csv.substr(0, lines_start) + "1,2,3\n";
    REQUIRE_THROWS_WITH(parse_dataset_csv(broken),
                        Catch::Matchers::ContainsSubstring("21 fields"));
  }
  SECTION("empty input is rejected") {
    REQUIRE_THROWS_AS(parse_dataset_csv(""), DatasetError);
  }
}

TEST_CASE("provenance survives the round trip") {
  auto ds = small_campaign();
  const auto csv = dataset_to_csv(ds);
  const auto loaded = parse_dataset_csv(csv);
  REQUIRE(loaded.seed == ds.seed);
  REQUIRE(loaded.config_digest == ds.config_digest);
}

TEST_CASE("compute_stats on the two-point example") {
  std::vector<FeatureRow> rows(2);
  rows[0].fill(0.0);
  rows[1].fill(0.0);
  rows[0][kPhoto] = 1.0;
  rows[1][kPhoto] = 3.0;
  const auto st = compute_stats(std::span<const FeatureRow>(rows));
  REQUIRE(st.mean[kPhoto] == Catch::Approx(2.0));
  REQUIRE(st.stddev[kPhoto] == Catch::Approx(std::sqrt(2.0)));
  // untouched numeric columns are constant and flagged
  REQUIRE(st.constant[kIrRearMedium]);
  REQUIRE_FALSE(st.constant[kPhoto]);
  REQUIRE(st.any_constant());
  REQUIRE_THROWS_AS(
      compute_stats(std::span<const FeatureRow>(rows.data(), 1)),
      std::invalid_argument);
}

TEST_CASE("stats order invariance") {
  Rng rng(3);
  std::vector<FeatureRow> rows(101);
  for (auto& r : rows) {
    for (auto& v : r) v = rng.normal(10.0, 4.0);
  }
  auto shuffled = rows;
  rng.shuffle(shuffled);
  const auto a = compute_stats(std::span<const FeatureRow>(rows));
  const auto b = compute_stats(std::span<const FeatureRow>(shuffled));
  for (int f = 0; f < kNumericSensorCount; ++f) {
    REQUIRE(a.mean[f] == Catch::Approx(b.mean[f]).epsilon(1e-9));
    REQUIRE(a.stddev[f] == Catch::Approx(b.stddev[f]).epsilon(1e-9));
  }
}

TEST_CASE("normalize applies z-scores and passes booleans through") {
  NormalizationStats st;
  st.mean.fill(10.0);
  st.stddev.fill(2.0);
  st.constant.fill(false);
  st.constant[kWall] = true;
  st.stddev[kWall] = 0.0;

  FeatureRow row;
  row.fill(10.0);
  row[kPhoto] = 14.0;
  row[kWall] = 123.0;   // constant column maps to 0
  row[kBumpLeft] = 1.0; // boolean untouched
  const auto z = normalize(row, st);
  REQUIRE(z[kIrRearMedium] == Catch::Approx(0.0));  // x == mean
  REQUIRE(z[kPhoto] == Catch::Approx(2.0));
  REQUIRE(z[kWall] == 0.0);
  REQUIRE(z[kBumpLeft] == 1.0);
}

TEST_CASE("normalization inverts on non-constant variables") {
  Rng rng(9);
  std::vector<FeatureRow> rows(64);
  for (auto& r : rows) {
    for (auto& v : r) v = rng.uniform(-50.0, 900.0);
  }
  const auto st = compute_stats(std::span<const FeatureRow>(rows));
  for (const auto& r : rows) {
    const auto back = denormalize(normalize(r, st), st);
    for (int f = 0; f < kNumericSensorCount; ++f) {
      REQUIRE(back[f] == Catch::Approx(r[f]).epsilon(1e-9));
    }
  }
}

TEST_CASE("stats depend on training data only") {
  const auto ds = small_campaign();
  std::vector<FeatureRow> train;
  for (int i = 0; i < 50; ++i) {
    for (const auto& o : ds.experiments[i].observations) {
      train.push_back(o.features());
    }
  }
  const auto st1 = compute_stats(std::span<const FeatureRow>(train));
  // "changing validation data" happens entirely outside this call
  const auto st2 = compute_stats(std::span<const FeatureRow>(train));
  REQUIRE(st1.mean == st2.mean);
  REQUIRE(st1.stddev == st2.stddev);
}

TEST_CASE("make_folds deals one experiment per condition per fold") {
  const auto ds = small_campaign();
  Rng rng(5);
  const auto plan = make_folds(ds, 10, rng);
  REQUIRE(plan.k == 10);
  REQUIRE(plan.folds.size() == 10);

  std::map<int, const Experiment*> by_id;
  for (const auto& exp : ds.experiments) by_id[exp.id] = &exp;

  std::set<int> seen;
  for (const auto& fold : plan.folds) {
    REQUIRE(fold.validation_ids.size() == 15);
    REQUIRE(fold.training_ids.size() == 135);
    std::set<int> conditions;
    for (int id : fold.validation_ids) {
      REQUIRE(seen.insert(id).second);  // disjoint across folds
      conditions.insert(by_id.at(id)->condition());
    }
    REQUIRE(conditions.size() == 15);  // one per condition
    // training is the complement
    std::set<int> all(fold.validation_ids.begin(), fold.validation_ids.end());
    all.insert(fold.training_ids.begin(), fold.training_ids.end());
    REQUIRE(all.size() == 150);
  }
  REQUIRE(seen.size() == 150);  // union covers the campaign
}

TEST_CASE("make_folds rejects uneven condition counts") {
  auto ds = small_campaign();
  ds.experiments.pop_back();
  Rng rng(5);
  REQUIRE_THROWS_AS(make_folds(ds, 10, rng), std::invalid_argument);
}

TEST_CASE("foldplan audit text lists every fold") {
  const auto ds = small_campaign();
  Rng rng(5);
  const auto plan = make_folds(ds, 10, rng);
  const auto text = foldplan_to_text(plan);
  REQUIRE(text.find("k = 10") != std::string::npos);
  REQUIRE(text.find("fold 0 validation:") != std::string::npos);
  REQUIRE(text.find("fold 9 validation:") != std::string::npos);
}
