#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "senselab/rng.hpp"
#include "senselab/trees.hpp"

using namespace senselab;

namespace {

// Independent split oracle: enumerate every (feature, midpoint) pair from
// scratch and keep the first minimum under the (feature, threshold) tie
// rule. Shares nothing with the production sweep except the gini formula.
std::optional<SplitCandidate> brute_force_split(const DataTable& x,
                                                std::span<const int> y,
                                                std::span<const double> w,
                                                int n_classes) {
  const int n = x.rows();
  std::vector<double> parent_counts(static_cast<std::size_t>(n_classes), 0.0);
  double total_weight = 0.0;
  for (int i = 0; i < n; ++i) {
    parent_counts[static_cast<std::size_t>(y[i])] += w[i];
    total_weight += w[i];
  }
  const double parent = gini(parent_counts);
  if (parent <= 0.0) return std::nullopt;

  std::optional<SplitCandidate> best;
  for (int f = 0; f < x.cols(); ++f) {
    std::set<double> distinct;
    for (int i = 0; i < n; ++i) distinct.insert(x.at(i, f));
    std::vector<double> values(distinct.begin(), distinct.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double thr = (values[v] + values[v + 1]) / 2.0;
      if (thr < values[v] || thr >= values[v + 1]) continue;
      std::vector<double> left(static_cast<std::size_t>(n_classes), 0.0);
      std::vector<double> right(static_cast<std::size_t>(n_classes), 0.0);
      double wl = 0.0;
      double wr = 0.0;
      // accumulate the left side in ascending-value order so the weight
      // sums match an incremental sweep bit for bit
      for (std::size_t vv = 0; vv <= v; ++vv) {
        for (int i = 0; i < n; ++i) {
          if (x.at(i, f) == values[vv]) {
            left[static_cast<std::size_t>(y[i])] += w[i];
            wl += w[i];
          }
        }
      }
      for (int i = 0; i < n; ++i) {
        if (x.at(i, f) > thr) {
          right[static_cast<std::size_t>(y[i])] += w[i];
          wr += w[i];
        }
      }
      if (wl <= 0.0 || wr <= 0.0) continue;
      const double score = (wl * gini(left) + wr * gini(right)) / total_weight;
      if (!best || score < best->score) best = SplitCandidate{f, thr, score};
    }
  }
  if (best && best->score < parent) return best;
  return std::nullopt;
}

DataTable table_from(const std::vector<std::vector<double>>& rows) {
  DataTable t(static_cast<int>(rows.front().size()));
  for (const auto& r : rows) t.push_row(r);
  return t;
}

std::vector<double> unit_weights(int n) {
  return std::vector<double>(static_cast<std::size_t>(n), 1.0);
}

// 3-class, well-separated 1-D blocks; trivially separable by axis splits.
void blocks_data(DataTable& x, std::vector<int>& y, int per_class = 10) {
  x = DataTable(2);
  y.clear();
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per_class; ++i) {
      x.push_row(std::vector<double>{10.0 * c + 0.3 * i, 1.0});
      y.push_back(c);
    }
  }
}

}  // namespace

TEST_CASE("gini impurity formula") {
  REQUIRE(gini(std::vector<double>{5, 5}) == Catch::Approx(0.5));
  REQUIRE(gini(std::vector<double>{10, 0}) == 0.0);
  REQUIRE(gini(std::vector<double>{2, 1, 1}) == Catch::Approx(0.625));
  REQUIRE_THROWS_AS(gini(std::vector<double>{0, 0, 0}),
                    std::invalid_argument);
  // K-class uniform node reaches 1 - 1/K
  for (int k = 2; k <= 6; ++k) {
    std::vector<double> counts(static_cast<std::size_t>(k), 7.0);
    REQUIRE(gini(counts) == Catch::Approx(1.0 - 1.0 / k));
  }
}

TEST_CASE("best_split on perfectly separable 1-D data") {
  const auto x = table_from({{0}, {1}, {10}, {11}});
  const std::vector<int> y = {0, 0, 1, 1};
  const auto w = unit_weights(4);
  const std::vector<int> candidates = {0};
  const auto split = best_split(x, y, w, candidates, 2);
  REQUIRE(split.has_value());
  REQUIRE(split->feature == 0);
  REQUIRE(split->threshold == Catch::Approx(5.5));
  REQUIRE(split->score == 0.0);
}

TEST_CASE("best_split returns nothing for a pure node") {
  const auto x = table_from({{0}, {1}, {2}});
  const std::vector<int> y = {1, 1, 1};
  const auto w = unit_weights(3);
  const std::vector<int> candidates = {0};
  REQUIRE_FALSE(best_split(x, y, w, candidates, 2).has_value());
}

TEST_CASE("best_split matches the exhaustive oracle on random instances") {
  Rng rng(2024);
  const std::vector<int> candidates = {0, 1};
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(11));
    DataTable x(2);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      x.push_row(std::vector<double>{
          static_cast<double>(rng.uniform_index(8)),
          static_cast<double>(rng.uniform_index(8))});
      y.push_back(static_cast<int>(rng.uniform_index(3)));
    }
    const auto w = unit_weights(n);
    const auto ours = best_split(x, y, w, candidates, 3);
    const auto oracle = brute_force_split(x, y, w, 3);
    REQUIRE(ours.has_value() == oracle.has_value());
    if (ours) {
      REQUIRE(ours->feature == oracle->feature);
      REQUIRE(ours->threshold == oracle->threshold);
      REQUIRE(ours->score == oracle->score);
    }
  }
}

TEST_CASE("fit_tree drives training error to zero on separable data") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  Rng rng(1);
  const auto tree = fit_tree(x, y, 3, TreeParams{}, rng);
  for (int i = 0; i < x.rows(); ++i) {
    REQUIRE(tree.predict(x.row(i)) == y[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("max_depth 0 yields a single majority leaf") {
  const auto x = table_from({{0}, {1}, {2}, {3}, {4}});
  const std::vector<int> y = {1, 1, 1, 2, 2};
  Rng rng(1);
  const auto tree =
      fit_tree(x, y, unit_weights(5), 3, TreeParams{0, 2, -1}, rng);
  REQUIRE(tree.nodes.size() == 1);
  REQUIRE(tree.nodes[0].is_leaf());
  REQUIRE(tree.nodes[0].label == 1);
  REQUIRE(tree.nodes[0].fraction == Catch::Approx(1.0));
}

TEST_CASE("majority-leaf ties break toward the lowest class") {
  const auto x = table_from({{0}, {1}, {2}, {3}});
  const std::vector<int> y = {2, 2, 1, 1};
  Rng rng(1);
  const auto tree =
      fit_tree(x, y, unit_weights(4), 3, TreeParams{0, 2, -1}, rng);
  REQUIRE(tree.nodes[0].label == 1);
}

TEST_CASE("fit_tree with a fixed seed is reproducible under m_try") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  // jitter the second feature so m_try draws matter
  DataTable x2(2);
  Rng jitter(5);
  for (int i = 0; i < x.rows(); ++i) {
    x2.push_row(std::vector<double>{x.at(i, 0), jitter.uniform(0.0, 30.0)});
  }
  TreeParams params;
  params.m_try = 1;
  Rng rng_a(77);
  Rng rng_b(77);
  const auto a = fit_tree(x2, y, unit_weights(x.rows()), 3, params, rng_a);
  const auto b = fit_tree(x2, y, unit_weights(x.rows()), 3, params, rng_b);
  std::ostringstream sa;
  std::ostringstream sb;
  tree_detail::tree_to_stream(a, sa);
  tree_detail::tree_to_stream(b, sb);
  REQUIRE(sa.str() == sb.str());
}

TEST_CASE("degenerate forest equals a single tree") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  ForestParams params;
  params.n_trees = 1;
  params.m_try = 2;  // all features
  params.bootstrap = false;
  const auto forest = fit_forest(x, y, 3, params, 42);
  Rng rng(forest.tree_seeds[0]);
  TreeParams tree_params;
  tree_params.m_try = 2;
  const auto lone =
      fit_tree(x, y, unit_weights(x.rows()), 3, tree_params, rng);
  for (int i = 0; i < x.rows(); ++i) {
    REQUIRE(forest.predict(x.row(i)) == lone.predict(x.row(i)));
  }
}

TEST_CASE("a 25-tree forest clears separable training data") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  ForestParams params;
  params.n_trees = 25;
  params.m_try = 1;
  const auto forest = fit_forest(x, y, 3, params, 7);
  for (int i = 0; i < x.rows(); ++i) {
    REQUIRE(forest.predict(x.row(i)) == y[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("forest fits are deterministic per seed") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  ForestParams params;
  params.n_trees = 5;
  params.m_try = 1;
  const auto a = fit_forest(x, y, 3, params, 99);
  const auto b = fit_forest(x, y, 3, params, 99);
  REQUIRE(forest_to_text(a) == forest_to_text(b));
}

TEST_CASE("samme alpha arithmetic") {
  REQUIRE(samme_alpha(0.5, 3) == Catch::Approx(std::log(2.0)).epsilon(1e-14));
  // err at the random-guess boundary for K = 3 gives alpha 0
  REQUIRE(samme_alpha(2.0 / 3.0, 3) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(samme_alpha(0.25, 2) == Catch::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("samme halts at the random-guess boundary") {
  // three balanced classes and a stump that cannot split at all: err = 2/3
  const auto x = table_from({{1}, {1}, {1}, {1}, {1}, {1}, {1}, {1}, {1}});
  const std::vector<int> y = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  SammeParams params;
  params.rounds = 10;
  const auto ens = fit_samme(x, y, 3, params, 3);
  REQUIRE(ens.trees.empty());
}

TEST_CASE("a perfect weak learner ends boosting with one capped round") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  SammeParams params;
  params.rounds = 25;
  params.weak.max_depth = 4;  // enough to separate the blocks outright
  const auto ens = fit_samme(x, y, 3, params, 11);
  REQUIRE(ens.trees.size() == 1);
  REQUIRE(ens.alphas[0] == Catch::Approx(samme_alpha_cap(3)));
  for (int i = 0; i < x.rows(); ++i) {
    REQUIRE(ens.predict(x.row(i)) ==
            ens.trees[0].predict(x.row(i)));
  }
}

TEST_CASE("boosting with stumps reduces training error over rounds") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  SammeParams params;
  params.rounds = 12;
  params.weak.max_depth = 1;
  const auto ens = fit_samme(x, y, 3, params, 17);
  REQUIRE(ens.trees.size() >= 2);
  double prev = 1.0;
  for (std::size_t prefix = 1; prefix <= ens.trees.size(); ++prefix) {
    BoostEnsemble head;
    head.n_classes = 3;
    head.trees.assign(ens.trees.begin(),
                      ens.trees.begin() + static_cast<long>(prefix));
    head.alphas.assign(ens.alphas.begin(),
                       ens.alphas.begin() + static_cast<long>(prefix));
    int wrong = 0;
    for (int i = 0; i < x.rows(); ++i) {
      if (head.predict(x.row(i)) != y[static_cast<std::size_t>(i)]) ++wrong;
    }
    const double err = static_cast<double>(wrong) / x.rows();
    REQUIRE(err <= prev + 1e-12);
    prev = err;
  }
  REQUIRE(prev == 0.0);  // separable: the retained rounds finish the job
}

TEST_CASE("samme fits are deterministic per seed") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  SammeParams params;
  params.rounds = 6;
  params.weak.max_depth = 1;
  const auto a = fit_samme(x, y, 3, params, 21);
  const auto b = fit_samme(x, y, 3, params, 21);
  REQUIRE(boost_to_text(a) == boost_to_text(b));
}

TEST_CASE("single-split stump sends all importance to its feature") {
  const auto x = table_from({{0, 5}, {1, 5}, {10, 5}, {11, 5}});
  const std::vector<int> y = {0, 0, 1, 1};
  Rng rng(1);
  const auto tree = fit_tree(x, y, unit_weights(4), 2, TreeParams{}, rng);
  const auto imp = variable_importance(tree);
  REQUIRE(imp[0] == Catch::Approx(1.0));
  REQUIRE(imp[1] == 0.0);
}

TEST_CASE("importance follows the hand-computed node fractions") {
  // root splits f0 (fraction 1.0); both children split f1 (0.5 + 0.5)
  const auto x = table_from({{0, 0}, {0, 10}, {10, 0}, {10, 10}});
  const std::vector<int> y = {0, 1, 2, 0};
  Rng rng(1);
  const auto tree = fit_tree(x, y, unit_weights(4), 3, TreeParams{}, rng);
  REQUIRE(tree.nodes[0].feature == 0);  // tie against f1 broken by index
  const auto imp = variable_importance(tree);
  REQUIRE(imp[0] == Catch::Approx(0.5));
  REQUIRE(imp[1] == Catch::Approx(0.5));
}

TEST_CASE("forest importance is normalized") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);
  ForestParams params;
  params.n_trees = 11;
  params.m_try = 1;
  const auto forest = fit_forest(x, y, 3, params, 13);
  const auto imp = variable_importance(forest);
  double total = 0.0;
  for (double v : imp) {
    REQUIRE(v >= 0.0);
    total += v;
  }
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("model text round-trips") {
  DataTable x;
  std::vector<int> y;
  blocks_data(x, y);

  ForestParams fp;
  fp.n_trees = 3;
  fp.m_try = 1;
  const auto forest = fit_forest(x, y, 3, fp, 5);
  const auto forest_text = forest_to_text(forest);
  const auto forest_back = forest_from_text(forest_text);
  REQUIRE(forest_to_text(forest_back) == forest_text);
  for (int i = 0; i < x.rows(); ++i) {
    REQUIRE(forest_back.predict(x.row(i)) == forest.predict(x.row(i)));
  }

  SammeParams sp;
  sp.rounds = 4;
  sp.weak.max_depth = 1;
  const auto boost = fit_samme(x, y, 3, sp, 5);
  const auto boost_text = boost_to_text(boost);
  const auto boost_back = boost_from_text(boost_text);
  REQUIRE(boost_to_text(boost_back) == boost_text);
  for (int i = 0; i < x.rows(); ++i) {
    REQUIRE(boost_back.predict(x.row(i)) == boost.predict(x.row(i)));
  }
}
