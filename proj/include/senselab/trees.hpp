#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "senselab/rng.hpp"

namespace senselab {

// ---------------------------------------------------------------------------
// Sample storage
// ---------------------------------------------------------------------------

// Row-major feature matrix. Kept flat; the learners only ever read it.
class DataTable {
 public:
  DataTable() = default;
  explicit DataTable(int cols) : cols_(cols) {}

  void push_row(std::span<const double> row) {
    if (static_cast<int>(row.size()) != cols_) {
      throw std::invalid_argument("DataTable: row width mismatch");
    }
    values_.insert(values_.end(), row.begin(), row.end());
  }

  int rows() const {
    return cols_ == 0 ? 0 : static_cast<int>(values_.size()) / cols_;
  }
  int cols() const { return cols_; }
  double at(int r, int c) const {
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }
  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

 private:
  std::vector<double> values_;
  int cols_ = 0;
};

// ---------------------------------------------------------------------------
// Gini impurity and split search
// ---------------------------------------------------------------------------

// 1 - sum((c_i / n)^2). Counts may be fractional (boosting weights).
inline double gini(std::span<const double> class_counts) {
  double total = 0.0;
  for (double c : class_counts) {
    if (c < 0.0) throw std::invalid_argument("gini: negative count");
    total += c;
  }
  if (total <= 0.0) throw std::invalid_argument("gini: all counts zero");
  double sq = 0.0;
  for (double c : class_counts) {
    const double p = c / total;
    sq += p * p;
  }
  return 1.0 - sq;
}

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // weighted mean child impurity
};

namespace tree_detail {

// Best split over the given node rows. Thresholds are midpoints between
// consecutive distinct sorted values; the score is the weight-weighted
// mean child Gini. Ties break toward the lowest feature index, then the
// lowest threshold, which the iteration order delivers for free. Returns
// nothing when the node is pure or no candidate strictly reduces the
// node's own impurity.
inline std::optional<SplitCandidate> best_split_indexed(
    const DataTable& x, std::span<const int> y, std::span<const double> w,
    std::span<const int> node_rows, std::span<const int> candidate_features,
    int n_classes) {
  if (node_rows.size() < 2 || candidate_features.empty()) return std::nullopt;

  std::vector<double> total_counts(static_cast<std::size_t>(n_classes), 0.0);
  double total_weight = 0.0;
  for (int r : node_rows) {
    total_counts[static_cast<std::size_t>(y[static_cast<std::size_t>(r)])] +=
        w[static_cast<std::size_t>(r)];
    total_weight += w[static_cast<std::size_t>(r)];
  }
  if (total_weight <= 0.0) return std::nullopt;
  const double parent = gini(total_counts);
  if (parent <= 0.0) return std::nullopt;

  std::optional<SplitCandidate> best;
  std::vector<std::pair<double, int>> order;  // (value, row)
  std::vector<double> left(static_cast<std::size_t>(n_classes));
  std::vector<double> right(static_cast<std::size_t>(n_classes));

  for (int f : candidate_features) {
    order.clear();
    order.reserve(node_rows.size());
    for (int r : node_rows) order.emplace_back(x.at(r, f), r);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::fill(left.begin(), left.end(), 0.0);
    right = total_counts;
    double left_weight = 0.0;

    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const int r = order[i].second;
      const auto cls = static_cast<std::size_t>(y[static_cast<std::size_t>(r)]);
      left[cls] += w[static_cast<std::size_t>(r)];
      right[cls] -= w[static_cast<std::size_t>(r)];
      // fractional boosting weights can leave -1e-20 dust behind
      if (right[cls] < 0.0) right[cls] = 0.0;
      left_weight += w[static_cast<std::size_t>(r)];
      const double v = order[i].first;
      const double v_next = order[i + 1].first;
      if (v_next <= v) continue;  // not a distinct-value boundary
      const double threshold = (v + v_next) / 2.0;
      // Guard against midpoints that collapse onto an endpoint when the
      // two values are adjacent doubles; the <= convention needs
      // threshold in [v, v_next).
      if (threshold < v || threshold >= v_next) continue;
      const double right_weight = total_weight - left_weight;
      if (left_weight <= 0.0 || right_weight <= 0.0) continue;
      const double score =
          (left_weight * gini(left) + right_weight * gini(right)) /
          total_weight;
      if (!best || score < best->score) {
        best = SplitCandidate{f, threshold, score};
      }
    }
  }
  if (best && best->score < parent) return best;
  return std::nullopt;
}

}  // namespace tree_detail

inline std::optional<SplitCandidate> best_split(
    const DataTable& x, std::span<const int> y, std::span<const double> w,
    std::span<const int> candidate_features, int n_classes) {
  std::vector<int> rows(static_cast<std::size_t>(x.rows()));
  for (int i = 0; i < x.rows(); ++i) rows[static_cast<std::size_t>(i)] = i;
  return tree_detail::best_split_indexed(x, y, w, rows, candidate_features,
                                         n_classes);
}

// ---------------------------------------------------------------------------
// Decision trees
// ---------------------------------------------------------------------------

struct TreeParams {
  int max_depth = -1;         // < 0 means unlimited
  int min_samples_split = 2;  // nodes smaller than this become leaves
  int m_try = -1;             // candidate features per split; < 0 means all
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;                    // leaves only
  std::vector<double> class_counts;  // weighted counts reaching the node
  double fraction = 0.0;             // node weight / root weight

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  int n_classes = 0;
  int n_features = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(std::span<const double> row) const {
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
      const auto& n = nodes[static_cast<std::size_t>(idx)];
      idx = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                    : n.right;
    }
    return nodes[static_cast<std::size_t>(idx)].label;
  }

  int leaf_count() const {
    int c = 0;
    for (const auto& n : nodes) c += n.is_leaf() ? 1 : 0;
    return c;
  }
};

namespace tree_detail {

inline int weighted_majority(std::span<const double> counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[static_cast<std::size_t>(c)] >
        counts[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  return best;
}

struct TreeBuilder {
  const DataTable& x;
  std::span<const int> y;
  std::span<const double> w;
  int n_classes;
  TreeParams params;
  Rng& rng;
  DecisionTree out;
  double root_weight = 0.0;
  std::vector<int> all_features;

  int build(std::vector<int>& rows, int depth) {
    std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
    double weight = 0.0;
    for (int r : rows) {
      counts[static_cast<std::size_t>(y[static_cast<std::size_t>(r)])] +=
          w[static_cast<std::size_t>(r)];
      weight += w[static_cast<std::size_t>(r)];
    }
    if (depth == 0) root_weight = weight > 0.0 ? weight : 1.0;

    const int index = static_cast<int>(out.nodes.size());
    out.nodes.emplace_back();
    out.nodes.back().class_counts = counts;
    out.nodes.back().fraction = weight / root_weight;

    const bool depth_capped = params.max_depth >= 0 && depth >= params.max_depth;
    const bool too_small =
        static_cast<int>(rows.size()) < params.min_samples_split;

    std::optional<SplitCandidate> split;
    if (!depth_capped && !too_small) {
      if (params.m_try > 0 && params.m_try < x.cols()) {
        const auto picked = rng.sample_indices(x.cols(), params.m_try);
        split = best_split_indexed(x, y, w, rows, picked, n_classes);
      } else {
        split = best_split_indexed(x, y, w, rows, all_features, n_classes);
      }
    }

    if (!split) {
      out.nodes[static_cast<std::size_t>(index)].label =
          weighted_majority(counts);
      return index;
    }

    std::vector<int> left_rows;
    std::vector<int> right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (int r : rows) {
      (x.at(r, split->feature) <= split->threshold ? left_rows : right_rows)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    out.nodes[static_cast<std::size_t>(index)].feature = split->feature;
    out.nodes[static_cast<std::size_t>(index)].threshold = split->threshold;
    const int left = build(left_rows, depth + 1);
    out.nodes[static_cast<std::size_t>(index)].left = left;
    const int right = build(right_rows, depth + 1);
    out.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }
};

}  // namespace tree_detail

// Recursive Gini-minimizing growth. Stops on purity, the depth cap, the
// minimum node size, or when no candidate split reduces impurity. With
// m_try < n_features each node sees a fresh without-replacement feature
// draw from the rng. Leaf labels are the weighted majority, ties to the
// lowest class.
inline DecisionTree fit_tree(const DataTable& x, std::span<const int> y,
                             std::span<const double> w, int n_classes,
                             const TreeParams& params, Rng& rng) {
  if (x.rows() == 0) throw std::invalid_argument("fit_tree: no samples");
  if (static_cast<int>(y.size()) != x.rows() ||
      static_cast<int>(w.size()) != x.rows()) {
    throw std::invalid_argument("fit_tree: label/weight size mismatch");
  }
  tree_detail::TreeBuilder builder{x, y, w, n_classes, params, rng, {}, 0.0, {}};
  builder.out.n_classes = n_classes;
  builder.out.n_features = x.cols();
  builder.all_features.resize(static_cast<std::size_t>(x.cols()));
  for (int f = 0; f < x.cols(); ++f) {
    builder.all_features[static_cast<std::size_t>(f)] = f;
  }
  std::vector<int> rows(static_cast<std::size_t>(x.rows()));
  for (int i = 0; i < x.rows(); ++i) rows[static_cast<std::size_t>(i)] = i;
  builder.build(rows, 0);
  return builder.out;
}

inline DecisionTree fit_tree(const DataTable& x, std::span<const int> y,
                             int n_classes, const TreeParams& params,
                             Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(x.rows()),
                        1.0 / std::max(1, x.rows()));
  return fit_tree(x, y, w, n_classes, params, rng);
}

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

struct ForestParams {
  int n_trees = 100;
  int m_try = 4;
  bool bootstrap = true;  // test hook: off makes one tree equal fit_tree
  TreeParams tree;        // depth/min-size limits for the member trees
};

struct Forest {
  int n_classes = 0;
  int m_try = 0;
  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> tree_seeds;

  int predict(std::span<const double> row) const {
    std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
    for (const auto& t : trees) {
      ++votes[static_cast<std::size_t>(t.predict(row))];
    }
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (votes[static_cast<std::size_t>(c)] >
          votes[static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    return best;
  }
};

// Bootstrapped trees with per-node feature subsampling. Every tree runs on
// its own recorded seed stream derived from the forest seed.
inline Forest fit_forest(const DataTable& x, std::span<const int> y,
                         int n_classes, const ForestParams& params,
                         std::uint64_t seed) {
  if (params.n_trees < 1) throw std::invalid_argument("fit_forest: n_trees");
  if (params.m_try > x.cols()) {
    throw std::invalid_argument("fit_forest: m_try exceeds feature count");
  }
  const int n = x.rows();
  Forest forest;
  forest.n_classes = n_classes;
  forest.m_try = params.m_try;
  forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
  const std::vector<double> unit(static_cast<std::size_t>(n), 1.0);

  TreeParams tree_params = params.tree;
  tree_params.m_try = params.m_try;

  for (int t = 0; t < params.n_trees; ++t) {
    const std::uint64_t tree_seed =
        derive_seed(seed, static_cast<std::uint64_t>(t) + 1);
    forest.tree_seeds.push_back(tree_seed);
    Rng rng(tree_seed);

    if (params.bootstrap) {
      DataTable boot(x.cols());
      std::vector<int> boot_y;
      boot_y.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const auto pick =
            static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
        boot.push_row(x.row(pick));
        boot_y.push_back(y[static_cast<std::size_t>(pick)]);
      }
      forest.trees.push_back(
          fit_tree(boot, boot_y, unit, n_classes, tree_params, rng));
    } else {
      forest.trees.push_back(
          fit_tree(x, y, unit, n_classes, tree_params, rng));
    }
  }
  return forest;
}

// ---------------------------------------------------------------------------
// SAMME multiclass boosting
// ---------------------------------------------------------------------------

inline double samme_alpha(double err, int n_classes) {
  return std::log((1.0 - err) / err) + std::log(n_classes - 1.0);
}

// Cap used when a round classifies its weighted sample perfectly.
inline double samme_alpha_cap(int n_classes) {
  return std::log(1e12 * (n_classes - 1.0));
}

struct BoostEnsemble {
  int n_classes = 0;
  std::vector<DecisionTree> trees;
  std::vector<double> alphas;

  int predict(std::span<const double> row) const {
    std::vector<double> score(static_cast<std::size_t>(n_classes), 0.0);
    for (std::size_t m = 0; m < trees.size(); ++m) {
      score[static_cast<std::size_t>(trees[m].predict(row))] += alphas[m];
    }
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (score[static_cast<std::size_t>(c)] >
          score[static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    return best;
  }
};

struct SammeParams {
  int rounds = 50;
  TreeParams weak{3, 2, -1};  // depth-3 weak learners, all features
};

// Iteratively reweights hard points and weights each round by its training
// accuracy: alpha = ln((1-err)/err) + ln(K-1). A round at or past the
// random-guess boundary err >= 1 - 1/K is dropped and training halts; a
// perfect round is kept with the capped alpha and also halts training.
inline BoostEnsemble fit_samme(const DataTable& x, std::span<const int> y,
                               int n_classes, const SammeParams& params,
                               std::uint64_t seed) {
  if (params.rounds < 1) throw std::invalid_argument("fit_samme: rounds");
  if (n_classes < 2) throw std::invalid_argument("fit_samme: need K >= 2");
  const int n = x.rows();
  std::vector<double> w(static_cast<std::size_t>(n),
                        1.0 / static_cast<double>(n));
  BoostEnsemble ens;
  ens.n_classes = n_classes;

  for (int m = 0; m < params.rounds; ++m) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(m) + 1));
    DecisionTree tree = fit_tree(x, y, w, n_classes, params.weak, rng);

    double err = 0.0;
    std::vector<bool> miss(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const bool wrong =
          tree.predict(x.row(i)) != y[static_cast<std::size_t>(i)];
      miss[static_cast<std::size_t>(i)] = wrong;
      if (wrong) err += w[static_cast<std::size_t>(i)];
    }

    // random-guess boundary; the epsilon absorbs 1/n summation dust
    if (err >= 1.0 - 1.0 / n_classes - 1e-12) break;  // round discarded

    if (err <= 0.0) {
      ens.trees.push_back(std::move(tree));
      ens.alphas.push_back(samme_alpha_cap(n_classes));
      break;
    }

    const double alpha = samme_alpha(err, n_classes);
    ens.trees.push_back(std::move(tree));
    ens.alphas.push_back(alpha);

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (miss[static_cast<std::size_t>(i)]) {
        w[static_cast<std::size_t>(i)] *= std::exp(alpha);
      }
      total += w[static_cast<std::size_t>(i)];
    }
    for (auto& wi : w) wi /= total;
  }
  return ens;
}

// ---------------------------------------------------------------------------
// Variable importance
// ---------------------------------------------------------------------------

namespace tree_detail {

inline void add_tree_importance(const DecisionTree& tree, double tree_weight,
                                std::vector<double>& acc) {
  for (const auto& node : tree.nodes) {
    if (!node.is_leaf()) {
      acc[static_cast<std::size_t>(node.feature)] +=
          tree_weight * node.fraction;
    }
  }
}

inline std::vector<double> normalize_importance(std::vector<double> imp) {
  double total = 0.0;
  for (double v : imp) total += v;
  if (total <= 0.0) {
    // ensembles of bare leaves carry no split information
    std::fill(imp.begin(), imp.end(), 1.0 / static_cast<double>(imp.size()));
    return imp;
  }
  for (double& v : imp) v /= total;
  return imp;
}

}  // namespace tree_detail

// Expected fraction of training samples routed through splits on each
// feature, tree-weighted (uniform for forests, alpha for boosting),
// normalized to sum 1.
inline std::vector<double> variable_importance(const Forest& forest) {
  std::vector<double> imp(
      static_cast<std::size_t>(forest.trees.front().n_features), 0.0);
  for (const auto& tree : forest.trees) {
    tree_detail::add_tree_importance(tree, 1.0, imp);
  }
  return tree_detail::normalize_importance(std::move(imp));
}

inline std::vector<double> variable_importance(const BoostEnsemble& ens) {
  if (ens.trees.empty()) {
    throw std::invalid_argument("variable_importance: empty ensemble");
  }
  std::vector<double> imp(
      static_cast<std::size_t>(ens.trees.front().n_features), 0.0);
  for (std::size_t m = 0; m < ens.trees.size(); ++m) {
    tree_detail::add_tree_importance(ens.trees[m], ens.alphas[m], imp);
  }
  return tree_detail::normalize_importance(std::move(imp));
}

inline std::vector<double> variable_importance(const DecisionTree& tree) {
  std::vector<double> imp(static_cast<std::size_t>(tree.n_features), 0.0);
  tree_detail::add_tree_importance(tree, 1.0, imp);
  return tree_detail::normalize_importance(std::move(imp));
}

// ---------------------------------------------------------------------------
// Textual model serialization (audit format)
// ---------------------------------------------------------------------------

namespace tree_detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void tree_to_stream(const DecisionTree& t, std::ostringstream& out) {
  out << "tree " << t.n_classes << ' ' << t.n_features << ' '
      << t.nodes.size() << "\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    if (n.is_leaf()) {
      out << "leaf " << i << ' ' << n.label << ' ' << fmt17(n.fraction);
      for (double c : n.class_counts) out << ' ' << fmt17(c);
      out << "\n";
    } else {
      out << "node " << i << ' ' << n.feature << ' ' << fmt17(n.threshold)
          << ' ' << n.left << ' ' << n.right << ' ' << fmt17(n.fraction);
      for (double c : n.class_counts) out << ' ' << fmt17(c);
      out << "\n";
    }
  }
}

inline DecisionTree tree_from_stream(std::istringstream& in) {
  std::string word;
  if (!(in >> word) || word != "tree") {
    throw std::runtime_error("model parse: expected 'tree'");
  }
  DecisionTree t;
  std::size_t n_nodes = 0;
  in >> t.n_classes >> t.n_features >> n_nodes;
  t.nodes.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    std::size_t idx = 0;
    if (!(in >> word)) throw std::runtime_error("model parse: truncated tree");
    TreeNode node;
    if (word == "leaf") {
      in >> idx >> node.label >> node.fraction;
    } else if (word == "node") {
      in >> idx >> node.feature >> node.threshold >> node.left >> node.right >>
          node.fraction;
    } else {
      throw std::runtime_error("model parse: unexpected token '" + word + "'");
    }
    node.class_counts.resize(static_cast<std::size_t>(t.n_classes));
    for (auto& c : node.class_counts) in >> c;
    if (idx >= n_nodes) throw std::runtime_error("model parse: node index");
    t.nodes[idx] = std::move(node);
  }
  return t;
}

}  // namespace tree_detail

inline std::string forest_to_text(const Forest& f) {
  std::ostringstream out;
  out << "forest " << f.n_classes << ' ' << f.m_try << ' ' << f.trees.size()
      << "\n";
  for (std::size_t t = 0; t < f.tree_seeds.size(); ++t) {
    out << "seed " << t << ' ' << f.tree_seeds[t] << "\n";
  }
  for (const auto& tree : f.trees) tree_detail::tree_to_stream(tree, out);
  return out.str();
}

inline Forest forest_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  if (!(in >> word) || word != "forest") {
    throw std::runtime_error("model parse: expected 'forest'");
  }
  Forest f;
  std::size_t n_trees = 0;
  in >> f.n_classes >> f.m_try >> n_trees;
  f.tree_seeds.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    std::size_t idx = 0;
    in >> word >> idx >> f.tree_seeds[idx];
    if (word != "seed") throw std::runtime_error("model parse: expected seed");
  }
  std::string rest;
  std::getline(in, rest);  // finish the seed line
  std::ostringstream remainder;
  remainder << in.rdbuf();
  std::istringstream trees_in(remainder.str());
  for (std::size_t t = 0; t < n_trees; ++t) {
    f.trees.push_back(tree_detail::tree_from_stream(trees_in));
  }
  return f;
}

inline std::string boost_to_text(const BoostEnsemble& e) {
  std::ostringstream out;
  out << "samme " << e.n_classes << ' ' << e.trees.size() << "\n";
  for (std::size_t m = 0; m < e.alphas.size(); ++m) {
    out << "alpha " << m << ' ' << tree_detail::fmt17(e.alphas[m]) << "\n";
  }
  for (const auto& tree : e.trees) tree_detail::tree_to_stream(tree, out);
  return out.str();
}

inline BoostEnsemble boost_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  if (!(in >> word) || word != "samme") {
    throw std::runtime_error("model parse: expected 'samme'");
  }
  BoostEnsemble e;
  std::size_t rounds = 0;
  in >> e.n_classes >> rounds;
  e.alphas.resize(rounds);
  for (std::size_t m = 0; m < rounds; ++m) {
    std::size_t idx = 0;
    in >> word >> idx >> e.alphas[idx];
    if (word != "alpha") {
      throw std::runtime_error("model parse: expected alpha");
    }
  }
  std::string rest;
  std::getline(in, rest);
  std::ostringstream remainder;
  remainder << in.rdbuf();
  std::istringstream trees_in(remainder.str());
  for (std::size_t m = 0; m < rounds; ++m) {
    e.trees.push_back(tree_detail::tree_from_stream(trees_in));
  }
  return e;
}

}  // namespace senselab
