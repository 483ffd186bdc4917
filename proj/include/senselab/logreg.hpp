#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "senselab/trees.hpp"  // DataTable

namespace senselab {

enum class Penalty { L1, L2 };

inline const char* penalty_name(Penalty p) {
  return p == Penalty::L1 ? "l1" : "l2";
}

struct LogRegParams {
  Penalty penalty = Penalty::L2;
  double lambda = 1e-3;  // penalty strength; larger is stronger
  int max_iter = 500;
  double tol = 1e-8;  // stop when the objective decrease falls below this
};

struct ClassFitRecord {
  int iterations = 0;
  double final_objective = 0.0;
  bool converged = false;
  std::vector<double> objective_history;  // per accepted step
};

namespace logreg_detail {

inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double soft_threshold(double v, double thr) {
  if (v > thr) return v - thr;
  if (v < -thr) return v + thr;
  return 0.0;
}

}  // namespace logreg_detail

// One-vs-rest logistic regression with an L1 or L2 penalty on the weights
// (intercept unpenalized). Assumes features were normalized upstream.
struct LogRegModel {
  int n_classes = 0;
  int n_features = 0;
  std::vector<std::vector<double>> weights;  // [class][feature]
  std::vector<double> intercepts;            // [class]
  Penalty penalty = Penalty::L2;
  double lambda = 0.0;
  std::vector<ClassFitRecord> fits;
  bool warning = false;  // some class hit the iteration cap

  double score(int cls, std::span<const double> row) const {
    const auto& w = weights[static_cast<std::size_t>(cls)];
    double z = intercepts[static_cast<std::size_t>(cls)];
    for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * row[f];
    return z;
  }

  // Per-class sigmoid scores normalized to sum 1.
  std::vector<double> predict_proba(std::span<const double> row) const {
    std::vector<double> p(static_cast<std::size_t>(n_classes));
    double total = 0.0;
    for (int c = 0; c < n_classes; ++c) {
      p[static_cast<std::size_t>(c)] =
          logreg_detail::sigmoid(score(c, row));
      total += p[static_cast<std::size_t>(c)];
    }
    if (total <= 0.0) {
      std::fill(p.begin(), p.end(), 1.0 / n_classes);
      return p;
    }
    for (auto& v : p) v /= total;
    return p;
  }

  int predict(std::span<const double> row) const {
    const auto p = predict_proba(row);
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (p[static_cast<std::size_t>(c)] > p[static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    return best;
  }
};

namespace logreg_detail {

// Mean negative log-likelihood of the binary problem with labels in
// {-1, +1}: (1/n) sum softplus(-y z).
inline double binary_nll(const DataTable& x, std::span<const double> ybin,
                         std::span<const double> w, double b) {
  double total = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double z = b;
    for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * row[f];
    total += softplus(-ybin[static_cast<std::size_t>(i)] * z);
  }
  return total / static_cast<double>(x.rows());
}

// Gradient of binary_nll in (w, b).
inline void binary_nll_grad(const DataTable& x, std::span<const double> ybin,
                            std::span<const double> w, double b,
                            std::span<double> gw, double& gb) {
  std::fill(gw.begin(), gw.end(), 0.0);
  gb = 0.0;
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (int i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const double y = ybin[static_cast<std::size_t>(i)];
    double z = b;
    for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * row[f];
    const double coeff = -y * sigmoid(-y * z) * inv_n;
    for (std::size_t f = 0; f < gw.size(); ++f) gw[f] += coeff * row[f];
    gb += coeff;
  }
}

struct BinaryFit {
  std::vector<double> w;
  double b = 0.0;
  ClassFitRecord record;
};

// L2: gradient descent with Armijo backtracking on the full objective
// nll + lambda * ||w||^2.
inline BinaryFit fit_binary_l2(const DataTable& x,
                               std::span<const double> ybin,
                               const LogRegParams& params) {
  const auto d = static_cast<std::size_t>(x.cols());
  BinaryFit fit;
  fit.w.assign(d, 0.0);

  auto objective = [&](std::span<const double> w, double b) {
    double pen = 0.0;
    for (double v : w) pen += v * v;
    return binary_nll(x, ybin, w, b) + params.lambda * pen;
  };

  std::vector<double> gw(d);
  std::vector<double> trial_w(d);
  double fx = objective(fit.w, fit.b);
  fit.record.objective_history.push_back(fx);
  double step = 1.0;

  for (int iter = 0; iter < params.max_iter; ++iter) {
    double gb = 0.0;
    binary_nll_grad(x, ybin, fit.w, fit.b, gw, gb);
    for (std::size_t f = 0; f < d; ++f) gw[f] += 2.0 * params.lambda * fit.w[f];

    double g2 = gb * gb;
    for (double g : gw) g2 += g * g;
    if (g2 == 0.0) {
      fit.record.converged = true;
      break;
    }

    double t = step;
    double fx_new = fx;
    double b_new = fit.b;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t f = 0; f < d; ++f) trial_w[f] = fit.w[f] - t * gw[f];
      b_new = fit.b - t * gb;
      fx_new = objective(trial_w, b_new);
      if (fx_new <= fx - 1e-4 * t * g2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      fit.record.converged = true;  // no descent direction progress left
      break;
    }
    fit.w = trial_w;
    fit.b = b_new;
    fit.record.objective_history.push_back(fx_new);
    ++fit.record.iterations;
    step = std::min(t * 2.0, 1e4);
    if (fx - fx_new < params.tol) {
      fit.record.converged = true;
      fx = fx_new;
      break;
    }
    fx = fx_new;
  }
  fit.record.final_objective = fit.record.objective_history.back();
  return fit;
}

// L1: proximal gradient (soft-thresholding) with backtracking on the
// smooth part; the recorded objective is nll + lambda * ||w||_1.
inline BinaryFit fit_binary_l1(const DataTable& x,
                               std::span<const double> ybin,
                               const LogRegParams& params) {
  const auto d = static_cast<std::size_t>(x.cols());
  BinaryFit fit;
  fit.w.assign(d, 0.0);

  auto l1_norm = [](std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += std::fabs(v);
    return s;
  };

  std::vector<double> gw(d);
  std::vector<double> trial_w(d);
  double smooth = binary_nll(x, ybin, fit.w, fit.b);
  double fx = smooth + params.lambda * l1_norm(fit.w);
  fit.record.objective_history.push_back(fx);
  double step = 1.0;

  for (int iter = 0; iter < params.max_iter; ++iter) {
    double gb = 0.0;
    binary_nll_grad(x, ybin, fit.w, fit.b, gw, gb);

    double t = step;
    double smooth_new = smooth;
    double b_new = fit.b;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t f = 0; f < d; ++f) {
        trial_w[f] = soft_threshold(fit.w[f] - t * gw[f], t * params.lambda);
      }
      b_new = fit.b - t * gb;
      smooth_new = binary_nll(x, ybin, trial_w, b_new);
      // quadratic upper bound check for the prox step
      double lin = (b_new - fit.b) * gb;
      double sq = (b_new - fit.b) * (b_new - fit.b);
      for (std::size_t f = 0; f < d; ++f) {
        const double delta = trial_w[f] - fit.w[f];
        lin += delta * gw[f];
        sq += delta * delta;
      }
      if (smooth_new <= smooth + lin + sq / (2.0 * t) + 1e-15) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      fit.record.converged = true;
      break;
    }
    const double fx_new = smooth_new + params.lambda * l1_norm(trial_w);
    // prox steps with a valid majorizer never increase the objective
    fit.w = trial_w;
    fit.b = b_new;
    smooth = smooth_new;
    fit.record.objective_history.push_back(fx_new);
    ++fit.record.iterations;
    step = std::min(t * 2.0, 1e4);
    if (fx - fx_new < params.tol) {
      fit.record.converged = true;
      fx = fx_new;
      break;
    }
    fx = fx_new;
  }
  fit.record.final_objective = fit.record.objective_history.back();
  return fit;
}

}  // namespace logreg_detail

// Fits one binary penalized maximum-likelihood problem per class
// (class-vs-rest). Deterministic: no randomness anywhere in the fit.
inline LogRegModel fit_logreg(const DataTable& x, std::span<const int> y,
                              int n_classes, const LogRegParams& params) {
  if (x.rows() < 2) throw std::invalid_argument("fit_logreg: too few samples");
  if (n_classes < 2) throw std::invalid_argument("fit_logreg: need K >= 2");
  if (!(params.lambda > 0.0)) {
    throw std::invalid_argument("fit_logreg: lambda must be > 0");
  }

  LogRegModel model;
  model.n_classes = n_classes;
  model.n_features = x.cols();
  model.penalty = params.penalty;
  model.lambda = params.lambda;

  std::vector<double> ybin(static_cast<std::size_t>(x.rows()));
  for (int c = 0; c < n_classes; ++c) {
    for (int i = 0; i < x.rows(); ++i) {
      ybin[static_cast<std::size_t>(i)] =
          y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
    }
    auto fit = params.penalty == Penalty::L2
                   ? logreg_detail::fit_binary_l2(x, ybin, params)
                   : logreg_detail::fit_binary_l1(x, ybin, params);
    if (!fit.record.converged) model.warning = true;
    model.weights.push_back(std::move(fit.w));
    model.intercepts.push_back(fit.b);
    model.fits.push_back(std::move(fit.record));
  }
  return model;
}

// Per-class coefficient rows, weights first then the intercept; feeds the
// importance analysis (fold averaging happens in the evaluation layer).
struct CoefficientTable {
  int n_classes = 0;
  int n_features = 0;
  std::vector<std::vector<double>> rows;  // [class][feature..., intercept]
};

inline CoefficientTable coefficient_report(const LogRegModel& model) {
  CoefficientTable table;
  table.n_classes = model.n_classes;
  table.n_features = model.n_features;
  for (int c = 0; c < model.n_classes; ++c) {
    auto row = model.weights[static_cast<std::size_t>(c)];
    row.push_back(model.intercepts[static_cast<std::size_t>(c)]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string coefficient_table_to_csv(
    const CoefficientTable& table, std::span<const std::string> names) {
  std::ostringstream out;
  out << "class";
  for (int f = 0; f < table.n_features; ++f) {
    out << ',' << (f < static_cast<int>(names.size())
                       ? names[static_cast<std::size_t>(f)]
                       : "f" + std::to_string(f));
  }
  out << ",intercept\n";
  char buf[40];
  for (int c = 0; c < table.n_classes; ++c) {
    out << c;
    for (double v : table.rows[static_cast<std::size_t>(c)]) {
      std::snprintf(buf, sizeof(buf), "%.10g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace senselab
