#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace senselab {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty range");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator). Identical inputs give an
// exact zero rather than accumulation dust.
inline double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_std needs n >= 2");
  bool all_equal = true;
  for (double x : xs) all_equal = all_equal && x == xs[0];
  if (all_equal) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace detail {

inline double log_gamma(double x) { return std::lgamma(x); }

// Continued fraction for the regularized incomplete beta, Lentz's method.
inline double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Regularized incomplete beta I_x(a, b).
inline double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// CDF of Student's t with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
  const double x = df / (df + t * t);
  const double p = 0.5 * detail::inc_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - p : p;
}

// Upper quantile of Student's t: the value q with CDF(q) = p, p in (0.5, 1).
// Bisection against the CDF; plenty for report-grade precision.
inline double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("t quantile p");
  if (df < 1.0) throw std::invalid_argument("t quantile df");
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double target = upper ? p : 1.0 - p;
  double lo = 0.0;
  double hi = 2.0;
  while (student_t_cdf(hi, df) < target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  const double q = 0.5 * (lo + hi);
  return upper ? q : -q;
}

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

// Mean and t-based 95% (by default) half-width from per-fold values.
inline ConfidenceInterval t_confidence_interval(std::span<const double> xs,
                                                double level = 0.95) {
  if (xs.size() < 2) {
    throw std::invalid_argument("t_confidence_interval needs >= 2 values");
  }
  const double m = mean(xs);
  const double s = sample_std(xs);
  const double n = static_cast<double>(xs.size());
  const double q = student_t_quantile(1.0 - (1.0 - level) / 2.0, n - 1.0);
  return {m, q * s / std::sqrt(n)};
}

inline double misclassification_error(std::span<const int> predictions,
                                      std::span<const int> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw std::invalid_argument("misclassification_error: size mismatch");
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] != labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

// Plurality label; ties broken by the lowest class label.
inline int experiment_vote(std::span<const int> predictions) {
  if (predictions.empty()) {
    throw std::invalid_argument("experiment_vote: empty predictions");
  }
  std::map<int, int> counts;
  for (int p : predictions) ++counts[p];
  int best = predictions[0];
  int best_count = -1;
  for (const auto& [label, count] : counts) {  // ascending label order
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t total() const { return tp + tn + fp + fn; }
};

struct BinaryMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> mcc;  // nullopt when a confusion margin is zero
  ConfusionCounts confusion;
};

// Accuracy, F1, and Matthews correlation for a binary task. The positive
// class is walk-around (scenario 2) unless told otherwise. MCC is reported
// as undefined, never zero, when its denominator vanishes (e.g. a
// single-class prediction vector).
inline BinaryMetrics binary_metrics(std::span<const int> predictions,
                                    std::span<const int> labels,
                                    int positive = 2) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw std::invalid_argument("binary_metrics: size mismatch");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred_pos = predictions[i] == positive;
    const bool is_pos = labels[i] == positive;
    if (pred_pos && is_pos) ++c.tp;
    else if (pred_pos && !is_pos) ++c.fp;
    else if (!pred_pos && is_pos) ++c.fn;
    else ++c.tn;
  }
  BinaryMetrics m;
  m.confusion = c;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  const double denom_f1 = static_cast<double>(2 * c.tp + c.fp + c.fn);
  m.f1 = denom_f1 > 0.0 ? 2.0 * static_cast<double>(c.tp) / denom_f1 : 0.0;
  const double prod = static_cast<double>(c.tp + c.fp) *
                      static_cast<double>(c.tp + c.fn) *
                      static_cast<double>(c.tn + c.fp) *
                      static_cast<double>(c.tn + c.fn);
  if (prod > 0.0) {
    m.mcc = (static_cast<double>(c.tp) * static_cast<double>(c.tn) -
             static_cast<double>(c.fp) * static_cast<double>(c.fn)) /
            std::sqrt(prod);
  }
  return m;
}

}  // namespace senselab
