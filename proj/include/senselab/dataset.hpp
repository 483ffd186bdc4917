#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "senselab/rng.hpp"
#include "senselab/sensors.hpp"

namespace senselab {

// ---------------------------------------------------------------------------
// Labeled experiments and campaigns
// ---------------------------------------------------------------------------

struct Experiment {
  int id = 0;
  int scenario = 0;
  int proximity = 0;  // band index, 0 = contact
  int door_start = 0;
  int door_end = 1;
  std::vector<Observation> observations;

  bool operator==(const Experiment&) const = default;

  // scenario-proximity cell in the 3x5 grid, 0..14
  int condition() const { return scenario * kProximityBandCount + proximity; }
};

struct Dataset {
  std::vector<Experiment> experiments;
  std::uint64_t seed = 0;
  std::string config_digest;

  bool operator==(const Dataset&) const = default;
};

struct DatasetError : std::runtime_error {
  explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// CSV persistence: one row per observation, experiment labels denormalized
// onto every row, provenance carried in a leading comment line.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "experiment_id,scenario,proximity,door_start,door_end,t,"
    "ir_rear_medium,ir_rear_long,photo,therm_a,therm_b,"
    "cliff_left,cliff_front_left,cliff_front_right,cliff_right,wall,"
    "bump_left,bump_right,wheel_left,wheel_right,wheel_caster";

inline std::string dataset_to_csv(const Dataset& ds) {
  std::string out;
  out.reserve(64 * 1024);
  {
    char head[160];
    std::snprintf(head, sizeof(head), "# provenance: seed=%llu config=%s\n",
                  static_cast<unsigned long long>(ds.seed),
                  ds.config_digest.c_str());
    out += head;
  }
  out += kCsvHeader;
  out += '\n';
  char row[320];
  for (const auto& exp : ds.experiments) {
    for (const auto& o : exp.observations) {
      std::snprintf(row, sizeof(row),
                    "%d,%d,%d,%d,%d,%.6f,%d,%d,%d,%.2f,%.2f,%d,%d,%d,%d,%d,"
                    "%d,%d,%d,%d,%d\n",
                    exp.id, exp.scenario, exp.proximity, exp.door_start,
                    exp.door_end, o.t, o.ir_rear_medium, o.ir_rear_long,
                    o.photo, o.therm_a, o.therm_b, o.cliff_left,
                    o.cliff_front_left, o.cliff_front_right, o.cliff_right,
                    o.wall, o.bump_left ? 1 : 0, o.bump_right ? 1 : 0,
                    o.wheel_left ? 1 : 0, o.wheel_right ? 1 : 0,
                    o.wheel_caster ? 1 : 0);
      out += row;
    }
  }
  return out;
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot open for writing: " + path);
  out << dataset_to_csv(ds);
  if (!out) throw DatasetError("write failed: " + path);
}

namespace csv_detail {

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline double parse_num(std::string_view v, int line_no,
                        std::string_view column) {
  const std::string s(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw DatasetError("line " + std::to_string(line_no) +
                       ": non-numeric value for " + std::string(column) +
                       ": '" + s + "'");
  }
  return x;
}

inline int parse_int(std::string_view v, int line_no,
                     std::string_view column) {
  const double x = parse_num(v, line_no, column);
  if (x != std::floor(x)) {
    throw DatasetError("line " + std::to_string(line_no) +
                       ": non-integer value for " + std::string(column) +
                       ": '" + std::string(v) + "'");
  }
  return static_cast<int>(x);
}

inline bool parse_bool(std::string_view v, int line_no,
                       std::string_view column) {
  const int x = parse_int(v, line_no, column);
  if (x != 0 && x != 1) {
    throw DatasetError("line " + std::to_string(line_no) + ": " +
                       std::string(column) + " must be 0 or 1, got '" +
                       std::string(v) + "'");
  }
  return x == 1;
}

}  // namespace csv_detail

inline Dataset parse_dataset_csv(std::string_view text) {
  Dataset ds;
  std::size_t pos = 0;
  int line_no = 0;
  bool header_seen = false;
  std::set<int> finished_ids;
  Experiment* current = nullptr;

  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '#') {
      // provenance comment: "# provenance: seed=<n> config=<hex>"
      const auto seed_at = line.find("seed=");
      const auto cfg_at = line.find("config=");
      if (seed_at != std::string_view::npos) {
        ds.seed = std::strtoull(std::string(line.substr(seed_at + 5)).c_str(),
                                nullptr, 10);
      }
      if (cfg_at != std::string_view::npos) {
        auto rest = line.substr(cfg_at + 7);
        const auto space = rest.find(' ');
        ds.config_digest = std::string(
            space == std::string_view::npos ? rest : rest.substr(0, space));
      }
      continue;
    }

    if (!header_seen) {
      if (line != kCsvHeader) {
        throw DatasetError("line " + std::to_string(line_no) +
                           ": header mismatch; expected '" +
                           std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }

    const auto fields = csv_detail::split(line);
    if (fields.size() != 21) {
      throw DatasetError("line " + std::to_string(line_no) + ": expected 21 "
                         "fields, got " + std::to_string(fields.size()));
    }
    using csv_detail::parse_bool;
    using csv_detail::parse_int;
    using csv_detail::parse_num;
    const int id = parse_int(fields[0], line_no, "experiment_id");
    const int scenario = parse_int(fields[1], line_no, "scenario");
    const int proximity = parse_int(fields[2], line_no, "proximity");
    const int door_start = parse_int(fields[3], line_no, "door_start");
    const int door_end = parse_int(fields[4], line_no, "door_end");
    if (scenario < 0 || scenario >= kScenarioCount) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": scenario out of range");
    }
    if (proximity < 0 || proximity >= kProximityBandCount) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": proximity out of range");
    }
    if (door_start == door_end || door_start < 0 || door_start > 2 ||
        door_end < 0 || door_end > 2) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": bad door pair");
    }

    Observation o;
    o.t = parse_num(fields[5], line_no, "t");
    o.ir_rear_medium = parse_int(fields[6], line_no, "ir_rear_medium");
    o.ir_rear_long = parse_int(fields[7], line_no, "ir_rear_long");
    o.photo = parse_int(fields[8], line_no, "photo");
    o.therm_a = parse_num(fields[9], line_no, "therm_a");
    o.therm_b = parse_num(fields[10], line_no, "therm_b");
    o.cliff_left = parse_int(fields[11], line_no, "cliff_left");
    o.cliff_front_left = parse_int(fields[12], line_no, "cliff_front_left");
    o.cliff_front_right = parse_int(fields[13], line_no, "cliff_front_right");
    o.cliff_right = parse_int(fields[14], line_no, "cliff_right");
    o.wall = parse_int(fields[15], line_no, "wall");
    o.bump_left = parse_bool(fields[16], line_no, "bump_left");
    o.bump_right = parse_bool(fields[17], line_no, "bump_right");
    o.wheel_left = parse_bool(fields[18], line_no, "wheel_left");
    o.wheel_right = parse_bool(fields[19], line_no, "wheel_right");
    o.wheel_caster = parse_bool(fields[20], line_no, "wheel_caster");
    if (const auto verdict = validate_observation(o); !verdict) {
      throw DatasetError("line " + std::to_string(line_no) + ": " +
                         verdict.message);
    }

    if (current == nullptr || current->id != id) {
      if (finished_ids.count(id) > 0) {
        throw DatasetError("line " + std::to_string(line_no) +
                           ": experiment id " + std::to_string(id) +
                           " appears in non-contiguous blocks");
      }
      if (current != nullptr) finished_ids.insert(current->id);
      ds.experiments.push_back(
          Experiment{id, scenario, proximity, door_start, door_end, {}});
      current = &ds.experiments.back();
    } else {
      if (current->scenario != scenario || current->proximity != proximity ||
          current->door_start != door_start || current->door_end != door_end) {
        throw DatasetError("line " + std::to_string(line_no) +
                           ": labels change within experiment " +
                           std::to_string(id));
      }
      if (o.t <= current->observations.back().t) {
        throw DatasetError("line " + std::to_string(line_no) +
                           ": timestamps not strictly increasing in "
                           "experiment " + std::to_string(id));
      }
    }
    current->observations.push_back(o);
  }
  if (!header_seen) throw DatasetError("missing header line");
  if (ds.experiments.empty()) throw DatasetError("dataset has no rows");
  return ds;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset_csv(buf.str());
}

// ---------------------------------------------------------------------------
// Normalization statistics, computed on training data only
// ---------------------------------------------------------------------------

using FeatureRow = std::array<double, kSensorCount>;

// Per-variable mean and sample standard deviation over the 10 numeric
// sensors. Boolean sensors pass through unscaled. A constant column keeps
// std 0 and is flagged; its z-score is defined as 0.
struct NormalizationStats {
  std::array<double, kNumericSensorCount> mean{};
  std::array<double, kNumericSensorCount> stddev{};
  std::array<bool, kNumericSensorCount> constant{};

  bool any_constant() const {
    for (bool c : constant)
      if (c) return true;
    return false;
  }
};

inline NormalizationStats compute_stats(std::span<const FeatureRow> rows) {
  if (rows.size() < 2) {
    throw std::invalid_argument("compute_stats needs at least 2 observations");
  }
  NormalizationStats st;
  const double n = static_cast<double>(rows.size());
  for (int f = 0; f < kNumericSensorCount; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    double sum = 0.0;
    for (const auto& r : rows) sum += r[fi];
    st.mean[fi] = sum / n;
    double ss = 0.0;
    for (const auto& r : rows) {
      const double d = r[fi] - st.mean[fi];
      ss += d * d;
    }
    st.stddev[fi] = std::sqrt(ss / (n - 1.0));
    st.constant[fi] = st.stddev[fi] == 0.0;
  }
  return st;
}

inline NormalizationStats compute_stats(std::span<const Observation> obs) {
  std::vector<FeatureRow> rows;
  rows.reserve(obs.size());
  for (const auto& o : obs) rows.push_back(o.features());
  return compute_stats(std::span<const FeatureRow>(rows));
}

// z-scores the numeric variables, passes booleans through as 0/1, and maps
// constant columns to 0.
inline FeatureRow normalize(const FeatureRow& row,
                            const NormalizationStats& st) {
  FeatureRow out = row;
  for (std::size_t f = 0; f < kNumericSensorCount; ++f) {
    out[f] = st.constant[f] ? 0.0 : (row[f] - st.mean[f]) / st.stddev[f];
  }
  return out;
}

inline FeatureRow normalize(const Observation& obs,
                            const NormalizationStats& st) {
  return normalize(obs.features(), st);
}

inline FeatureRow denormalize(const FeatureRow& row,
                              const NormalizationStats& st) {
  FeatureRow out = row;
  for (std::size_t f = 0; f < kNumericSensorCount; ++f) {
    if (!st.constant[f]) out[f] = row[f] * st.stddev[f] + st.mean[f];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Condition-stratified 10-fold cross-validation plan
// ---------------------------------------------------------------------------

struct Fold {
  std::vector<int> validation_ids;
  std::vector<int> training_ids;
};

struct FoldPlan {
  int k = 10;
  std::vector<Fold> folds;
};

// Within every scenario-proximity condition the experiments are shuffled
// and dealt one per fold, so each validation set holds exactly one
// experiment per condition and the folds partition the campaign.
inline FoldPlan make_folds(const Dataset& ds, int k, Rng& rng) {
  if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
  std::map<int, std::vector<int>> by_condition;
  for (const auto& exp : ds.experiments) {
    by_condition[exp.condition()].push_back(exp.id);
  }
  for (auto& [cond, ids] : by_condition) {
    if (static_cast<int>(ids.size()) != k) {
      throw std::invalid_argument(
          "make_folds: condition " + std::to_string(cond) + " has " +
          std::to_string(ids.size()) + " experiments, expected " +
          std::to_string(k));
    }
    rng.shuffle(ids);
  }
  FoldPlan plan;
  plan.k = k;
  plan.folds.resize(static_cast<std::size_t>(k));
  std::vector<int> all_ids;
  for (const auto& exp : ds.experiments) all_ids.push_back(exp.id);
  std::sort(all_ids.begin(), all_ids.end());
  for (int f = 0; f < k; ++f) {
    auto& fold = plan.folds[static_cast<std::size_t>(f)];
    for (const auto& [cond, ids] : by_condition) {
      fold.validation_ids.push_back(ids[static_cast<std::size_t>(f)]);
    }
    std::sort(fold.validation_ids.begin(), fold.validation_ids.end());
    std::set<int> in_val(fold.validation_ids.begin(),
                         fold.validation_ids.end());
    for (int id : all_ids) {
      if (in_val.count(id) == 0) fold.training_ids.push_back(id);
    }
  }
  return plan;
}

// Audit format: one line per fold listing its validation experiments.
inline std::string foldplan_to_text(const FoldPlan& plan) {
  std::ostringstream out;
  out << "k = " << plan.k << "\n";
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    out << "fold " << f << " validation:";
    for (int id : plan.folds[f].validation_ids) out << ' ' << id;
    out << "\n";
  }
  return out.str();
}

}  // namespace senselab
