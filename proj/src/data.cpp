#include "pucut/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "pucut/error.hpp"

namespace pucut::data {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& value) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && first != last;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ", line " + std::to_string(line) + ": ";
}

int parse_label(const std::string& cell, const std::string& context) {
  double value = 0.0;
  if (!parse_double(cell, value) || (value != 1.0 && value != -1.0)) {
    throw DataError(context + "label must be 1 or -1, got '" + cell + "'");
  }
  return value > 0 ? 1 : -1;
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

}  // namespace

SampleSet read_csv(std::istream& in, bool require_labels, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": empty dataset (no header)");
  ++line_no;
  const auto header = split_row(line);
  std::optional<std::size_t> id_col;
  std::optional<std::size_t> label_col;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = lower(header[c]);
    if (name == "id" && !id_col) {
      id_col = c;
    } else if (name == "label" && !label_col) {
      label_col = c;
    } else {
      feature_cols.push_back(c);
    }
  }
  if (require_labels && !label_col) throw DataError(source + ": missing 'label' column");
  if (feature_cols.empty()) throw DataError(source + ": no feature columns");

  SampleSet samples;
  samples.cols = feature_cols.size();
  std::vector<int> truth;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    const auto context = where(source, line_no);
    if (cells.size() != header.size()) {
      throw DataError(context + "expected " + std::to_string(header.size()) +
                      " columns, found " + std::to_string(cells.size()));
    }
    for (const std::size_t c : feature_cols) {
      double value = 0.0;
      if (!parse_double(cells[c], value) || !std::isfinite(value)) {
        throw DataError(context + "non-numeric feature '" + cells[c] + "' in column '" +
                        header[c] + "'");
      }
      samples.features.push_back(value);
    }
    samples.ids.push_back(id_col ? cells[*id_col] : std::to_string(samples.rows));
    if (label_col) truth.push_back(parse_label(cells[*label_col], context));
    ++samples.rows;
  }
  if (samples.rows == 0) throw DataError(source + ": empty dataset");
  if (label_col) samples.truth = std::move(truth);
  try {
    samples.validate();
  } catch (const InputError& e) {
    throw DataError(source + ": " + e.what());
  }
  return samples;
}

SampleSet load_csv(const std::string& path, bool require_labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in, require_labels, path);
}

void write_csv(std::ostream& out, const SampleSet& samples) {
  out << "id";
  for (std::size_t h = 0; h < samples.cols; ++h) out << ",f" << h;
  if (samples.truth) out << ",label";
  out << "\n";
  char buffer[64];
  for (std::size_t i = 0; i < samples.rows; ++i) {
    out << samples.ids[i];
    for (std::size_t h = 0; h < samples.cols; ++h) {
      const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, samples.at(i, h));
      out << ',' << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer));
    }
    if (samples.truth) out << ',' << (*samples.truth)[i];
    out << "\n";
  }
}

PUSplit pu_split(std::span<const int> truth, double labeled_fraction, std::uint64_t seed) {
  if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0)) {
    throw InputError("labeled fraction must lie in (0, 1)");
  }
  std::vector<int> positives;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) positives.push_back(static_cast<int>(i));
  }
  if (positives.empty()) throw InputError("cannot split: no positive samples");
  const std::size_t count =
      std::clamp<std::size_t>(round_half_up(labeled_fraction * static_cast<double>(positives.size())),
                              1, positives.size());
  std::mt19937_64 rng(seed);
  std::shuffle(positives.begin(), positives.end(), rng);

  std::vector<char> labeled(truth.size(), 0);
  for (std::size_t r = 0; r < count; ++r) labeled[positives[r]] = 1;
  PUSplit split;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    (labeled[i] ? split.positives : split.unlabeled).push_back(static_cast<int>(i));
  }
  split.validate(static_cast<int>(truth.size()));
  return split;
}

void write_mask(std::ostream& out, const SampleSet& samples, const PUSplit& split) {
  std::vector<char> labeled(samples.rows, 0);
  for (const int p : split.positives) labeled[p] = 1;
  out << "id,labeled\n";
  for (std::size_t i = 0; i < samples.rows; ++i) {
    out << samples.ids[i] << ',' << (labeled[i] ? 1 : 0) << "\n";
  }
}

PUSplit read_mask(std::istream& in, const SampleSet& samples, const std::string& source) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < samples.rows; ++i) index.emplace(samples.ids[i], static_cast<int>(i));
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": empty mask file");
  ++line_no;
  std::vector<int> state(samples.rows, -1);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    const auto context = where(source, line_no);
    if (cells.size() != 2) throw DataError(context + "expected 'id,labeled'");
    const auto it = index.find(cells[0]);
    if (it == index.end()) throw DataError(context + "unknown id '" + cells[0] + "'");
    if (state[it->second] != -1) throw DataError(context + "duplicate id '" + cells[0] + "'");
    if (cells[1] != "0" && cells[1] != "1") throw DataError(context + "labeled must be 0 or 1");
    state[it->second] = cells[1] == "1" ? 1 : 0;
  }
  PUSplit split;
  for (std::size_t i = 0; i < samples.rows; ++i) {
    if (state[i] == -1) throw DataError(source + ": id '" + samples.ids[i] + "' missing from mask");
    (state[i] ? split.positives : split.unlabeled).push_back(static_cast<int>(i));
  }
  if (samples.truth) {
    for (const int p : split.positives) {
      if ((*samples.truth)[p] != 1) {
        throw DataError(source + ": labeled sample '" + samples.ids[p] + "' is not positive");
      }
    }
  }
  try {
    split.validate(static_cast<int>(samples.rows));
  } catch (const InputError& e) {
    throw DataError(source + ": " + e.what());
  }
  return split;
}

PUSplit load_mask(const std::string& path, const SampleSet& samples) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_mask(in, samples, path);
}

SampleSet generate_synthetic(const SyntheticConfig& config) {
  if (config.n < 2) throw InputError("synthetic data needs n >= 2");
  if (config.h < 1) throw InputError("synthetic data needs h >= 1");
  if (!(config.pi > 0.0 && config.pi < 1.0)) throw InputError("pi must lie in (0, 1)");
  if (config.clusters_per_class < 1) throw InputError("clusters per class must be >= 1");
  if (!(config.class_sep >= 0.0) || !std::isfinite(config.class_sep)) {
    throw InputError("class separation must be finite and nonnegative");
  }
  const std::size_t n_pos = std::clamp<std::size_t>(
      round_half_up(config.pi * static_cast<double>(config.n)), 1, config.n - 1);
  const std::size_t clusters = 2 * config.clusters_per_class;
  const std::size_t h = config.h;

  std::mt19937_64 rng(config.seed);
  std::vector<std::vector<double>> centers;
  const bool enough_vertices = h >= 63 || (std::uint64_t{1} << h) >= clusters;
  if (config.hypercube && enough_vertices) {
    std::bernoulli_distribution coin(0.5);
    std::set<std::vector<char>> used;
    while (centers.size() < clusters) {
      std::vector<char> signs(h);
      for (auto& s : signs) s = coin(rng) ? 1 : 0;
      if (!used.insert(signs).second) continue;
      std::vector<double> c(h);
      for (std::size_t d = 0; d < h; ++d) c[d] = signs[d] ? config.class_sep : -config.class_sep;
      centers.push_back(std::move(c));
    }
  } else {
    std::uniform_real_distribution<double> box(-config.class_sep, config.class_sep);
    for (std::size_t c = 0; c < clusters; ++c) {
      std::vector<double> center(h);
      for (auto& x : center) x = box(rng);
      centers.push_back(std::move(center));
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  rows.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const bool positive = i < n_pos;
    const std::size_t within = positive ? i : i - n_pos;
    const std::size_t cluster = (positive ? 0 : config.clusters_per_class) +
                                within % config.clusters_per_class;
    std::vector<double> x(h);
    for (std::size_t d = 0; d < h; ++d) x[d] = centers[cluster][d] + noise(rng);
    rows.push_back(std::move(x));
    labels.push_back(positive ? 1 : -1);
  }
  std::vector<std::size_t> order(config.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  SampleSet samples;
  samples.rows = config.n;
  samples.cols = h;
  samples.features.reserve(config.n * h);
  std::vector<int> truth;
  for (std::size_t r = 0; r < config.n; ++r) {
    const auto& x = rows[order[r]];
    samples.features.insert(samples.features.end(), x.begin(), x.end());
    samples.ids.push_back(std::to_string(r));
    truth.push_back(labels[order[r]]);
  }
  samples.truth = std::move(truth);
  return samples;
}

MetricsReport evaluate(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size()) {
    throw InputError("predictions and truth have different lengths");
  }
  MetricsReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool actual = truth[i] == 1;
    if (pred && actual) ++r.tp;
    if (!pred && !actual) ++r.tn;
    if (pred && !actual) ++r.fp;
    if (!pred && actual) ++r.fn;
  }
  const std::size_t total = truth.size();
  r.accuracy = total == 0 ? 0.0 : static_cast<double>(r.tp + r.tn) / static_cast<double>(total);
  if (r.tp + r.fn > 0 && r.tn + r.fp > 0) {
    r.balanced_accuracy = 0.5 * (static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) +
                                 static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fp));
  }
  return r;
}

void write_predictions(std::ostream& out, const SampleSet& samples,
                       std::span<const int> unlabeled, std::span<const int> predictions) {
  if (unlabeled.size() != predictions.size()) {
    throw InputError("one prediction per unlabeled sample is required");
  }
  out << "id,predicted_label\n";
  for (std::size_t r = 0; r < unlabeled.size(); ++r) {
    out << samples.ids[unlabeled[r]] << ',' << predictions[r] << "\n";
  }
}

Predictions read_predictions(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": empty predictions file");
  ++line_no;
  Predictions p;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    const auto context = where(source, line_no);
    if (cells.size() != 2) throw DataError(context + "expected 'id,predicted_label'");
    p.ids.push_back(cells[0]);
    p.labels.push_back(parse_label(cells[1], context));
  }
  return p;
}

MetricsReport evaluate_predictions(const Predictions& predictions, const SampleSet& truth) {
  if (!truth.truth) throw DataError("ground truth labels are required for evaluation");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < truth.rows; ++i) index.emplace(truth.ids[i], i);
  std::vector<char> seen(truth.rows, 0);
  std::vector<int> actual;
  for (const auto& id : predictions.ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw DataError("prediction id '" + id + "' not found in truth file");
    if (seen[it->second]) throw DataError("prediction id '" + id + "' appears twice");
    seen[it->second] = 1;
    actual.push_back((*truth.truth)[it->second]);
  }
  return evaluate(predictions.labels, actual);
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["tp"] = report.tp;
  j["tn"] = report.tn;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  j["count"] = report.tp + report.tn + report.fp + report.fn;
  j["accuracy"] = report.accuracy;
  if (report.balanced_accuracy) {
    j["balanced_accuracy"] = *report.balanced_accuracy;
  } else {
    j["balanced_accuracy"] = nullptr;
    j["balanced_accuracy_undefined"] = true;
  }
  return j.dump(2) + "\n";
}

std::string metrics_summary(const MetricsReport& report) {
  char buffer[128];
  if (report.balanced_accuracy) {
    std::snprintf(buffer, sizeof buffer, "accuracy %.2f  balanced_accuracy %.2f",
                  100.0 * report.accuracy, 100.0 * *report.balanced_accuracy);
  } else {
    std::snprintf(buffer, sizeof buffer, "accuracy %.2f  balanced_accuracy undefined",
                  100.0 * report.accuracy);
  }
  return buffer;
}

}  // namespace pucut::data
