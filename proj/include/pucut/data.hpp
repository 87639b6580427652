#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pucut/hnc.hpp"
#include "pucut/simgraph.hpp"

namespace pucut::data {

// Comma-separated, '.' decimals, header required. A column named "id" gives
// sample ids (row numbers otherwise), a column named "label" gives ground
// truth in {1,-1}; every other column is a numeric feature.
SampleSet read_csv(std::istream& in, bool require_labels = false,
                   const std::string& source = "<input>");
SampleSet load_csv(const std::string& path, bool require_labels = false);
void write_csv(std::ostream& out, const SampleSet& samples);

// Labels round-half-up(fraction * P) positives, chosen by a seeded shuffle.
PUSplit pu_split(std::span<const int> truth, double labeled_fraction, std::uint64_t seed);

// Mask file: "id,labeled" rows with labeled in {0,1}.
void write_mask(std::ostream& out, const SampleSet& samples, const PUSplit& split);
PUSplit read_mask(std::istream& in, const SampleSet& samples,
                  const std::string& source = "<mask>");
PUSplit load_mask(const std::string& path, const SampleSet& samples);

struct SyntheticConfig {
  std::size_t n = 1000;
  std::size_t h = 5;
  double pi = 0.5;
  std::size_t clusters_per_class = 1;
  double class_sep = 1.0;
  bool hypercube = true;
  std::uint64_t seed = 0;
};

// Gaussian blobs (unit covariance). Centers sit on distinct vertices of the
// hypercube {-class_sep, class_sep}^h when hypercube is set and there are
// enough vertices, otherwise uniformly in [-class_sep, class_sep]^h.
// round(pi * n) positives; rows are shuffled.
SampleSet generate_synthetic(const SyntheticConfig& config);

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double accuracy = 0.0;
  // Empty when the unlabeled set lacks one of the classes.
  std::optional<double> balanced_accuracy;
};

// predictions and truth are aligned and use {1,-1}.
MetricsReport evaluate(std::span<const int> predictions, std::span<const int> truth);

// "id,predicted_label" rows for the unlabeled samples.
void write_predictions(std::ostream& out, const SampleSet& samples,
                       std::span<const int> unlabeled, std::span<const int> predictions);

struct Predictions {
  std::vector<std::string> ids;
  std::vector<int> labels;
};
Predictions read_predictions(std::istream& in, const std::string& source = "<predictions>");

// Aligns predictions to samples by id; throws DataError on unknown or
// duplicated ids or when ground truth is missing.
MetricsReport evaluate_predictions(const Predictions& predictions, const SampleSet& truth);

std::string metrics_json(const MetricsReport& report);
// "accuracy 96.15  balanced_accuracy 95.80" (percent, two decimals).
std::string metrics_summary(const MetricsReport& report);

}  // namespace pucut::data
