#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucut/hnc.hpp"

namespace pucut::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

// Settings for `run`, merged from an optional JSON config file and flags
// (flags win).
struct RunConfig {
  std::optional<double> pi;
  std::vector<std::size_t> k_list;
  std::optional<double> sigma;
  double lambda_start = 0.0;
  double lambda_max = hnc::kDefaultLambdaStop;
  double lambda_step = hnc::kDefaultLambdaStep;
  double labeled_fraction = 0.6;
  std::uint64_t seed = 0;
  std::optional<std::string> weights_path;
  bool standardize = true;
  bool complete_degrees = false;

  // Applies the keys present in a JSON object; throws UsageError.
  void merge_json(const std::string& text);
  // Range checks that do not depend on the data; throws UsageError.
  void validate() const;
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Worker cap from PUCUT_THREADS, defaulting to the hardware concurrency.
unsigned thread_budget();

// Entry point. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace pucut::cli
