#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pucut/data.hpp"
#include "pucut/diagnostics.hpp"
#include "pucut/error.hpp"

namespace pucut::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes to `path`, or to `fallback` when path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << text;
  if (!file) throw DataError("failed writing '" + path + "'");
}

struct SynthOptions {
  data::SyntheticConfig config;
  std::string out;
};

struct SplitOptions {
  std::string dataset;
  double labeled_fraction = 0.6;
  std::uint64_t seed = 0;
  std::string out;
};

struct RunOptions {
  std::string dataset;
  std::string config_path;
  std::string mask_path;
  std::string out;
  std::string diagnostics;
  RunConfig flags;
  std::string weights;
};

struct EvalOptions {
  std::string predictions;
  std::string truth;
  std::string out;
};

int cmd_synth(const SynthOptions& opts, std::ostream& out) {
  const SampleSet samples = data::generate_synthetic(opts.config);
  std::ostringstream text;
  data::write_csv(text, samples);
  emit(opts.out, text.str(), out);
  return kOk;
}

int cmd_split(const SplitOptions& opts, std::ostream& out) {
  const SampleSet samples = data::load_csv(opts.dataset, true);
  const PUSplit split = data::pu_split(*samples.truth, opts.labeled_fraction, opts.seed);
  std::ostringstream text;
  data::write_mask(text, samples, split);
  emit(opts.out, text.str(), out);
  return kOk;
}

int cmd_run(const RunConfig& config, const RunOptions& opts, std::ostream& out) {
  config.validate();
  if (!config.pi) throw UsageError("--pi is required");
  const bool have_mask = !opts.mask_path.empty();
  const SampleSet samples = data::load_csv(opts.dataset, !have_mask);
  const PUSplit split = have_mask
                            ? data::load_mask(opts.mask_path, samples)
                            : data::pu_split(*samples.truth, config.labeled_fraction, config.seed);

  hnc::Config hc;
  hc.pi = *config.pi;
  hc.k_list = config.k_list;
  hc.sigma = config.sigma;
  hc.lambda_start = config.lambda_start;
  hc.lambda_stop = config.lambda_max;
  hc.lambda_step = config.lambda_step;
  hc.standardize = config.standardize;
  hc.complete_graph_degrees = config.complete_degrees;
  hc.threads = thread_budget();
  if (config.weights_path) {
    hc.rho = FeatureWeights::load(*config.weights_path);
    if (hc.rho->size() != samples.cols) {
      throw DataError("feature weights file has " + std::to_string(hc.rho->size()) +
                      " entries, dataset has " + std::to_string(samples.cols) + " features");
    }
  }
  for (const std::size_t k : hc.k_list) {
    if (k >= samples.rows) {
      throw UsageError("--k " + std::to_string(k) + " must be smaller than N=" +
                       std::to_string(samples.rows));
    }
  }

  const hnc::Result result = hnc::run_2hnc(samples, split, hc);

  std::ostringstream predictions;
  data::write_predictions(predictions, samples, result.unlabeled, result.predictions);
  emit(opts.out, predictions.str(), out);
  if (!opts.diagnostics.empty()) {
    emit(opts.diagnostics, diagnostics_json(result, samples, split, hc.pi), out);
  }
  return kOk;
}

int cmd_eval(const EvalOptions& opts, std::ostream& out) {
  std::ifstream in(opts.predictions);
  if (!in) throw DataError("cannot open '" + opts.predictions + "'");
  const auto predictions = data::read_predictions(in, opts.predictions);
  const SampleSet truth = data::load_csv(opts.truth, true);
  const auto report = data::evaluate_predictions(predictions, truth);
  if (!opts.out.empty()) emit(opts.out, data::metrics_json(report), out);
  out << data::metrics_summary(report) << "\n";
  return kOk;
}

}  // namespace

void RunConfig::merge_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "pi") {
        pi = value.get<double>();
      } else if (key == "k" || key == "k_list") {
        k_list = value.is_array() ? value.get<std::vector<std::size_t>>()
                                  : std::vector<std::size_t>{value.get<std::size_t>()};
      } else if (key == "sigma") {
        sigma = value.get<double>();
      } else if (key == "lambda_start") {
        lambda_start = value.get<double>();
      } else if (key == "lambda_max" || key == "lambda_stop") {
        lambda_max = value.get<double>();
      } else if (key == "lambda_step") {
        lambda_step = value.get<double>();
      } else if (key == "labeled_fraction") {
        labeled_fraction = value.get<double>();
      } else if (key == "seed") {
        seed = value.get<std::uint64_t>();
      } else if (key == "weights" || key == "feature_weights_path") {
        weights_path = value.get<std::string>();
      } else if (key == "standardize") {
        standardize = value.get<bool>();
      } else if (key == "complete_degrees") {
        complete_degrees = value.get<bool>();
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

void RunConfig::validate() const {
  if (pi && !(*pi > 0.0 && *pi < 1.0)) throw UsageError("pi must lie in (0, 1)");
  if (!(lambda_step > 0.0)) throw UsageError("lambda step must be positive");
  if (!(lambda_start >= 0.0) || !(lambda_max >= lambda_start)) {
    throw UsageError("lambda grid requires 0 <= start <= max");
  }
  if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0)) {
    throw UsageError("labeled fraction must lie in (0, 1)");
  }
  if (sigma && !(*sigma > 0.0)) throw UsageError("sigma must be positive");
  for (const std::size_t k : k_list) {
    if (k < 1) throw UsageError("k must be at least 1");
  }
}

unsigned thread_budget() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PUCUT_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value >= 1) {
      threads = std::min(threads, static_cast<unsigned>(value));
    }
  }
  return threads;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"2-HNC positive-unlabeled classification via parametric minimum cuts",
               "pucut"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  synth_cmd->add_option("--n", synth.config.n, "Number of samples")->check(CLI::Range(2, 100000000));
  synth_cmd->add_option("--h", synth.config.h, "Number of features")->check(CLI::Range(1, 100000));
  synth_cmd->add_option("--pi", synth.config.pi, "Fraction of positive samples")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--clusters", synth.config.clusters_per_class, "Clusters per class")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--class-sep", synth.config.class_sep, "Class separation factor")
      ->check(CLI::NonNegativeNumber);
  bool no_hypercube = false;
  synth_cmd->add_flag("--no-hypercube", no_hypercube, "Place centers at random points");
  synth_cmd->add_option("--seed", synth.config.seed, "Random seed");
  synth_cmd->add_option("--out", synth.out, "Output CSV (default stdout)");

  SplitOptions split;
  auto* split_cmd = app.add_subcommand("split", "Write a PU label mask for a labeled dataset");
  split_cmd->add_option("dataset", split.dataset, "Labeled CSV")->required();
  split_cmd->add_option("--labeled-fraction", split.labeled_fraction,
                        "Fraction of positives that are labeled");
  split_cmd->add_option("--seed", split.seed, "Random seed");
  split_cmd->add_option("--out", split.out, "Output mask CSV (default stdout)");

  RunOptions run_opts;
  RunConfig& f = run_opts.flags;
  double pi = 0.0;
  double sigma = 0.0;
  std::vector<std::size_t> k_list;
  bool no_standardize = false;
  bool complete_degrees = false;
  auto* run_cmd = app.add_subcommand("run", "Run 2-HNC and write predictions for U");
  run_cmd->add_option("dataset", run_opts.dataset, "Input CSV")->required();
  auto* pi_opt = run_cmd->add_option("--pi", pi, "Class prior (fraction of positives)");
  auto* k_opt = run_cmd->add_option("--k", k_list, "kNN sparsification k (repeatable)");
  auto* sigma_opt = run_cmd->add_option("--sigma", sigma, "Gaussian kernel width");
  auto* lmax_opt = run_cmd->add_option("--lambda-max", f.lambda_max, "Largest lambda");
  auto* lstep_opt = run_cmd->add_option("--lambda-step", f.lambda_step, "Lambda increment");
  auto* frac_opt = run_cmd->add_option("--labeled-fraction", f.labeled_fraction,
                                       "Fraction of positives labeled when deriving the split");
  auto* seed_opt = run_cmd->add_option("--seed", f.seed, "Split seed");
  auto* weights_opt = run_cmd->add_option("--weights", run_opts.weights, "Feature weights file");
  auto* nostd_opt = run_cmd->add_flag("--no-standardize", no_standardize,
                                      "Use raw feature values");
  auto* full_opt = run_cmd->add_flag("--complete-degrees", complete_degrees,
                                     "Use degrees of the complete similarity graph");
  run_cmd->add_option("--mask", run_opts.mask_path, "Label mask CSV (id,labeled)");
  run_cmd->add_option("--config", run_opts.config_path, "JSON config file");
  run_cmd->add_option("--out", run_opts.out, "Predictions CSV (default stdout)");
  run_cmd->add_option("--diagnostics", run_opts.diagnostics, "Diagnostics JSON path");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("predictions", eval.predictions, "Predictions CSV")->required();
  eval_cmd->add_option("truth", eval.truth, "Labeled CSV")->required();
  eval_cmd->add_option("--out", eval.out, "Metrics JSON path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (synth_cmd->parsed()) {
      if (!(synth.config.pi > 0.0 && synth.config.pi < 1.0)) {
        throw UsageError("pi must lie in (0, 1)");
      }
      synth.config.hypercube = !no_hypercube;
      return cmd_synth(synth, out);
    }
    if (split_cmd->parsed()) {
      if (!(split.labeled_fraction > 0.0 && split.labeled_fraction < 1.0)) {
        throw UsageError("labeled fraction must lie in (0, 1)");
      }
      return cmd_split(split, out);
    }
    if (run_cmd->parsed()) {
      RunConfig config;
      if (!run_opts.config_path.empty()) config.merge_json(read_file(run_opts.config_path));
      if (pi_opt->count()) config.pi = pi;
      if (k_opt->count()) config.k_list = k_list;
      if (sigma_opt->count()) config.sigma = sigma;
      if (lmax_opt->count()) config.lambda_max = f.lambda_max;
      if (lstep_opt->count()) config.lambda_step = f.lambda_step;
      if (frac_opt->count()) config.labeled_fraction = f.labeled_fraction;
      if (seed_opt->count()) config.seed = f.seed;
      if (weights_opt->count()) config.weights_path = run_opts.weights;
      if (nostd_opt->count()) config.standardize = false;
      if (full_opt->count()) config.complete_degrees = true;
      return cmd_run(config, run_opts, out);
    }
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  err << "error: no subcommand\n";
  return kUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pucut::cli
