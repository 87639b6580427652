#include "pucut/diagnostics.hpp"

#include <json.hpp>

namespace pucut {

namespace {

using Json = nlohmann::ordered_json;

Json sweep_json(const std::vector<SweepPoint>& points) {
  Json out = Json::array();
  for (const auto& p : points) {
    out.push_back({{"lambda", p.lambda},
                   {"positive_count", p.positive_count},
                   {"positive_fraction", p.positive_fraction},
                   {"cut_value", p.cut_value}});
  }
  return out;
}

Json candidate_json(const CandidatePartition& c) {
  return {{"stage", c.stage},
          {"k", c.k},
          {"lambda", c.lambda},
          {"positive_count", c.positive_count},
          {"positive_fraction", c.positive_fraction},
          {"cut_value", c.cut_value}};
}

}  // namespace

std::string diagnostics_json(const hnc::Result& result, const SampleSet& samples,
                             const PUSplit& split, double pi) {
  Json root;
  root["pi"] = pi;
  root["samples"] = samples.rows;
  root["labeled_positive"] = split.positives.size();
  root["unlabeled"] = split.unlabeled.size();

  Json runs = Json::array();
  for (const auto& k : result.per_k) {
    Json run;
    run["k"] = k.k;
    run["edges"] = k.edge_count;
    run["stage1"] = sweep_json(k.stage1);
    run["stage2"] = sweep_json(k.stage2);
    Json ranking = Json::array();
    for (std::size_t r = 0; r < k.ranking_nodes.size(); ++r) {
      ranking.push_back({{"id", samples.ids[k.ranking_nodes[r]]},
                         {"first_sink_index", k.first_sink_index[r]}});
    }
    run["ranking"] = std::move(ranking);
    Json negatives = Json::array();
    for (const int u : k.likely_negative) negatives.push_back(samples.ids[u]);
    run["likely_negative"] = std::move(negatives);
    run["candidate"] = candidate_json(k.candidate);
    runs.push_back(std::move(run));
  }
  root["runs"] = std::move(runs);
  root["chosen"] = candidate_json(result.chosen);

  Json predictions = Json::array();
  for (std::size_t r = 0; r < result.unlabeled.size(); ++r) {
    predictions.push_back({{"id", samples.ids[result.unlabeled[r]]},
                           {"predicted_label", result.predictions[r]}});
  }
  root["predictions"] = std::move(predictions);
  return root.dump(1) + "\n";
}

}  // namespace pucut
