#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "xalign/backend.hpp"
#include "xalign/prompting.hpp"

namespace xalign {

// First-token ids of the answer surfaces on the target (input-language) side
// and the latent (English) side.
struct TrackedSets {
  std::set<TokenId> target_correct;
  std::set<TokenId> latent_correct;
  std::set<TokenId> target_all;
  std::set<TokenId> latent_all;
  bool prefix_overlap = false;  // target_all and latent_all share a token
};

TrackedSets build_tracked_sets(const Backend& backend, const AnswerSet& target_set, const AnswerSet& latent_set,
                               const std::string& correct_label);

// One value per layer, layer 0 being the embedding output.
struct LayerTrace {
  std::vector<double> target_correct;
  std::vector<double> latent_correct;
  std::vector<double> target_all;
  std::vector<double> latent_all;

  std::size_t layers() const noexcept { return target_correct.size(); }
};

double tracked_mass(std::span<const double> probs, const std::set<TokenId>& ids);

LayerTrace layer_probabilities(const ModelHandle& handle, std::string_view prompt, const TrackedSets& tracked);

// Per-layer mean of each series.
LayerTrace aggregate_traces(const std::vector<LayerTrace>& traces);

// Problems found in a trace: out-of-range values, correct above all, ragged series.
std::vector<std::string> trace_violations(const LayerTrace& trace, double tolerance = 1e-12);

nlohmann::ordered_json trace_to_json(const LayerTrace& trace, bool prefix_overlap);
LayerTrace trace_from_json(const nlohmann::json& j);

}  // namespace xalign
