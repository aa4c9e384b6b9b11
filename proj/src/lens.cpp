#include "xalign/lens.hpp"

#include <cmath>

#include "xalign/error.hpp"

namespace xalign {

TrackedSets build_tracked_sets(const Backend& backend, const AnswerSet& target_set, const AnswerSet& latent_set,
                               const std::string& correct_label) {
  if (target_set.task != latent_set.task) throw DataError("tracked answer sets belong to different tasks");
  if (target_set.surfaces.size() != latent_set.surfaces.size())
    throw DataError("tracked answer sets have different label counts");
  for (std::size_t i = 0; i < target_set.surfaces.size(); ++i)
    if (target_set.surfaces[i].first != latent_set.surfaces[i].first)
      throw DataError("tracked answer sets disagree on label ids");

  auto first_token = [&](const std::string& surface) {
    const auto ids = backend.tokenize(surface).ids;
    if (ids.empty()) throw DataError("answer surface '" + surface + "' tokenizes to nothing");
    return ids.front();
  };

  TrackedSets t;
  bool found = false;
  for (std::size_t i = 0; i < target_set.surfaces.size(); ++i) {
    const auto& label = target_set.surfaces[i].first;
    const auto target_id = first_token(target_set.surfaces[i].second);
    const auto latent_id = first_token(latent_set.surfaces[i].second);
    t.target_all.insert(target_id);
    t.latent_all.insert(latent_id);
    if (label == correct_label) {
      t.target_correct.insert(target_id);
      t.latent_correct.insert(latent_id);
      found = true;
    }
  }
  if (!found) throw LabelError("label '" + correct_label + "' is not in the tracked answer sets");
  for (auto id : t.target_all)
    if (t.latent_all.contains(id)) t.prefix_overlap = true;
  return t;
}

double tracked_mass(std::span<const double> probs, const std::set<TokenId>& ids) {
  double s = 0.0;
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= probs.size()) throw BackendError("tracked token outside vocabulary");
    s += probs[static_cast<std::size_t>(id)];
  }
  return s;
}

LayerTrace layer_probabilities(const ModelHandle& handle, std::string_view prompt, const TrackedSets& tracked) {
  const auto trace = forward_trace(handle, prompt);
  LayerTrace out;
  for (const auto& hidden : trace.hidden) {
    const auto probs = softmax(unembed(handle, hidden));
    out.target_correct.push_back(tracked_mass(probs, tracked.target_correct));
    out.latent_correct.push_back(tracked_mass(probs, tracked.latent_correct));
    out.target_all.push_back(tracked_mass(probs, tracked.target_all));
    out.latent_all.push_back(tracked_mass(probs, tracked.latent_all));
  }
  return out;
}

LayerTrace aggregate_traces(const std::vector<LayerTrace>& traces) {
  if (traces.empty()) throw DataError("no traces to aggregate");
  const std::size_t n = traces.front().layers();
  LayerTrace out;
  for (auto* series : {&out.target_correct, &out.latent_correct, &out.target_all, &out.latent_all})
    series->assign(n, 0.0);
  for (const auto& t : traces) {
    if (t.layers() != n || t.latent_correct.size() != n || t.target_all.size() != n || t.latent_all.size() != n)
      throw DataError("traces have different layer counts");
    for (std::size_t l = 0; l < n; ++l) {
      out.target_correct[l] += t.target_correct[l];
      out.latent_correct[l] += t.latent_correct[l];
      out.target_all[l] += t.target_all[l];
      out.latent_all[l] += t.latent_all[l];
    }
  }
  const double k = static_cast<double>(traces.size());
  for (auto* series : {&out.target_correct, &out.latent_correct, &out.target_all, &out.latent_all})
    for (double& v : *series) v /= k;
  return out;
}

std::vector<std::string> trace_violations(const LayerTrace& t, double tolerance) {
  std::vector<std::string> out;
  const std::size_t n = t.layers();
  if (t.latent_correct.size() != n || t.target_all.size() != n || t.latent_all.size() != n) {
    out.push_back("series lengths differ");
    return out;
  }
  for (std::size_t l = 0; l < n; ++l) {
    const std::string at = " at layer " + std::to_string(l);
    for (double v : {t.target_correct[l], t.latent_correct[l], t.target_all[l], t.latent_all[l]})
      if (!(v >= -tolerance && v <= 1.0 + tolerance)) out.push_back("probability out of [0,1]" + at);
    if (t.target_correct[l] > t.target_all[l] + tolerance) out.push_back("target_correct > target_all" + at);
    if (t.latent_correct[l] > t.latent_all[l] + tolerance) out.push_back("latent_correct > latent_all" + at);
  }
  return out;
}

nlohmann::ordered_json trace_to_json(const LayerTrace& trace, bool prefix_overlap) {
  nlohmann::ordered_json series;
  series["target_correct"] = trace.target_correct;
  series["latent_correct"] = trace.latent_correct;
  series["target_all"] = trace.target_all;
  series["latent_all"] = trace.latent_all;
  nlohmann::ordered_json j;
  j["layers"] = trace.layers();
  j["series"] = series;
  j["prefix_overlap"] = prefix_overlap;
  return j;
}

LayerTrace trace_from_json(const nlohmann::json& j) {
  try {
    LayerTrace t;
    const auto& s = j.at("series");
    t.target_correct = s.at("target_correct").get<std::vector<double>>();
    t.latent_correct = s.at("latent_correct").get<std::vector<double>>();
    t.target_all = s.at("target_all").get<std::vector<double>>();
    t.latent_all = s.at("latent_all").get<std::vector<double>>();
    if (j.at("layers").get<std::size_t>() != t.layers()) throw DataError("trace 'layers' disagrees with its series");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed trace: ") + e.what());
  }
}

}  // namespace xalign
