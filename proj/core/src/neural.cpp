#include "lbsim/neural.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "lbsim/errors.hpp"
#include "lbsim/heuristics.hpp"

namespace lbsim {

namespace {
using nlohmann::json;
}  // namespace

void PolicyGenome::validate() const {
  if (weights.size() != static_cast<size_t>(kGenomeSize)) {
    throw ConfigError("genome must hold exactly " + std::to_string(kGenomeSize) +
                      " weights, got " + std::to_string(weights.size()));
  }
  for (const double w : weights) {
    if (!std::isfinite(w)) throw ConfigError("genome contains a non-finite weight");
  }
}

void save_genome(const std::filesystem::path& path, const PolicyGenome& genome) {
  genome.validate();
  json doc;
  doc["format"] = kGenomeFormat;
  doc["hidden"] = kHiddenDim;
  doc["input"] = kInputDim;
  doc["weights"] = genome.weights;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

PolicyGenome load_genome(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open genome file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("bad genome JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.contains("format") || doc["format"] != kGenomeFormat) {
    throw ConfigError(path.string() + ": unknown genome format");
  }
  if (doc.value("hidden", 0) != kHiddenDim || doc.value("input", 0) != kInputDim) {
    throw ConfigError(path.string() + ": genome dimensions do not match this network");
  }
  PolicyGenome genome;
  try {
    genome.weights = doc.at("weights").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": bad weights array: " + e.what());
  }
  genome.validate();
  return genome;
}

StateFeatures featurize(const ClusterState& state, const UserRequest& request,
                        const SimulationConfig& config, int64_t demand_scale) {
  if (state.servers.empty()) throw ConfigError("featurize: no servers");
  if (demand_scale <= 0) throw ConfigError("featurize: demand_scale must be positive");
  if (lookahead_size(config) != kServerFeatureDim) {
    throw ConfigError("featurize: config.future_sample must be " +
                      std::to_string(kLookaheadOffsets));
  }

  const size_t n = state.servers.size();
  StateFeatures features;
  for (int r = 0; r < ResourceVector::kDims; ++r) {
    features.request[static_cast<size_t>(r)] =
        static_cast<double>(request.demand[r]) / static_cast<double>(demand_scale);
  }
  features.request[4] = static_cast<double>(request.predicted_duration) /
                        static_cast<double>(config.predicted_range_steps());

  features.per_server.resize(n * kServerFeatureDim);
  for (size_t i = 0; i < n; ++i) {
    lookahead_features(state.servers[i], state.clock, config,
                       std::span<double>(features.per_server)
                           .subspan(i * kServerFeatureDim, kServerFeatureDim));
  }

  // Mean then population std per coordinate, over the 40 resource-lookahead
  // entries only.
  constexpr int kResourceEntries = kServerFeatureDim - 1;
  features.global.resize(kGlobalFeatureDim);
  for (int j = 0; j < kResourceEntries; ++j) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mean += features.per_server[i * kServerFeatureDim + static_cast<size_t>(j)];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d =
          features.per_server[i * kServerFeatureDim + static_cast<size_t>(j)] - mean;
      var += d * d;
    }
    features.global[static_cast<size_t>(j)] = mean;
    features.global[static_cast<size_t>(kResourceEntries + j)] =
        std::sqrt(var / static_cast<double>(n));
  }
  return features;
}

void assemble_input(const StateFeatures& features, int server, std::span<double> out) {
  if (out.size() != static_cast<size_t>(kInputDim)) {
    throw ConfigError("assemble_input: output span has wrong size");
  }
  size_t pos = 0;
  for (const double v : features.request) out[pos++] = v;
  for (const double v : features.server(server)) out[pos++] = v;
  for (const double v : features.global) out[pos++] = v;
}

double forward(const PolicyGenome& genome, std::span<const double> input) {
  if (genome.weights.size() != static_cast<size_t>(kGenomeSize)) {
    throw std::invalid_argument("forward: genome has wrong length");
  }
  if (input.size() != static_cast<size_t>(kInputDim)) {
    throw std::invalid_argument("forward: input must hold " + std::to_string(kInputDim) +
                                " values");
  }
  for (const double v : input) {
    if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite input");
  }

  const double* w = genome.weights.data();
  const double* hidden_bias = w + kInputDim * kHiddenDim;
  const double* out_weights = hidden_bias + kHiddenDim;
  const double out_bias = out_weights[kHiddenDim];

  double score = out_bias;
  for (int j = 0; j < kHiddenDim; ++j) {
    double acc = hidden_bias[j];
    for (int i = 0; i < kInputDim; ++i) {
      acc += w[i * kHiddenDim + j] * input[static_cast<size_t>(i)];
    }
    if (acc > 0) score += out_weights[j] * acc;  // relu
  }
  return score;
}

RoutingDecision select_action(const PolicyGenome& genome, const ClusterState& state,
                              const UserRequest& request, const SimulationConfig& config,
                              int64_t demand_scale, MaskMode mask_mode) {
  const auto candidates = mask_actions(state.servers, request.demand);
  if (candidates.empty()) return RoutingDecision::block();
  if (candidates.size() == 1 && mask_mode == MaskMode::kExclude) {
    return RoutingDecision::route_to(candidates[0]);
  }

  const StateFeatures features = featurize(state, request, config, demand_scale);
  std::array<double, kInputDim> input;

  if (mask_mode == MaskMode::kExclude) {
    int best = candidates[0];
    double best_score = -std::numeric_limits<double>::infinity();
    for (const int i : candidates) {
      assemble_input(features, i, input);
      const double score = forward(genome, input);
      if (score > best_score) {  // strict: ties keep the lowest index
        best_score = score;
        best = i;
      }
    }
    return RoutingDecision::route_to(best);
  }

  // MaskMode::kZero, the literal variant: infeasible scores are pinned to 0
  // and stay in the argmax; a blocked winner blocks the request.
  size_t next_candidate = 0;
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(state.servers.size()); ++i) {
    double score = 0.0;
    if (next_candidate < candidates.size() && candidates[next_candidate] == i) {
      ++next_candidate;
      assemble_input(features, i, input);
      score = forward(genome, input);
    }
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  const bool best_feasible =
      std::find(candidates.begin(), candidates.end(), best) != candidates.end();
  return best_feasible ? RoutingDecision::route_to(best) : RoutingDecision::block();
}

NeuralPolicy::NeuralPolicy(PolicyGenome genome, const SimulationConfig& config,
                           int64_t demand_scale, MaskMode mask_mode)
    : genome_(std::move(genome)),
      config_(config),
      demand_scale_(demand_scale),
      mask_mode_(mask_mode) {
  genome_.validate();
  config_.validate();
  if (lookahead_size(config_) != kServerFeatureDim) {
    throw ConfigError("neural policy requires future_sample == " +
                      std::to_string(kLookaheadOffsets));
  }
  if (demand_scale_ <= 0) throw ConfigError("neural policy: demand_scale must be positive");
}

RoutingDecision NeuralPolicy::decide(const ClusterState& state, const UserRequest& request) {
  return select_action(genome_, state, request, config_, demand_scale_, mask_mode_);
}

}  // namespace lbsim
