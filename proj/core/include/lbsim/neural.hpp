#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lbsim/policy.hpp"

namespace lbsim {

// One scoring network is evaluated per candidate server with shared weights,
// so a single genome scales to any server count.
inline constexpr int kRequestFeatureDim = 5;
inline constexpr int kLookaheadOffsets = 10;  // the only h the network accepts
inline constexpr int kServerFeatureDim = 4 * kLookaheadOffsets + 1;      // 41
inline constexpr int kGlobalFeatureDim = 2 * 4 * kLookaheadOffsets;      // 80
inline constexpr int kInputDim =
    kRequestFeatureDim + kServerFeatureDim + kGlobalFeatureDim;          // 126
inline constexpr int kHiddenDim = 32;
inline constexpr int kGenomeSize = kInputDim * kHiddenDim + kHiddenDim + kHiddenDim + 1;

// Flat weight vector of the scoring network, in the fixed order
//   hidden matrix (input-major: [input * kHiddenDim + hidden]),
//   hidden bias (kHiddenDim),
//   output weights (kHiddenDim),
//   output bias (1),
// 4097 values total. This layout is frozen so genome files stay portable.
struct PolicyGenome {
  std::vector<double> weights;

  static PolicyGenome zeros() { return PolicyGenome{std::vector<double>(kGenomeSize, 0.0)}; }

  // Throws ConfigError unless the length is exactly kGenomeSize and every
  // value is finite.
  void validate() const;
};

// Genome file: {"format":"merl-lb-genome-v1","hidden":32,"input":126,
//               "weights":[...]}
inline constexpr const char* kGenomeFormat = "merl-lb-genome-v1";

void save_genome(const std::filesystem::path& path, const PolicyGenome& genome);
PolicyGenome load_genome(const std::filesystem::path& path);

// Featurization scales beyond what SimulationConfig carries: demands are
// normalized by the workload's max_res_req.
struct StateFeatures {
  std::array<double, kRequestFeatureDim> request{};
  std::vector<double> per_server;  // N x kServerFeatureDim
  std::vector<double> global;      // kGlobalFeatureDim

  std::span<const double> server(int i) const {
    return std::span<const double>(per_server).subspan(
        static_cast<size_t>(i) * kServerFeatureDim, kServerFeatureDim);
  }
};

// Request part: demands / demand_scale and predicted duration /
// predicted_range_steps. Per-server part: lookahead_features. Global part:
// per-coordinate mean then population std over the servers' 40 resource
// lookahead entries (the remaining-duration entry is excluded; 40+40 is the
// only split consistent with the 126-value input).
StateFeatures featurize(const ClusterState& state, const UserRequest& request,
                        const SimulationConfig& config, int64_t demand_scale);

// Writes request (+) server i (+) global into out (kInputDim values).
void assemble_input(const StateFeatures& features, int server, std::span<double> out);

// score = w_out . relu(W_hidden x + b_hidden) + b_out. Rejects non-finite
// inputs.
double forward(const PolicyGenome& genome, std::span<const double> input);

// How infeasible servers are removed from the argmax. kExclude drops them
// from the candidate set. kZero keeps every server but pins infeasible
// scores to 0; if the argmax still lands on an infeasible server the request
// is blocked (scores can be negative, so 0 may win).
enum class MaskMode {
  kExclude,
  kZero,
};

RoutingDecision select_action(const PolicyGenome& genome, const ClusterState& state,
                              const UserRequest& request, const SimulationConfig& config,
                              int64_t demand_scale, MaskMode mask_mode = MaskMode::kExclude);

class NeuralPolicy : public RoutingPolicy {
 public:
  // Requires config.future_sample == kLookaheadOffsets (the genome encodes a
  // fixed 126-value input). Throws ConfigError otherwise.
  NeuralPolicy(PolicyGenome genome, const SimulationConfig& config, int64_t demand_scale,
               MaskMode mask_mode = MaskMode::kExclude);

  RoutingDecision decide(const ClusterState& state, const UserRequest& request) override;
  std::string_view name() const override { return "neural"; }

  const PolicyGenome& genome() const { return genome_; }

 private:
  PolicyGenome genome_;
  SimulationConfig config_;
  int64_t demand_scale_;
  MaskMode mask_mode_;
};

}  // namespace lbsim
