#include "lbsim/policy_factory.hpp"

#include "lbsim/errors.hpp"
#include "lbsim/heuristics.hpp"

namespace lbsim {

std::unique_ptr<RoutingPolicy> make_policy(const std::string& spec,
                                           const SimulationConfig& config, int64_t demand_scale,
                                           MaskMode mask_mode) {
  if (spec == "random") return std::make_unique<RandomPolicy>();
  if (spec == "round_robin") return std::make_unique<RoundRobinPolicy>();
  if (spec == "least_connection") return std::make_unique<LeastConnectionPolicy>();
  if (spec == "least_duration_gap") return std::make_unique<LeastDurationGapPolicy>();

  constexpr std::string_view kNeuralPrefix = "neural:";
  if (spec.rfind(kNeuralPrefix, 0) == 0) {
    const std::string path = spec.substr(kNeuralPrefix.size());
    if (path.empty()) throw ConfigError("policy \"neural:\" needs a genome file path");
    return std::make_unique<NeuralPolicy>(load_genome(path), config, demand_scale, mask_mode);
  }
  throw ConfigError("unknown policy \"" + spec +
                    "\" (expected random | round_robin | least_connection | "
                    "least_duration_gap | neural:<genome-file>)");
}

}  // namespace lbsim
