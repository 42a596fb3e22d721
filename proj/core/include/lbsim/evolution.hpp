#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "lbsim/neural.hpp"
#include "lbsim/objectives.hpp"
#include "lbsim/workload.hpp"

namespace lbsim {

struct Individual {
  uint64_t id = 0;
  PolicyGenome genome;
  std::optional<Fitness> fitness;
  int64_t evaluated_scenario = -1;  // scenario id the fitness belongs to
  bool aborted = false;
  int rank = 0;         // 1-based front index once sorted
  double crowding = 0.0;
};

struct EvoConfig {
  int pop_size = 50;
  int elite_count = 25;
  int offspring_count = 25;
  double mutation_prob = 0.25;   // per-gene probability
  double mutation_sigma = 0.05;  // std dev of the per-gene Gaussian
  int64_t max_simulations = 750000;
  int64_t max_generations = 0;  // 0 = unbounded, the simulation budget governs
  bool resample_each_generation = false;  // fixed scenario by default
  double init_scale = 0.1;  // uniform init range [-init_scale, init_scale]

  void validate() const;  // throws ConfigError
};

// Strict Pareto dominance under minimization: a is no worse in both
// objectives and strictly better in at least one.
bool dominates(const Fitness& a, const Fitness& b);

struct SortedPopulation {
  std::vector<std::vector<size_t>> fronts;  // indices, each front in input order
  std::vector<int> rank;                    // 1-based
  std::vector<double> crowding;
};

// Front peeling: fronts[0] is the non-dominated set, fronts[k] is
// non-dominated once the earlier fronts are removed.
std::vector<std::vector<size_t>> fast_nondominated_sort(std::span<const Fitness> fitness);

// Per-objective neighbor gaps, boundary individuals get infinity; a
// degenerate objective range contributes nothing.
std::vector<double> crowding_distance(std::span<const Fitness> front);

SortedPopulation sort_and_crowd(std::span<const Fitness> fitness);

// Fills by ascending front rank; a partially admitted front is ordered by
// descending crowding distance, with remaining ties kept in input order.
std::vector<size_t> select_elites(const SortedPopulation& sorted, int elite_count);

// Single cut point uniform in [1, len-1]; children swap tails.
std::pair<PolicyGenome, PolicyGenome> crossover_onepoint(const PolicyGenome& a,
                                                         const PolicyGenome& b,
                                                         std::mt19937_64& rng);

// Each gene is independently replaced, with probability prob, by a draw from
// Gaussian(mean = current value, std dev = sigma).
void mutate_gaussian(PolicyGenome& genome, double prob, double sigma, std::mt19937_64& rng);

// One fixed scenario: every individual is scored on the same requests with
// the same policy seed, so fitness values are comparable within a
// generation.
struct EvaluationScenario {
  int64_t scenario_id = 0;
  std::vector<UserRequest> requests;
  uint64_t policy_seed = 0;
};

// Evaluates individuals that do not yet carry fitness for this scenario;
// results are independent of evaluation order and parallelism. Aborted
// episodes receive a penalty fitness of 10x the worst value observed in the
// batch, per objective. Returns the number of simulations executed.
int64_t evaluate_population(std::vector<Individual>& population,
                            const EvaluationScenario& scenario, const SimulationConfig& config,
                            int64_t demand_scale, MaskMode mask_mode, int parallelism);

struct TrainOptions {
  uint64_t master_seed = 0;
  std::filesystem::path out_dir;
  int parallelism = 1;
  MaskMode mask_mode = MaskMode::kExclude;
  // When set (e.g. an ingested trace), scenarios start from these requests
  // instead of generated ones; prediction noise is still applied per
  // scenario.
  std::optional<std::vector<UserRequest>> base_requests;
};

struct TrainResult {
  std::vector<Individual> population;
  std::vector<size_t> front;  // indices of the final non-dominated set
  std::vector<Fitness> initial_fitness;  // generation-0 population, for baselines
  int64_t generations = 0;
  int64_t simulations = 0;
};

// NSGA-II loop over genomes: evaluate, sort, crowd, keep the elites, breed
// offspring by one-point crossover plus Gaussian mutation, repeat until the
// simulation budget (or generation cap) is hit. Writes per-generation fronts
// (pareto_gen_<k>.json), the final front with genome files
// (pareto_final.json, genome_<id>.json) and convergence.csv under out_dir.
TrainResult train(const EvoConfig& evo, const WorkloadConfig& workload,
                  const SimulationConfig& sim, const TrainOptions& options);

}  // namespace lbsim
