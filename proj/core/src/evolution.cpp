#include "lbsim/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "lbsim/episode.hpp"
#include "lbsim/errors.hpp"
#include "lbsim/parallel.hpp"
#include "lbsim/rng.hpp"

namespace lbsim {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Fitness> fitness_view(const std::vector<Individual>& population) {
  std::vector<Fitness> out;
  out.reserve(population.size());
  for (const auto& ind : population) {
    if (!ind.fitness) throw std::logic_error("population member has no fitness");
    out.push_back(*ind.fitness);
  }
  return out;
}

std::string genome_filename(uint64_t id) { return "genome_" + std::to_string(id) + ".json"; }

json front_entry(const Individual& ind) {
  json e;
  e["id"] = ind.id;
  e["f_balance"] = ind.fitness->f_balance;
  e["f_idle"] = ind.fitness->f_idle;
  e["aborted"] = ind.aborted;
  e["genome_file"] = genome_filename(ind.id);
  return e;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void EvoConfig::validate() const {
  if (pop_size < 2) throw ConfigError("evolution: pop_size must be >= 2");
  if (elite_count < 1) throw ConfigError("evolution: elite_count must be >= 1");
  if (offspring_count < 1) throw ConfigError("evolution: offspring_count must be >= 1");
  if (elite_count + offspring_count != pop_size) {
    throw ConfigError("evolution: elite_count + offspring_count must equal pop_size");
  }
  if (mutation_prob < 0 || mutation_prob > 1) {
    throw ConfigError("evolution: mutation_prob must be in [0, 1]");
  }
  if (mutation_sigma <= 0) throw ConfigError("evolution: mutation_sigma must be > 0");
  if (max_simulations < pop_size) {
    throw ConfigError("evolution: max_simulations must cover at least one generation");
  }
  if (max_generations < 0) throw ConfigError("evolution: max_generations must be >= 0");
  if (init_scale <= 0) throw ConfigError("evolution: init_scale must be > 0");
}

bool dominates(const Fitness& a, const Fitness& b) {
  if (a.f_balance > b.f_balance || a.f_idle > b.f_idle) return false;
  return a.f_balance < b.f_balance || a.f_idle < b.f_idle;
}

std::vector<std::vector<size_t>> fast_nondominated_sort(std::span<const Fitness> fitness) {
  const size_t n = fitness.size();
  std::vector<std::vector<size_t>> dominated(n);
  std::vector<int> dominator_count(n, 0);
  std::vector<std::vector<size_t>> fronts;

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (dominates(fitness[i], fitness[j])) {
        dominated[i].push_back(j);
        ++dominator_count[j];
      } else if (dominates(fitness[j], fitness[i])) {
        dominated[j].push_back(i);
        ++dominator_count[i];
      }
    }
  }

  std::vector<size_t> current;
  for (size_t i = 0; i < n; ++i) {
    if (dominator_count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<size_t> next;
    for (const size_t i : current) {
      for (const size_t j : dominated[i]) {
        if (--dominator_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Fitness> front) {
  const size_t n = front.size();
  if (n == 0) throw std::invalid_argument("crowding_distance: empty front");
  if (n <= 2) return std::vector<double>(n, kInf);

  std::vector<double> distance(n, 0.0);
  std::vector<size_t> order(n);

  auto accumulate = [&](auto key) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return key(front[a]) < key(front[b]); });
    distance[order.front()] = kInf;
    distance[order.back()] = kInf;
    const double span = key(front[order.back()]) - key(front[order.front()]);
    if (span <= 0) return;  // degenerate objective range contributes nothing
    for (size_t k = 1; k + 1 < n; ++k) {
      distance[order[k]] += (key(front[order[k + 1]]) - key(front[order[k - 1]])) / span;
    }
  };
  accumulate([](const Fitness& f) { return f.f_balance; });
  accumulate([](const Fitness& f) { return f.f_idle; });
  return distance;
}

SortedPopulation sort_and_crowd(std::span<const Fitness> fitness) {
  SortedPopulation sorted;
  sorted.fronts = fast_nondominated_sort(fitness);
  sorted.rank.assign(fitness.size(), 0);
  sorted.crowding.assign(fitness.size(), 0.0);
  for (size_t f = 0; f < sorted.fronts.size(); ++f) {
    const auto& front = sorted.fronts[f];
    std::vector<Fitness> front_fitness;
    front_fitness.reserve(front.size());
    for (const size_t i : front) front_fitness.push_back(fitness[i]);
    const auto distance = crowding_distance(front_fitness);
    for (size_t k = 0; k < front.size(); ++k) {
      sorted.rank[front[k]] = static_cast<int>(f) + 1;
      sorted.crowding[front[k]] = distance[k];
    }
  }
  return sorted;
}

std::vector<size_t> select_elites(const SortedPopulation& sorted, int elite_count) {
  const size_t total = sorted.rank.size();
  if (elite_count < 0 || static_cast<size_t>(elite_count) > total) {
    throw ConfigError("select_elites: elite_count exceeds population size");
  }

  std::vector<size_t> elites;
  elites.reserve(static_cast<size_t>(elite_count));
  for (const auto& front : sorted.fronts) {
    const size_t room = static_cast<size_t>(elite_count) - elites.size();
    if (room == 0) break;
    if (front.size() <= room) {
      elites.insert(elites.end(), front.begin(), front.end());
      continue;
    }
    std::vector<size_t> by_crowding = front;  // input order; stable sort keeps it on ties
    std::stable_sort(by_crowding.begin(), by_crowding.end(), [&](size_t a, size_t b) {
      return sorted.crowding[a] > sorted.crowding[b];
    });
    elites.insert(elites.end(), by_crowding.begin(), by_crowding.begin() + room);
    break;
  }
  return elites;
}

std::pair<PolicyGenome, PolicyGenome> crossover_onepoint(const PolicyGenome& a,
                                                         const PolicyGenome& b,
                                                         std::mt19937_64& rng) {
  if (a.weights.size() != b.weights.size()) {
    throw std::invalid_argument("crossover: genome length mismatch");
  }
  const size_t len = a.weights.size();
  std::uniform_int_distribution<size_t> cut_dist(1, len - 1);
  const size_t cut = cut_dist(rng);

  PolicyGenome child_a = a;
  PolicyGenome child_b = b;
  std::copy(b.weights.begin() + static_cast<ptrdiff_t>(cut), b.weights.end(),
            child_a.weights.begin() + static_cast<ptrdiff_t>(cut));
  std::copy(a.weights.begin() + static_cast<ptrdiff_t>(cut), a.weights.end(),
            child_b.weights.begin() + static_cast<ptrdiff_t>(cut));
  return {std::move(child_a), std::move(child_b)};
}

void mutate_gaussian(PolicyGenome& genome, double prob, double sigma, std::mt19937_64& rng) {
  if (prob < 0 || prob > 1) throw std::invalid_argument("mutate: prob must be in [0, 1]");
  if (sigma <= 0) throw std::invalid_argument("mutate: sigma must be > 0");
  if (prob == 0) return;

  std::uniform_real_distribution<double> gate(0.0, 1.0);
  for (double& gene : genome.weights) {
    if (gate(rng) < prob) {
      std::normal_distribution<double> perturb(gene, sigma);
      gene = perturb(rng);
    }
  }
}

int64_t evaluate_population(std::vector<Individual>& population,
                            const EvaluationScenario& scenario, const SimulationConfig& config,
                            int64_t demand_scale, MaskMode mask_mode, int parallelism) {
  config.validate();

  std::vector<size_t> pending;
  for (size_t i = 0; i < population.size(); ++i) {
    if (!population[i].fitness || population[i].evaluated_scenario != scenario.scenario_id) {
      pending.push_back(i);
    }
  }

  struct Outcome {
    Fitness fitness;
    bool aborted = false;
    bool has_fitness = false;
  };
  std::vector<Outcome> outcomes(pending.size());

  parallel_for(static_cast<int64_t>(pending.size()), parallelism, [&](int64_t k) {
    const Individual& ind = population[pending[static_cast<size_t>(k)]];
    NeuralPolicy policy(ind.genome, config, demand_scale, mask_mode);
    const EpisodeResult result =
        run_episode(scenario.requests, config, policy, scenario.policy_seed);
    Outcome& slot = outcomes[static_cast<size_t>(k)];
    slot.aborted = result.terminated_early;
    if (result.num_timesteps >= 1) {
      slot.fitness = episode_fitness(result);
      slot.has_fitness = true;
    }
  });

  for (size_t k = 0; k < pending.size(); ++k) {
    Individual& ind = population[pending[k]];
    ind.aborted = outcomes[k].aborted;
    ind.fitness = outcomes[k].has_fitness ? std::optional<Fitness>(outcomes[k].fitness)
                                          : std::nullopt;
    ind.evaluated_scenario = scenario.scenario_id;
  }

  // Aborted episodes are pushed behind everything that finished: both
  // objectives become 10x the worst value seen in this batch.
  double worst_balance = 0.0;
  double worst_idle = 0.0;
  bool any_clean = false;
  for (const auto& ind : population) {
    if (ind.fitness && !ind.aborted) {
      worst_balance = std::max(worst_balance, ind.fitness->f_balance);
      worst_idle = std::max(worst_idle, ind.fitness->f_idle);
      any_clean = true;
    }
  }
  if (!any_clean) {
    worst_balance = 1.0;
    worst_idle = static_cast<double>(config.predicted_range);
  }
  for (auto& ind : population) {
    if (ind.aborted || !ind.fitness) {
      ind.fitness = Fitness{std::max(worst_balance, 1e-9) * 10.0,
                            std::max(worst_idle, 1e-9) * 10.0};
      ind.aborted = true;
    }
  }

  return static_cast<int64_t>(pending.size());
}

namespace {

EvaluationScenario make_scenario(int64_t scenario_id, const WorkloadConfig& workload,
                                 const TrainOptions& options) {
  EvaluationScenario scenario;
  scenario.scenario_id = scenario_id;
  if (options.base_requests) {
    scenario.requests = *options.base_requests;
  } else {
    WorkloadConfig cfg = workload;
    cfg.seed = rng::derive(options.master_seed, rng::Stream::kWorkload,
                           static_cast<uint64_t>(scenario_id));
    scenario.requests = generate_workload(cfg);
  }
  apply_prediction_noise(scenario.requests, workload, workload.noise_sigma,
                         rng::derive(options.master_seed, rng::Stream::kNoise,
                                     static_cast<uint64_t>(scenario_id)));
  scenario.policy_seed = rng::derive(options.master_seed, rng::Stream::kPolicy,
                                     static_cast<uint64_t>(scenario_id));
  return scenario;
}

}  // namespace

TrainResult train(const EvoConfig& evo, const WorkloadConfig& workload,
                  const SimulationConfig& sim, const TrainOptions& options) {
  evo.validate();
  workload.validate();
  sim.validate();

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + options.out_dir.string());

  std::ofstream convergence(options.out_dir / "convergence.csv");
  if (!convergence) throw IoError("cannot write convergence.csv");
  convergence << "generation,best_score,mean_score\n";

  // Initial population: uniform weights in [-init_scale, init_scale].
  auto init_rng = rng::engine(rng::derive(options.master_seed, rng::Stream::kInit));
  std::uniform_real_distribution<double> init_dist(-evo.init_scale, evo.init_scale);
  std::vector<Individual> population(static_cast<size_t>(evo.pop_size));
  uint64_t next_id = 0;
  for (auto& ind : population) {
    ind.id = next_id++;
    ind.genome.weights.resize(kGenomeSize);
    for (double& w : ind.genome.weights) w = init_dist(init_rng);
  }

  auto evo_rng = rng::engine(rng::derive(options.master_seed, rng::Stream::kEvolution));
  EvaluationScenario scenario = make_scenario(0, workload, options);

  TrainResult result;
  FitnessNormalizer normalizer;
  int64_t simulations = 0;
  SortedPopulation sorted;

  for (int64_t gen = 0;; ++gen) {
    simulations += evaluate_population(population, scenario, sim, workload.max_res_req,
                                       options.mask_mode, options.parallelism);

    const auto fitness = fitness_view(population);
    sorted = sort_and_crowd(fitness);
    for (size_t i = 0; i < population.size(); ++i) {
      population[i].rank = sorted.rank[i];
      population[i].crowding = sorted.crowding[i];
    }
    if (gen == 0) {
      normalizer = FitnessNormalizer::from(fitness);
      result.initial_fitness = fitness;
    }

    json front_doc;
    front_doc["generation"] = gen;
    front_doc["front"] = json::array();
    for (const size_t i : sorted.fronts.front()) {
      front_doc["front"].push_back(front_entry(population[i]));
    }
    write_json(options.out_dir / ("pareto_gen_" + std::to_string(gen) + ".json"), front_doc);

    double best_score = kInf;
    double score_sum = 0.0;
    for (const auto& f : fitness) {
      const double s = scalarize(f, 0.5, 0.5, normalizer);
      best_score = std::min(best_score, s);
      score_sum += s;
    }
    char row[96];
    std::snprintf(row, sizeof(row), "%lld,%.9g,%.9g\n", static_cast<long long>(gen), best_score,
                  score_sum / static_cast<double>(population.size()));
    convergence << row;

    const int64_t next_cost =
        evo.resample_each_generation ? evo.pop_size : evo.offspring_count;
    const bool out_of_budget = simulations + next_cost > evo.max_simulations;
    const bool out_of_generations = evo.max_generations > 0 && gen + 1 >= evo.max_generations;
    if (out_of_budget || out_of_generations) {
      result.generations = gen + 1;
      break;
    }

    // Elites survive unchanged; offspring come from crossover of random
    // distinct elite pairs followed by Gaussian mutation.
    const auto elite_indices = select_elites(sorted, evo.elite_count);
    std::vector<Individual> next_population;
    next_population.reserve(population.size());
    for (const size_t i : elite_indices) next_population.push_back(population[i]);

    std::uniform_int_distribution<size_t> pick(0, elite_indices.size() - 1);
    while (static_cast<int>(next_population.size()) < evo.pop_size) {
      size_t a = pick(evo_rng);
      size_t b = pick(evo_rng);
      while (elite_indices.size() > 1 && b == a) b = pick(evo_rng);
      auto [child_a, child_b] =
          crossover_onepoint(population[elite_indices[a]].genome,
                             population[elite_indices[b]].genome, evo_rng);
      mutate_gaussian(child_a, evo.mutation_prob, evo.mutation_sigma, evo_rng);
      mutate_gaussian(child_b, evo.mutation_prob, evo.mutation_sigma, evo_rng);
      for (auto* child : {&child_a, &child_b}) {
        if (static_cast<int>(next_population.size()) >= evo.pop_size) break;
        Individual ind;
        ind.id = next_id++;
        ind.genome = std::move(*child);
        next_population.push_back(std::move(ind));
      }
    }
    population = std::move(next_population);
    if (evo.resample_each_generation) {
      scenario = make_scenario(gen + 1, workload, options);
    }
  }

  // Final front export with materialized genome files.
  json final_doc;
  final_doc["generation"] = result.generations - 1;
  final_doc["front"] = json::array();
  for (const size_t i : sorted.fronts.front()) {
    final_doc["front"].push_back(front_entry(population[i]));
    save_genome(options.out_dir / genome_filename(population[i].id), population[i].genome);
  }
  write_json(options.out_dir / "pareto_final.json", final_doc);

  if (!convergence) throw IoError("write failed: convergence.csv");
  result.population = std::move(population);
  result.front = sorted.fronts.front();
  result.simulations = simulations;
  return result;
}

}  // namespace lbsim
