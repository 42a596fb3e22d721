#include <benchmark/benchmark.h>

#include <random>

#include "lbsim/episode.hpp"
#include "lbsim/evolution.hpp"
#include "lbsim/heuristics.hpp"
#include "lbsim/neural.hpp"
#include "lbsim/workload.hpp"

namespace {

using namespace lbsim;

WorkloadConfig bench_workload(double mean) {
  WorkloadConfig wl;
  wl.mean_req_num = mean;
  wl.seed = 12345;
  return wl;
}

static void BM_generate_workload(benchmark::State& state) {
  const auto wl = bench_workload(3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_workload(wl));
  }
}
BENCHMARK(BM_generate_workload);

static void BM_forward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  PolicyGenome genome;
  genome.weights.resize(kGenomeSize);
  for (auto& w : genome.weights) w = dist(rng);
  std::vector<double> input(kInputDim);
  for (auto& v : input) v = dist(rng);

  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(genome, input));
  }
}
BENCHMARK(BM_forward);

static void BM_lookahead_features(benchmark::State& state) {
  SimulationConfig cfg;
  auto cluster = make_cluster(cfg);
  auto& server = cluster.servers[0];
  std::mt19937_64 rng(2);
  for (int c = 0; c < 64; ++c) {
    Connection conn;
    conn.demand = {static_cast<int64_t>(rng() % 10), static_cast<int64_t>(rng() % 10),
                   static_cast<int64_t>(rng() % 10), static_cast<int64_t>(rng() % 10)};
    conn.true_end_step = 10000;
    conn.predicted_end_step = static_cast<int64_t>(rng() % 900);
    server.connections.push_back(conn);
    server.occupied += conn.demand;
  }
  std::vector<double> out(static_cast<size_t>(lookahead_size(cfg)));
  for (auto _ : state) {
    lookahead_features(server, 100, cfg, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_lookahead_features);

static void BM_episode_least_connection(benchmark::State& state) {
  const auto requests = generate_workload(bench_workload(static_cast<double>(state.range(0))));
  SimulationConfig cfg;
  for (auto _ : state) {
    LeastConnectionPolicy policy;
    benchmark::DoNotOptimize(run_episode(requests, cfg, policy, 7));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(requests.size()));
}
BENCHMARK(BM_episode_least_connection)->Arg(1)->Arg(3);

static void BM_episode_neural(benchmark::State& state) {
  const auto requests = generate_workload(bench_workload(1.0));
  SimulationConfig cfg;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  PolicyGenome genome;
  genome.weights.resize(kGenomeSize);
  for (auto& w : genome.weights) w = dist(rng);

  for (auto _ : state) {
    NeuralPolicy policy(genome, cfg, 10);
    benchmark::DoNotOptimize(run_episode(requests, cfg, policy, 7));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(requests.size()));
}
BENCHMARK(BM_episode_neural);

static void BM_nondominated_sort(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<Fitness> pop(static_cast<size_t>(state.range(0)));
  for (auto& f : pop) f = {dist(rng), dist(rng)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fast_nondominated_sort(pop));
  }
}
BENCHMARK(BM_nondominated_sort)->Arg(50)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
