// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. The first argument must point at the CLI binary (used by the
// determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "lbsim/episode.hpp"
#include "lbsim/evolution.hpp"
#include "lbsim/heuristics.hpp"
#include "lbsim/neural.hpp"
#include "lbsim/objectives.hpp"
#include "lbsim/parallel.hpp"
#include "lbsim/rng.hpp"
#include "lbsim/workload.hpp"
#include "test_util.hpp"

using namespace lbsim;

namespace {

std::string g_cli;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// ---- shared toy-training state (criteria 6-8) -------------------------

constexpr uint64_t kToySeed = 20240601;

WorkloadConfig toy_workload() {
  WorkloadConfig wl;
  wl.data_time = 60;      // ~300 requests at 1 per step
  wl.mean_req_num = 1.0;
  return wl;
}

SimulationConfig toy_sim() {
  SimulationConfig sim;
  sim.server_num = 5;
  return sim;
}

EvoConfig toy_evo() {
  EvoConfig evo;
  evo.pop_size = 20;
  evo.elite_count = 10;
  evo.offspring_count = 10;
  evo.max_generations = 40;
  evo.max_simulations = 1000000000;
  return evo;
}

struct TrainedState {
  testutil::TempDir dir{"acceptance_train"};
  TrainResult result;
  bool ready = false;
};
TrainedState g_trained;

const TrainResult& trained() {
  if (!g_trained.ready) {
    TrainOptions options;
    options.master_seed = kToySeed;
    options.out_dir = g_trained.dir.path() / "run";
    options.parallelism = worker_threads();
    g_trained.result = train(toy_evo(), toy_workload(), toy_sim(), options);
    g_trained.ready = true;
  }
  return g_trained.result;
}

// Scenario derivation of the same family the trainer uses (index 0 is the
// training scenario; other indices are held out).
struct Scenario {
  std::vector<UserRequest> requests;
  uint64_t policy_seed;
};

Scenario scenario_at(uint64_t index, double sigma) {
  WorkloadConfig wl = toy_workload();
  wl.seed = rng::derive(kToySeed, rng::Stream::kWorkload, index);
  Scenario s;
  s.requests = generate_workload(wl);
  apply_prediction_noise(s.requests, wl, sigma, rng::derive(kToySeed, rng::Stream::kNoise, index));
  s.policy_seed = rng::derive(kToySeed, rng::Stream::kPolicy, index);
  return s;
}

Fitness run_policy_on(RoutingPolicy& policy, const Scenario& scenario) {
  const auto result = run_episode(scenario.requests, toy_sim(), policy, scenario.policy_seed);
  require(!result.terminated_early, "unexpected abort in toy scenario");
  return episode_fitness(result);
}

// ---- individual criteria ----------------------------------------------

std::string criterion1_structure() {
  require(kGenomeSize == 4097, "genome length must be 4097");
  require(kInputDim == 126 && kRequestFeatureDim == 5 && kServerFeatureDim == 41 &&
              kGlobalFeatureDim == 80,
          "feature layout must be 5+41+80 = 126");

  SimulationConfig sim;
  auto state = make_cluster(sim);
  UserRequest req;
  req.demand = {3, 3, 3, 3};
  req.predicted_duration = 100;
  const auto features = featurize(state, req, sim, 10);
  require(features.per_server.size() == static_cast<size_t>(sim.server_num) * 41,
          "per-server block must be N x 41");
  require(features.global.size() == 80, "global block must be 80 wide");
  std::vector<double> input(kInputDim);
  assemble_input(features, 0, input);  // throws if any block has the wrong size
  return "genome=4097, input=5+41+80=126";
}

std::string criterion2_objective_identities() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> util(0.0, 1.0);
  std::uniform_int_distribution<int64_t> remaining(0, 600);

  double worst_identity = 0.0;
  for (int episode = 0; episode < 100; ++episode) {
    const int n = 1 + static_cast<int>(rng() % 16);
    const int64_t t_steps = 1 + static_cast<int64_t>(rng() % 60);
    EpisodeResult result;
    result.num_servers = n;
    result.time_step = 12;
    result.num_timesteps = t_steps;
    for (int64_t t = 0; t < t_steps * n; ++t) {
      for (int r = 0; r < 4; ++r) result.utilization.push_back(util(rng));
      result.max_remaining.push_back(remaining(rng));
      result.conn_counts.push_back(0);
    }

    double balance_sum = 0.0;
    double idle_sum = 0.0;
    for (int64_t t = 0; t < t_steps; ++t) {
      std::vector<double> snapshot;
      std::vector<double> rem;
      for (int i = 0; i < n; ++i) {
        for (int r = 0; r < 4; ++r) snapshot.push_back(result.utilization_at(t, i, r));
        rem.push_back(static_cast<double>(result.remaining_at(t, i)) * 12.0 / 60.0);
      }
      balance_sum += balance_step(snapshot, n);
      idle_sum += idle_step(rem);
    }
    const Fitness f = episode_fitness(result);
    worst_identity = std::max(worst_identity,
                              std::abs(f.f_balance - balance_sum / static_cast<double>(t_steps)));
    worst_identity = std::max(worst_identity,
                              std::abs(f.f_idle - idle_sum / static_cast<double>(t_steps)));
  }
  require(worst_identity <= 1e-9, "episode fitness deviates from per-step averages");

  double worst_oracle = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 14);
    std::vector<double> snapshot(static_cast<size_t>(n) * 4);
    for (auto& v : snapshot) v = util(rng);
    double expected = 0.0;
    for (int r = 0; r < 4; ++r) {
      double mu = 0.0;
      for (int i = 0; i < n; ++i) mu += snapshot[static_cast<size_t>(i * 4 + r)];
      mu /= n;
      double ss = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = snapshot[static_cast<size_t>(i * 4 + r)] - mu;
        ss += d * d;
      }
      expected += std::sqrt(ss / n);
    }
    expected /= 4.0;
    worst_oracle = std::max(worst_oracle, std::abs(balance_step(snapshot, n) - expected));
  }
  require(worst_oracle <= 1e-12, "balance_step deviates from the direct recomputation");
  return "identity err " + fmt(worst_identity) + ", oracle err " + fmt(worst_oracle);
}

std::string criterion3_sort_oracle() {
  std::mt19937_64 rng(2048);
  std::uniform_real_distribution<double> dist(0.0, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + rng() % 200;
    std::vector<Fitness> pop(n);
    for (auto& f : pop) {
      f = {dist(rng), dist(rng)};
      if (trial % 4 == 0) {  // include plateaus and duplicates
        f.f_balance = std::floor(f.f_balance / 5.0);
        f.f_idle = std::floor(f.f_idle / 5.0);
      }
    }
    if (fast_nondominated_sort(pop) != testutil::naive_front_sort(pop)) {
      throw Failure("front peeling disagrees with the repeated-filter oracle");
    }
  }

  const auto d2 = crowding_distance(std::vector<Fitness>{{0, 1}, {1, 0}});
  require(std::isinf(d2[0]) && std::isinf(d2[1]), "boundary crowding must be infinite");
  const auto d3 = crowding_distance(std::vector<Fitness>{{0, 2}, {1, 1}, {2, 0}});
  require(std::isinf(d3[0]) && std::isinf(d3[2]), "boundary crowding must be infinite");
  require(std::abs(d3[1] - 2.0) <= 1e-12, "three-point crowding must equal 2.0");
  return "1000 populations matched; crowding hand cases exact";
}

std::string criterion4_simulator_safety() {
  // Seeded mix of feasible picks and deliberate blocks.
  class FuzzPolicy : public RoutingPolicy {
   public:
    void reset(uint64_t seed) override { rng_.seed(seed); }
    RoutingDecision decide(const ClusterState& state, const UserRequest& request) override {
      const auto mask = mask_actions(state.servers, request.demand);
      std::uniform_int_distribution<size_t> pick(0, mask.size());
      const size_t c = pick(rng_);
      if (mask.empty() || c == mask.size()) return RoutingDecision::block();
      return RoutingDecision::route_to(mask[c]);
    }
    std::string_view name() const override { return "fuzz"; }

   private:
    std::mt19937_64 rng_;
  };

  std::mt19937_64 rng(777);
  int64_t total_steps = 0;
  int64_t episodes = 0;
  while (total_steps < 100000) {
    WorkloadConfig wl;
    wl.data_time = 2 + static_cast<int64_t>(rng() % 8);
    wl.mean_req_num = 1.0 + static_cast<double>(rng() % 60) / 10.0;
    wl.min_user_duration = 1;
    wl.max_user_duration = 1 + static_cast<int64_t>(rng() % 10);
    wl.seed = rng();
    const auto requests = generate_workload(wl);

    SimulationConfig cfg;
    cfg.server_num = 1 + static_cast<int>(rng() % 8);
    const int64_t cap = 15 + static_cast<int64_t>(rng() % 60);
    cfg.capacity = {cap, cap, cap, cap};
    cfg.ready_queue_size = 3 + static_cast<int64_t>(rng() % 30);
    cfg.block_queue_size = 3 + static_cast<int64_t>(rng() % 30);

    Simulator sim(cfg);
    FuzzPolicy policy;
    policy.reset(rng());

    size_t next = 0;
    for (;;) {
      const int64_t clock = sim.state().clock;
      size_t end = next;
      while (end < requests.size() && requests[end].arrival_step == clock) ++end;
      const bool ok =
          sim.step(std::span<const UserRequest>(requests).subspan(next, end - next), policy);
      next = end;
      ++total_steps;
      if (!ok) break;

      for (const auto& server : sim.state().servers) {
        ResourceVector sum;
        for (const auto& c : server.connections) sum += c.demand;
        require(sum == server.occupied, "occupancy bookkeeping diverged");
        require(server.occupied.fits_within(server.capacity), "capacity exceeded");
      }
      const bool drained = sim.state().ready_queue.empty() && sim.state().block_queue.empty();
      bool live = false;
      for (const auto& s : sim.state().servers) live = live || !s.connections.empty();
      if (next == requests.size() && drained && !live) break;
    }
    const auto result = sim.take_result(static_cast<int64_t>(requests.size()));
    require(result.requests_total ==
                result.completed + result.live_at_end + result.queued_at_end +
                    result.not_injected,
            "request conservation identity violated");
    ++episodes;
  }
  return std::to_string(total_steps) + " steps over " + std::to_string(episodes) +
         " episodes, capacity and conservation intact";
}

std::string criterion5_heuristic_ordering() {
  WorkloadConfig wl;
  wl.mean_req_num = 1.0;  // ~600 requests over the 2-hour window
  SimulationConfig sim;   // 10 servers

  const int seeds = 30;
  std::vector<Fitness> lc(seeds);
  std::vector<Fitness> ldg(seeds);
  std::vector<Fitness> rnd(seeds);
  parallel_for(seeds, worker_threads(), [&](int64_t s) {
    WorkloadConfig seeded = wl;
    seeded.seed = rng::derive(kToySeed, rng::Stream::kWorkload, 500 + static_cast<uint64_t>(s));
    const auto requests = generate_workload(seeded);
    const uint64_t policy_seed =
        rng::derive(kToySeed, rng::Stream::kPolicy, 500 + static_cast<uint64_t>(s));

    LeastConnectionPolicy p_lc;
    LeastDurationGapPolicy p_ldg;
    RandomPolicy p_rnd;
    lc[static_cast<size_t>(s)] = episode_fitness(run_episode(requests, sim, p_lc, policy_seed));
    ldg[static_cast<size_t>(s)] = episode_fitness(run_episode(requests, sim, p_ldg, policy_seed));
    rnd[static_cast<size_t>(s)] = episode_fitness(run_episode(requests, sim, p_rnd, policy_seed));
  });

  auto mean_of = [](const std::vector<Fitness>& fs, bool balance) {
    std::vector<double> v;
    for (const auto& f : fs) v.push_back(balance ? f.f_balance : f.f_idle);
    return testutil::mean(v);
  };
  const double idle_ldg = mean_of(ldg, false);
  const double idle_lc = mean_of(lc, false);
  const double bal_lc = mean_of(lc, true);
  const double bal_rnd = mean_of(rnd, true);

  require(idle_ldg <= 0.8 * idle_lc,
          "F_idle(least_duration_gap)=" + fmt(idle_ldg) + " not 20% below F_idle(least_connection)=" +
              fmt(idle_lc));
  require(bal_lc <= 0.75 * bal_rnd,
          "F_balance(least_connection)=" + fmt(bal_lc) + " not 25% below F_balance(random)=" +
              fmt(bal_rnd));
  return "idle " + fmt(idle_ldg) + " vs " + fmt(idle_lc) + " min; balance " + fmt(bal_lc) +
         " vs " + fmt(bal_rnd);
}

std::string criterion6_training_progress() {
  const TrainResult& result = trained();

  Fitness ref{0, 0};
  for (const auto& f : result.initial_fitness) {
    ref.f_balance = std::max(ref.f_balance, f.f_balance * 1.1);
    ref.f_idle = std::max(ref.f_idle, f.f_idle * 1.1);
  }

  std::vector<Fitness> final_front;
  for (const size_t i : result.front) final_front.push_back(*result.population[i].fitness);

  const double hv_initial = testutil::hv2d(result.initial_fitness, ref);
  const double hv_final = testutil::hv2d(final_front, ref);
  require(hv_initial > 0, "degenerate initial hypervolume");
  require(hv_final >= 1.1 * hv_initial,
          "hypervolume gain " + fmt(hv_final / hv_initial) + "x is below 1.1x");

  std::vector<Fitness> distinct;
  for (const auto& f : final_front) {
    bool seen = false;
    for (const auto& d : distinct) seen = seen || (d == f);
    if (!seen) distinct.push_back(f);
  }
  require(distinct.size() >= 2, "final front holds fewer than 2 distinct policies");
  for (const auto& a : distinct) {
    for (const auto& b : distinct) {
      require(!dominates(a, b), "final front is not mutually non-dominated");
    }
  }
  return "hypervolume x" + fmt(hv_final / hv_initial) + ", front size " +
         std::to_string(distinct.size());
}

std::string criterion7_dominates_round_robin() {
  const TrainResult& result = trained();

  std::vector<Scenario> held_out;
  for (uint64_t idx = 1; idx <= 5; ++idx) held_out.push_back(scenario_at(idx, 0.0));

  Fitness rr_mean{0, 0};
  for (const auto& s : held_out) {
    RoundRobinPolicy rr;
    const Fitness f = run_policy_on(rr, s);
    rr_mean.f_balance += f.f_balance / static_cast<double>(held_out.size());
    rr_mean.f_idle += f.f_idle / static_cast<double>(held_out.size());
  }

  std::vector<size_t> candidates(result.front.begin(), result.front.end());
  std::vector<Fitness> means(candidates.size());
  parallel_for(static_cast<int64_t>(candidates.size()), worker_threads(), [&](int64_t k) {
    const auto& genome = result.population[candidates[static_cast<size_t>(k)]].genome;
    Fitness acc{0, 0};
    for (const auto& s : held_out) {
      NeuralPolicy policy(genome, toy_sim(), toy_workload().max_res_req);
      const Fitness f = run_policy_on(policy, s);
      acc.f_balance += f.f_balance / static_cast<double>(held_out.size());
      acc.f_idle += f.f_idle / static_cast<double>(held_out.size());
    }
    means[static_cast<size_t>(k)] = acc;
  });

  for (size_t k = 0; k < means.size(); ++k) {
    if (means[k].f_balance <= rr_mean.f_balance && means[k].f_idle <= rr_mean.f_idle) {
      return "policy id " + std::to_string(result.population[candidates[k]].id) + " (" +
             fmt(means[k].f_balance) + ", " + fmt(means[k].f_idle) + ") covers round robin (" +
             fmt(rr_mean.f_balance) + ", " + fmt(rr_mean.f_idle) + ")";
    }
  }
  throw Failure("no front policy weakly dominates round robin on held-out seeds");
}

std::string criterion8_predictability_trend() {
  const TrainResult& result = trained();

  // Idleness-leaning end of the front.
  size_t best = result.front.front();
  for (const size_t i : result.front) {
    if (result.population[i].fitness->f_idle < result.population[best].fitness->f_idle) best = i;
  }
  const PolicyGenome genome = result.population[best].genome;

  const std::vector<double> sigmas = {0.0, 10.0, 30.0};
  const int seeds = 8;

  struct Band {
    double mean;
    double stdev;
  };
  auto sweep = [&](auto&& make_policy_fn) {
    std::vector<Band> bands;
    for (const double sigma : sigmas) {
      std::vector<double> idles(seeds);
      parallel_for(seeds, worker_threads(), [&](int64_t s) {
        const Scenario scenario = scenario_at(100 + static_cast<uint64_t>(s), sigma);
        auto policy = make_policy_fn();
        idles[static_cast<size_t>(s)] = run_policy_on(*policy, scenario).f_idle;
      });
      bands.push_back({testutil::mean(idles), testutil::std_dev(idles)});
    }
    return bands;
  };

  const auto neural_bands = sweep([&]() {
    return std::make_unique<NeuralPolicy>(genome, toy_sim(), toy_workload().max_res_req);
  });
  const auto ldg_bands = sweep([]() { return std::make_unique<LeastDurationGapPolicy>(); });

  auto check_trend = [&](const std::vector<Band>& bands, const std::string& who) {
    for (size_t k = 0; k + 1 < bands.size(); ++k) {
      require(bands[k].mean <= bands[k + 1].mean + bands[k + 1].stdev,
              who + ": F_idle at sigma=" + fmt(sigmas[k]) + " (" + fmt(bands[k].mean) +
                  ") exceeds sigma=" + fmt(sigmas[k + 1]) + " (" + fmt(bands[k + 1].mean) +
                  " + std " + fmt(bands[k + 1].stdev) + ")");
    }
  };
  check_trend(neural_bands, "trained policy");
  check_trend(ldg_bands, "least_duration_gap");

  std::ostringstream os;
  os << "trained idle {" << fmt(neural_bands[0].mean) << ", " << fmt(neural_bands[1].mean)
     << ", " << fmt(neural_bands[2].mean) << "}, ldg {" << fmt(ldg_bands[0].mean) << ", "
     << fmt(ldg_bands[1].mean) << ", " << fmt(ldg_bands[2].mean) << "}";
  return os.str();
}

std::string criterion9_determinism() {
  require(!g_cli.empty(), "CLI binary path missing (pass it as argv[1])");
  testutil::TempDir tmp("acceptance_cli");

  const auto cfg = tmp.path() / "train.json";
  {
    std::ofstream out(cfg);
    out << R"({
  "workload": {"data_time": 60, "mean_req_num": 1.0},
  "simulation": {"server_num": 5},
  "evolution": {"pop_size": 20, "elite_count": 10, "offspring_count": 10,
                "max_generations": 12, "max_simulations": 1000000000}
})";
  }

  auto run = [&](const std::string& args) {
    const int rc =
        testutil::run_command(g_cli + " " + args + " > /dev/null 2>&1");
    require(rc == 0, "CLI exited with " + std::to_string(rc) + " for: " + args);
  };

  const std::string seed = " --seed 20240601";
  run("train --config " + cfg.string() + seed + " --parallelism 1 --out " +
      (tmp.path() / "t1").string());
  run("train --config " + cfg.string() + seed + " --parallelism 1 --out " +
      (tmp.path() / "t2").string());
  run("train --config " + cfg.string() + seed + " --parallelism 8 --out " +
      (tmp.path() / "t3").string());

  std::string detail;
  require(testutil::dirs_equal(tmp.path() / "t1", tmp.path() / "t2", &detail),
          "train reruns differ: " + detail);
  require(testutil::dirs_equal(tmp.path() / "t1", tmp.path() / "t3", &detail),
          "train differs across parallelism: " + detail);

  run("generate --config " + cfg.string() + seed + " --out " + (tmp.path() / "g1").string());
  run("generate --config " + cfg.string() + seed + " --out " + (tmp.path() / "g2").string());
  require(testutil::dirs_equal(tmp.path() / "g1", tmp.path() / "g2", &detail),
          "generate reruns differ: " + detail);

  run("evaluate --config " + cfg.string() + seed +
      " --policy least_duration_gap --n-seeds 6 --parallelism 1 --out " +
      (tmp.path() / "e1").string());
  run("evaluate --config " + cfg.string() + seed +
      " --policy least_duration_gap --n-seeds 6 --parallelism 6 --out " +
      (tmp.path() / "e2").string());
  require(testutil::dirs_equal(tmp.path() / "e1", tmp.path() / "e2", &detail),
          "evaluate differs across parallelism: " + detail);

  return "train x3, generate x2, evaluate x2: byte-identical";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];

  struct Criterion {
    int id;
    const char* name;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "structural exactness", criterion1_structure},
      {2, "objective identities", criterion2_objective_identities},
      {3, "nondominated sort and crowding oracle", criterion3_sort_oracle},
      {4, "simulator safety and conservation", criterion4_simulator_safety},
      {5, "heuristic ordering at desk scale", criterion5_heuristic_ordering},
      {6, "training progress (hypervolume)", criterion6_training_progress},
      {7, "trained policy dominates round robin", criterion7_dominates_round_robin},
      {8, "predictability trend", criterion8_predictability_trend},
      {9, "command-level determinism", criterion9_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;
    try {
      detail = criterion.run();
    } catch (const std::exception& e) {
      pass = false;
      detail = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.1fs) — %s\n", pass ? "PASS" : "FAIL", criterion.id,
                criterion.name, seconds, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
