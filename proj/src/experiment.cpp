#include "simcache/experiment.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "simcache/baselines.hpp"
#include "simcache/io.hpp"

namespace simcache {

QModel parse_q_map(const std::string& text) {
  std::vector<QStep> steps;
  std::istringstream ss(text);
  std::string entry;
  while (std::getline(ss, entry, ',')) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("q-map entries must look like dist:prob");
    steps.push_back(QStep{parse_double(entry.substr(0, colon)),
                          parse_double(entry.substr(colon + 1))});
  }
  return QModel(std::move(steps));
}

Catalog build_catalog(const ExperimentConfig& config) {
  if (config.catalog_file && config.grid)
    throw std::invalid_argument("give either a catalog file or a grid, not both");
  if (config.catalog_file) return load_catalog(*config.catalog_file);
  if (!config.grid) throw std::invalid_argument("no catalog source configured");
  PopularityProfile profile = synth_grid_popularity(
      config.grid->width, config.grid->height, config.hotspots, config.alpha);
  return Catalog::make_grid(config.grid->width, config.grid->height,
                            std::move(profile.probabilities));
}

QModel resolve_q(const ExperimentConfig& config) {
  if (config.q) return *config.q;
  if (config.policy == Policy::rnd_lru)
    return QModel({QStep{1.0, 1.0}, QStep{std::sqrt(2.0), 0.5}, QStep{2.0, 0.25}});
  return QModel::exact_within(config.d);
}

TieBreak resolve_tie_break(const ExperimentConfig& config) {
  if (config.tie_break) return *config.tie_break;
  return config.grid ? TieBreak::counterclockwise : TieBreak::by_id;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) +
                    0xbf58476d1ce4e5b9ULL * (b + 1) +
                    0x94d049bb133111ebULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void run_parallel(std::vector<std::function<void()>>& tasks, int workers) {
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (auto& t : tasks) t();
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      try {
        tasks[k]();
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

void validate_common(const ExperimentConfig& config) {
  if (config.replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  if (config.requests < 1)
    throw std::invalid_argument("requests must be >= 1");
  for (std::size_t k = 1; k < config.capacities.size(); ++k)
    if (config.capacities[k] <= config.capacities[k - 1])
      throw std::invalid_argument("capacities must be strictly increasing");
}

const char* exp_method(Policy p) {
  switch (p) {
    case Policy::lru: return "Exp-LRU";
    case Policy::sim_lru: return "Exp-SIM";
    case Policy::rnd_lru: return "Exp-RND";
  }
  return "?";
}

const char* ours_method(Policy p) {
  return p == Policy::rnd_lru ? "Ours-RND" : "Ours-SIM";
}

struct MethodValue {
  bool feasible = false;
  double hit_rate = 0.0;
  std::optional<double> ci_half_width;
};

void append_row(std::string& csv, int capacity, const std::string& method,
                const MethodValue& v) {
  csv += std::to_string(capacity);
  csv += ',';
  csv += method;
  csv += ',';
  if (v.feasible) csv += format_double(v.hit_rate);
  csv += ',';
  if (v.feasible && v.ci_half_width)
    csv += format_double(v.hit_rate - *v.ci_half_width);
  csv += ',';
  if (v.feasible && v.ci_half_width)
    csv += format_double(v.hit_rate + *v.ci_half_width);
  csv += '\n';
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string run_sweep_csv(const ExperimentConfig& config) {
  validate_common(config);
  if (config.capacities.empty())
    throw std::invalid_argument("no capacities configured");

  const Catalog catalog = build_catalog(config);
  const NeighborIndex index =
      build_neighbor_index(catalog, config.d, resolve_tie_break(config));
  const QModel q = resolve_q(config);
  const Eigen::ArrayXd& rates = catalog.rates();
  const PopularityProfile profile{rates, "sweep"};

  const std::size_t n_caps = config.capacities.size();
  const int reps = config.replications;

  std::vector<std::vector<SimResult>> sim(n_caps,
                                          std::vector<SimResult>(reps));
  std::vector<MethodValue> vals_exp(n_caps), vals_ours(n_caps),
      vals_lru(n_caps), vals_agg(n_caps), vals_greedy(n_caps);

  std::vector<std::function<void()>> tasks;
  for (std::size_t c = 0; c < n_caps; ++c) {
    const int capacity = config.capacities[c];
    for (int k = 0; k < reps; ++k)
      tasks.push_back([&, c, k, capacity] {
        SimOptions opts;
        opts.warmup_fraction = config.warmup_fraction;
        opts.seed = derive_seed(config.seed, c, k, 1);
        const RequestStream stream = gen_requests(
            profile, config.requests, derive_seed(config.seed, c, k, 0));
        sim[c][k] = simulate(config.policy, index, q, capacity, stream, opts);
      });
    if (config.policy != Policy::lru)
      tasks.push_back([&, c, capacity] {
        try {
          const SolverResult r = fixed_point(index, q, rates, capacity,
                                             config.solver);
          vals_ours[c] = MethodValue{true, r.hit_rate, std::nullopt};
        } catch (const std::domain_error&) {
          vals_ours[c] = MethodValue{};
        }
      });
    tasks.push_back([&, c, capacity] {
      try {
        vals_lru[c] = MethodValue{true, lru_ttl(rates, capacity).hit_rate,
                                  std::nullopt};
      } catch (const std::domain_error&) {
        vals_lru[c] = MethodValue{};
      }
      try {
        vals_agg[c] = MethodValue{true, lru_agg(rates, index, capacity).hit_rate,
                                  std::nullopt};
      } catch (const std::domain_error&) {
        vals_agg[c] = MethodValue{};
      }
      vals_greedy[c] = MethodValue{
          true,
          greedy_coverage(coverage_instance(index, rates, capacity)).covered_weight,
          std::nullopt};
    });
  }
  run_parallel(tasks, config.workers);

  for (std::size_t c = 0; c < n_caps; ++c) {
    const ReplicationSummary agg = aggregate_replications(sim[c]);
    vals_exp[c] = MethodValue{true, agg.mean_hit_rate, agg.ci_half_width};
  }

  std::string csv = "capacity,method,hit_rate,ci_low,ci_high\n";
  for (std::size_t c = 0; c < n_caps; ++c) {
    const int capacity = config.capacities[c];
    append_row(csv, capacity, exp_method(config.policy), vals_exp[c]);
    if (config.policy != Policy::lru)
      append_row(csv, capacity, ours_method(config.policy), vals_ours[c]);
    append_row(csv, capacity, "LRU", vals_lru[c]);
    append_row(csv, capacity, "LRU-agg", vals_agg[c]);
    append_row(csv, capacity, "Greedy", vals_greedy[c]);
  }
  return csv;
}

std::string run_occupancy_csv(const ExperimentConfig& config, int capacity) {
  validate_common(config);
  const Catalog catalog = build_catalog(config);
  const NeighborIndex index =
      build_neighbor_index(catalog, config.d, resolve_tie_break(config));
  const QModel q = resolve_q(config);
  const Eigen::ArrayXd& rates = catalog.rates();
  const PopularityProfile profile{rates, "occupancy"};

  std::vector<SimResult> sim(config.replications);
  std::vector<std::function<void()>> tasks;
  for (int k = 0; k < config.replications; ++k)
    tasks.push_back([&, k] {
      SimOptions opts;
      opts.warmup_fraction = config.warmup_fraction;
      opts.seed = derive_seed(config.seed, 0, k, 1);
      const RequestStream stream = gen_requests(profile, config.requests,
                                                derive_seed(config.seed, 0, k, 0));
      sim[k] = simulate(config.policy, index, q, capacity, stream, opts);
    });
  Eigen::ArrayXd solver_occupancy;
  tasks.push_back([&] {
    if (config.policy == Policy::lru) {
      solver_occupancy = lru_ttl(rates, capacity).hit_prob;
    } else {
      solver_occupancy =
          fixed_point(index, q, rates, capacity, config.solver).occupancy;
    }
  });
  run_parallel(tasks, config.workers);

  const ReplicationSummary agg = aggregate_replications(sim);
  std::string csv = "item_id,x,y,occupancy_sim,occupancy_solver\n";
  for (ItemId n = 0; n < catalog.size(); ++n) {
    const double x = catalog.embeddings()(n, 0);
    const double y = catalog.dim() > 1 ? catalog.embeddings()(n, 1) : 0.0;
    csv += std::to_string(n);
    csv += ',';
    csv += format_double(x);
    csv += ',';
    csv += format_double(y);
    csv += ',';
    csv += format_double(agg.mean_occupancy[n]);
    csv += ',';
    csv += format_double(solver_occupancy[n]);
    csv += '\n';
  }
  return csv;
}

std::string run_trace_csv(const ExperimentConfig& config, int capacity) {
  const Catalog catalog = build_catalog(config);
  const NeighborIndex index =
      build_neighbor_index(catalog, config.d, resolve_tie_break(config));
  const QModel q = resolve_q(config);
  const SolverResult r =
      fixed_point(index, q, catalog.rates(), capacity, config.solver);

  std::string csv = "iteration,t_c,hit_rate,max_delta_o\n";
  for (const IterationStats& row : r.trace) {
    csv += std::to_string(row.iteration);
    csv += ',';
    csv += format_double(row.t_c);
    csv += ',';
    csv += format_double(row.hit_rate);
    csv += ',';
    csv += format_double(row.max_delta_o);
    csv += '\n';
  }
  return csv;
}

void cmd_synth(const ExperimentConfig& config) {
  if (!config.grid)
    throw std::invalid_argument("synth needs grid parameters");
  const PopularityProfile profile = synth_grid_popularity(
      config.grid->width, config.grid->height, config.hotspots, config.alpha);
  const Catalog catalog = Catalog::make_grid(
      config.grid->width, config.grid->height, profile.probabilities);

  std::filesystem::create_directories(config.out_dir);
  save_catalog(config.out_dir / "catalog.csv", catalog);

  std::string pop = "item_id,probability\n";
  for (ItemId n = 0; n < catalog.size(); ++n) {
    pop += std::to_string(n);
    pop += ',';
    pop += format_double(profile.probabilities[n]);
    pop += '\n';
  }
  write_file(config.out_dir / "popularity.csv", pop);
}

void cmd_sweep(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  write_file(config.out_dir / "sweep.csv", run_sweep_csv(config));
}

void cmd_occupancy(const ExperimentConfig& config, int capacity) {
  std::filesystem::create_directories(config.out_dir);
  write_file(config.out_dir / "occupancy.csv",
             run_occupancy_csv(config, capacity));
}

void cmd_trace(const ExperimentConfig& config, int capacity) {
  std::filesystem::create_directories(config.out_dir);
  write_file(config.out_dir / "trace.csv", run_trace_csv(config, capacity));
}

}  // namespace simcache
