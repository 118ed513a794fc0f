#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "randprod/limit_law.hpp"
#include "randprod/model.hpp"

// Monte Carlo engine for Z_n = sum_{i<=N_n} e^{S_{i,n}} and derived
// statistics. Replicate r consumes the counter-based substream
// (master_seed, r): outputs are a pure function of (config, master_seed) and
// bitwise independent of the worker-thread count.

namespace randprod {

enum class Statistic { NormalizedZ, FreeEnergy, LLN, MaxRate };

const char* statistic_name(Statistic s);
Statistic parse_statistic(const std::string& name);

struct SimConfig {
  DistributionModel model;
  double c = 0.0;
  std::int64_t n = 0;
  std::optional<double> N_override;  // default N_n = round(e^{cn})
  std::int64_t replicates = 1;
  std::uint64_t master_seed = 0;
  Statistic statistic = Statistic::NormalizedZ;
  int threads = 1;        // 0 = hardware concurrency
  double max_ops = 5e9;   // budget on N_n * replicates * n
  BoundaryCentering centering = BoundaryCentering::Expansion;
};

struct SampleSet {
  std::vector<double> values;  // one per replicate, indexed by replicate
  double n_summands = 0.0;     // N_n actually used
  double wall_seconds = 0.0;
  // echo of the generating configuration; per-replicate seeds are
  // (master_seed, replicate index)
  double c = 0.0;
  std::int64_t n = 0;
  std::int64_t replicates = 0;
  std::uint64_t master_seed = 0;
  Statistic statistic = Statistic::NormalizedZ;
};

// Simulates the configured statistic. N_n summands are streamed, never
// materialized. Per-replicate sums use pairwise blocks of 4096 terms.
// Throws ResourceError when N_n * replicates * n exceeds max_ops.
SampleSet simulate_statistic(const SimConfig& config);

// Kolmogorov-Smirnov distance between the empirical CDF of the sample and a
// reference CDF.
double ks_distance(const std::vector<double>& sample, const std::function<double(double)>& cdf);

struct ConvergenceRow {
  std::int64_t n;
  double n_summands;
  double mean;
  double sd;
  double ks;     // NaN unless the statistic has a distributional limit (NormalizedZ)
  double limit;  // NaN when no deterministic limit applies
};

// Drives the weak-LLN / free-energy / extreme-statistic limits across n.
std::vector<ConvergenceRow> convergence_table(const DistributionModel& model, double c,
                                              const std::vector<std::int64_t>& n_list,
                                              Statistic statistic, std::int64_t reps,
                                              std::uint64_t seed, int threads = 0,
                                              double max_ops = 5e9);

}  // namespace randprod
