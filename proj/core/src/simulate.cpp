#include "randprod/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "randprod/error.hpp"
#include "randprod/numeric.hpp"

namespace randprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOverflowGuard = 1e300;

struct ReplicatePlan {
  Statistic statistic;
  const DistributionModel* model;
  std::int64_t n;
  double n_summands;
  double log_A = -kInf;  // NormalizedZ
  double log_B = 0.0;
  bool stable_form = false;  // sum e^{S - b_n} directly (b_n = log_B)
  double lln_shift = 0.0;    // (phi(1) + c) n
};

double run_replicate(const ReplicatePlan& plan, CounterRng& rng) {
  const std::int64_t count = std::int64_t(plan.n_summands);
  switch (plan.statistic) {
    case Statistic::MaxRate: {
      if (auto direct = plan.model->sample_sum_max(rng, plan.n, count)) {
        return *direct / double(plan.n);
      }
      double best = -kInf;
      for (std::int64_t i = 0; i < count; ++i) {
        best = std::max(best, plan.model->sample_sum(rng, plan.n));
      }
      return best / double(plan.n);
    }
    case Statistic::FreeEnergy: {
      MaxShiftAccumulator acc;
      for (std::int64_t i = 0; i < count; ++i) acc.add(plan.model->sample_sum(rng, plan.n));
      return acc.result().log_total() / double(plan.n);
    }
    case Statistic::LLN: {
      BlockAccumulator acc;
      for (std::int64_t i = 0; i < count; ++i) {
        acc.add(std::exp(plan.model->sample_sum(rng, plan.n) - plan.lln_shift));
      }
      return acc.total();
    }
    case Statistic::NormalizedZ: {
      if (plan.stable_form) {
        BlockAccumulator acc;
        bool overflow = false;
        for (std::int64_t i = 0; i < count; ++i) {
          double term = std::exp(plan.model->sample_sum(rng, plan.n) - plan.log_B);
          if (term > kOverflowGuard) {
            overflow = true;
            break;
          }
          acc.add(term);
        }
        if (!overflow) return acc.total() - std::exp(plan.log_A - plan.log_B);
        rng.reset();  // redo this replicate with the max-shifted form
      }
      MaxShiftAccumulator acc;
      for (std::int64_t i = 0; i < count; ++i) acc.add(plan.model->sample_sum(rng, plan.n));
      auto r = acc.result();
      return r.sum * std::exp(r.shift - plan.log_B) - std::exp(plan.log_A - plan.log_B);
    }
  }
  return 0.0;
}

}  // namespace

const char* statistic_name(Statistic s) {
  switch (s) {
    case Statistic::NormalizedZ: return "normalized-z";
    case Statistic::FreeEnergy: return "free-energy";
    case Statistic::LLN: return "lln";
    case Statistic::MaxRate: return "max-rate";
  }
  return "?";
}

Statistic parse_statistic(const std::string& name) {
  if (name == "normalized-z") return Statistic::NormalizedZ;
  if (name == "free-energy") return Statistic::FreeEnergy;
  if (name == "lln") return Statistic::LLN;
  if (name == "max-rate") return Statistic::MaxRate;
  throw std::invalid_argument("unknown statistic '" + name + "'");
}

SampleSet simulate_statistic(const SimConfig& config) {
  if (config.replicates < 1) throw std::domain_error("simulate: replicates must be >= 1");
  if (config.n < 1) throw std::domain_error("simulate: n must be >= 1");
  double n_summands =
      config.N_override ? *config.N_override : std::round(std::exp(config.c * double(config.n)));
  n_summands = std::max(n_summands, 1.0);
  if (n_summands > 4.0e18) throw ResourceError("simulate: N_n overflows the summand counter");
  double ops = n_summands * double(config.replicates) * double(config.n);
  if (ops > config.max_ops) {
    throw ResourceError("simulate: N_n * replicates * n = " + std::to_string(ops) +
                        " exceeds the op budget " + std::to_string(config.max_ops));
  }

  ReplicatePlan plan{};
  plan.statistic = config.statistic;
  plan.model = &config.model;
  plan.n = config.n;
  plan.n_summands = n_summands;
  if (config.statistic == Statistic::NormalizedZ) {
    RateFunction rf(config.model);
    Normalization norm = normalization(rf, config.c, config.n, n_summands, config.centering);
    plan.log_A = norm.log_A;
    plan.log_B = norm.log_B;
    plan.stable_form = norm.b_n.has_value();
  } else if (config.statistic == Statistic::LLN) {
    plan.lln_shift = (config.model.phi(1.0) + config.c) * double(config.n);
  }

  auto t0 = std::chrono::steady_clock::now();
  SampleSet out;
  out.values.assign(std::size_t(config.replicates), 0.0);
  int threads = config.threads > 0 ? config.threads
                                   : int(std::max(1u, std::thread::hardware_concurrency()));
  threads = int(std::min<std::int64_t>(threads, config.replicates));
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      std::int64_t r = next.fetch_add(1);
      if (r >= config.replicates || failed.load()) break;
      try {
        CounterRng rng(config.master_seed, std::uint64_t(r));
        out.values[std::size_t(r)] = run_replicate(plan, rng);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error_message = e.what();
        failed.store(true);
        break;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("simulate: replicate failed: " + error_message);

  out.n_summands = n_summands;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.c = config.c;
  out.n = config.n;
  out.replicates = config.replicates;
  out.master_seed = config.master_seed;
  out.statistic = config.statistic;
  return out;
}

double ks_distance(const std::vector<double>& sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: sample must be nonempty");
  if (!cdf) throw std::invalid_argument("ks_distance: cdf must be callable");
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  double m = double(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double f = cdf(sorted[i]);
    sup = std::max(sup, std::fabs(double(i + 1) / m - f));
    sup = std::max(sup, std::fabs(double(i) / m - f));
  }
  return sup;
}

std::vector<ConvergenceRow> convergence_table(const DistributionModel& model, double c,
                                              const std::vector<std::int64_t>& n_list,
                                              Statistic statistic, std::int64_t reps,
                                              std::uint64_t seed, int threads, double max_ops) {
  if (!std::is_sorted(n_list.begin(), n_list.end())) {
    throw std::domain_error("convergence_table: n_list must be increasing");
  }
  RateFunction rf(model);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double band = 1e-9 * std::max(1.0, rf.c1());
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_list.size());
  for (std::int64_t n : n_list) {
    SimConfig cfg{model, c, n, std::nullopt, reps, seed, statistic, threads, max_ops,
                  BoundaryCentering::Expansion};
    SampleSet set = simulate_statistic(cfg);
    MeanVar mv;
    for (double v : set.values) mv.add(v);
    double limit = nan;
    double ks = nan;
    switch (statistic) {
      case Statistic::FreeEnergy:
        limit = c > rf.c1() ? model.phi(1.0) + c : rf.inverse(c);
        break;
      case Statistic::LLN:
        if (std::fabs(c - rf.c1()) <= band) {
          limit = 0.5;
        } else if (c > rf.c1()) {
          limit = 1.0;
        }
        break;
      case Statistic::MaxRate:
        limit = c < rf.c_inf() ? rf.inverse(c) : nan;
        break;
      case Statistic::NormalizedZ: {
        Regime regime = classify(rf, c);
        Normalization norm = normalization(rf, c, n, set.n_summands);
        double h = regime.is_lattice ? model.lattice()->span : 0.0;
        LimitLaw law = LimitLaw::for_regime(regime, norm.delta_n.value_or(0.0), h);
        ks = ks_distance(set.values, [&law](double x) { return law.cdf(x); });
        break;
      }
    }
    rows.push_back({n, set.n_summands, mv.mean(), mv.sd(), ks, limit});
  }
  return rows;
}

}  // namespace randprod
