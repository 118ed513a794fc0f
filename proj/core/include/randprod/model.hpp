#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "randprod/rng.hpp"

// Distribution models for the factor variable X. A model knows its cumulant
// generating function phi(t) = log E[e^{tX}] (finite for all t >= 0), the
// first three derivatives of phi, the support bounds beta0 = E[X] and
// beta_inf = esssup X, an optional lattice descriptor, and how to sample.
//
// Models are immutable values; samplers take the RNG explicitly and hold no
// state, so shared instances are safe across threads.

namespace randprod {

struct LatticeInfo {
  double span = 0.0;    // maximal h with support contained in h*Z (after shift)
  double offset = 0.0;  // always 0 in the stored normal form
};

class DistributionModel {
 public:
  struct Custom {
    std::string name;
    std::function<double(double)> phi;  // required; must satisfy phi(0) = 0
    // Optional closed-form derivatives; central finite differences otherwise.
    std::function<double(double)> phi_d1, phi_d2, phi_d3;
    double beta0 = 0.0;
    double beta_inf = 0.0;
    std::optional<LatticeInfo> lattice;
    std::function<double(CounterRng&)> sampler;  // required
  };

  static DistributionModel gaussian(double mu, double sigma);
  static DistributionModel log_uniform();  // X = log U, U uniform on (0,1)
  static DistributionModel lattice_bernoulli(double p, double h);  // X in {0, h}
  static DistributionModel custom(Custom spec);

  const std::string& name() const { return name_; }
  double phi(double t) const;  // throws std::domain_error for t < 0
  double phi_d1(double t) const;
  double phi_d2(double t) const;
  double phi_d3(double t) const;
  double beta0() const { return beta0_; }
  double beta_inf() const { return beta_inf_; }
  const std::optional<LatticeInfo>& lattice() const { return lattice_; }

  double sample(CounterRng& rng) const;
  // One draw of S_n = X_1 + ... + X_n. Catalog models use the exact law of
  // the sum (normal / gamma / binomial) instead of an n-fold loop.
  double sample_sum(CounterRng& rng, std::int64_t n) const;

  // Exponential tilt: phi_tilted(t) = phi(t + alpha) - phi(alpha). Catalog
  // models tilt onto themselves with shifted parameters, so their samplers
  // stay exact; tilted custom models provide the CGF but cannot be sampled.
  DistributionModel tilt(double alpha) const;

  // True when sample_sum costs O(1) draws (exact law of the sum available).
  bool has_exact_sum_sampler() const;
  // Exact CDF of S_n where available (used by truncated moments and the exact
  // columns of tail reports); empty if the model has no closed-form sum law.
  std::optional<double> sum_cdf(double x, std::int64_t n) const;
  // Exact sample of max(S_n over m iid copies) via the quantile transform;
  // empty if no closed-form sum law.
  std::optional<double> sample_sum_max(CounterRng& rng, std::int64_t n, std::int64_t m) const;

 private:
  struct GaussianSpec {
    double mu, sigma;
  };
  // X = (1/a) log U: equivalently X = log V with V ~ Beta(a, 1). The a = 1
  // case is the stick-breaking log-uniform model; tilting by alpha maps a to
  // a + alpha, so the family is closed under tilt.
  struct LogBetaSpec {
    double a;
  };
  struct BernoulliSpec {
    double p, h;
  };
  using Impl = std::variant<GaussianSpec, LogBetaSpec, BernoulliSpec, Custom>;

  explicit DistributionModel(Impl impl);
  void validate() const;

  Impl impl_;
  std::string name_;
  double beta0_ = 0.0;
  double beta_inf_ = 0.0;
  std::optional<LatticeInfo> lattice_;
};

// CLI model specification strings:
//   gaussian:mu=0,sigma=1   |   loguniform   |   bernoulli:p=0.5,h=1
DistributionModel parse_model_spec(std::string_view spec);

inline double phi_eval(const DistributionModel& m, double t) { return m.phi(t); }

}  // namespace randprod
