#include "randprod/tail.hpp"

#include <cmath>
#include <stdexcept>

#include "randprod/error.hpp"
#include "randprod/numeric.hpp"

namespace randprod {

namespace {

void check_interior_beta(const RateFunction& rf, double beta) {
  if (!(beta > rf.model().beta0()) || !(beta < rf.model().beta_inf())) {
    throw std::domain_error(rf.model().name() + ": beta must lie strictly in (beta0, beta_inf)");
  }
}

void check_lattice_point(const RateFunction& rf, double beta, std::int64_t n, double h) {
  double nb = double(n) * beta;
  if (std::fabs(nb - h * std::round(nb / h)) > 1e-9) {
    throw OffLatticeError(rf.model().name() + ": n*beta is not a lattice point of h*Z");
  }
}

}  // namespace

TailAsymptotic bahadur_rao_tail(const RateFunction& rf, double beta, std::int64_t n) {
  if (rf.model().lattice()) {
    throw std::domain_error(rf.model().name() + ": bahadur_rao_tail requires a non-lattice model");
  }
  check_interior_beta(rf, beta);
  if (n < 1) throw std::domain_error("bahadur_rao_tail: n must be >= 1");
  double alpha = rf.alpha_of_beta(beta);
  double rate = alpha * beta - rf.model().phi(alpha);
  double log_pref = -std::log(alpha) - 0.5 * std::log(2.0 * kPi * rf.model().phi_d2(alpha) * double(n));
  return {log_pref - double(n) * rate, n, beta, alpha, TailKind::NonLatticeTail};
}

TailAsymptotic lattice_point_mass(const RateFunction& rf, double beta, std::int64_t n) {
  const auto& lat = rf.model().lattice();
  if (!lat) throw std::domain_error(rf.model().name() + ": lattice_point_mass requires a lattice model");
  check_interior_beta(rf, beta);
  check_lattice_point(rf, beta, n, lat->span);
  double alpha = rf.alpha_of_beta(beta);
  double rate = alpha * beta - rf.model().phi(alpha);
  double log_val = std::log(lat->span) -
                   0.5 * std::log(2.0 * kPi * rf.model().phi_d2(alpha) * double(n)) -
                   double(n) * rate;
  return {log_val, n, beta, alpha, TailKind::LatticePointMass};
}

TailAsymptotic lattice_tail(const RateFunction& rf, double beta, std::int64_t n) {
  TailAsymptotic pm = lattice_point_mass(rf, beta, n);
  double h = rf.model().lattice()->span;
  // times 1/(1 - e^{-alpha h})
  pm.log_value -= log1mexp(pm.alpha * h);
  pm.kind = TailKind::LatticeTail;
  return pm;
}

TailAsymptotic chernoff_bound(const RateFunction& rf, double beta, std::int64_t n) {
  if (!(beta > rf.model().beta0())) {
    throw std::domain_error(rf.model().name() + ": chernoff_bound requires beta > beta0");
  }
  double rate = rf.evaluate(beta);
  double alpha = beta < rf.model().beta_inf() ? rf.alpha_of_beta(beta)
                                              : std::numeric_limits<double>::infinity();
  return {-double(n) * rate, n, beta, alpha, TailKind::ChernoffBound};
}

ISEstimate estimate_tail_is(const RateFunction& rf, double beta, std::int64_t n,
                            std::int64_t reps, std::uint64_t seed) {
  check_interior_beta(rf, beta);
  if (reps < 100) throw std::domain_error("estimate_tail_is: reps must be >= 100");
  const auto& model = rf.model();
  double alpha = rf.alpha_of_beta(beta);
  double rate = alpha * beta - model.phi(alpha);
  DistributionModel tilted = model.tilt(alpha);
  double threshold = double(n) * beta;
  // Shifted weight: w e^{n I(beta)} = e^{-alpha (S_n - n beta)} <= 1 on the
  // accepted event, so the accumulation never underflows prematurely.
  CounterRng rng(seed, 0);
  MeanVar acc;
  for (std::int64_t r = 0; r < reps; ++r) {
    double s = tilted.sample_sum(rng, n);
    acc.add(s >= threshold ? std::exp(-alpha * (s - threshold)) : 0.0);
  }
  double scale = std::exp(-double(n) * rate);
  return {acc.mean() * scale, acc.stderror() * scale, reps, seed};
}

double truncated_moment(const DistributionModel& model, double alpha, double b_n,
                        std::int64_t n, TruncatedMomentOptions options) {
  if (!(alpha > 0.0)) throw std::domain_error("truncated_moment: alpha must be positive");
  DistributionModel tilted = model.tilt(alpha);
  if (options.mode == TiltMode::ExactTilt) {
    auto cdf = tilted.sum_cdf(b_n, n);
    if (!cdf) {
      throw UnsupportedError(model.name() + ": ExactTilt needs a closed-form tilted sum CDF");
    }
    return *cdf;
  }
  CounterRng rng(options.seed, 0);
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < options.reps; ++r) {
    if (tilted.sample_sum(rng, n) <= b_n) ++hits;
  }
  return double(hits) / double(options.reps);
}

double edgeworth_cdf(double mu2, double mu3, std::int64_t n, double x) {
  if (!(mu2 > 0.0)) throw std::domain_error("edgeworth_cdf: mu2 must be positive");
  if (n < 1) throw std::domain_error("edgeworth_cdf: n must be >= 1");
  double correction = mu3 * (1.0 - x * x) * std::exp(-0.5 * x * x) /
                      (6.0 * std::sqrt(2.0 * kPi * double(n)) * std::pow(mu2, 1.5));
  return normal_cdf(x) + correction;
}

double an_expansion_c1(const DistributionModel& model, std::int64_t n, double n_summands) {
  if (n < 2) throw std::domain_error("an_expansion_c1: n must be >= 2");
  if (!(n_summands >= 1.0)) throw std::domain_error("an_expansion_c1: N_n must be >= 1");
  double d2 = model.phi_d2(1.0);
  double d3 = model.phi_d3(1.0);
  double v = 2.0 * kPi * d2 * double(n);
  double bracket = 1.0 - (std::log(v) - d3 / (3.0 * d2)) / std::sqrt(v);
  if (!(bracket > 0.0)) {
    throw NTooSmallError(model.name() + ": c1 expansion bracket non-positive at n = " +
                         std::to_string(n));
  }
  return std::log(0.5) + std::log(n_summands) + model.phi(1.0) * double(n) + std::log(bracket);
}

double stable_b_n(const DistributionModel& model, double alpha, std::int64_t n) {
  double beta = model.phi_d1(alpha);
  double spread = std::sqrt(2.0 * kPi * model.phi_d2(alpha) * double(n));
  const auto& lat = model.lattice();
  double log_arg = lat ? std::log(spread / lat->span) : std::log(alpha * spread);
  return beta * double(n) - log_arg / alpha;
}

ISEstimate diagnostic_tau_tail(const RateFunction& rf, double c, std::int64_t n, double tau,
                               std::int64_t reps, std::uint64_t seed) {
  if (rf.model().lattice()) {
    throw std::domain_error(rf.model().name() + ": diagnostic_tau_tail requires a non-lattice model");
  }
  if (!(c > 0.0) || !(c < rf.c2())) {
    throw std::domain_error("diagnostic_tau_tail: c must lie in (0, c2)");
  }
  if (!(tau > 0.0)) throw std::domain_error("diagnostic_tau_tail: tau must be positive");
  double alpha = rf.alpha_of_c(c);
  double b_n = stable_b_n(rf.model(), alpha, n);
  double beta_n = (b_n + std::log(tau)) / double(n);
  ISEstimate est = estimate_tail_is(rf, beta_n, n, reps, seed);
  double n_summands = std::round(std::exp(c * double(n)));
  est.mean *= n_summands;
  est.stderror *= n_summands;
  return est;
}

}  // namespace randprod
