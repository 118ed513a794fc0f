#pragma once

#include <cmath>
#include <cstdint>

#include "randprod/rate.hpp"

// Precise large-deviation asymptotics for P[S_n >= n beta]: the sharp
// non-lattice tail, the lattice local and tail forms, the Chernoff bound,
// importance-sampling estimators that verify them, truncated exponential
// moments via exponential change of measure, and the first-order CLT
// expansion. All tail quantities are carried in log space; e^{-n I(beta)}
// underflows doubles near n ~ 10^3.

namespace randprod {

enum class TailKind { NonLatticeTail, LatticePointMass, LatticeTail, ChernoffBound };

struct TailAsymptotic {
  double log_value;
  std::int64_t n;
  double beta;
  double alpha;
  TailKind kind;
  double value() const { return std::exp(log_value); }
};

// P[S_n >= n beta] ~ (alpha sqrt(2 pi phi''(alpha) n))^{-1} e^{-n I(beta)}
// for non-lattice models.
TailAsymptotic bahadur_rao_tail(const RateFunction& rf, double beta, std::int64_t n);

// P[S_n = n beta] ~ h (2 pi phi''(alpha) n)^{-1/2} e^{-n I(beta)} for lattice
// models with span h; requires n*beta on the lattice.
TailAsymptotic lattice_point_mass(const RateFunction& rf, double beta, std::int64_t n);

// Lattice tail: the point-mass form times the geometric factor 1/(1-e^{-alpha h}).
TailAsymptotic lattice_tail(const RateFunction& rf, double beta, std::int64_t n);

// P[S_n >= n beta] <= e^{-n I(beta)}.
TailAsymptotic chernoff_bound(const RateFunction& rf, double beta, std::int64_t n);

struct ISEstimate {
  double mean = 0.0;
  double stderror = 0.0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
};

// Unbiased importance-sampling estimate of P[S_n >= n beta]: sample S_n from
// the model tilted at alpha = alpha_of_beta(beta) and average the likelihood
// weights e^{-alpha S_n + n phi(alpha)}, accumulated with the e^{n I(beta)}
// shift so the working weights stay in [0, 1].
ISEstimate estimate_tail_is(const RateFunction& rf, double beta, std::int64_t n,
                            std::int64_t reps, std::uint64_t seed);

enum class TiltMode { ExactTilt, MonteCarlo };

struct TruncatedMomentOptions {
  TiltMode mode = TiltMode::ExactTilt;
  std::int64_t reps = 100000;  // MonteCarlo mode only
  std::uint64_t seed = 0;
};

// M_alpha(n) = e^{-phi(alpha) n} E[e^{alpha S_n} 1_{S_n <= b_n}], evaluated
// through the change of measure as P[tilted S_n <= b_n]. ExactTilt uses the
// closed-form law of the tilted sum (available for all catalog models);
// MonteCarlo estimates the probability by sampling the tilted sum.
double truncated_moment(const DistributionModel& model, double alpha, double b_n,
                        std::int64_t n, TruncatedMomentOptions options = {});

// Phi(x) + mu3 (1 - x^2) e^{-x^2/2} / (6 sqrt(2 pi n) mu2^{3/2}); the
// first-order Edgeworth CDF expansion for standardized non-lattice sums.
double edgeworth_cdf(double mu2, double mu3, std::int64_t n, double x);

// log A_n for the c = c1 alternative centering:
//   A_n = (1/2) N_n e^{phi(1) n} {1 - (2 pi phi''(1) n)^{-1/2}
//          (log(2 pi phi''(1) n) - phi'''(1) / (3 phi''(1)))}.
// Throws NTooSmallError when the bracket is non-positive.
double an_expansion_c1(const DistributionModel& model, std::int64_t n, double n_summands);

// The centering exponent b_n of the stable regimes:
//   non-lattice: b_n = beta n - alpha^{-1} log(alpha sqrt(2 pi phi''(alpha) n))
//   lattice:     b_n = beta n - alpha^{-1} log(h^{-1} sqrt(2 pi phi''(alpha) n))
double stable_b_n(const DistributionModel& model, double alpha, std::int64_t n);

// Estimates N_n P[S_n - b_n > log tau] (target: tau^{-alpha}) with N_n =
// round(e^{cn}) and b_n from the non-lattice centering, by importance
// sampling at beta = (b_n + log tau)/n.
ISEstimate diagnostic_tau_tail(const RateFunction& rf, double c, std::int64_t n, double tau,
                               std::int64_t reps, std::uint64_t seed);

}  // namespace randprod
