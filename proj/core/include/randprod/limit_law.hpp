#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "randprod/rate.hpp"

// Phase classification of (model, c), the normalizing sequences (A_n, B_n,
// b_n, Delta_n) for every regime, and evaluable limit laws: standard normal,
// half-variance normal, totally skewed alpha-stable, and the lattice
// infinitely divisible family, as log characteristic functions and CDFs
// (Gil-Pelaez inversion).

namespace randprod {

enum class RegimeTag {
  Supercritical,   // c > c2: CLT with the usual normalization
  Critical,        // c = c2: normal limit with variance 1/2
  StableHigh,      // c1 < c < c2: alpha in (1, 2)
  StableBoundary,  // c = c1: alpha = 1
  StableLow        // 0 < c < c1: alpha in (0, 1)
};

const char* regime_name(RegimeTag tag);

struct Regime {
  RegimeTag tag;
  std::optional<double> alpha;  // present for the three stable tags
  std::optional<double> beta;   // phi'(alpha) when alpha is present
  bool is_lattice = false;
};

// Comparison of c against c1/c2 with relative equality band 1e-9*max(1, ci):
// the boundary theorems are measure-zero cases callers must be able to hit.
Regime classify(const RateFunction& rf, double c);

// Centering for the c = c1 boundary: the deterministic expansion is the
// non-lattice default; lattice models always use the truncated-moment form.
enum class BoundaryCentering { Expansion, TruncatedMoment };

struct Normalization {
  double log_A;  // -inf encodes A_n = 0 (the c < c1 regimes)
  double log_B;
  std::optional<double> b_n;      // stable regimes only (log_B = b_n there)
  std::optional<double> delta_n;  // lattice models only, in [0, h)
};

Normalization normalization(const RateFunction& rf, double c, std::int64_t n,
                            double n_summands,
                            BoundaryCentering centering = BoundaryCentering::Expansion);

// log characteristic function of the totally skewed alpha-stable limit:
//   alpha != 1: -Gamma(1-alpha) |u|^alpha exp(-i (pi/2) alpha sgn u)
//   alpha == 1: i u (1-gamma) - |u| (pi/2 + i sgn(u) log|u|)
// Alphas within 1e-9 of 1 are routed to the alpha = 1 branch.
std::complex<double> stable_log_cf(double alpha, double u);

// CDF by Gil-Pelaez inversion, absolute accuracy ~1e-6 (tunable).
double stable_cdf(double alpha, double x, double abs_tol = 1e-6);

// The constant C_{alpha,Delta} of the lattice limit's Levy-Khintchine form,
// pinned so the limit matches the A_n centering used for simulation:
//   alpha in (0,1): C = sum_{x in exp(hZ-Delta), x<1} x^{1-alpha}
//   alpha in (1,2): C = -sum_{x >= 1} x^{1-alpha}
// (closed geometric forms). alpha = 1 is unsupported.
double lattice_shift_constant(double alpha, double delta, double h);

std::complex<double> lattice_id_log_cf(double alpha, double delta, double h, double u);

double lattice_id_cdf(double alpha, double delta, double h, double x, double abs_tol = 1e-4);

// Evaluator for one lattice limit law. CDF inversion splits the law at a
// truncation point X above the evaluation range: jumps larger than X cannot
// land below x, so F(x) = e^{-lambda_X} F_trunc(x) exactly, and the truncated
// characteristic function has bounded oscillation frequency. cdf_batch shares
// the quadrature nodes across many evaluation points (KS testing).
class LatticeIdLaw {
 public:
  LatticeIdLaw(double alpha, double delta, double h);
  double alpha() const { return alpha_; }
  double delta() const { return delta_; }
  double span() const { return h_; }
  double shift() const { return shift_; }
  std::complex<double> log_cf(double u) const;
  double cdf(double x, double abs_tol = 1e-4) const;
  std::vector<double> cdf_batch(const std::vector<double>& xs, double abs_tol = 1e-4) const;

 private:
  struct Prepared;
  Prepared prepare(double x_hi, double abs_tol) const;
  double invert(const Prepared& prep, double x) const;

  double alpha_, delta_, h_, shift_;
};

enum class LawKind { Normal01, NormalHalf, StableSkewed, LatticeID };

// Evaluable limit law for a regime: CDF and log characteristic function.
class LimitLaw {
 public:
  static LimitLaw normal01();
  static LimitLaw normal_half();
  static LimitLaw stable_skewed(double alpha);
  static LimitLaw lattice_id(double alpha, double delta, double h);
  // The law the regime converges to; lattice stable regimes need (Delta, h).
  static LimitLaw for_regime(const Regime& regime, double delta = 0.0, double h = 0.0);

  LawKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double cdf(double x) const;
  // CDF at many points; shares quadrature nodes for the lattice law.
  std::vector<double> cdf_batch(const std::vector<double>& xs) const;
  std::complex<double> log_cf(double u) const;

 private:
  LimitLaw(LawKind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  LawKind kind_;
  double alpha_ = 0.0;
  std::shared_ptr<const LatticeIdLaw> lattice_;
};

}  // namespace randprod
