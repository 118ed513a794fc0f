#pragma once

#include <utility>

#include "randprod/model.hpp"

// The Legendre-Fenchel rate function I(beta) = sup_{t>=0} (beta t - phi(t))
// of a model's CGF, realized numerically: evaluation, derivative, inverse,
// the critical points c1 = I(phi'(1)) and c2 = I(phi'(2)), and the solver
// for alpha from the growth exponent c.

namespace randprod {

struct AlphaBeta {
  double alpha;
  double beta;  // = phi'(alpha)
};

struct SolverOptions {
  double rel_tol = 1e-12;
  int max_iter = 200;
};

class RateFunction {
 public:
  explicit RateFunction(DistributionModel model, SolverOptions options = {});

  const DistributionModel& model() const { return model_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  // lim of I(phi'(alpha)) as alpha -> infinity; +inf when the exponent is
  // unbounded. Caps the admissible range of alpha_of_c.
  double c_inf() const { return c_inf_; }
  std::pair<double, double> critical_points() const { return {c1_, c2_}; }

  // Unique alpha > 0 with phi'(alpha) = beta; beta strictly inside
  // (beta0, beta_inf). Bracketing plus safeguarded Newton on the strictly
  // increasing phi'.
  double alpha_of_beta(double beta) const;

  // I(beta); +inf for beta > beta_inf, limit value at beta = beta_inf.
  // Throws std::domain_error for beta <= beta0.
  double evaluate(double beta) const;

  // I'(beta) = alpha_of_beta(beta).
  double derivative(double beta) const { return alpha_of_beta(beta); }

  // g(alpha) = alpha phi'(alpha) - phi(alpha) = I(phi'(alpha)).
  double exponent_of_alpha(double alpha) const;

  // Unique alpha > 0 with g(alpha) = c, for c in (0, c_inf), plus beta.
  AlphaBeta solve_c(double c) const;
  double alpha_of_c(double c) const { return solve_c(c).alpha; }

  // I^{-1}(c) = phi'(alpha_of_c(c)).
  double inverse(double c) const { return solve_c(c).beta; }

 private:
  DistributionModel model_;
  SolverOptions options_;
  double c1_ = 0.0, c2_ = 0.0;
  double c_inf_ = 0.0;
};

}  // namespace randprod
