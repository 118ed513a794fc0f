#include "randprod/rate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "randprod/error.hpp"

namespace randprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Safeguarded Newton on a strictly increasing function f with derivative df,
// starting from a bracket [lo, hi] with f(lo) <= 0 <= f(hi).
double newton_in_bracket(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double lo, double hi,
                         const SolverOptions& opt, const char* what) {
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    double fx = f(x);
    if (fx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double d = df(x);
    double step = d > 0.0 ? fx / d : 0.0;
    double nx = x - step;
    if (!(nx > lo) || !(nx < hi)) nx = 0.5 * (lo + hi);  // bisect when Newton escapes
    if (std::fabs(nx - x) <= opt.rel_tol * std::max(std::fabs(nx), 1e-300)) return nx;
    x = nx;
  }
  throw SolverError(std::string(what) + ": no convergence after " +
                    std::to_string(opt.max_iter) + " iterations (defective model?)");
}

}  // namespace

RateFunction::RateFunction(DistributionModel model, SolverOptions options)
    : model_(std::move(model)), options_(options) {
  c1_ = model_.phi_d1(1.0) - model_.phi(1.0);
  c2_ = 2.0 * model_.phi_d1(2.0) - model_.phi(2.0);
  if (!(0.0 < c1_ && c1_ < c2_)) {
    throw std::invalid_argument(model_.name() + ": critical points must satisfy 0 < c1 < c2");
  }
  // c_inf by doubling alpha until g stops increasing or is clearly unbounded.
  c_inf_ = kInf;
  double prev = exponent_of_alpha(1.0);
  for (int k = 1; k <= 45; ++k) {
    double g = exponent_of_alpha(std::ldexp(1.0, k));
    if (!std::isfinite(g)) break;
    if (g - prev < 1e-11 * std::max(1.0, std::fabs(g))) {
      c_inf_ = g;
      break;
    }
    prev = g;
  }
}

double RateFunction::alpha_of_beta(double beta) const {
  if (!(beta > model_.beta0()) || !(beta < model_.beta_inf())) {
    throw std::domain_error(model_.name() + ": beta must lie strictly in (beta0, beta_inf)");
  }
  // Grow the bracket geometrically from [1e-8, 1] until phi' straddles beta.
  double lo = 1e-8, hi = 1.0;
  int guard = 0;
  while (model_.phi_d1(hi) < beta) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 1100) throw SolverError("alpha_of_beta: bracket growth failed");
  }
  while (model_.phi_d1(lo) > beta) {
    hi = lo;
    lo *= 0.5;
    if (++guard > 1100) throw SolverError("alpha_of_beta: bracket shrink failed");
  }
  auto f = [&](double a) { return model_.phi_d1(a) - beta; };
  auto df = [&](double a) { return model_.phi_d2(a); };
  return newton_in_bracket(f, df, lo, hi, options_, "alpha_of_beta");
}

double RateFunction::evaluate(double beta) const {
  double b0 = model_.beta0(), binf = model_.beta_inf();
  if (!(beta > b0)) throw std::domain_error(model_.name() + ": I(beta) requires beta > beta0");
  double eq_band = 1e-12 * std::max(1.0, std::fabs(binf));
  if (std::isfinite(binf) && beta > binf + eq_band) return kInf;
  if (std::isfinite(binf) && beta >= binf - eq_band) {
    // I(beta_inf) = lim_{t->inf} (beta_inf t - phi(t)); the integrand of the
    // sup is increasing in t, so evaluate along doubling t and extrapolate.
    double prev = binf - model_.phi(1.0);
    for (int k = 1; k <= 60; ++k) {
      double t = std::ldexp(1.0, k);
      double v = binf * t - model_.phi(t);
      if (!std::isfinite(v) || v > 1e15) return kInf;
      if (v - prev < 1e-11 * std::max(1.0, std::fabs(v))) return v;
      prev = v;
    }
    return kInf;
  }
  double alpha = alpha_of_beta(beta);
  return alpha * beta - model_.phi(alpha);
}

double RateFunction::exponent_of_alpha(double alpha) const {
  return alpha * model_.phi_d1(alpha) - model_.phi(alpha);
}

AlphaBeta RateFunction::solve_c(double c) const {
  if (!(c > 0.0) || !(c < c_inf_)) {
    throw std::domain_error(model_.name() + ": c must lie in (0, c_inf)");
  }
  // g is strictly increasing with g'(alpha) = alpha phi''(alpha) > 0.
  double lo = 1e-8, hi = 1.0;
  int guard = 0;
  while (exponent_of_alpha(hi) < c) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 1100) throw SolverError("alpha_of_c: bracket growth failed");
  }
  while (exponent_of_alpha(lo) > c) {
    hi = lo;
    lo *= 0.5;
    if (++guard > 1100) throw SolverError("alpha_of_c: bracket shrink failed");
  }
  auto f = [&](double a) { return exponent_of_alpha(a) - c; };
  auto df = [&](double a) { return a * model_.phi_d2(a); };
  double alpha = newton_in_bracket(f, df, lo, hi, options_, "alpha_of_c");
  return {alpha, model_.phi_d1(alpha)};
}

}  // namespace randprod
