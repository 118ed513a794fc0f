#include "randprod/numeric.hpp"

#include <algorithm>
#include <stdexcept>

#include "randprod/error.hpp"

namespace randprod {

// ---------------------------------------------------------------------------
// Normal tail in log space.
//
// For moderate x use erfc directly; past the erfc underflow point switch to
// the continued-fraction form of the Mills ratio:
//   Phi_bar(x) = phi(x)/x * 1/(1 + 1/(x^2 + 2/(x^2 + 3/(x^2 + ...))))

double log_normal_tail(double x) {
  if (x < 30.0) {
    double t = normal_tail(x);
    if (t > 0.0) return std::log(t);
  }
  double cf = 0.0;
  for (int k = 60; k >= 1; --k) cf = double(k) / (x * x + cf);
  return -0.5 * x * x - 0.5 * std::log(2.0 * kPi) - std::log(x) - std::log1p(cf);
}

double normal_upper_quantile(double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::domain_error("normal_upper_quantile: eps must be in (0,1)");
  if (eps > 0.5) return -normal_upper_quantile(1.0 - eps);
  // Initial guess from the asymptotic tail, then Newton on log Phi_bar.
  double log_eps = std::log(eps);
  double x = std::sqrt(std::max(-2.0 * log_eps, 0.5));
  for (int iter = 0; iter < 80; ++iter) {
    double f = log_normal_tail(x) - log_eps;
    // d/dx log Phi_bar(x) = -phi(x)/Phi_bar(x)
    double log_pdf = -0.5 * x * x - 0.5 * std::log(2.0 * kPi);
    double deriv = -std::exp(log_pdf - log_normal_tail(x));
    double step = f / deriv;
    x -= step;
    if (std::fabs(step) < 1e-14 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Incomplete beta (regularized), continued fraction with modified Lentz.

namespace {

double inc_beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("inc_beta: a,b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * inc_beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * inc_beta_cf(b, a, 1.0 - x) / b;
}

// ---------------------------------------------------------------------------
// Incomplete gamma (regularized): series for x < a+1, continued fraction else.

namespace {

double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_p: a must be positive");
  if (x <= 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_q: a must be positive");
  if (x <= 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

// Newton in log space on log P(a,x) = log p. The leading-order inversion
// x0 = (p Gamma(a+1))^{1/a} is already good for small p.
double gamma_lower_quantile(double a, double p) {
  if (!(a > 0.0)) throw std::domain_error("gamma_lower_quantile: a must be positive");
  if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("gamma_lower_quantile: p must be in (0,1)");
  double log_p = std::log(p);
  double log_x = (log_p + std::lgamma(a + 1.0)) / a;
  double x = std::exp(log_x);
  if (!(x < a)) x = a;  // fall back near the bulk
  for (int iter = 0; iter < 200; ++iter) {
    double P = gamma_p(a, x);
    if (P <= 0.0) {
      x *= 2.0;
      continue;
    }
    double log_pdf = (a - 1.0) * std::log(x) - x - std::lgamma(a);
    // d/dx log P = pdf / P
    double deriv = std::exp(log_pdf - std::log(P));
    double step = (std::log(P) - log_p) / deriv;
    double nx = x - step;
    if (!(nx > 0.0)) nx = x / 2.0;
    if (std::fabs(nx - x) < 1e-14 * std::max(x, 1e-300)) {
      x = nx;
      break;
    }
    x = nx;
  }
  return x;
}

double binomial_cdf(std::int64_t k, std::int64_t n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  // P[B <= k] = I_{1-p}(n-k, k+1)
  return inc_beta(double(n - k), double(k) + 1.0, 1.0 - p);
}

double binomial_tail(std::int64_t k, std::int64_t n, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  // P[B >= k] = I_p(k, n-k+1)
  return inc_beta(double(k), double(n - k) + 1.0, p);
}

// ---------------------------------------------------------------------------
// Summation

double pairwise_sum(std::span<double> buf) {
  std::size_t m = buf.size();
  while (m > 1) {
    std::size_t half = m / 2;
    for (std::size_t i = 0; i < half; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
    if (m % 2 == 1) {
      buf[half] = buf[m - 1];
      m = half + 1;
    } else {
      m = half;
    }
  }
  return m == 1 ? buf[0] : 0.0;
}

void BlockAccumulator::flush() {
  double block = pairwise_sum(std::span<double>(buf_.data(), std::size_t(fill_)));
  fill_ = 0;
  // Neumaier
  double t = sum_ + block;
  if (std::fabs(sum_) >= std::fabs(block)) {
    comp_ += (sum_ - t) + block;
  } else {
    comp_ += (block - t) + sum_;
  }
  sum_ = t;
}

void MaxShiftAccumulator::flush() {
  std::span<double> block(buf_.data(), std::size_t(fill_));
  double m = *std::max_element(block.begin(), block.end());
  for (double& v : block) v = std::exp(v - m);
  double s = pairwise_sum(block);
  fill_ = 0;
  if (m <= shift_) {
    sum_ += s * std::exp(m - shift_);
  } else {
    sum_ = sum_ * std::exp(shift_ - m) + s;
    shift_ = m;
  }
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15 adaptive quadrature

namespace {

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double kronrod = 0.0, gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(mid + half * kGkNode15[i]);
    kronrod += kGkWeight15[i] * v;
    if (i % 2 == 1) gauss += kG7Weight[i / 2] * v;
  }
  kronrod *= half;
  gauss *= half;
  double err = std::pow(200.0 * std::fabs(kronrod - gauss), 1.5);
  return {kronrod, std::min(err, std::fabs(kronrod - gauss) * 200.0)};
}

double gk_adaptive(const std::function<double(double)>& f, double a, double b,
                   double tol, int depth, int max_depth, double* err_acc) {
  GkResult r = gk15(f, a, b);
  if (r.error <= tol || depth >= max_depth) {
    if (depth >= max_depth && r.error > tol * 64.0) {
      throw QuadratureError("integrate_gk: refinement limit reached, error estimate " +
                            std::to_string(r.error) + " > tolerance " + std::to_string(tol));
    }
    *err_acc += r.error;
    return r.value;
  }
  double mid = 0.5 * (a + b);
  return gk_adaptive(f, a, mid, 0.5 * tol, depth + 1, max_depth, err_acc) +
         gk_adaptive(f, mid, b, 0.5 * tol, depth + 1, max_depth, err_acc);
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  double err = 0.0;
  return gk_adaptive(f, a, b, abs_tol, 0, max_depth, &err);
}

}  // namespace randprod
