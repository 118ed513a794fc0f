#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

// Shared numerical building blocks: normal/binomial/gamma distribution
// functions (continued-fraction and series forms accurate in the far tails),
// compensated summation, and adaptive Gauss-Kronrod quadrature.

namespace randprod {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// ---------------------------------------------------------------------------
// Normal distribution

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// log of the upper tail, valid far beyond the underflow point of erfc.
double log_normal_tail(double x);

// Solves normal_tail(x) = eps for x, eps in (0, 1). Accurate for eps down to
// the smallest positive double.
double normal_upper_quantile(double eps);

// ---------------------------------------------------------------------------
// Log-space helpers

// log(1 - e^{-x}) for x > 0.
inline double log1mexp(double x) {
  return x > 0.6931471805599453 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

inline double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) - std::lgamma(double(n - k) + 1);
}

inline double log_binomial_pmf(std::int64_t n, std::int64_t k, double p) {
  return log_choose(n, k) + double(k) * std::log(p) + double(n - k) * std::log1p(-p);
}

// ---------------------------------------------------------------------------
// Incomplete beta / gamma (regularized)

// I_x(a, b), continued-fraction evaluation (Lentz).
double inc_beta(double a, double b, double x);

// Regularized lower/upper incomplete gamma P(a,x), Q(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Solves P(a, x) = p for x; robust for p down to ~1e-300 (log-space Newton).
double gamma_lower_quantile(double a, double p);

// Exact binomial CDF / upper tail via the regularized incomplete beta.
double binomial_cdf(std::int64_t k, std::int64_t n, double p);   // P[B <= k]
double binomial_tail(std::int64_t k, std::int64_t n, double p);  // P[B >= k]

// ---------------------------------------------------------------------------
// Summation

// Pairwise reduction of a contiguous range (modifies the buffer).
double pairwise_sum(std::span<double> buf);

// Fixed 4096-term blocks reduced pairwise, block results merged with a
// Neumaier-compensated accumulator. Summation order is a pure function of the
// insertion order, so results are independent of threading as long as each
// accumulator is fed sequentially.
class BlockAccumulator {
 public:
  static constexpr int kBlock = 4096;
  void add(double x) {
    buf_[fill_++] = x;
    if (fill_ == kBlock) flush();
  }
  double total() {
    if (fill_ > 0) flush();
    return sum_ + comp_;
  }

 private:
  void flush();
  std::array<double, kBlock> buf_{};
  int fill_ = 0;
  double sum_ = 0.0, comp_ = 0.0;
};

// Streaming log-sum-exp: maintains (max, sum of exp(x - max)) with the same
// blockwise pairwise order as BlockAccumulator.
class MaxShiftAccumulator {
 public:
  static constexpr int kBlock = 4096;
  void add(double x) {
    buf_[fill_++] = x;
    if (fill_ == kBlock) flush();
  }
  // Returns {shift, sum}: total = sum * exp(shift). Empty input: {-inf, 0}.
  struct Result {
    double shift;
    double sum;
    double log_total() const { return shift + std::log(sum); }
  };
  Result result() {
    if (fill_ > 0) flush();
    return {shift_, sum_};
  }
  double max() {
    if (fill_ > 0) flush();
    return shift_;
  }

 private:
  void flush();
  std::array<double, kBlock> buf_{};
  int fill_ = 0;
  double shift_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// Welford accumulator for mean/variance.
class MeanVar {
 public:
  void add(double x) {
    ++count_;
    double d = x - mean_;
    mean_ += d / double(count_);
    m2_ += d * (x - mean_);
  }
  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / double(count_ - 1) : 0.0; }
  double sd() const { return std::sqrt(variance()); }
  double stderror() const { return count_ > 0 ? sd() / std::sqrt(double(count_)) : 0.0; }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
};

// ---------------------------------------------------------------------------
// Quadrature

// Kronrod-15 nodes/weights on [-1, 1]; the odd-indexed nodes carry the
// embedded Gauss-7 rule used for error estimation.
inline constexpr std::array<double, 15> kGkNode15 = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr std::array<double, 15> kGkWeight15 = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline constexpr std::array<double, 7> kG7Weight = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

// Adaptive Gauss-Kronrod (G7/K15) on [a, b] to absolute tolerance.
// Throws QuadratureError if the error estimate cannot be met.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, int max_depth = 24);

}  // namespace randprod
