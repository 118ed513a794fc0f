#include "randprod/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "randprod/numeric.hpp"

namespace randprod {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
  std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
  std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
  std::array<std::uint32_t, 4> out;
  out[0] = std::uint32_t(p1 >> 32) ^ ctr[1] ^ k0;
  out[1] = std::uint32_t(p1);
  out[2] = std::uint32_t(p0 >> 32) ^ ctr[3] ^ k1;
  out[3] = std::uint32_t(p0);
  ctr = out;
}

}  // namespace

void CounterRng::refill() {
  std::array<std::uint32_t, 4> ctr = {
      std::uint32_t(block_), std::uint32_t(block_ >> 32),
      std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
  std::uint32_t k0 = key0_, k1 = key1_;
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, k0, k1);
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  buf_ = ctr;
  pos_ = 0;
  ++block_;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * kPi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

double CounterRng::gamma(double shape) {
  if (!(shape >= 1.0)) throw std::domain_error("CounterRng::gamma: shape must be >= 1");
  if (shape == 1.0) return -std::log(uniform01());
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform01();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::int64_t CounterRng::binomial(std::int64_t n, double p) {
  if (n <= 0) return 0;
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  bool flipped = p > 0.5;
  double q = flipped ? 1.0 - p : p;
  double mean = double(n) * q;
  std::int64_t k;
  if (mean < 12.0) {
    // Inversion by sequential pmf recursion.
    double f = std::pow(1.0 - q, double(n));
    double u = uniform01();
    k = 0;
    double ratio = q / (1.0 - q);
    while (u > f && k < n) {
      u -= f;
      f *= ratio * double(n - k) / double(k + 1);
      ++k;
    }
  } else {
    // BTRS transformed rejection (Hormann 1993).
    double r = q / (1.0 - q);
    double spq = std::sqrt(mean * (1.0 - q));
    double b = 1.15 + 2.53 * spq;
    double a = -0.0873 + 0.0248 * b + 0.01 * q;
    double c = mean + 0.5;
    double vr = 0.92 - 4.2 / b;
    double alpha = (2.83 + 5.1 / b) * spq;
    double lpq = std::log(r);
    std::int64_t m = std::int64_t(std::floor(double(n + 1) * q));
    double h = std::lgamma(double(m) + 1.0) + std::lgamma(double(n - m) + 1.0);
    for (;;) {
      double u = uniform01() - 0.5;
      double v = uniform01();
      double us = 0.5 - std::fabs(u);
      double kd = std::floor((2.0 * a / us + b) * u + c);
      if (kd < 0.0 || kd > double(n)) continue;
      k = std::int64_t(kd);
      if (us >= 0.07 && v <= vr) break;
      v = std::log(v * alpha / (a / (us * us) + b));
      double lhs = h - std::lgamma(kd + 1.0) - std::lgamma(double(n) - kd + 1.0) +
                   (kd - double(m)) * lpq;
      if (v <= lhs) break;
    }
  }
  return flipped ? n - k : k;
}

}  // namespace randprod
