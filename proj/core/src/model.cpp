#include "randprod/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "randprod/error.hpp"
#include "randprod/numeric.hpp"

namespace randprod {

namespace {

std::string fmt_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Central finite differences for custom models that only provide phi.
// Steps chosen per derivative order so truncation and roundoff balance.
double fd1(const std::function<double(double)>& f, double t) {
  double h = std::max(1e-5, 1e-5 * std::fabs(t));
  if (t - h < 0.0) h = t / 2.0;
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

double fd2(const std::function<double(double)>& f, double t) {
  double h = std::max(1e-4, 1e-4 * std::fabs(t));
  if (t - h < 0.0) h = t / 2.0;
  return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

double fd3(const std::function<double(double)>& f, double t) {
  double h = std::max(1e-3, 1e-3 * std::fabs(t));
  if (t - 2.0 * h < 0.0) h = t / 4.0;
  return (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h * h * h);
}

// gcd over the reals with tolerance, for the lattice maximality check.
double float_gcd(double a, double b, double tol) {
  a = std::fabs(a);
  b = std::fabs(b);
  if (a < b) std::swap(a, b);
  while (b > tol) {
    double r = std::fmod(a, b);
    if (r > b - tol) r = 0.0;
    a = b;
    b = r;
  }
  return a;
}

// Tilted Bernoulli success probability, stable for large alpha*h.
double bernoulli_tilt_p(double p, double h, double alpha) {
  return p / (p + (1.0 - p) * std::exp(-alpha * h));
}

}  // namespace

DistributionModel::DistributionModel(Impl impl) : impl_(std::move(impl)) {
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) {
    name_ = "gaussian(mu=" + fmt_param(g->mu) + ",sigma=" + fmt_param(g->sigma) + ")";
    beta0_ = g->mu;
    beta_inf_ = std::numeric_limits<double>::infinity();
  } else if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    name_ = l->a == 1.0 ? "loguniform" : "logbeta(a=" + fmt_param(l->a) + ")";
    beta0_ = -1.0 / l->a;
    beta_inf_ = 0.0;
  } else if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    name_ = "bernoulli(p=" + fmt_param(b->p) + ",h=" + fmt_param(b->h) + ")";
    beta0_ = b->p * b->h;
    beta_inf_ = b->h;
    lattice_ = LatticeInfo{b->h, 0.0};
  } else {
    const auto& c = std::get<Custom>(impl_);
    name_ = c.name;
    beta0_ = c.beta0;
    beta_inf_ = c.beta_inf;
    lattice_ = c.lattice;
  }
}

void DistributionModel::validate() const {
  if (std::fabs(phi(0.0)) > 1e-9) throw std::invalid_argument(name_ + ": phi(0) must vanish");
  for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    if (!(phi_d2(t) > 0.0)) {
      throw std::invalid_argument(name_ + ": phi''(" + fmt_param(t) +
                                  ") not positive; X must be non-degenerate");
    }
  }
  if (!(beta0_ < beta_inf_)) throw std::invalid_argument(name_ + ": beta0 must be below beta_inf");
}

DistributionModel DistributionModel::gaussian(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
  DistributionModel m(Impl{GaussianSpec{mu, sigma}});
  m.validate();
  return m;
}

DistributionModel DistributionModel::log_uniform() {
  DistributionModel m(Impl{LogBetaSpec{1.0}});
  m.validate();
  return m;
}

DistributionModel DistributionModel::lattice_bernoulli(double p, double h) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("bernoulli: p must be in (0,1)");
  if (!(h > 0.0)) throw std::invalid_argument("bernoulli: h must be positive");
  DistributionModel m(Impl{BernoulliSpec{p, h}});
  m.validate();
  return m;
}

DistributionModel DistributionModel::custom(Custom spec) {
  if (!spec.phi) throw std::invalid_argument("custom model: phi is required");
  if (!spec.sampler) throw std::invalid_argument("custom model: sampler is required");
  if (spec.lattice && !(spec.lattice->span > 0.0)) {
    throw std::invalid_argument("custom model: lattice span must be positive");
  }
  DistributionModel m(Impl{std::move(spec)});
  m.validate();
  if (m.lattice_) {
    // Sampled support check: draws must lie on h*Z and h must be maximal.
    const double h = m.lattice_->span;
    CounterRng probe(0x9E3779B97F4A7C15ull, 0);
    double gcd = 0.0;
    for (int i = 0; i < 64; ++i) {
      double v = m.sample(probe);
      double k = std::round(v / h);
      if (std::fabs(v - k * h) > 1e-12 * std::max(1.0, std::fabs(v))) {
        throw std::invalid_argument(m.name_ + ": sampled value off the declared lattice");
      }
      if (v != 0.0) gcd = gcd == 0.0 ? std::fabs(v) : float_gcd(gcd, v, 1e-9);
    }
    if (gcd > h * (1.0 + 1e-6)) {
      throw std::invalid_argument(m.name_ + ": declared span is not maximal for sampled support");
    }
  }
  return m;
}

double DistributionModel::phi(double t) const {
  if (t < 0.0) throw std::domain_error(name_ + ": phi requires t >= 0");
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) {
    return g->mu * t + 0.5 * g->sigma * g->sigma * t * t;
  }
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    return -std::log1p(t / l->a);
  }
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    double th = t * b->h;
    if (th > 36.0) return th + std::log(b->p + (1.0 - b->p) * std::exp(-th));
    return std::log1p(b->p * std::expm1(th));
  }
  return std::get<Custom>(impl_).phi(t);
}

double DistributionModel::phi_d1(double t) const {
  if (t < 0.0) throw std::domain_error(name_ + ": phi_d1 requires t >= 0");
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) return g->mu + g->sigma * g->sigma * t;
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) return -1.0 / (l->a + t);
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) return b->h * bernoulli_tilt_p(b->p, b->h, t);
  const auto& c = std::get<Custom>(impl_);
  return c.phi_d1 ? c.phi_d1(t) : fd1(c.phi, t);
}

double DistributionModel::phi_d2(double t) const {
  if (t < 0.0) throw std::domain_error(name_ + ": phi_d2 requires t >= 0");
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) return g->sigma * g->sigma;
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    double s = l->a + t;
    return 1.0 / (s * s);
  }
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    double w = bernoulli_tilt_p(b->p, b->h, t);
    return b->h * b->h * w * (1.0 - w);
  }
  const auto& c = std::get<Custom>(impl_);
  return c.phi_d2 ? c.phi_d2(t) : fd2(c.phi, t);
}

double DistributionModel::phi_d3(double t) const {
  if (t < 0.0) throw std::domain_error(name_ + ": phi_d3 requires t >= 0");
  if (std::get_if<GaussianSpec>(&impl_)) return 0.0;
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    double s = l->a + t;
    return -2.0 / (s * s * s);
  }
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    double w = bernoulli_tilt_p(b->p, b->h, t);
    return b->h * b->h * b->h * w * (1.0 - w) * (1.0 - 2.0 * w);
  }
  const auto& c = std::get<Custom>(impl_);
  return c.phi_d3 ? c.phi_d3(t) : fd3(c.phi, t);
}

double DistributionModel::sample(CounterRng& rng) const {
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) return g->mu + g->sigma * rng.normal();
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) return std::log(rng.uniform01()) / l->a;
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) return rng.uniform01() < b->p ? b->h : 0.0;
  return std::get<Custom>(impl_).sampler(rng);
}

double DistributionModel::sample_sum(CounterRng& rng, std::int64_t n) const {
  if (n < 1) throw std::domain_error("sample_sum: n must be >= 1");
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) {
    return double(n) * g->mu + g->sigma * std::sqrt(double(n)) * rng.normal();
  }
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    // -log U ~ Exp(1), so the sum is -Gamma(n, 1) / a.
    return -rng.gamma(double(n)) / l->a;
  }
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    return b->h * double(rng.binomial(n, b->p));
  }
  const auto& c = std::get<Custom>(impl_);
  double s = 0.0;
  for (std::int64_t i = 0; i < n; ++i) s += c.sampler(rng);
  return s;
}

bool DistributionModel::has_exact_sum_sampler() const {
  return !std::holds_alternative<Custom>(impl_);
}

std::optional<double> DistributionModel::sum_cdf(double x, std::int64_t n) const {
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) {
    return normal_cdf((x - double(n) * g->mu) / (g->sigma * std::sqrt(double(n))));
  }
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    if (x >= 0.0) return 1.0;
    // P[-G/a <= x] = P[G >= -a x]
    return gamma_q(double(n), -l->a * x);
  }
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    double k = std::floor(x / b->h + 1e-9);
    return binomial_cdf(std::int64_t(k), n, b->p);
  }
  return std::nullopt;
}

std::optional<double> DistributionModel::sample_sum_max(CounterRng& rng, std::int64_t n,
                                                        std::int64_t m) const {
  if (m < 1) throw std::domain_error("sample_sum_max: m must be >= 1");
  double u = rng.uniform01();
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) {
    // max of m iid sums = Q(u^{1/m}); work with the upper-tail mass directly.
    double eps = -std::expm1(std::log(u) / double(m));
    return double(n) * g->mu + g->sigma * std::sqrt(double(n)) * normal_upper_quantile(eps);
  }
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    // max of (-G_i/a) = -min(G_i)/a; the minimum maps to a tiny lower-tail mass.
    double p = -std::expm1(std::log1p(-u) / double(m));
    return -gamma_lower_quantile(double(n), p) / l->a;
  }
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    // Smallest k with F(k)^m >= u, binary search on the binomial CDF.
    double log_u = std::log(u);
    std::int64_t lo = 0, hi = n;
    auto accept = [&](std::int64_t k) {
      double tail = binomial_tail(k + 1, n, b->p);
      double log_F = tail < 0.5 ? std::log1p(-tail) : std::log(binomial_cdf(k, n, b->p));
      return double(m) * log_F >= log_u;
    };
    while (lo < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      if (accept(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return b->h * double(lo);
  }
  return std::nullopt;
}

DistributionModel DistributionModel::tilt(double alpha) const {
  if (!(alpha > 0.0)) throw std::domain_error("tilt: alpha must be positive");
  if (auto* g = std::get_if<GaussianSpec>(&impl_)) {
    return DistributionModel(Impl{GaussianSpec{g->mu + alpha * g->sigma * g->sigma, g->sigma}});
  }
  if (auto* l = std::get_if<LogBetaSpec>(&impl_)) {
    return DistributionModel(Impl{LogBetaSpec{l->a + alpha}});
  }
  if (auto* b = std::get_if<BernoulliSpec>(&impl_)) {
    return DistributionModel(Impl{BernoulliSpec{bernoulli_tilt_p(b->p, b->h, alpha), b->h}});
  }
  const auto& c = std::get<Custom>(impl_);
  Custom tilted;
  tilted.name = "tilt(" + c.name + "," + fmt_param(alpha) + ")";
  double phi_alpha = c.phi(alpha);
  auto base_phi = c.phi;
  tilted.phi = [base_phi, alpha, phi_alpha](double t) { return base_phi(t + alpha) - phi_alpha; };
  if (c.phi_d1) {
    auto d = c.phi_d1;
    tilted.phi_d1 = [d, alpha](double t) { return d(t + alpha); };
  }
  if (c.phi_d2) {
    auto d = c.phi_d2;
    tilted.phi_d2 = [d, alpha](double t) { return d(t + alpha); };
  }
  if (c.phi_d3) {
    auto d = c.phi_d3;
    tilted.phi_d3 = [d, alpha](double t) { return d(t + alpha); };
  }
  tilted.beta0 = phi_d1(alpha);
  tilted.beta_inf = beta_inf_;
  tilted.lattice = lattice_;
  std::string who = tilted.name;
  tilted.sampler = [who](CounterRng&) -> double {
    throw UnsupportedError(who + ": no exact sampler for tilted custom models");
  };
  return DistributionModel(Impl{std::move(tilted)});
}

// ---------------------------------------------------------------------------
// Model specification strings

namespace {

double parse_value(std::string_view s, std::string_view what) {
  try {
    return std::stod(std::string(s));
  } catch (const std::exception&) {
    throw std::invalid_argument("model spec: bad value for " + std::string(what));
  }
}

}  // namespace

DistributionModel parse_model_spec(std::string_view spec) {
  std::string_view kind = spec;
  std::string_view params;
  if (auto colon = spec.find(':'); colon != std::string_view::npos) {
    kind = spec.substr(0, colon);
    params = spec.substr(colon + 1);
  }
  double mu = 0.0, sigma = 1.0, p = 0.5, h = 1.0;
  while (!params.empty()) {
    auto comma = params.find(',');
    std::string_view item = params.substr(0, comma);
    params = comma == std::string_view::npos ? std::string_view{} : params.substr(comma + 1);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("model spec: expected key=value");
    std::string_view key = item.substr(0, eq);
    std::string_view val = item.substr(eq + 1);
    if (key == "mu") {
      mu = parse_value(val, key);
    } else if (key == "sigma") {
      sigma = parse_value(val, key);
    } else if (key == "p") {
      p = parse_value(val, key);
    } else if (key == "h") {
      h = parse_value(val, key);
    } else {
      throw std::invalid_argument("model spec: unknown parameter '" + std::string(key) + "'");
    }
  }
  if (kind == "gaussian") return DistributionModel::gaussian(mu, sigma);
  if (kind == "loguniform") return DistributionModel::log_uniform();
  if (kind == "bernoulli") return DistributionModel::lattice_bernoulli(p, h);
  throw std::invalid_argument("model spec: unknown model '" + std::string(kind) + "'");
}

}  // namespace randprod
