#include "randprod/limit_law.hpp"

#include <cmath>
#include <stdexcept>

#include "randprod/error.hpp"
#include "randprod/numeric.hpp"
#include "randprod/tail.hpp"

namespace randprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaOneBand = 1e-9;

bool near(double x, double target, double rel_band) {
  return std::fabs(x - target) <= rel_band * std::max(1.0, std::fabs(target));
}

// Gamma(1-alpha) cos(pi alpha / 2): the decay coefficient of |cf|; positive
// on (0,1) and (1,2), with limit pi/2 at alpha = 1.
double stable_decay_coefficient(double alpha) {
  if (std::fabs(alpha - 1.0) <= kAlphaOneBand) return 0.5 * kPi;
  return std::tgamma(1.0 - alpha) * std::cos(0.5 * kPi * alpha);
}

// F(x) = 1/2 - (1/pi) int_0^U Im[e^{-iux} cf(u)] / u du, integrated over
// dyadic panels of (0, U] so the u -> 0 end refines geometrically.
double gil_pelaez(const std::function<std::complex<double>(double)>& log_cf, double x,
                  double cutoff, double abs_tol) {
  auto integrand = [&](double u) {
    std::complex<double> z = log_cf(u);
    double mag = std::exp(z.real());
    return mag * std::sin(z.imag() - u * x) / u;
  };
  double total = 0.0;
  double panel_tol = abs_tol / 16.0;
  int quiet = 0;
  double hi = cutoff;
  for (int k = 0; k < 600; ++k) {
    double lo = 0.5 * hi;
    double piece = integrate_gk(integrand, lo, hi, panel_tol);
    total += piece;
    hi = lo;
    if (k >= 25) {
      quiet = std::fabs(piece) < abs_tol / 64.0 ? quiet + 1 : 0;
      if (quiet >= 3) break;
      if (k == 599) {
        throw QuadratureError("gil_pelaez: panel refinement did not terminate");
      }
    }
  }
  double f = 0.5 - total / kPi;
  return std::min(1.0, std::max(0.0, f));
}

}  // namespace

const char* regime_name(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::Supercritical: return "supercritical";
    case RegimeTag::Critical: return "critical";
    case RegimeTag::StableHigh: return "stable-high";
    case RegimeTag::StableBoundary: return "stable-boundary";
    case RegimeTag::StableLow: return "stable-low";
  }
  return "?";
}

Regime classify(const RateFunction& rf, double c) {
  if (!(c > 0.0)) throw std::domain_error("classify: c must be positive");
  Regime regime;
  regime.is_lattice = rf.model().lattice().has_value();
  if (near(c, rf.c2(), 1e-9)) {
    regime.tag = RegimeTag::Critical;
    return regime;
  }
  if (c > rf.c2()) {
    regime.tag = RegimeTag::Supercritical;
    return regime;
  }
  AlphaBeta ab = rf.solve_c(c);
  regime.alpha = ab.alpha;
  regime.beta = ab.beta;
  if (near(c, rf.c1(), 1e-9)) {
    regime.tag = RegimeTag::StableBoundary;
  } else if (c > rf.c1()) {
    regime.tag = RegimeTag::StableHigh;
  } else {
    regime.tag = RegimeTag::StableLow;
  }
  return regime;
}

Normalization normalization(const RateFunction& rf, double c, std::int64_t n,
                            double n_summands, BoundaryCentering centering) {
  if (n < 2) throw std::domain_error("normalization: n must be >= 2");
  if (!(n_summands >= 1.0)) throw std::domain_error("normalization: N_n must be >= 1");
  const DistributionModel& model = rf.model();
  Regime regime = classify(rf, c);
  double log_n_summands = std::log(n_summands);
  double phi1 = model.phi(1.0);
  Normalization norm{};
  if (regime.tag == RegimeTag::Supercritical || regime.tag == RegimeTag::Critical) {
    double phi2 = model.phi(2.0);
    norm.log_A = log_n_summands + phi1 * double(n);
    // Var Z_n = N_n (e^{phi(2) n} - e^{2 phi(1) n}), assembled in log space;
    // 2 phi(1) < phi(2) by strict convexity.
    norm.log_B = 0.5 * (log_n_summands + phi2 * double(n) +
                        std::log1p(-std::exp(double(n) * (2.0 * phi1 - phi2))));
    return norm;
  }
  double alpha = *regime.alpha;
  double b_n = stable_b_n(model, alpha, n);
  norm.b_n = b_n;
  norm.log_B = b_n;
  switch (regime.tag) {
    case RegimeTag::StableHigh:
      norm.log_A = log_n_summands + phi1 * double(n);
      break;
    case RegimeTag::StableBoundary:
      if (!regime.is_lattice && centering == BoundaryCentering::Expansion) {
        norm.log_A = an_expansion_c1(model, n, n_summands);
      } else {
        double m1 = truncated_moment(model, 1.0, b_n, n);
        norm.log_A = log_n_summands + phi1 * double(n) + std::log(m1);
      }
      break;
    case RegimeTag::StableLow:
      norm.log_A = -kInf;
      break;
    default:
      break;
  }
  if (regime.is_lattice) {
    double h = model.lattice()->span;
    norm.delta_n = b_n - std::floor(b_n / h) * h;
  }
  return norm;
}

std::complex<double> stable_log_cf(double alpha, double u) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw std::domain_error("stable_log_cf: alpha must lie in (0, 2)");
  }
  if (u == 0.0) return {0.0, 0.0};
  double sg = u > 0.0 ? 1.0 : -1.0;
  double au = std::fabs(u);
  if (std::fabs(alpha - 1.0) <= kAlphaOneBand) {
    return {-0.5 * kPi * au, u * (1.0 - kEulerGamma) - u * std::log(au)};
  }
  double mag = std::tgamma(1.0 - alpha) * std::pow(au, alpha);
  double phase = -0.5 * kPi * alpha * sg;
  return {-mag * std::cos(phase), -mag * std::sin(phase)};
}

double stable_cdf(double alpha, double x, double abs_tol) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw std::domain_error("stable_cdf: alpha must lie in (0, 2)");
  }
  double decay = stable_decay_coefficient(alpha);
  double cutoff = std::pow(40.0 / decay, 1.0 / alpha);
  return gil_pelaez([alpha](double u) { return stable_log_cf(alpha, u); }, x, cutoff, abs_tol);
}

double lattice_shift_constant(double alpha, double delta, double h) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw std::domain_error("lattice_shift_constant: alpha must lie in (0, 2)");
  }
  if (std::fabs(alpha - 1.0) <= kAlphaOneBand) {
    throw UnsupportedError("lattice_shift_constant: alpha = 1 has no pinned constant");
  }
  if (!(h > 0.0)) throw std::domain_error("lattice_shift_constant: h must be positive");
  if (!(delta >= 0.0) || !(delta <= h)) {
    throw std::domain_error("lattice_shift_constant: Delta must lie in [0, h]");
  }
  double r = 1.0 - alpha;  // exponent of x^{1-alpha} over the geometric grid
  if (alpha < 1.0) {
    // sum over x = e^{hk - Delta} < 1, largest index K
    int K = delta > 0.0 ? 0 : -1;
    return std::exp(r * (h * double(K) - delta)) / (1.0 - std::exp(-r * h));
  }
  // alpha in (1, 2): minus the sum over x >= 1, smallest index K'
  int K = delta > 0.0 ? 1 : 0;
  return -std::exp(r * (h * double(K) - delta)) / (1.0 - std::exp(r * h));
}

// ---------------------------------------------------------------------------
// Lattice infinitely divisible limit law

LatticeIdLaw::LatticeIdLaw(double alpha, double delta, double h)
    : alpha_(alpha), delta_(delta), h_(h) {
  shift_ = lattice_shift_constant(alpha, delta, h);
}

std::complex<double> LatticeIdLaw::log_cf(double u) const {
  if (u == 0.0) return {0.0, 0.0};
  if (u < 0.0) return std::conj(log_cf(-u));
  // Term truncation at |term| < 1e-14 on both ends: small-x terms are
  // O(u^2 x^{2-alpha}/2), large-x terms O(2 x^{-alpha}).
  double log_x_lo = (std::log(2e-14) - 2.0 * std::log(std::max(u, 1e-9))) / (2.0 - alpha_);
  int k_lo = int(std::floor((log_x_lo + delta_) / h_));
  int k_hi = int(std::ceil((std::log(2e14) / alpha_ + delta_) / h_));
  double re = 0.0, im = shift_ * u;
  for (int k = k_lo; k <= k_hi; ++k) {
    double x = std::exp(h_ * double(k) - delta_);
    double w = std::pow(x, -alpha_);
    double ux = u * x;
    re += (std::cos(ux) - 1.0) * w;
    im += (std::sin(ux) - (x < 1.0 ? ux : 0.0)) * w;
  }
  return {re, im};
}

// Prepared quadrature for CDF inversion of the law truncated at X: jump
// terms x_k <= X, shared Gauss-Kronrod nodes with the per-node cf cached.
struct LatticeIdLaw::Prepared {
  double factor;        // e^{-lambda_X}, the no-huge-jump probability
  double x_limit;       // valid for evaluation points below this
  struct Node {
    double u;
    double kronrod_over_u;  // K15 weight * e^{Re log cf} / u
    double gauss_over_u;    // G7 weight (0 on Kronrod-only nodes) * ... / u
    double phase;           // Im log cf
  };
  std::vector<Node> nodes;
};

LatticeIdLaw::Prepared LatticeIdLaw::prepare(double x_hi, double abs_tol) const {
  Prepared prep;
  // Smallest lattice point strictly above the evaluation range.
  double x_need = std::max(x_hi, std::exp(-delta_));
  int k_cut = int(std::floor((std::log(x_need) + delta_) / h_)) + 1;
  double X = std::exp(h_ * double(k_cut) - delta_);
  prep.x_limit = X;
  // lambda_X = sum_{k >= k_cut} x_k^{-alpha}, geometric.
  double lambda = std::exp(-alpha_ * (h_ * double(k_cut) - delta_)) / (1.0 - std::exp(-alpha_ * h_));
  prep.factor = std::exp(-lambda);

  // Truncated jump arrays; the small-x end at the 1e-14 term rule for the
  // largest frequency that can matter (found below, so seed with u = 1e4).
  int k_lo = int(std::floor(((std::log(2e-14) - 2.0 * std::log(1e4)) / (2.0 - alpha_) + delta_) / h_));
  std::vector<double> xs, ws;
  for (int k = k_lo; k < k_cut; ++k) {
    xs.push_back(std::exp(h_ * double(k) - delta_));
    ws.push_back(std::pow(xs.back(), -alpha_));
  }
  auto trunc_log_cf = [&](double u) {
    double re = 0.0, im = shift_ * u;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double ux = u * xs[i];
      re += (std::cos(ux) - 1.0) * ws[i];
      im += (std::sin(ux) - (xs[i] < 1.0 ? ux : 0.0)) * ws[i];
    }
    return std::complex<double>(re, im);
  };

  // Decay cutoff: |cf| has envelope exp(-const u^alpha) with a log-periodic
  // wobble; scan geometrically until well under the tolerance.
  double cutoff = 1.0;
  while (trunc_log_cf(cutoff).real() > -46.0) {
    cutoff *= 1.2;
    if (cutoff > 1e9) throw QuadratureError("LatticeIdLaw: cf decay cutoff not found");
  }

  // Phase-derivative bound of e^{-iux} cf(u) over u in (0, cutoff]: node
  // density is chosen to resolve the fastest oscillation.
  double slope = std::fabs(shift_) + x_hi;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double b = xs[i] < 1.0 ? std::min(2.0, 0.5 * cutoff * cutoff * xs[i] * xs[i]) : 1.0;
    slope += b * xs[i] * ws[i];
  }

  // Dyadic panels of (0, cutoff], each split so a GK15 subpanel spans at
  // most ~1.25 oscillation cycles (12+ nodes per cycle).
  double hi = cutoff;
  int quiet = 0;
  double err_sum = 0.0;
  double probe_total = 0.0;  // running integral at x = 0 for the quiet rule
  for (int k = 0; k < 600; ++k) {
    double lo = 0.5 * hi;
    double width = hi - lo;
    int pieces = std::max(1, int(std::ceil(width * slope / (2.0 * kPi * 1.25))));
    double piece_total = 0.0, piece_gauss = 0.0;
    std::size_t first_node = prep.nodes.size();
    for (int s = 0; s < pieces; ++s) {
      double a = lo + width * double(s) / double(pieces);
      double b = lo + width * double(s + 1) / double(pieces);
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int i = 0; i < 15; ++i) {
        double u = mid + half * kGkNode15[i];
        std::complex<double> z = trunc_log_cf(u);
        double mag = std::exp(z.real()) / u;
        Prepared::Node node;
        node.u = u;
        node.kronrod_over_u = kGkWeight15[i] * half * mag;
        node.gauss_over_u = (i % 2 == 1) ? kG7Weight[i / 2] * half * mag : 0.0;
        node.phase = z.imag();
        piece_total += node.kronrod_over_u * std::sin(node.phase);
        piece_gauss += node.gauss_over_u * std::sin(node.phase);
        prep.nodes.push_back(node);
      }
    }
    err_sum += std::fabs(piece_total - piece_gauss);
    probe_total += piece_total;
    hi = lo;
    if (k >= 25) {
      quiet = std::fabs(piece_total) < abs_tol / 64.0 ? quiet + 1 : 0;
      if (quiet >= 3) break;
      if (k == 599) throw QuadratureError("LatticeIdLaw: panel refinement did not terminate");
    }
    (void)first_node;
  }
  if (err_sum > 0.5 * abs_tol) {
    throw QuadratureError("LatticeIdLaw: quadrature error estimate " + std::to_string(err_sum) +
                          " exceeds tolerance " + std::to_string(abs_tol));
  }
  return prep;
}

double LatticeIdLaw::invert(const Prepared& prep, double x) const {
  double total = 0.0;
  for (const auto& node : prep.nodes) {
    total += node.kronrod_over_u * std::sin(node.phase - node.u * x);
  }
  double f = prep.factor * (0.5 - total / kPi);
  return std::min(1.0, std::max(0.0, f));
}

double LatticeIdLaw::cdf(double x, double abs_tol) const {
  Prepared prep = prepare(std::fabs(x), abs_tol);
  return invert(prep, x);
}

std::vector<double> LatticeIdLaw::cdf_batch(const std::vector<double>& xs, double abs_tol) const {
  if (xs.empty()) return {};
  double x_hi = 0.0;
  for (double x : xs) x_hi = std::max(x_hi, std::fabs(x));
  Prepared prep = prepare(x_hi, abs_tol);
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(invert(prep, x));
  return out;
}

std::complex<double> lattice_id_log_cf(double alpha, double delta, double h, double u) {
  return LatticeIdLaw(alpha, delta, h).log_cf(u);
}

double lattice_id_cdf(double alpha, double delta, double h, double x, double abs_tol) {
  return LatticeIdLaw(alpha, delta, h).cdf(x, abs_tol);
}

// ---------------------------------------------------------------------------
// LimitLaw

LimitLaw LimitLaw::normal01() { return LimitLaw(LawKind::Normal01, 0.0); }
LimitLaw LimitLaw::normal_half() { return LimitLaw(LawKind::NormalHalf, 0.0); }

LimitLaw LimitLaw::stable_skewed(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw std::domain_error("LimitLaw: stable alpha must lie in (0, 2)");
  }
  return LimitLaw(LawKind::StableSkewed, alpha);
}

LimitLaw LimitLaw::lattice_id(double alpha, double delta, double h) {
  LimitLaw law(LawKind::LatticeID, alpha);
  law.lattice_ = std::make_shared<LatticeIdLaw>(alpha, delta, h);
  return law;
}

LimitLaw LimitLaw::for_regime(const Regime& regime, double delta, double h) {
  switch (regime.tag) {
    case RegimeTag::Supercritical:
      return normal01();
    case RegimeTag::Critical:
      return normal_half();
    default:
      break;
  }
  double alpha = *regime.alpha;
  if (regime.is_lattice) return lattice_id(alpha, delta, h);
  return stable_skewed(alpha);
}

double LimitLaw::cdf(double x) const {
  switch (kind_) {
    case LawKind::Normal01:
      return normal_cdf(x);
    case LawKind::NormalHalf:
      return normal_cdf(x * std::sqrt(2.0));
    case LawKind::StableSkewed:
      return stable_cdf(alpha_, x);
    case LawKind::LatticeID:
      return lattice_->cdf(x);
  }
  return 0.0;
}

std::complex<double> LimitLaw::log_cf(double u) const {
  switch (kind_) {
    case LawKind::Normal01:
      return {-0.5 * u * u, 0.0};
    case LawKind::NormalHalf:
      return {-0.25 * u * u, 0.0};
    case LawKind::StableSkewed:
      return stable_log_cf(alpha_, u);
    case LawKind::LatticeID:
      return lattice_->log_cf(u);
  }
  return {0.0, 0.0};
}

}  // namespace randprod
