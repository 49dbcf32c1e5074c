#include "spherelab/moments.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spherelab {

namespace {

constexpr double kPi = std::numbers::pi;

// Concentrations above this are integrated against exp(eta cos t - eta) and
// the offset eta is carried in ScaledMoment::log_scale.
constexpr double kScaleThreshold = 500.0;
constexpr int kMaxNodes = 1 << 15;

QuadratureRule build_gauss_legendre(int order) {
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= order; ++n) {
        const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

// One fixed-order pass of \int_0^pi cos^k t exp(eta cos t - offset) sin^{d-1} t dt.
double integrate_once(int k, double eta, int d, double offset, int order) {
  const QuadratureRule& rule = gauss_legendre(order);
  // Map [-1,1] -> [0,pi].
  const Eigen::ArrayXd theta = (rule.nodes + 1.0) * (kPi / 2.0);
  const Eigen::ArrayXd c = theta.cos();
  Eigen::ArrayXd f = (eta * c - offset).exp();
  if (d > 1) f *= theta.sin().pow(d - 1);
  if (k > 0) f *= c.pow(k);
  return (rule.weights * f).sum() * (kPi / 2.0);
}

[[noreturn]] void throw_overflow(double eta) {
  std::ostringstream os;
  os << "moment integral overflows double range at eta = " << eta;
  throw std::overflow_error(os.str());
}

}  // namespace

SphereDim::SphereDim(int d) : d_(d) {
  if (d < 1) throw std::invalid_argument("SphereDim: dimension must be >= 1");
}

const QuadratureRule& gauss_legendre(int order) {
  if (order < 2) throw std::invalid_argument("gauss_legendre: order must be >= 2");
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_gauss_legendre(order)).first;
  return it->second;
}

double ball_volume(int m) {
  if (m < 0) throw std::invalid_argument("ball_volume: m must be >= 0");
  return std::exp(0.5 * m * std::log(kPi) - std::lgamma(0.5 * m + 1.0));
}

double sphere_area(SphereDim d) { return (d.dim() + 1) * ball_volume(d.dim() + 1); }

double sine_moment(SphereDim d) {
  return std::sqrt(kPi) *
         std::exp(std::lgamma(0.5 * d.dim()) - std::lgamma(0.5 * (d.dim() + 1)));
}

double series_coefficient(int m, SphereDim d) {
  if (m < 0) throw std::invalid_argument("series_coefficient: m must be >= 0");
  double a = 1.0;
  for (int k = 1; k <= m; ++k) a *= (2.0 * k - 1.0) / (d.dim() + 2.0 * k - 1.0);
  return a;
}

double ScaledMoment::value() const { return mantissa * std::exp(log_scale); }

ScaledMoment moment_integral_scaled(int k, double eta, SphereDim d,
                                    const QuadratureConfig& cfg) {
  if (k < 0) throw std::invalid_argument("moment_integral: k must be >= 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("moment_integral: eta must be >= 0");
  if (eta == 0.0 && k % 2 == 1) return {0.0, 0.0};  // odd integrand about pi/2
  const double offset = eta > kScaleThreshold ? eta : 0.0;
  int order = std::max(2, cfg.node_count);
  double prev = integrate_once(k, eta, d.dim(), offset, order);
  while (order < kMaxNodes) {
    order *= 2;
    const double cur = integrate_once(k, eta, d.dim(), offset, order);
    if (std::abs(cur - prev) <= cfg.abs_tol + cfg.rel_tol * std::abs(cur)) {
      return {cur, offset};
    }
    prev = cur;
  }
  std::ostringstream os;
  os << "moment integral failed to converge at eta = " << eta << ", k = " << k
     << " with " << kMaxNodes << " nodes";
  throw std::runtime_error(os.str());
}

double moment_integral(int k, double eta, SphereDim d, const QuadratureConfig& cfg) {
  const ScaledMoment m = moment_integral_scaled(k, eta, d, cfg);
  const double v = m.value();
  if (!std::isfinite(v)) throw_overflow(eta);
  return v;
}

WeightedMoments weighted_moments(double eta, SphereDim d, const QuadratureConfig& cfg) {
  ScaledMoment i[4];
  for (int k = 0; k < 4; ++k) i[k] = moment_integral_scaled(k, eta, d, cfg);
  WeightedMoments wm;
  wm.log_i0 = std::log(i[0].mantissa) + i[0].log_scale;
  wm.m1 = i[1].mantissa / i[0].mantissa;
  wm.m2 = i[2].mantissa / i[0].mantissa;
  wm.m3 = i[3].mantissa / i[0].mantissa;
  return wm;
}

}  // namespace spherelab
