// Sphere-geometry constants and the moment integrals
//   I_k(eta, d) = \int_0^pi cos^k(t) exp(eta cos t) sin^{d-1}(t) dt
// that the equilibrium, energy and bifurcation layers are built from.
#pragma once

#include <Eigen/Dense>

namespace spherelab {

// Dimension d of the unit sphere S^d embedded in R^{d+1}.
class SphereDim {
 public:
  explicit SphereDim(int d);
  int dim() const { return d_; }
  int ambient() const { return d_ + 1; }

 private:
  int d_;
};

struct QuadratureConfig {
  int node_count = 128;  // Gauss-Legendre nodes on [0, pi]; doubled until converged
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
};

struct SeriesConfig {
  int max_terms = 40;
  double tail_tol = 1e-14;  // stop once the term envelope drops below this
};

// Gauss-Legendre rule on [-1, 1]; rules are cached per order.
struct QuadratureRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};
const QuadratureRule& gauss_legendre(int order);

// Volume w_m of the unit ball in R^m; w_0 = 1.
double ball_volume(int m);

// Surface area (d+1) w_{d+1} of S^d.
double sphere_area(SphereDim d);

// \int_0^pi sin^{d-1} t dt = sqrt(pi) Gamma(d/2) / Gamma((d+1)/2).
double sine_moment(SphereDim d);

// A(m) = prod_{k=1..m} (2k-1)/(d+2k-1), A(0) = 1.
double series_coefficient(int m, SphereDim d);

// I_k represented as mantissa * exp(log_scale); the scale offset keeps the
// quadrature finite for concentrations past the range of exp().
struct ScaledMoment {
  double mantissa = 0.0;
  double log_scale = 0.0;
  double value() const;  // mantissa * exp(log_scale); may overflow to inf
};

ScaledMoment moment_integral_scaled(int k, double eta, SphereDim d,
                                    const QuadratureConfig& cfg = {});

// Plain-valued I_k. Throws std::overflow_error when the value exceeds the
// double range (names the offending eta).
double moment_integral(int k, double eta, SphereDim d,
                       const QuadratureConfig& cfg = {});

// log I_0 and the weighted moments m_k = I_k / I_0 for k = 1..3, evaluated
// in a single quadrature pass with a shared scale offset.
struct WeightedMoments {
  double log_i0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
};
WeightedMoments weighted_moments(double eta, SphereDim d,
                                 const QuadratureConfig& cfg = {});

}  // namespace spherelab
