#include "spherelab/energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spherelab {

namespace {

constexpr double kPi = std::numbers::pi;

double log_uniform_density(SphereDim d) { return -std::log(sphere_area(d)); }

void check_solution(const EquilibriumSolution& sol, const ModelParams& params) {
  if (sol.kind == EquilibriumKind::Uniform) {
    if (sol.eta != 0.0)
      throw std::domain_error("energy_of: uniform solution must have eta = 0");
    return;
  }
  if (!(sol.eta > 0.0))
    throw std::domain_error("energy_of: localized solution must have eta > 0");
  if (std::abs(sol.com_norm - sol.eta / params.kappa) > 1e-9)
    throw std::domain_error("energy_of: com_norm does not equal eta/kappa");
  const ScaledMoment i0 = moment_integral_scaled(0, sol.eta, params.d);
  const double g = g_quadrature_scaled(sol.eta, params);
  if (std::abs(g) > 1e-6 * i0.mantissa)
    throw std::domain_error("energy_of: eta is not a root of g for these parameters");
}

}  // namespace

const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::Unstable: return "unstable";
    case StabilityVerdict::Marginal: return "marginal";
  }
  return "?";
}

EnergyReport energy_of(const EquilibriumSolution& sol, const ModelParams& params) {
  check_solution(sol, params);
  EnergyReport report;
  if (sol.kind == EquilibriumKind::Uniform) {
    report.entropy_part = log_uniform_density(params.d);
    report.com_norm = 0.0;
  } else {
    // |c_rho| = A eta d w_d I_1, assembled in log space so large eta cancels.
    const ScaledMoment i1 = moment_integral_scaled(1, sol.eta, params.d);
    const double com =
        std::exp(sol.log_norm_const +
                 std::log(params.d.dim() * ball_volume(params.d.dim())) +
                 std::log(i1.mantissa) + i1.log_scale);
    report.entropy_part = sol.log_norm_const + sol.eta * com;
    report.com_norm = com;
  }
  report.interaction_part =
      params.kappa / 2.0 * (1.0 - report.com_norm * report.com_norm);
  report.value = report.entropy_part + report.interaction_part;
  return report;
}

std::optional<double> energy_gap(const ModelParams& params) {
  const auto eta = find_eta(params);
  if (!eta) return std::nullopt;
  return gap_function(*eta, params);
}

double gap_function(double eta, const ModelParams& params) {
  const ScaledMoment i0 = moment_integral_scaled(0, eta, params.d);
  const double log_i0 = std::log(i0.mantissa) + i0.log_scale;
  return -log_i0 - std::log(params.d.dim() * ball_volume(params.d.dim())) +
         eta * eta / (2.0 * params.kappa) + std::log(sphere_area(params.d));
}

double gap_derivative(double eta, const ModelParams& params) {
  const ScaledMoment i0 = moment_integral_scaled(0, eta, params.d);
  const ScaledMoment i1 = moment_integral_scaled(1, eta, params.d);
  return eta / params.kappa - i1.mantissa / i0.mantissa;
}

double path_energy(double eta, const ModelParams& params) {
  const WeightedMoments wm = weighted_moments(eta, params.d);
  const double log_ad =
      wm.log_i0 + std::log(params.d.dim() * ball_volume(params.d.dim()));
  return -log_ad + eta * wm.m1 +
         params.kappa / 2.0 * (1.0 - wm.m1 * wm.m1);
}

PathDerivatives path_energy_derivatives(double eta, const ModelParams& params) {
  const WeightedMoments wm = weighted_moments(eta, params.d);
  const double var = wm.m2 - wm.m1 * wm.m1;
  const double third = wm.m3 - 3.0 * wm.m2 * wm.m1 + 2.0 * wm.m1 * wm.m1 * wm.m1;
  PathDerivatives out;
  out.first = (eta - params.kappa * wm.m1) * var;
  out.second = (1.0 - params.kappa * var) * var +
               (eta - params.kappa * wm.m1) * third;
  return out;
}

StabilityReport classify_uniform(const ModelParams& params) {
  const double dd = params.d.dim() + 1.0;
  StabilityReport report;
  report.first_derivative = 0.0;
  report.second_derivative = (1.0 - params.kappa / dd) / dd;
  if (std::abs(report.second_derivative) <= 1e-10)
    report.verdict = StabilityVerdict::Marginal;
  else if (report.second_derivative < 0.0)
    report.verdict = StabilityVerdict::Unstable;
  else
    report.verdict = StabilityVerdict::Stable;
  return report;
}

namespace {

struct MixtureTerms {
  // per component: log(w_j A_j) and eta_j, so that
  // rho(x) = sum exp(log_wa[j] + eta[j] <mu_j, x>)
  std::vector<double> log_wa;
  std::vector<double> eta;
};

MixtureTerms prepare(const VmfMixture& mix, SphereDim d) {
  if (mix.components.empty())
    throw std::domain_error("vMF mixture: at least one component required");
  double total = 0.0;
  MixtureTerms terms;
  for (const auto& c : mix.components) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
      throw std::domain_error("vMF mixture: weights must be finite and >= 0");
    if (!(c.eta >= 0.0) || !std::isfinite(c.eta))
      throw std::domain_error("vMF mixture: concentrations must be finite and >= 0");
    if (c.axis.size() != d.ambient())
      throw std::domain_error("vMF mixture: axis dimension mismatch");
    if (std::abs(c.axis.norm() - 1.0) > 1e-9)
      throw std::domain_error("vMF mixture: axis must be a unit vector");
    total += c.weight;
    const ScaledMoment i0 = moment_integral_scaled(0, c.eta, d);
    const double log_a = -(std::log(d.dim() * ball_volume(d.dim())) +
                           std::log(i0.mantissa) + i0.log_scale);
    terms.log_wa.push_back(std::log(c.weight) + log_a);
    terms.eta.push_back(c.eta);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::domain_error("vMF mixture: weights must sum to 1");
  return terms;
}

// All axes parallel (up to sign) to the first component's axis?
bool co_aligned(const VmfMixture& mix, std::vector<double>* signs) {
  const Eigen::VectorXd& ref = mix.components.front().axis;
  signs->clear();
  for (const auto& c : mix.components) {
    const double dot = ref.dot(c.axis);
    if (std::abs(std::abs(dot) - 1.0) > 1e-12) return false;
    signs->push_back(dot > 0.0 ? 1.0 : -1.0);
  }
  return true;
}

double entropy_co_aligned(const MixtureTerms& terms, const std::vector<double>& signs,
                          SphereDim d) {
  // rho depends on x only through t = <ref, x>; integrate over the polar angle.
  const QuadratureRule& rule = gauss_legendre(512);
  const double dwd = d.dim() * ball_volume(d.dim());
  double acc = 0.0;
  for (int q = 0; q < rule.nodes.size(); ++q) {
    const double theta = (rule.nodes[q] + 1.0) * (kPi / 2.0);
    const double t = std::cos(theta);
    double rho = 0.0;
    for (size_t j = 0; j < terms.eta.size(); ++j)
      rho += std::exp(terms.log_wa[j] + terms.eta[j] * signs[j] * t);
    acc += rule.weights[q] * rho * std::log(rho) *
           std::pow(std::sin(theta), d.dim() - 1);
  }
  return dwd * acc * (kPi / 2.0);
}

double entropy_circle(const VmfMixture& mix, const MixtureTerms& terms) {
  // Uniform grid in the polar angle; the integrand is smooth and periodic.
  const int n = 8192;
  std::vector<double> phase(terms.eta.size());
  for (size_t j = 0; j < terms.eta.size(); ++j) {
    const auto& mu = mix.components[j].axis;
    phase[j] = std::atan2(mu[1], mu[0]);
  }
  double acc = 0.0;
  for (int q = 0; q < n; ++q) {
    const double phi = 2.0 * kPi * q / n;
    double rho = 0.0;
    for (size_t j = 0; j < terms.eta.size(); ++j)
      rho += std::exp(terms.log_wa[j] + terms.eta[j] * std::cos(phi - phase[j]));
    acc += rho * std::log(rho);
  }
  return acc * 2.0 * kPi / n;
}

double entropy_fibonacci_s2(const VmfMixture& mix, const MixtureTerms& terms) {
  const int n = 1 << 17;
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  double acc = 0.0;
  Eigen::Vector3d x;
  for (int q = 0; q < n; ++q) {
    const double z = 1.0 - (2.0 * q + 1.0) / n;
    const double r = std::sqrt(std::fmax(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * std::fmod(q / golden, 1.0);
    x << r * std::cos(phi), r * std::sin(phi), z;
    double rho = 0.0;
    for (size_t j = 0; j < terms.eta.size(); ++j)
      rho += std::exp(terms.log_wa[j] + terms.eta[j] * mix.components[j].axis.dot(x));
    acc += rho * std::log(rho);
  }
  return acc * 4.0 * kPi / n;
}

}  // namespace

double mixture_density(const VmfMixture& mix, SphereDim d, const Eigen::VectorXd& x) {
  const MixtureTerms terms = prepare(mix, d);
  if (std::abs(x.norm() - 1.0) > 1e-9)
    throw std::domain_error("mixture_density: point is not on the unit sphere");
  double rho = 0.0;
  for (size_t j = 0; j < terms.eta.size(); ++j)
    rho += std::exp(terms.log_wa[j] + terms.eta[j] * mix.components[j].axis.dot(x));
  return rho;
}

Eigen::VectorXd mixture_center_of_mass(const VmfMixture& mix, SphereDim d) {
  prepare(mix, d);  // validation
  Eigen::VectorXd com = Eigen::VectorXd::Zero(d.ambient());
  for (const auto& c : mix.components) {
    const ScaledMoment i0 = moment_integral_scaled(0, c.eta, d);
    const ScaledMoment i1 = moment_integral_scaled(1, c.eta, d);
    com += c.weight * (i1.mantissa / i0.mantissa) * c.axis;
  }
  return com;
}

double mixture_entropy(const VmfMixture& mix, SphereDim d) {
  const MixtureTerms terms = prepare(mix, d);
  std::vector<double> signs;
  if (co_aligned(mix, &signs)) return entropy_co_aligned(terms, signs, d);
  if (d.dim() == 1) return entropy_circle(mix, terms);
  if (d.dim() == 2) return entropy_fibonacci_s2(mix, terms);
  throw std::domain_error(
      "mixture_entropy: mixtures with non-co-aligned axes are only supported "
      "for d <= 2");
}

double entropy_inequality_residual(const VmfMixture& mix, SphereDim d) {
  const double entropy = mixture_entropy(mix, d);
  const double com = mixture_center_of_mass(mix, d).norm();
  return entropy + std::log(sphere_area(d)) -
         (d.dim() + 1.0) / 2.0 * com * com;
}

}  // namespace spherelab
