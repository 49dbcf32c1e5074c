#include "spherelab/equilibrium.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spherelab {

namespace {

void require_positive_kappa(const ModelParams& params) {
  if (!(params.kappa > 0.0))
    throw std::invalid_argument("ModelParams: kappa must be > 0");
}

Eigen::VectorXd default_axis(SphereDim d) {
  Eigen::VectorXd axis = Eigen::VectorXd::Zero(d.ambient());
  axis[0] = 1.0;
  return axis;
}

}  // namespace

double EquilibriumSolution::norm_const() const { return std::exp(log_norm_const); }

SeriesEval g_series(double eta, const ModelParams& params, const SeriesConfig& cfg) {
  require_positive_kappa(params);
  if (!(eta >= 0.0)) throw std::invalid_argument("g_series: eta must be >= 0");
  const int d = params.d.dim();
  const double sd = sine_moment(params.d);
  const double coeff_bound = std::fmax(1.0 / params.kappa, 1.0 / (d + 1.0));

  SeriesEval out;
  double base = eta * sd;  // eta^{2m+1} A(m) / (2m)! * sine_moment, at m = 0
  out.converged = false;
  for (int m = 0; m < cfg.max_terms; ++m) {
    out.value += base * (1.0 / params.kappa - 1.0 / (d + 2.0 * m + 1.0));
    if (base * coeff_bound < cfg.tail_tol * (1.0 + std::abs(out.value))) {
      out.converged = true;
      break;
    }
    // advance eta^{2m+1}/(2m)! and A(m) to m+1
    base *= eta * eta / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
    base *= (2.0 * m + 1.0) / (d + 2.0 * m + 1.0);
  }
  return out;
}

double g_quadrature(double eta, const ModelParams& params, const QuadratureConfig& cfg) {
  require_positive_kappa(params);
  const double i0 = moment_integral(0, eta, params.d, cfg);
  const double i1 = moment_integral(1, eta, params.d, cfg);
  return eta / params.kappa * i0 - i1;
}

double g_quadrature_scaled(double eta, const ModelParams& params,
                           const QuadratureConfig& cfg) {
  require_positive_kappa(params);
  const ScaledMoment i0 = moment_integral_scaled(0, eta, params.d, cfg);
  const ScaledMoment i1 = moment_integral_scaled(1, eta, params.d, cfg);
  return eta / params.kappa * i0.mantissa - i1.mantissa;
}

std::optional<double> find_eta(const ModelParams& params, double bracket_tol,
                               RootInfo* info) {
  require_positive_kappa(params);
  if (!(bracket_tol > 0.0))
    throw std::invalid_argument("find_eta: bracket_tol must be > 0");
  if (info) *info = RootInfo{};

  const double threshold = branch_threshold(params.d);
  if (params.kappa <= threshold) return std::nullopt;

  // So close to the threshold that g is numerically flat: use the
  // perturbation law directly.
  if (params.kappa - threshold < 1e-8) {
    if (info) info->asymptotic_fallback = true;
    return std::sqrt((params.d.dim() + 3.0) * (params.kappa - threshold));
  }

  // Solve on the bounded ratio eta/kappa - I_1/I_0, which has the same sign
  // and roots as g but stays O(1) over the whole bracket.
  int evals = 0;
  auto g = [&](double eta) {
    ++evals;
    const ScaledMoment i0 = moment_integral_scaled(0, eta, params.d);
    const ScaledMoment i1 = moment_integral_scaled(1, eta, params.d);
    return eta / params.kappa - i1.mantissa / i0.mantissa;
  };

  double lo = 1e-6 * params.kappa;
  bool bracketed = false;
  for (int attempt = 0; attempt <= 6; ++attempt) {
    if (g(lo) < 0.0) {
      bracketed = true;
      break;
    }
    lo *= 10.0;
  }
  if (!bracketed || lo >= params.kappa) {
    std::ostringstream os;
    os << "find_eta: no negative value of g found above 0 for d = "
       << params.d.dim() << ", kappa = " << params.kappa
       << "; the branch structure is inconsistent";
    throw std::runtime_error(os.str());
  }

  const double root = brent_root(g, RootBracket{lo, params.kappa, bracket_tol});
  if (info) info->evaluations = evals;
  return root;
}

std::vector<EquilibriumSolution> solve_equilibria(const ModelParams& params) {
  require_positive_kappa(params);
  std::vector<EquilibriumSolution> out;

  EquilibriumSolution uniform;
  uniform.kind = EquilibriumKind::Uniform;
  uniform.eta = 0.0;
  uniform.log_norm_const = -std::log(sphere_area(params.d));
  uniform.com_norm = 0.0;
  uniform.axis = default_axis(params.d);
  out.push_back(std::move(uniform));

  if (const auto eta = find_eta(params)) {
    const ScaledMoment i0 = moment_integral_scaled(0, *eta, params.d);
    EquilibriumSolution loc;
    loc.kind = EquilibriumKind::Localized;
    loc.eta = *eta;
    loc.log_norm_const = -(std::log(params.d.dim() * ball_volume(params.d.dim())) +
                           std::log(i0.mantissa) + i0.log_scale);
    loc.com_norm = *eta / params.kappa;
    loc.axis = default_axis(params.d);
    out.push_back(std::move(loc));
  }
  return out;
}

double density_at(const EquilibriumSolution& sol, const Eigen::VectorXd& x) {
  if (x.size() != sol.axis.size())
    throw std::domain_error("density_at: point dimension does not match the axis");
  if (std::abs(x.norm() - 1.0) > 1e-9)
    throw std::domain_error("density_at: point is not on the unit sphere");
  return std::exp(sol.log_norm_const + sol.eta * sol.axis.dot(x));
}

}  // namespace spherelab
