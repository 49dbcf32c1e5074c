// Critical points of the free energy on S^d for given (d, kappa): the root
// function g, the nontrivial concentration eta_kappa, and the assembled
// uniform / localized equilibrium densities.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spherelab/moments.hpp"
#include "spherelab/root_finding.hpp"

namespace spherelab {

struct ModelParams {
  SphereDim d;
  double kappa = 1.0;
};

// Onset of the localized branch: kappa must exceed this for g to have a
// positive root.
inline double branch_threshold(SphereDim d) { return d.dim() + 1.0; }

enum class EquilibriumKind { Uniform, Localized };

struct EquilibriumSolution {
  EquilibriumKind kind = EquilibriumKind::Uniform;
  double eta = 0.0;             // concentration; 0 for the uniform density
  double log_norm_const = 0.0;  // log A
  double com_norm = 0.0;        // |c_rho| = eta / kappa
  Eigen::VectorXd axis;         // unit vector in R^{d+1}; first basis vector

  double norm_const() const;  // exp(log_norm_const); may underflow to 0
};

// Series form of g, truncated per cfg. `converged` is false when the term
// envelope still exceeds tail_tol at max_terms.
struct SeriesEval {
  double value = 0.0;
  bool converged = true;
};
SeriesEval g_series(double eta, const ModelParams& params,
                    const SeriesConfig& cfg = {});

// Quadrature form g(eta) = (eta/kappa) I_0 - I_1.
double g_quadrature(double eta, const ModelParams& params,
                    const QuadratureConfig& cfg = {});

// g divided by the moment scale exp(offset); same sign and same roots as g,
// finite for every eta.
double g_quadrature_scaled(double eta, const ModelParams& params,
                           const QuadratureConfig& cfg = {});

struct RootInfo {
  bool asymptotic_fallback = false;  // eta taken from the near-threshold law
  int evaluations = 0;
};

// The positive root of g when kappa > d+1; empty otherwise.
std::optional<double> find_eta(const ModelParams& params,
                               double bracket_tol = 1e-12,
                               RootInfo* info = nullptr);

// [Uniform] below or at the threshold, [Uniform, Localized] above it.
std::vector<EquilibriumSolution> solve_equilibria(const ModelParams& params);

// rho(x) = A exp(eta <axis, x>); x must be unit to 1e-9.
double density_at(const EquilibriumSolution& sol, const Eigen::VectorXd& x);

}  // namespace spherelab
