// Free-energy evaluation: energies of equilibria, the gap function along the
// concentration path, stability of the uniform density, and the entropy
// lower bound tested on von Mises-Fisher mixtures.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spherelab/equilibrium.hpp"

namespace spherelab {

struct EnergyReport {
  double value = 0.0;
  double entropy_part = 0.0;      // \int rho log rho
  double interaction_part = 0.0;  // kappa/2 - (kappa/2) |c_rho|^2
  double com_norm = 0.0;
};

enum class StabilityVerdict { Stable, Unstable, Marginal };
const char* to_string(StabilityVerdict v);

struct StabilityReport {
  double first_derivative = 0.0;
  double second_derivative = 0.0;
  StabilityVerdict verdict = StabilityVerdict::Stable;
};

EnergyReport energy_of(const EquilibriumSolution& sol, const ModelParams& params);

// f(eta_kappa) = E[localized] - E[uniform]; empty when no localized branch.
std::optional<double> energy_gap(const ModelParams& params);

// The gap function f and its derivative f'(eta) = eta/kappa - I_1/I_0,
// defined for any eta >= 0.
double gap_function(double eta, const ModelParams& params);
double gap_derivative(double eta, const ModelParams& params);

// Energy E[rho^eta] of the trial family rho^eta = A_eta exp(eta <x, n>).
double path_energy(double eta, const ModelParams& params);

struct PathDerivatives {
  double first = 0.0;
  double second = 0.0;
};
PathDerivatives path_energy_derivatives(double eta, const ModelParams& params);

// Sign of the second path derivative at eta = 0 decides the verdict.
StabilityReport classify_uniform(const ModelParams& params);

// Finite von Mises-Fisher mixture sum_j w_j A(eta_j) exp(eta_j <mu_j, x>).
struct VmfComponent {
  double weight = 1.0;
  double eta = 0.0;
  Eigen::VectorXd axis;
};
struct VmfMixture {
  std::vector<VmfComponent> components;
};

double mixture_density(const VmfMixture& mix, SphereDim d, const Eigen::VectorXd& x);
Eigen::VectorXd mixture_center_of_mass(const VmfMixture& mix, SphereDim d);

// \int rho log rho over S^d. Axially co-aligned mixtures integrate by
// one-dimensional quadrature in the polar angle; general axes use a uniform
// angular grid (d = 1) or a Fibonacci lattice (d = 2).
double mixture_entropy(const VmfMixture& mix, SphereDim d);

// Residual of the sharp entropy bound at kappa = d+1:
//   \int rho log rho + log((d+1) w_{d+1}) - ((d+1)/2) |c_rho|^2  >=  0.
double entropy_inequality_residual(const VmfMixture& mix, SphereDim d);

}  // namespace spherelab
