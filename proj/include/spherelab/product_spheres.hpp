// Equilibria on products of spheres M = (S^{d_1})^{n_1} x ... x (S^{d_m})^{n_m}.
// Critical points factorize slot by slot, so everything reduces to the
// single-sphere solve per distinct dimension plus combinatorics.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "spherelab/energy.hpp"

namespace spherelab {

struct SphereFactor {
  SphereDim d;
  int count = 1;  // number of identical sphere slots of this dimension
};

class ProductSpaceSpec {
 public:
  // Factors are sorted by dimension and equal dimensions merged; counts must
  // be >= 1 and kappa > 0.
  ProductSpaceSpec(std::vector<SphereFactor> factors, double kappa);

  const std::vector<SphereFactor>& factors() const { return factors_; }
  double kappa() const { return kappa_; }
  int total_slots() const;
  int ambient_dim() const;  // N = sum n_i (d_i + 1)

 private:
  std::vector<SphereFactor> factors_;
  double kappa_;
};

struct ProductEquilibrium {
  // Canonical class: only the per-factor count of localized slots matters.
  std::vector<int> localized_counts;
  // Single-sphere localized solution per factor; empty when that factor is
  // below threshold.
  std::vector<std::optional<EquilibriumSolution>> factor_solutions;
  double total_energy = 0.0;
  std::uint64_t multiplicity = 1;  // prod binom(n_i, counts_i)
  Eigen::VectorXd com;             // center of mass in R^N, canonical slots first
  StabilityVerdict stability = StabilityVerdict::Stable;
  bool is_global_minimizer = false;
};

// 2^(number of slots whose factor admits a localized state); returned as a
// double since the raw count is used only for cap checks and reporting.
double raw_assignment_count(const ProductSpaceSpec& spec);

// All canonical equilibrium classes. Throws std::length_error when the raw
// assignment count exceeds `cap` (use raw_assignment_count instead).
std::vector<ProductEquilibrium> enumerate_equilibria(const ProductSpaceSpec& spec,
                                                     std::uint64_t cap = 1u << 16);

// Localized at every factor above threshold, uniform elsewhere.
ProductEquilibrium global_minimizer(const ProductSpaceSpec& spec);

// Recompute the energy of an assignment from per-factor single-sphere
// energies; validates the assignment against the spec.
double product_energy(const ProductEquilibrium& eq, const ProductSpaceSpec& spec);

// Squared extrinsic distance between two points of M given as stacked block
// vectors in R^N; every block must be unit.
double product_distance_sq(const ProductSpaceSpec& spec, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y);

}  // namespace spherelab
