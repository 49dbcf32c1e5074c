// Sweep kappa to trace the pitchfork: per-point equilibrium solve, branch
// norms, energy gaps, and the near-threshold asymptotics.
#pragma once

#include <optional>
#include <vector>

#include "spherelab/energy.hpp"

namespace spherelab {

enum class SweepSpacing { Linear, LogAboveThreshold };

struct SweepSpec {
  SphereDim d;
  double kappa_min = 0.5;
  double kappa_max = 40.0;
  int points = 200;
  SweepSpacing spacing = SweepSpacing::Linear;
};

struct SweepSample {
  double kappa = 0.0;
  double com_norm_uniform = 0.0;  // identically zero
  std::optional<double> com_norm_localized;
  std::optional<double> eta;
  std::optional<double> energy_gap;
  StabilityVerdict uniform_stability = StabilityVerdict::Stable;
};

struct BifurcationCurve {
  SphereDim d;
  double threshold = 0.0;  // d + 1
  std::vector<SweepSample> samples;
};

// The kappa grid for a spec. LogAboveThreshold puts half the points in a
// geometric shoulder just above the threshold so the square-root rise is
// resolved; Linear reproduces plain axes.
std::vector<double> sweep_grid(const SweepSpec& spec);

// One solve per grid point. Every localized sample is residual-checked
// against the normalization system, and the branch must come out strictly
// increasing; violations throw (they indicate a solver fault, not data).
BifurcationCurve sweep(const SweepSpec& spec);

// Near-threshold law sqrt((d+3)(kappa - (d+1))); empty at or below threshold.
std::optional<double> asymptotic_eta(const ModelParams& params);

// Bound sqrt(2(d+3)(kappa-(d+1))/(d+3-kappa)), valid for d+1 < kappa < d+3.
double eta_upper_bound(const ModelParams& params);

}  // namespace spherelab
