#include "spherelab/bifurcation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spherelab/parallel.hpp"

namespace spherelab {

namespace {

void check_spec(const SweepSpec& spec) {
  if (!(spec.kappa_min > 0.0) || !(spec.kappa_min < spec.kappa_max))
    throw std::invalid_argument("sweep: require 0 < kappa_min < kappa_max");
  if (spec.points < 2) throw std::invalid_argument("sweep: points must be >= 2");
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  return grid;
}

}  // namespace

std::vector<double> sweep_grid(const SweepSpec& spec) {
  check_spec(spec);
  const double threshold = branch_threshold(spec.d);
  const double range = spec.kappa_max - threshold;
  const double shoulder_hi = threshold + 0.1 * range;
  if (spec.spacing == SweepSpacing::Linear || spec.kappa_max <= threshold ||
      spec.kappa_min >= shoulder_hi)
    return linear_grid(spec.kappa_min, spec.kappa_max, spec.points);

  // Geometric shoulder: half the points in (thr, thr + 0.1 (kappa_max - thr)],
  // the rest split linearly below the threshold and above the shoulder.
  const double u_hi = 0.1 * range;
  const double u_lo = std::fmax(spec.kappa_min - threshold, 1e-4 * range);
  const int n_shoulder = std::max(1, spec.points / 2);
  const int n_rest = spec.points - n_shoulder;

  std::vector<double> grid;
  grid.reserve(spec.points);
  int n_below = 0;
  if (spec.kappa_min < threshold && n_rest > 0) {
    const double below_len = threshold - spec.kappa_min;
    const double above_len = spec.kappa_max - shoulder_hi;
    n_below = static_cast<int>(std::lround(n_rest * below_len / (below_len + above_len)));
    n_below = std::min(std::max(n_below, 1), n_rest);
    for (double k : linear_grid(spec.kappa_min, threshold, std::max(2, n_below)))
      grid.push_back(k);
    grid.resize(n_below);
    if (n_below >= 2) grid.back() = threshold;
  }
  if (n_shoulder == 1) {
    grid.push_back(threshold + u_hi);
  } else {
    const double ratio = std::pow(u_hi / u_lo, 1.0 / (n_shoulder - 1));
    double u = u_lo;
    for (int i = 0; i < n_shoulder; ++i, u *= ratio) grid.push_back(threshold + u);
    grid[n_below + n_shoulder - 1] = shoulder_hi;  // pin against rounding drift
  }
  const int n_above = n_rest - n_below;
  if (n_above > 0) {
    auto tail = linear_grid(shoulder_hi, spec.kappa_max, n_above + 1);
    grid.insert(grid.end(), tail.begin() + 1, tail.end());
  } else {
    grid.back() = spec.kappa_max;
  }
  return grid;
}

BifurcationCurve sweep(const SweepSpec& spec) {
  const std::vector<double> grid = sweep_grid(spec);
  BifurcationCurve curve{spec.d, branch_threshold(spec.d), {}};
  curve.samples.resize(grid.size());

  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    const double kappa = grid[i];
    const ModelParams params{spec.d, kappa};
    SweepSample sample;
    sample.kappa = kappa;
    sample.uniform_stability = classify_uniform(params).verdict;
    if (const auto eta = find_eta(params)) {
      const ScaledMoment i0 = moment_integral_scaled(0, *eta, spec.d);
      const ScaledMoment i1 = moment_integral_scaled(1, *eta, spec.d);
      const double residual = i1.mantissa / i0.mantissa - *eta / kappa;
      if (std::abs(residual) > 1e-9) {
        std::ostringstream os;
        os << "sweep: normalization residual " << residual << " at kappa = " << kappa;
        throw std::runtime_error(os.str());
      }
      sample.eta = *eta;
      sample.com_norm_localized = *eta / kappa;
      sample.energy_gap = gap_function(*eta, params);
    }
    curve.samples[i] = std::move(sample);
  });

  const SweepSample* prev = nullptr;
  for (const auto& s : curve.samples) {
    if (s.com_norm_localized && prev && prev->com_norm_localized &&
        !(*s.com_norm_localized > *prev->com_norm_localized)) {
      std::ostringstream os;
      os << "sweep: localized branch is not strictly increasing at kappa = "
         << s.kappa;
      throw std::runtime_error(os.str());
    }
    if (s.com_norm_localized) prev = &s;
  }
  return curve;
}

std::optional<double> asymptotic_eta(const ModelParams& params) {
  const double threshold = branch_threshold(params.d);
  if (params.kappa <= threshold) return std::nullopt;
  return std::sqrt((params.d.dim() + 3.0) * (params.kappa - threshold));
}

double eta_upper_bound(const ModelParams& params) {
  const double threshold = branch_threshold(params.d);
  const double top = params.d.dim() + 3.0;
  if (!(params.kappa > threshold) || !(params.kappa < top))
    throw std::domain_error("eta_upper_bound: kappa must lie in (d+1, d+3)");
  return std::sqrt(2.0 * top * (params.kappa - threshold) / (top - params.kappa));
}

}  // namespace spherelab
