#include "spherelab/product_spheres.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spherelab {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

struct FactorData {
  double energy_uniform = 0.0;
  double energy_localized = 0.0;  // meaningful only when admits_localized
  bool admits_localized = false;
  std::optional<EquilibriumSolution> localized;
  StabilityVerdict uniform_verdict = StabilityVerdict::Stable;
};

std::vector<FactorData> solve_factors(const ProductSpaceSpec& spec) {
  std::vector<FactorData> data;
  data.reserve(spec.factors().size());
  for (const auto& f : spec.factors()) {
    const ModelParams params{f.d, spec.kappa()};
    FactorData fd;
    const auto solutions = solve_equilibria(params);
    fd.energy_uniform = energy_of(solutions.front(), params).value;
    fd.uniform_verdict = classify_uniform(params).verdict;
    if (solutions.size() == 2) {
      fd.admits_localized = true;
      fd.localized = solutions.back();
      fd.energy_localized = energy_of(solutions.back(), params).value;
    }
    data.push_back(std::move(fd));
  }
  return data;
}

ProductEquilibrium assemble(const ProductSpaceSpec& spec,
                            const std::vector<FactorData>& data,
                            const std::vector<int>& counts) {
  ProductEquilibrium eq;
  eq.localized_counts = counts;
  eq.total_energy = 0.0;
  eq.multiplicity = 1;
  eq.com = Eigen::VectorXd::Zero(spec.ambient_dim());
  eq.is_global_minimizer = true;
  bool any_marginal = false;
  bool any_unstable = false;

  int offset = 0;
  for (size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& f = spec.factors()[i];
    const auto& fd = data[i];
    const int loc = counts[i];
    eq.factor_solutions.push_back(fd.localized);
    eq.total_energy += loc * fd.energy_localized + (f.count - loc) * fd.energy_uniform;
    eq.multiplicity *= binomial(f.count, loc);
    if (fd.admits_localized && loc < f.count) eq.is_global_minimizer = false;
    // A uniform slot above its threshold inherits the single-sphere verdict.
    if (loc < f.count) {
      if (fd.uniform_verdict == StabilityVerdict::Unstable) any_unstable = true;
      if (fd.uniform_verdict == StabilityVerdict::Marginal) any_marginal = true;
    }
    // Canonical representative: the first `loc` slots of the factor localize
    // along the first coordinate of their block.
    const int block = f.d.ambient();
    for (int j = 0; j < f.count; ++j) {
      if (j < loc) eq.com[offset] = fd.localized->com_norm;
      offset += block;
    }
  }
  eq.stability = any_unstable ? StabilityVerdict::Unstable
                 : any_marginal ? StabilityVerdict::Marginal
                                : StabilityVerdict::Stable;
  return eq;
}

}  // namespace

ProductSpaceSpec::ProductSpaceSpec(std::vector<SphereFactor> factors, double kappa)
    : factors_(std::move(factors)), kappa_(kappa) {
  if (factors_.empty())
    throw std::invalid_argument("ProductSpaceSpec: at least one factor required");
  if (!(kappa_ > 0.0))
    throw std::invalid_argument("ProductSpaceSpec: kappa must be > 0");
  for (const auto& f : factors_)
    if (f.count < 1)
      throw std::invalid_argument("ProductSpaceSpec: factor counts must be >= 1");
  std::sort(factors_.begin(), factors_.end(),
            [](const SphereFactor& a, const SphereFactor& b) {
              return a.d.dim() < b.d.dim();
            });
  std::vector<SphereFactor> merged;
  for (const auto& f : factors_) {
    if (!merged.empty() && merged.back().d.dim() == f.d.dim())
      merged.back().count += f.count;
    else
      merged.push_back(f);
  }
  factors_ = std::move(merged);
}

int ProductSpaceSpec::total_slots() const {
  int n = 0;
  for (const auto& f : factors_) n += f.count;
  return n;
}

int ProductSpaceSpec::ambient_dim() const {
  int n = 0;
  for (const auto& f : factors_) n += f.count * f.d.ambient();
  return n;
}

double raw_assignment_count(const ProductSpaceSpec& spec) {
  int free_slots = 0;
  for (const auto& f : spec.factors())
    if (spec.kappa() > branch_threshold(f.d)) free_slots += f.count;
  return std::exp2(static_cast<double>(free_slots));
}

std::vector<ProductEquilibrium> enumerate_equilibria(const ProductSpaceSpec& spec,
                                                     std::uint64_t cap) {
  if (raw_assignment_count(spec) > static_cast<double>(cap)) {
    std::ostringstream os;
    os << "enumerate_equilibria: " << raw_assignment_count(spec)
       << " raw assignments exceed the cap of " << cap
       << "; use raw_assignment_count for counting only";
    throw std::length_error(os.str());
  }
  const auto data = solve_factors(spec);

  std::vector<ProductEquilibrium> out;
  std::vector<int> counts(spec.factors().size(), 0);
  for (;;) {
    out.push_back(assemble(spec, data, counts));
    // odometer over admissible per-factor counts
    size_t i = 0;
    for (; i < counts.size(); ++i) {
      const int max_count = data[i].admits_localized ? spec.factors()[i].count : 0;
      if (counts[i] < max_count) {
        ++counts[i];
        std::fill(counts.begin(), counts.begin() + i, 0);
        break;
      }
    }
    if (i == counts.size()) break;
  }
  return out;
}

ProductEquilibrium global_minimizer(const ProductSpaceSpec& spec) {
  const auto data = solve_factors(spec);
  std::vector<int> counts(spec.factors().size(), 0);
  for (size_t i = 0; i < counts.size(); ++i)
    if (data[i].admits_localized) counts[i] = spec.factors()[i].count;
  return assemble(spec, data, counts);
}

double product_energy(const ProductEquilibrium& eq, const ProductSpaceSpec& spec) {
  if (eq.localized_counts.size() != spec.factors().size())
    throw std::domain_error("product_energy: assignment does not match the spec");
  const auto data = solve_factors(spec);
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    const int loc = eq.localized_counts[i];
    const int n = spec.factors()[i].count;
    if (loc < 0 || loc > n)
      throw std::domain_error("product_energy: localized count out of range");
    if (loc > 0 && !data[i].admits_localized)
      throw std::domain_error(
          "product_energy: localized slots at a factor below its threshold");
    total += loc * data[i].energy_localized + (n - loc) * data[i].energy_uniform;
  }
  return total;
}

double product_distance_sq(const ProductSpaceSpec& spec, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
  const int n = spec.ambient_dim();
  if (x.size() != n || y.size() != n)
    throw std::domain_error("product_distance_sq: point dimension mismatch");
  double total = 0.0;
  int offset = 0;
  for (const auto& f : spec.factors()) {
    const int block = f.d.ambient();
    for (int j = 0; j < f.count; ++j) {
      const auto xb = x.segment(offset, block);
      const auto yb = y.segment(offset, block);
      if (std::abs(xb.norm() - 1.0) > 1e-9 || std::abs(yb.norm() - 1.0) > 1e-9)
        throw std::domain_error("product_distance_sq: block is not a unit vector");
      total += (xb - yb).squaredNorm();
      offset += block;
    }
  }
  return total;
}

}  // namespace spherelab
