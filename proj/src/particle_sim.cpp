#include "spherelab/particle_sim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spherelab/parallel.hpp"

namespace spherelab {

namespace {

// per-particle loops only fan out when a thread would own this many slots
constexpr int kParticleGrain = 8192;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x1234567'89ABCDEFULL));
}

void check_config(const ModelParams& params, const SimConfig& cfg) {
  if (cfg.particle_count < 1)
    throw std::invalid_argument("SimConfig: particle_count must be >= 1");
  if (!(cfg.dt > 0.0) || !(cfg.dt < cfg.t_end))
    throw std::invalid_argument("SimConfig: require 0 < dt < t_end");
  if (!(cfg.burn_in >= 0.0) || !(cfg.burn_in < cfg.t_end))
    throw std::invalid_argument("SimConfig: require 0 <= burn_in < t_end");
  if (!(params.kappa >= 0.0))
    throw std::invalid_argument("SimConfig: kappa must be >= 0");
  if (!(cfg.dt * params.kappa < 0.1))
    throw std::invalid_argument("SimConfig: dt * kappa must stay below 0.1");
}

}  // namespace

ParticleRng::ParticleRng(std::uint64_t seed, int particle_count) {
  engines_.reserve(particle_count);
  for (int i = 0; i < particle_count; ++i)
    engines_.emplace_back(mix_seed(seed, static_cast<std::uint64_t>(i)));
}

Eigen::MatrixXd ParticleRng::normal_matrix(int rows) {
  const int n = static_cast<int>(engines_.size());
  Eigen::MatrixXd out(rows, n);
  parallel_for_ranges(
      n,
      [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
          // a fresh distribution per column keeps the draw count per engine fixed
          std::normal_distribution<double> normal;
          for (int r = 0; r < rows; ++r) out(r, i) = normal(engines_[i]);
        }
      },
      kParticleGrain);
  return out;
}

Eigen::VectorXd tangent_project(const Eigen::VectorXd& v, const Eigen::VectorXd& x) {
  return v - v.dot(x) * x;
}

ParticleEnsemble init_ensemble(const ModelParams& params, const SimConfig& cfg) {
  check_config(params, cfg);
  ParticleEnsemble ens{Eigen::MatrixXd(), 0.0, ParticleRng(cfg.seed, cfg.particle_count)};
  ens.positions = ens.rng.normal_matrix(params.d.ambient());
  parallel_for(
      cfg.particle_count, [&](int i) { ens.positions.col(i).normalize(); },
      kParticleGrain);
  return ens;
}

Eigen::MatrixXd draw_brownian_increments(ParticleEnsemble& ens, double dt) {
  Eigen::MatrixXd m = ens.rng.normal_matrix(static_cast<int>(ens.positions.rows()));
  m *= std::sqrt(2.0 * dt);
  return m;
}

void apply_step(ParticleEnsemble& ens, const ModelParams& params, const SimConfig& cfg,
                const Eigen::MatrixXd& increments) {
  const int n = static_cast<int>(ens.positions.cols());
  const int rows = static_cast<int>(ens.positions.rows());
  // (kappa/N) sum_j P_i(x_j - x_i) = kappa P_i(xbar - x_i) = kappa P_i(xbar).
  // Keep the mean serial so results do not depend on the thread partition.
  const Eigen::VectorXd drift = params.kappa * cfg.dt * ens.positions.rowwise().mean();

  parallel_for_ranges(
      n,
      [&](int begin, int end) {
        Eigen::VectorXd u(rows);
        for (int i = begin; i < end; ++i) {
          auto x = ens.positions.col(i);
          // tangent part of drift + noise; projections merge by linearity
          const double radial = drift.dot(x) + increments.col(i).dot(x);
          u.noalias() = drift + increments.col(i) - radial * x;
          if (cfg.scheme == StepScheme::ProjectRenormalize) {
            x += u;
            x /= x.norm();
          } else {
            const double r = u.norm();
            u *= (r > 1e-12 ? std::sin(r) / r : 1.0);
            u.noalias() += std::cos(r) * x;
            x = u;
          }
        }
      },
      kParticleGrain);
  ens.time += cfg.dt;

  if (!ens.positions.allFinite()) {
    std::ostringstream os;
    os << "particle step produced a non-finite position at t = " << ens.time
       << " (step " << std::llround(ens.time / cfg.dt) << ")";
    throw std::runtime_error(os.str());
  }
}

void step(ParticleEnsemble& ens, const ModelParams& params, const SimConfig& cfg) {
  apply_step(ens, params, cfg, draw_brownian_increments(ens, cfg.dt));
}

SimStats run(const ModelParams& params, const SimConfig& cfg) {
  check_config(params, cfg);
  ParticleEnsemble ens = init_ensemble(params, cfg);
  const long steps = std::llround(cfg.t_end / cfg.dt);

  SimStats stats;
  stats.times.reserve(steps);
  stats.com_norm_series.reserve(steps);
  for (long s = 1; s <= steps; ++s) {
    step(ens, params, cfg);
    stats.times.push_back(s * cfg.dt);
    stats.com_norm_series.push_back(ens.positions.rowwise().mean().norm());
  }

  std::vector<double> kept;
  for (size_t i = 0; i < stats.times.size(); ++i)
    if (stats.times[i] > cfg.burn_in) kept.push_back(stats.com_norm_series[i]);
  if (kept.empty()) throw std::runtime_error("run: no samples after burn-in");

  double sum = 0.0;
  for (double v : kept) sum += v;
  stats.mean_com_norm = sum / kept.size();

  // batch means against autocorrelation
  const int batches = std::min<std::size_t>(20, kept.size());
  const std::size_t per = kept.size() / batches;
  double var = 0.0;
  for (int b = 0; b < batches; ++b) {
    double m = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) m += kept[i];
    m /= per;
    var += (m - stats.mean_com_norm) * (m - stats.mean_com_norm);
  }
  if (batches > 1) {
    var /= (batches - 1);
    stats.std_error = std::sqrt(var / batches);
  }
  return stats;
}

Eigen::MatrixXd sample_vmf(double eta, SphereDim d, int count, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw std::invalid_argument("sample_vmf: eta must be >= 0");
  if (count < 1) throw std::invalid_argument("sample_vmf: count must be >= 1");
  const int ambient = d.ambient();
  const double p1 = ambient - 1.0;  // = d

  // Wood's rejection sampler for the cosine against the mean direction.
  // b is computed in the cancellation-free form.
  const double b = p1 / (2.0 * eta + std::sqrt(4.0 * eta * eta + p1 * p1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = eta * x0 + p1 * std::log(1.0 - x0 * x0);

  std::mt19937_64 engine(mix_seed(seed, 0xBEEF));
  std::gamma_distribution<double> gamma(p1 / 2.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal;

  Eigen::MatrixXd out(ambient, count);
  for (int s = 0; s < count; ++s) {
    double w = 0.0;
    for (;;) {
      const double g1 = gamma(engine), g2 = gamma(engine);
      const double z = g1 / (g1 + g2);  // Beta(d/2, d/2)
      w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
      const double u = uniform(engine);
      if (eta * w + p1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
    }
    Eigen::VectorXd v(ambient - 1);
    for (int r = 0; r < v.size(); ++r) v[r] = normal(engine);
    v.normalize();
    out(0, s) = w;
    out.col(s).tail(ambient - 1) = std::sqrt(std::fmax(0.0, 1.0 - w * w)) * v;
  }
  return out;
}

std::vector<BlockStats> run_product(const ProductSpaceSpec& spec, const SimConfig& cfg) {
  std::vector<BlockStats> out;
  int slot = 0;
  for (size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& f = spec.factors()[i];
    for (int j = 0; j < f.count; ++j, ++slot) {
      SimConfig block_cfg = cfg;
      block_cfg.seed = mix_seed(cfg.seed, 0xB10C'0000ULL + slot);
      BlockStats bs;
      bs.factor_index = static_cast<int>(i);
      bs.slot_index = j;
      bs.stats = run(ModelParams{f.d, spec.kappa()}, block_cfg);
      out.push_back(std::move(bs));
    }
  }
  return out;
}

}  // namespace spherelab
