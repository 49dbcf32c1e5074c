#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spherelab/energy.hpp"

using namespace spherelab;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd unit(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double c : v) x[i++] = c;
  x.normalize();
  return x;
}

}  // namespace

TEST_CASE("uniform energy matches the closed form") {
  const ModelParams p24{SphereDim(2), 4.0};
  const auto uni24 = solve_equilibria(p24).front();
  const EnergyReport r24 = energy_of(uni24, p24);
  CHECK(r24.value == doctest::Approx(-std::log(4.0 * kPi) + 2.0).epsilon(1e-14));
  CHECK(r24.com_norm == 0.0);
  CHECK(r24.value ==
        doctest::Approx(r24.entropy_part + r24.interaction_part).epsilon(1e-15));

  const ModelParams p12{SphereDim(1), 2.0};
  const auto uni12 = solve_equilibria(p12).front();
  CHECK(energy_of(uni12, p12).value ==
        doctest::Approx(-std::log(2.0 * kPi) + 1.0).epsilon(1e-14));
}

TEST_CASE("localized energy undercuts the uniform one") {
  const ModelParams p{SphereDim(2), 5.0};
  const auto sols = solve_equilibria(p);
  REQUIRE(sols.size() == 2);
  const double e_uni = energy_of(sols[0], p).value;
  const double e_loc = energy_of(sols[1], p).value;
  CHECK(e_loc < e_uni);
  // frozen values established with the independent quadrature + bisection oracle
  CHECK(e_uni == doctest::Approx(-0.031024246969290736).epsilon(1e-12));
  CHECK(e_loc == doctest::Approx(-0.36025108489439006).epsilon(1e-11));
}

TEST_CASE("energy report parts sum for localized solutions") {
  for (auto [d, kappa] : std::vector<std::pair<int, double>>{
           {1, 2.5}, {2, 5.0}, {3, 8.0}, {5, 18.0}, {2, 35.0}}) {
    const ModelParams p{SphereDim(d), kappa};
    const auto sols = solve_equilibria(p);
    REQUIRE(sols.size() == 2);
    const EnergyReport r = energy_of(sols[1], p);
    CHECK(std::abs(r.value - (r.entropy_part + r.interaction_part)) <=
          1e-12 * std::abs(r.value));
    CHECK(r.com_norm == doctest::Approx(sols[1].com_norm).epsilon(1e-10));
  }
}

TEST_CASE("energy_of rejects inconsistent inputs") {
  const ModelParams p{SphereDim(2), 5.0};
  const auto sols = solve_equilibria(p);
  EquilibriumSolution tampered = sols[1];
  tampered.eta *= 1.01;  // no longer a root
  CHECK_THROWS_AS(energy_of(tampered, p), std::domain_error);
  EquilibriumSolution wrong_uniform = sols[0];
  wrong_uniform.eta = 0.3;
  CHECK_THROWS_AS(energy_of(wrong_uniform, p), std::domain_error);
  // localized solution against different params is inconsistent too
  CHECK_THROWS_AS(energy_of(sols[1], ModelParams{SphereDim(2), 7.0}),
                  std::domain_error);
}

TEST_CASE("energy gap agrees with the energy difference") {
  CHECK_FALSE(energy_gap({SphereDim(2), 3.0}).has_value());
  CHECK_FALSE(energy_gap({SphereDim(2), 0.5}).has_value());
  for (auto [d, kappa] : std::vector<std::pair<int, double>>{
           {1, 3.0}, {2, 3.5}, {2, 5.0}, {3, 8.0}, {5, 18.0}}) {
    const ModelParams p{SphereDim(d), kappa};
    const auto gap = energy_gap(p);
    REQUIRE(gap.has_value());
    CHECK(*gap < 0.0);
    const auto sols = solve_equilibria(p);
    const double diff = energy_of(sols[1], p).value - energy_of(sols[0], p).value;
    CHECK(std::abs(*gap - diff) <= 1e-10 * (1.0 + std::abs(*gap)));
  }
  CHECK(*energy_gap({SphereDim(2), 5.0}) ==
        doctest::Approx(-0.3292268379251002).epsilon(1e-11));
  CHECK(*energy_gap({SphereDim(1), 3.0}) ==
        doctest::Approx(-0.16006400156467793).epsilon(1e-11));
}

TEST_CASE("gap function vanishes at the origin and dips at the root") {
  for (int d : {1, 2, 3, 6}) {
    const ModelParams p{SphereDim(d), 2.0 * (d + 1.0)};
    CHECK(std::abs(gap_function(0.0, p)) <= 1e-12);
  }
  const ModelParams p{SphereDim(2), 5.0};
  const double eta = *find_eta(p);
  // f' < 0 left of the root, f' > 0 right of it
  for (int i = 1; i <= 20; ++i) CHECK(gap_derivative(eta * i / 21.0, p) < 0.0);
  for (int i = 1; i <= 20; ++i) CHECK(gap_derivative(eta + 0.4 * i, p) > 0.0);
  // g = f' * I_0 on a grid
  for (int i = 1; i <= 40; ++i) {
    const double e = 0.2 * i;
    const double lhs = g_quadrature(e, p);
    const double rhs = gap_derivative(e, p) * moment_integral(0, e, p.d);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("path energy anchors at both equilibria") {
  const ModelParams p{SphereDim(2), 5.0};
  const auto sols = solve_equilibria(p);
  CHECK(path_energy(0.0, p) ==
        doctest::Approx(energy_of(sols[0], p).value).epsilon(1e-12));
  CHECK(path_energy(sols[1].eta, p) ==
        doctest::Approx(energy_of(sols[1], p).value).epsilon(1e-12));
  CHECK(path_energy(sols[1].eta, p) < path_energy(0.0, p));

  // grid scan: the minimum sits at the root
  double best_eta = 0.0, best = path_energy(0.0, p);
  for (int i = 1; i <= 10000; ++i) {
    const double eta = p.kappa * i / 10000.0;
    const double e = path_energy(eta, p);
    if (e < best) {
      best = e;
      best_eta = eta;
    }
  }
  CHECK(std::abs(best_eta - sols[1].eta) <= 2.0 * p.kappa / 10000.0);
}

TEST_CASE("path derivatives: closed forms at eta = 0 and at the root") {
  for (int d : {1, 2, 3}) {
    for (double kappa : {2.0, 5.0, 9.0}) {
      const ModelParams p{SphereDim(d), kappa};
      const PathDerivatives pd = path_energy_derivatives(0.0, p);
      CHECK(std::abs(pd.first) <= 1e-14);
      CHECK(pd.second ==
            doctest::Approx((1.0 - kappa / (d + 1.0)) / (d + 1.0)).epsilon(1e-10));
    }
  }
  const ModelParams p{SphereDim(2), 5.0};
  const double eta = *find_eta(p);
  CHECK(std::abs(path_energy_derivatives(eta, p).first) <= 1e-10);
}

TEST_CASE("path derivatives match central finite differences") {
  const double h = 1e-5;
  for (auto [d, kappa, eta] : std::vector<std::tuple<int, double, double>>{
           {1, 2.0, 0.5}, {1, 4.0, 1.0}, {2, 5.0, 1.0}, {2, 5.0, 3.0},
           {3, 3.0, 2.0}, {5, 10.0, 4.0}, {2, 35.0, 20.0}}) {
    const ModelParams p{SphereDim(d), kappa};
    const PathDerivatives pd = path_energy_derivatives(eta, p);
    const double fd1 = (path_energy(eta + h, p) - path_energy(eta - h, p)) / (2.0 * h);
    const double fd2 = (path_energy(eta + h, p) - 2.0 * path_energy(eta, p) +
                        path_energy(eta - h, p)) /
                       (h * h);
    CHECK(std::abs(pd.first - fd1) <= 1e-6 * (1.0 + std::abs(fd1)));
    CHECK(std::abs(pd.second - fd2) <= 1e-4 * (1.0 + std::abs(fd2)));
  }
}

TEST_CASE("uniform stability classification") {
  const StabilityReport stable = classify_uniform({SphereDim(2), 2.0});
  CHECK(stable.verdict == StabilityVerdict::Stable);
  CHECK(stable.second_derivative == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  const StabilityReport marginal = classify_uniform({SphereDim(2), 3.0});
  CHECK(marginal.verdict == StabilityVerdict::Marginal);
  CHECK(marginal.second_derivative == 0.0);

  const StabilityReport unstable = classify_uniform({SphereDim(3), 8.0});
  CHECK(unstable.verdict == StabilityVerdict::Unstable);
  CHECK(unstable.second_derivative == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("entropy inequality residual on reference densities") {
  const SphereDim d2(2);
  // uniform density: equality
  VmfMixture uniform;
  uniform.components.push_back({1.0, 0.0, unit({1.0, 0.0, 0.0})});
  CHECK(std::abs(entropy_inequality_residual(uniform, d2)) <= 1e-8);

  // single vMF component with concentration 2: strictly positive
  VmfMixture single;
  single.components.push_back({1.0, 2.0, unit({0.0, 0.0, 1.0})});
  CHECK(entropy_inequality_residual(single, d2) > 1e-4);

  // antipodal equal-weight pair: center of mass cancels, entropy dominates
  VmfMixture pair;
  pair.components.push_back({0.5, 3.0, unit({0.0, 0.0, 1.0})});
  pair.components.push_back({0.5, 3.0, unit({0.0, 0.0, -1.0})});
  const double r = entropy_inequality_residual(pair, d2);
  CHECK(r > 1e-4);
  const double entropy = mixture_entropy(pair, d2);
  CHECK(r == doctest::Approx(entropy + std::log(4.0 * kPi)).epsilon(1e-9));
}

TEST_CASE("mixture center of mass matches the moment ratio") {
  const SphereDim d(2);
  VmfMixture mix;
  mix.components.push_back({0.7, 3.0, unit({1.0, 0.0, 0.0})});
  mix.components.push_back({0.3, 1.0, unit({0.0, 1.0, 0.0})});
  const Eigen::VectorXd com = mixture_center_of_mass(mix, d);
  const double m1_3 = moment_integral(1, 3.0, d) / moment_integral(0, 3.0, d);
  const double m1_1 = moment_integral(1, 1.0, d) / moment_integral(0, 1.0, d);
  CHECK(com[0] == doctest::Approx(0.7 * m1_3).epsilon(1e-12));
  CHECK(com[1] == doctest::Approx(0.3 * m1_1).epsilon(1e-12));
  CHECK(com[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lattice entropy agrees with the co-aligned quadrature") {
  // rotate a co-aligned mixture; the entropy is rotation invariant, so the
  // Fibonacci-lattice path must reproduce the polar-quadrature value
  const SphereDim d(2);
  std::mt19937_64 engine(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd axis(3);
    for (int i = 0; i < 3; ++i) axis[i] = normal(engine);
    axis.normalize();

    VmfMixture aligned, rotated;
    aligned.components.push_back({0.6, 4.0, unit({1.0, 0.0, 0.0})});
    aligned.components.push_back({0.4, 1.5, unit({-1.0, 0.0, 0.0})});
    rotated.components.push_back({0.6, 4.0, axis});
    rotated.components.push_back({0.4, 1.5, -axis});
    // tip one axis slightly so the general-position path is exercised
    Eigen::VectorXd tipped = rotated.components[1].axis;
    tipped[1] += 1e-7;
    tipped.normalize();
    rotated.components[1].axis = tipped;

    const double a = mixture_entropy(aligned, d);
    const double b = mixture_entropy(rotated, d);
    CHECK(std::abs(a - b) <= 2e-7 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("circle mixtures with skew axes integrate consistently") {
  const SphereDim d(1);
  VmfMixture mix;
  mix.components.push_back({0.5, 2.0, unit({1.0, 0.0})});
  mix.components.push_back({0.5, 2.0, unit({0.0, 1.0})});
  CHECK(entropy_inequality_residual(mix, d) > 0.0);
  // rotation invariance on the circle
  VmfMixture rotated;
  const double a0 = 0.83, a1 = 0.83 + kPi / 2.0;
  rotated.components.push_back({0.5, 2.0, unit({std::cos(a0), std::sin(a0)})});
  rotated.components.push_back({0.5, 2.0, unit({std::cos(a1), std::sin(a1)})});
  CHECK(mixture_entropy(mix, d) ==
        doctest::Approx(mixture_entropy(rotated, d)).epsilon(1e-10));
}

TEST_CASE("mixture validation") {
  const SphereDim d(2);
  VmfMixture bad_weights;
  bad_weights.components.push_back({0.7, 1.0, unit({1.0, 0.0, 0.0})});
  CHECK_THROWS_AS(mixture_entropy(bad_weights, d), std::domain_error);

  VmfMixture bad_axis;
  bad_axis.components.push_back({1.0, 1.0, Eigen::VectorXd::Zero(3)});
  CHECK_THROWS_AS(mixture_entropy(bad_axis, d), std::domain_error);

  VmfMixture skew_high_dim;
  skew_high_dim.components.push_back({0.5, 1.0, unit({1.0, 0.0, 0.0, 0.0})});
  skew_high_dim.components.push_back({0.5, 1.0, unit({0.0, 1.0, 0.0, 0.0})});
  CHECK_THROWS_AS(mixture_entropy(skew_high_dim, SphereDim(3)), std::domain_error);

  // co-aligned mixtures are fine in any dimension
  VmfMixture aligned;
  aligned.components.push_back({0.5, 1.0, unit({1.0, 0.0, 0.0, 0.0})});
  aligned.components.push_back({0.5, 2.0, unit({-1.0, 0.0, 0.0, 0.0})});
  CHECK(entropy_inequality_residual(aligned, SphereDim(3)) > 0.0);
}
