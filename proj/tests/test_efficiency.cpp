#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mdopt/descent.hpp"
#include "mdopt/efficiency.hpp"
#include "mdopt/vec.hpp"
#include "test_util.hpp"

using namespace mdopt;

TEST_CASE("running mean identity: exact fixtures") {
  auto poisson = make_family("poisson", 1);
  std::vector<Observation> stream{Observation{{3.0}}, Observation{{1.0}}, Observation{{2.0}}};
  CHECK(running_mean_identity_check(poisson, stream) == 0.0);

  // A constant stream is a fixed point of the recursion.
  std::vector<Observation> constant(64, Observation{{4.0}});
  CHECK(running_mean_identity_check(poisson, constant) == 0.0);
}

TEST_CASE("running mean identity: long gaussian stream stays within accumulation budget") {
  auto fam = make_family("gaussian", 1);
  auto stream = sample_stream(fam, std::vector{0.0}, 10000, 9);
  CHECK(running_mean_identity_check(fam, stream) <= 1e-10);
}

TEST_CASE("running mean identity: bernoulli streams start after the boundary scan") {
  auto fam = make_family("bernoulli", 1);
  auto stream = sample_stream(fam, std::vector{0.3}, 5000, 10);
  CHECK(running_mean_identity_check(fam, stream) <= 1e-10);

  // All-boundary streams cannot initialize.
  std::vector<Observation> zeros(30, Observation{{0.0}});
  CHECK_THROWS_AS((void)running_mean_identity_check(fam, zeros), std::invalid_argument);
}

TEST_CASE("efficiency report: fields and bounds for a small poisson run") {
  EfficiencyConfig ec;
  ec.family = "poisson";
  ec.mu_true = {2.0};
  ec.T = 1000;
  ec.M = 300;
  ec.seed = 77;
  EfficiencyReport rep = run_efficiency(ec, ExecutionPolicy::serial);
  CHECK(rep.M_used == 300);
  CHECK(rep.dropped == 0);
  CHECK(rep.bound[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(rep.scaled_cov[0] > 0.0);
  // Loose 5-sigma sanity band around the reference variance scale.
  CHECK(std::abs(rep.ratio[0] - 1.0) <= 5.0 * 1.5 * std::sqrt(2.0 / 300.0));
  // Sidedness: the unbiased running mean makes the reference binding, so the
  // estimate must not sit below it by more than the Monte Carlo band.
  CHECK(rep.scaled_cov[0] >= rep.bound[0] - 3.0 * rep.se[0]);
}

TEST_CASE("efficiency: serial and parallel replicate execution agree bitwise") {
  EfficiencyConfig ec;
  ec.family = "product";
  ec.dim = 3;
  ec.mu_true = {0.5, 2.0, 0.3};
  ec.T = 400;
  ec.M = 64;
  ec.seed = 5;
  ec.keep_replicates = true;
  EfficiencyReport a = run_efficiency(ec, ExecutionPolicy::serial);
  EfficiencyReport b = run_efficiency(ec, ExecutionPolicy::parallel);
  CHECK(a.scaled_cov == b.scaled_cov);
  CHECK(a.bound == b.bound);
  CHECK(a.ratio == b.ratio);
  CHECK(a.se == b.se);
  CHECK(a.M_used == b.M_used);
  CHECK(a.projections == b.projections);
  CHECK(a.dropped == b.dropped);
  CHECK(a.fallback_inits == b.fallback_inits);
  CHECK(a.pass == b.pass);
  REQUIRE(a.replicates.size() == b.replicates.size());
  for (std::size_t r = 0; r < a.replicates.size(); ++r) CHECK(a.replicates[r] == b.replicates[r]);
}

TEST_CASE("efficiency: replicate rerun through the mirror arm matches") {
  EfficiencyConfig ec;
  ec.family = "poisson";
  ec.mu_true = {2.0};
  ec.T = 500;
  ec.M = 8;
  ec.seed = 77;
  ec.keep_replicates = true;
  EfficiencyReport rep = run_efficiency(ec, ExecutionPolicy::serial);
  REQUIRE(rep.dropped == 0);

  auto fam = make_family("poisson", 1);
  const std::uint64_t r = 3;
  auto draw = [&](std::int64_t t) {
    CounterRng rng(ec.seed, r, static_cast<std::uint64_t>(t));
    return sample_scalar(ScalarKind::exponential, 2.0, rng);
  };
  double y1 = draw(1);
  REQUIRE(y1 >= 1.0);  // interior first observation for this seed

  // Mirror descent in the natural coordinates on the same stream.
  std::vector<double> theta = fam.pair().h(std::vector{y1});
  for (std::int64_t t = 2; t <= ec.T; ++t) {
    Observation y{{draw(t)}};
    auto grad = log_loss_natural_grad(fam, theta, y);
    StepResult s = mirror_step_proximal(fam.pair(), grad, theta, 1.0 / static_cast<double>(t));
    REQUIRE(!s.projected);
    theta = std::move(s.point);
  }
  double muhat_mirror = fam.pair().g(theta)[0];
  CHECK(std::abs(muhat_mirror - rep.replicates[r][0]) <= 1e-10);
}

TEST_CASE("efficiency: fixed init is one pseudo-observation") {
  EfficiencyConfig ec;
  ec.family = "gaussian";
  ec.mu_true = {0.0};
  ec.T = 200;
  ec.M = 4;
  ec.seed = 21;
  ec.init = InitMode::fixed;
  ec.fixed_init = {1.5};
  ec.keep_replicates = true;
  EfficiencyReport rep = run_efficiency(ec, ExecutionPolicy::serial);

  for (std::uint64_t r = 0; r < 4; ++r) {
    double sum = 1.5;
    for (std::int64_t t = 1; t <= ec.T; ++t) {
      CounterRng rng(ec.seed, r, static_cast<std::uint64_t>(t));
      sum += sample_scalar(ScalarKind::half_square, 0.0, rng);
    }
    CHECK(std::abs(rep.replicates[r][0] - sum / static_cast<double>(ec.T + 1)) <= 1e-10);
  }
}

TEST_CASE("efficiency: boundary-locked leading draws fall back to the fixed initializer") {
  EfficiencyConfig ec;
  ec.family = "bernoulli";
  ec.mu_true = {0.5};
  ec.T = 2;  // scan cannot get past two equal draws
  ec.M = 64;
  ec.seed = 33;
  ec.keep_replicates = true;
  EfficiencyReport rep = run_efficiency(ec, ExecutionPolicy::serial);
  CHECK(rep.fallback_inits > 0);
  CHECK(rep.fallback_inits < 64);  // mixed draws initialize normally
  CHECK(rep.dropped == 0);
}

TEST_CASE("efficiency: argument validation") {
  EfficiencyConfig ec;
  ec.family = "poisson";
  ec.mu_true = {2.0};
  ec.T = 1;
  ec.M = 10;
  CHECK_THROWS_AS((void)run_efficiency(ec), std::invalid_argument);
  ec.T = 100;
  ec.M = 1;
  CHECK_THROWS_AS((void)run_efficiency(ec), std::invalid_argument);
  ec.M = 10;
  ec.mu_true = {-1.0};
  CHECK_THROWS_AS((void)run_efficiency(ec), DomainViolation);
}

TEST_CASE("efficiency: product-family report keeps finite ratios everywhere") {
  EfficiencyConfig ec;
  ec.family = "product";
  ec.dim = 3;
  ec.mu_true = {0.0, 2.0, 0.3};
  ec.T = 300;
  ec.M = 100;
  ec.seed = 13;
  EfficiencyReport rep = run_efficiency(ec, ExecutionPolicy::parallel);
  for (double v : rep.ratio) CHECK(std::isfinite(v));
  for (int i = 0; i < 3; ++i) {
    CHECK(rep.entry(rep.bound, i, i) > 0.0);
    CHECK(rep.entry(rep.scaled_cov, i, i) > 0.0);
  }
  // Symmetry of the covariance estimate.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(rep.entry(rep.scaled_cov, i, j) == rep.entry(rep.scaled_cov, j, i));
}
