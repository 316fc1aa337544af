#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mdopt/descent.hpp"
#include "mdopt/efficiency.hpp"
#include "mdopt/vec.hpp"
#include "test_util.hpp"

using namespace mdopt;

TEST_CASE("step schedules") {
  StepSchedule c{StepSchedule::Kind::constant, 0.3};
  StepSchedule it{StepSchedule::Kind::inv_t, 2.0};
  StepSchedule is{StepSchedule::Kind::inv_sqrt_t, 1.0};
  for (std::int64_t t : {1, 2, 7, 1000}) {
    CHECK(c.at(t) == 0.3);
    CHECK(it.at(t) == 2.0 / t);
    CHECK(is.at(t) == doctest::Approx(1.0 / std::sqrt(double(t))).epsilon(1e-15));
    CHECK(c.at(t) > 0.0);
    CHECK(it.at(t) > 0.0);
    CHECK(is.at(t) > 0.0);
  }
  CHECK_THROWS_AS((void)it.at(0), std::invalid_argument);
  StepSchedule bad{StepSchedule::Kind::constant, -1.0};
  CHECK_THROWS_AS((void)bad.at(1), std::invalid_argument);
}

TEST_CASE("gd_step arithmetic") {
  CHECK(gd_step(std::vector{1.0, 0.0}, std::vector{1.0, 1.0}, 0.5) == std::vector{0.5, 1.0});
  CHECK(gd_step(std::vector{0.0, 0.0}, std::vector{2.0, -3.0}, 0.7) == std::vector{2.0, -3.0});

  // Gaussian log-loss: grad = theta - y, so theta=0, y=1, alpha=1 lands on 1.
  auto gauss = make_family("gaussian", 1);
  auto grad = log_loss_natural_grad(gauss, std::vector{0.0}, Observation{{1.0}});
  CHECK(grad[0] == -1.0);
  CHECK(gd_step(grad, std::vector{0.0}, 1.0)[0] == 1.0);
}

TEST_CASE("mirror_step_proximal: fixed values") {
  auto gauss = make_family("gaussian", 2);
  StepResult r = mirror_step_proximal(gauss.pair(), std::vector{1.0, 0.0},
                                      std::vector{1.0, 1.0}, 0.5);
  CHECK(r.point == std::vector{0.5, 1.0});  // identical to gd_step for the gaussian pair
  CHECK(!r.projected);

  auto poisson = make_family("poisson", 1);
  r = mirror_step_proximal(poisson.pair(), std::vector{-1.0}, std::vector{0.0}, 0.5);
  CHECK(r.point[0] == doctest::Approx(std::log(1.5)).epsilon(1e-15));

  // Vanishing-step continuity.
  r = mirror_step_proximal(poisson.pair(), std::vector{-1.0}, std::vector{0.0}, 1e-12);
  CHECK(std::abs(r.point[0] - 0.0) <= 1e-11);
  CHECK_THROWS_AS(
      (void)mirror_step_proximal(poisson.pair(), std::vector{-1.0}, std::vector{0.0}, 0.0),
      std::invalid_argument);
}

TEST_CASE("mirror_map_step: fixed values") {
  auto poisson = make_family("poisson", 1);
  StepResult r = mirror_map_step(poisson.pair(), std::vector{-1.0}, std::vector{1.0}, 0.5);
  CHECK(r.point[0] == 1.5);
  r = mirror_map_step(poisson.pair(), std::vector{0.0}, std::vector{2.7}, 0.5);
  CHECK(r.point[0] == 2.7);

  auto gauss = make_family("gaussian", 1);
  CHECK(mirror_map_step(gauss.pair(), std::vector{0.25}, std::vector{1.0}, 0.5).point ==
        gd_step(std::vector{0.25}, std::vector{1.0}, 0.5));
}

TEST_CASE("natural_gradient_step: fixed values with the finite-difference oracle") {
  auto gauss = make_family("gaussian", 1);
  CHECK(natural_gradient_step(gauss.pair(), std::vector{0.4}, std::vector{1.0}, 0.5).point ==
        gd_step(std::vector{0.4}, std::vector{1.0}, 0.5));

  // Poisson log-loss at mu=2, y=3, alpha=1/2: the oracle evaluates the
  // mean-coordinate update with a finite-difference gradient of B_H.
  auto poisson = make_family("poisson", 1);
  Observation y{{3.0}};
  auto fd_grad = testutil::fd_gradient(
      [&](std::span<const double> m) { return log_loss_mean(poisson, m, y); },
      std::vector{2.0});
  double oracle = 2.0 - 0.5 * fd_grad[0] / metric_dual(poisson.pair(), std::vector{2.0}).diag()[0];
  CHECK(oracle == doctest::Approx(2.5).epsilon(1e-9));

  auto grad = log_loss_mean_grad(poisson, std::vector{2.0}, y);
  StepResult r = natural_gradient_step(poisson.pair(), grad, std::vector{2.0}, 0.5);
  CHECK(r.point[0] == doctest::Approx(2.5).epsilon(1e-15));

  r = natural_gradient_step(poisson.pair(), std::vector{0.0}, std::vector{2.0}, 0.5);
  CHECK(r.point[0] == 2.0);
}

TEST_CASE("retraction_step with the identity retraction equals natural_gradient_step") {
  auto prod = make_family("product", 3);
  CounterRng rng(61, 0, 0);
  for (int i = 0; i < 100; ++i) {
    auto mu = testutil::random_dual(prod.pair(), rng);
    std::vector<double> grad(3);
    for (auto& v : grad) v = rng.uniform(-2.0, 2.0);
    double alpha = rng.uniform(0.01, 1.0);
    StepResult ngd = natural_gradient_step(prod.pair(), grad, mu, alpha);
    StepResult ret =
        retraction_step(prod.pair(), prod.pair().hess_H(mu).solve(grad), mu, alpha);
    CHECK(ngd.point == ret.point);  // exact, same code path
    CHECK(ngd.projected == ret.projected);
  }
  auto poisson = make_family("poisson", 1);
  CHECK(retraction_step(poisson.pair(), std::vector{0.0}, std::vector{2.0}, 0.5).point[0] == 2.0);
  auto grad = log_loss_mean_grad(poisson, std::vector{2.0}, Observation{{3.0}});
  auto rg = poisson.pair().hess_H(std::vector{2.0}).solve(grad);
  CHECK(retraction_step(poisson.pair(), rg, std::vector{2.0}, 0.5).point[0] ==
        doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("mirror-map and proximal forms agree through h") {
  for (const char* name : {"poisson", "bernoulli", "product"}) {
    auto fam = make_family(name, name == std::string("product") ? 3 : 1);
    const ConjugatePair& pair = fam.pair();
    CounterRng rng(67, 0, 1);
    for (int i = 0; i < 100; ++i) {
      auto theta = testutil::random_primal(pair, rng);
      auto mu = pair.g(theta);
      std::vector<double> grad(mu.size());
      for (auto& v : grad) v = rng.uniform(-0.5, 0.5);
      double alpha = rng.uniform(0.01, 0.5);
      StepResult map = mirror_map_step(pair, grad, mu, alpha);
      StepResult prox = mirror_step_proximal(pair, grad, theta, alpha);
      if (map.projected || prox.projected) continue;
      CHECK(linf_diff(pair.h(map.point), prox.point) <= 1e-10);
    }
  }
}

TEST_CASE("proximal first-order condition and argmin certificate") {
  auto fam = make_family("product", 3);
  const ConjugatePair& pair = fam.pair();
  CounterRng rng(71, 0, 2);
  auto objective = [&](std::span<const double> th, std::span<const double> grad,
                       std::span<const double> anchor, double alpha) {
    return dot(th, grad) + bregman_primal(pair, th, anchor) / alpha;
  };
  for (int i = 0; i < 20; ++i) {
    auto theta = testutil::random_primal(pair, rng);
    std::vector<double> grad(3);
    for (auto& v : grad) v = rng.uniform(-0.5, 0.5);
    double alpha = rng.uniform(0.05, 0.5);
    StepResult r = mirror_step_proximal(pair, grad, theta, alpha);
    if (r.projected) continue;

    // FOC: grad + (g(theta') - g(theta))/alpha = 0.
    auto gp = pair.g(r.point);
    auto gt = pair.g(theta);
    double foc = 0.0;
    for (std::size_t k = 0; k < gp.size(); ++k)
      foc = std::max(foc, std::abs(grad[k] + (gp[k] - gt[k]) / alpha));
    CHECK(foc <= 1e-8);

    // The proximal objective is not improved by nearby perturbations.
    double at_opt = objective(r.point, grad, theta, alpha);
    for (int j = 0; j < 50; ++j) {
      auto pert = r.point;
      for (auto& v : pert) v += rng.uniform(-0.05, 0.05);
      if (pair.primal_domain().first_violation(pert) >= 0) continue;
      CHECK(objective(pert, grad, theta, alpha) >= at_opt - 1e-12);
    }
  }
}

TEST_CASE("safeguard: projection back into the open domain is flagged") {
  auto poisson = make_family("poisson", 1);
  // g(0) = 1, big positive gradient pushes the dual image to -1.
  StepResult r = mirror_step_proximal(poisson.pair(), std::vector{2.0}, std::vector{0.0}, 1.0);
  CHECK(r.projected);
  CHECK(r.point[0] == doctest::Approx(std::log(kDomainMargin)).epsilon(1e-12));

  auto bern = make_family("bernoulli", 1);
  r = mirror_map_step(bern.pair(), std::vector{-3.0}, std::vector{0.5}, 1.0);
  CHECK(r.projected);
  CHECK(r.point[0] == 1.0 - kDomainMargin);

  // Untouched coordinates are not moved.
  auto prod = make_family("product", 3);
  r = mirror_map_step(prod.pair(), std::vector{0.0, 5.0, 0.0}, std::vector{0.0, 2.0, 0.5}, 1.0);
  CHECK(r.projected);
  CHECK(r.point[0] == 0.0);
  CHECK(r.point[1] == kDomainMargin);
  CHECK(r.point[2] == 0.5);
}

TEST_CASE("step rejection on non-finite input") {
  auto poisson = make_family("poisson", 1);
  const double nan = std::nan("");
  CHECK_THROWS_AS(
      (void)mirror_map_step(poisson.pair(), std::vector{nan}, std::vector{1.0}, 0.5),
      StepRejection);
  CHECK_THROWS_AS(
      (void)natural_gradient_step(poisson.pair(), std::vector{nan}, std::vector{1.0}, 0.5),
      StepRejection);
}

TEST_CASE("ill-conditioned metric is rejected with a diagnostic") {
  auto prod = make_family("product", 3);
  // Metric diag: (1, 1/mu, 1/(p(1-p))) - push the condition estimate past the cap.
  std::vector<double> mu{0.0, 1e-13, 0.5};
  CHECK_THROWS_AS(
      (void)natural_gradient_step(prod.pair(), std::vector{0.1, 0.1, 0.1}, mu, 0.5),
      StepRejection);
}

TEST_CASE("run_online: single step run records the loss of the initial point") {
  auto gauss = make_family("gaussian", 1);
  std::vector<Observation> stream{Observation{{2.0}}};
  Trajectory traj = run_online(gauss, OptimizerKind::gd, stream,
                               StepSchedule{StepSchedule::Kind::constant, 0.5}, {0.0});
  REQUIRE(traj.steps.size() == 1);
  CHECK(traj.steps[0].loss == log_loss_natural(gauss, std::vector{0.0}, stream[0]));
  CHECK(traj.steps[0].cumulative_loss == traj.steps[0].loss);
  CHECK(traj.final_theta[0] == 1.0);  // theta - 0.5 * (theta - y)
}

TEST_CASE("run_online: gaussian mirror and gd trajectories coincide") {
  auto gauss = make_family("gaussian", 2);
  std::vector<double> mu{0.25, -1.0};
  auto stream = sample_stream(gauss, mu, 500, 17);
  StepSchedule sched{StepSchedule::Kind::constant, 0.1};
  Trajectory a = run_online(gauss, OptimizerKind::gd, stream, sched, {0.0, 0.0});
  Trajectory b = run_online(gauss, OptimizerKind::mirror, stream, sched, {0.0, 0.0});
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i)
    CHECK(linf_diff(a.steps[i].theta, b.steps[i].theta) <= 1e-12);
  CHECK(linf_diff(a.final_theta, b.final_theta) <= 1e-12);
}

TEST_CASE("run_online: regret bookkeeping recomputes exactly") {
  auto poisson = make_family("poisson", 1);
  auto stream = sample_stream(poisson, std::vector{2.0}, 200, 23);
  Trajectory traj = run_online(poisson, OptimizerKind::natural, stream,
                               StepSchedule{StepSchedule::Kind::inv_sqrt_t, 0.5}, {1.0});
  double sum = 0.0;
  for (const Iterate& it : traj.steps) {
    sum += it.loss;
    CHECK(it.cumulative_loss == sum);
    CHECK(linf_diff(poisson.pair().g(it.theta), it.mu) <= 1e-12);
  }
  CHECK(!traj.aborted);
  CHECK(traj.steps.front().t == 1);
  CHECK(traj.steps.back().t == 200);
}

TEST_CASE("run_online: natural-gradient running mean on the (3,1,2) stream") {
  // init mu = y_1 = 3, then consume y=1 at alpha=1/2 and y=2 at alpha=1/3:
  // the final state is the running mean 2 exactly.
  auto poisson = make_family("poisson", 1);
  std::vector<double> mu{3.0};
  for (auto [y, alpha] : {std::pair{1.0, 0.5}, {2.0, 1.0 / 3.0}}) {
    auto grad = log_loss_mean_grad(poisson, mu, Observation{{y}});
    mu = natural_gradient_step(poisson.pair(), grad, mu, alpha).point;
  }
  CHECK(mu[0] == 2.0);

  // The same via the streaming identity check: zero deviation from the
  // running mean at every prefix.
  std::vector<Observation> stream{Observation{{3.0}}, Observation{{1.0}}, Observation{{2.0}}};
  CHECK(running_mean_identity_check(poisson, stream) == 0.0);
}

TEST_CASE("run_online: abort leaves a partial trajectory with a diagnostic") {
  auto poisson = make_family("poisson", 1);
  std::vector<Observation> stream{Observation{{1.0}}, Observation{{std::nan("")}},
                                  Observation{{2.0}}};
  Trajectory traj = run_online(poisson, OptimizerKind::natural, stream,
                               StepSchedule{StepSchedule::Kind::constant, 0.5}, {1.0});
  CHECK(traj.aborted);
  CHECK(traj.steps.size() == 1);  // the poisoned observation never becomes an iterate
  CHECK(!traj.diagnostic.empty());
}

TEST_CASE("run_online rejects an exterior initial point and an empty stream") {
  auto bern = make_family("bernoulli", 1);
  std::vector<Observation> stream{Observation{{1.0}}};
  CHECK_THROWS_AS((void)run_online(bern, OptimizerKind::natural, stream,
                                   StepSchedule{StepSchedule::Kind::constant, 0.1}, {1.0}),
                  DomainViolation);
  CHECK_THROWS_AS((void)run_online(bern, OptimizerKind::natural, std::vector<Observation>{},
                                   StepSchedule{StepSchedule::Kind::constant, 0.1}, {0.5}),
                  std::invalid_argument);
}
