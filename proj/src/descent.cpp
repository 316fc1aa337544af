#include "mdopt/descent.hpp"

#include <cmath>
#include <utility>

#include "mdopt/io.hpp"
#include "mdopt/vec.hpp"

namespace mdopt {

namespace {

// Project a point into the open box, keeping kDomainMargin from every
// violated finite boundary. Throws StepRejection for non-finite coordinates
// or a box too narrow to hold the margin.
bool clamp_into_open(const Region& region, std::vector<double>& x) {
  bool fired = false;
  for (int i = 0; i < region.dim(); ++i) {
    std::size_t k = static_cast<std::size_t>(i);
    if (!std::isfinite(x[k]))
      throw StepRejection("update produced a non-finite coordinate [" + std::to_string(i) + "]");
    const Interval& iv = region.coord(i);
    double lo = std::isinf(iv.lo) ? -kInf : iv.lo + kDomainMargin;
    double hi = std::isinf(iv.hi) ? kInf : iv.hi - kDomainMargin;
    if (lo > hi)
      throw StepRejection("domain too narrow for the safeguard margin at coordinate " +
                          std::to_string(i));
    if (x[k] <= iv.lo) {
      x[k] = lo;
      fired = true;
    } else if (x[k] >= iv.hi) {
      x[k] = hi;
      fired = true;
    }
  }
  return fired;
}

void require_positive_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("step size must be positive and finite");
}

}  // namespace

std::vector<double> gd_step(std::span<const double> grad, std::span<const double> theta,
                            double alpha) {
  require_positive_alpha(alpha);
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - alpha * grad[i];
  return out;
}

StepResult mirror_step_proximal(const ConjugatePair& pair, std::span<const double> grad,
                                std::span<const double> theta, double alpha) {
  require_positive_alpha(alpha);
  std::vector<double> mu = pair.g(theta);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] -= alpha * grad[i];
  bool fired = clamp_into_open(pair.dual_domain(), mu);
  return {pair.h(mu), fired};
}

StepResult mirror_map_step(const ConjugatePair& pair, std::span<const double> grad,
                           std::span<const double> dual_point, double alpha) {
  require_positive_alpha(alpha);
  pair.dual_domain().require(dual_point, "mu");
  std::vector<double> mu(dual_point.begin(), dual_point.end());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] -= alpha * grad[i];
  bool fired = clamp_into_open(pair.dual_domain(), mu);
  return {std::move(mu), fired};
}

StepResult natural_gradient_step(const ConjugatePair& pair, std::span<const double> grad_mu,
                                 std::span<const double> mu, double alpha) {
  DiagMetric metric = pair.hess_H(mu);
  double cond = metric.condition_estimate();
  if (!(cond < kMaxMetricCondition))
    throw StepRejection("metric condition estimate " + format_double(cond) +
                        " exceeds " + format_double(kMaxMetricCondition));
  return retraction_step(pair, metric.solve(grad_mu), mu, alpha, Retraction::identity);
}

StepResult retraction_step(const ConjugatePair& pair, std::span<const double> riemannian_grad,
                           std::span<const double> mu, double alpha, Retraction retraction) {
  require_positive_alpha(alpha);
  pair.dual_domain().require(mu, "mu");
  switch (retraction) {
    case Retraction::identity: break;
  }
  std::vector<double> out(mu.begin(), mu.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= alpha * riemannian_grad[i];
  bool fired = clamp_into_open(pair.dual_domain(), out);
  return {std::move(out), fired};
}

std::string optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::gd: return "gd";
    case OptimizerKind::mirror: return "mirror";
    case OptimizerKind::natural: return "natural";
    case OptimizerKind::retraction: return "retraction";
  }
  return "gd";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view s) {
  if (s == "gd") return OptimizerKind::gd;
  if (s == "mirror") return OptimizerKind::mirror;
  if (s == "natural") return OptimizerKind::natural;
  if (s == "retraction") return OptimizerKind::retraction;
  return std::nullopt;
}

Trajectory run_online(const ExponentialFamily& fam, OptimizerKind opt,
                      std::span<const Observation> stream, const StepSchedule& schedule,
                      std::vector<double> init) {
  if (stream.empty()) throw std::invalid_argument("run_online: horizon must be >= 1");
  const ConjugatePair& pair = fam.pair();
  const bool dual_state = opt == OptimizerKind::natural || opt == OptimizerKind::retraction;
  (dual_state ? pair.dual_domain() : pair.primal_domain())
      .require(init, dual_state ? "mu" : "theta");

  Trajectory traj;
  traj.family = fam.name();
  traj.optimizer = opt;
  traj.schedule = schedule;
  traj.steps.reserve(stream.size());

  std::vector<double> state = std::move(init);
  double cum = 0.0;
  for (std::int64_t t = 1; t <= static_cast<std::int64_t>(stream.size()); ++t) {
    const Observation& obs = stream[static_cast<std::size_t>(t - 1)];
    std::vector<double> theta_t, mu_t;
    double loss = 0.0;
    try {
      theta_t = dual_state ? pair.h(state) : state;
      mu_t = dual_state ? state : pair.g(state);
      loss = dual_state ? log_loss_mean(fam, mu_t, obs) : log_loss_natural(fam, theta_t, obs);
      if (!std::isfinite(loss))
        throw StepRejection("loss at step " + std::to_string(t) + " is not finite");
    } catch (const std::runtime_error& e) {
      traj.aborted = true;
      traj.diagnostic = e.what();
      return traj;
    }
    cum += loss;
    double alpha = schedule.at(t);

    bool projected = false;
    std::vector<double> next;
    try {
      switch (opt) {
        case OptimizerKind::gd: {
          next = gd_step(log_loss_natural_grad(fam, theta_t, obs), theta_t, alpha);
          break;
        }
        case OptimizerKind::mirror: {
          StepResult r =
              mirror_step_proximal(pair, log_loss_natural_grad(fam, theta_t, obs), theta_t, alpha);
          next = std::move(r.point);
          projected = r.projected;
          break;
        }
        case OptimizerKind::natural: {
          StepResult r =
              natural_gradient_step(pair, log_loss_mean_grad(fam, mu_t, obs), mu_t, alpha);
          next = std::move(r.point);
          projected = r.projected;
          break;
        }
        case OptimizerKind::retraction: {
          std::vector<double> rg = pair.hess_H(mu_t).solve(log_loss_mean_grad(fam, mu_t, obs));
          StepResult r = retraction_step(pair, rg, mu_t, alpha, Retraction::identity);
          next = std::move(r.point);
          projected = r.projected;
          break;
        }
      }
    } catch (const StepRejection& e) {
      traj.steps.push_back({t, std::move(theta_t), std::move(mu_t), loss, cum, false});
      traj.aborted = true;
      traj.diagnostic = e.what();
      return traj;
    } catch (const DomainViolation& e) {
      traj.steps.push_back({t, std::move(theta_t), std::move(mu_t), loss, cum, false});
      traj.aborted = true;
      traj.diagnostic = e.what();
      return traj;
    }

    traj.steps.push_back({t, std::move(theta_t), std::move(mu_t), loss, cum, projected});
    traj.projections += projected ? 1 : 0;
    state = std::move(next);
  }

  traj.final_theta = dual_state ? pair.h(state) : state;
  traj.final_mu = dual_state ? std::move(state) : pair.g(state);
  return traj;
}

}  // namespace mdopt
