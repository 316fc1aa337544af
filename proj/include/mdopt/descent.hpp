// Update rules: gradient, mirror (proximal and mirror-map forms), natural
// gradient, and retraction-based steps, plus the online run loop with regret
// accounting.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mdopt/families.hpp"
#include "mdopt/schedule.hpp"

namespace mdopt {

// Margin kept from every violated finite boundary when an update is
// projected back into the open domain.
inline constexpr double kDomainMargin = 1e-9;

// Updates whose metric condition estimate exceeds this are rejected.
inline constexpr double kMaxMetricCondition = 1e12;

// An update could not produce an interior point (non-finite input or a
// degenerate domain); the run must stop rather than continue silently.
class StepRejection : public std::runtime_error {
 public:
  explicit StepRejection(const std::string& what) : std::runtime_error(what) {}
};

struct StepResult {
  std::vector<double> point;
  bool projected = false;  // safeguard moved the point back inside
};

// theta - alpha * grad. No domain bookkeeping; the natural coordinates of
// the catalog families are unconstrained.
std::vector<double> gd_step(std::span<const double> grad, std::span<const double> theta,
                            double alpha);

// argmin_theta { <theta, grad> + B_G(theta, theta_t)/alpha }, solved exactly
// through the first-order condition g(theta') = g(theta_t) - alpha * grad and
// mapped back with h. The dual image is safeguarded into the open dual box.
StepResult mirror_step_proximal(const ConjugatePair& pair, std::span<const double> grad,
                                std::span<const double> theta, double alpha);

// The same update seen in the mean coordinates: mu - alpha * grad,
// safeguarded into the dual box.
StepResult mirror_map_step(const ConjugatePair& pair, std::span<const double> grad,
                           std::span<const double> dual_point, double alpha);

// mu - alpha * solve(hess_H(mu), grad_mu); the solve is elementwise against
// the diagonal metric. Equals retraction_step with the identity retraction
// on the premultiplied gradient, bitwise.
StepResult natural_gradient_step(const ConjugatePair& pair, std::span<const double> grad_mu,
                                 std::span<const double> mu, double alpha);

enum class Retraction { identity };

// R_mu(-alpha * riemannian_grad) with R the identity retraction
// R_mu(v) = mu + v. The retraction kind is an extension point; only the
// identity is shipped.
StepResult retraction_step(const ConjugatePair& pair, std::span<const double> riemannian_grad,
                           std::span<const double> mu, double alpha,
                           Retraction retraction = Retraction::identity);

enum class OptimizerKind { gd, mirror, natural, retraction };

std::string optimizer_name(OptimizerKind k);
std::optional<OptimizerKind> parse_optimizer(std::string_view s);

struct Iterate {
  std::int64_t t = 0;
  std::vector<double> theta;  // natural coordinates
  std::vector<double> mu;     // mean coordinates, mu = g(theta)
  double loss = 0.0;          // f_t at the pre-update point
  double cumulative_loss = 0.0;  // running regret sum, sum_{s<=t} f_s
  bool projected = false;     // the update leaving this iterate was safeguarded
};

struct Trajectory {
  std::string family;
  OptimizerKind optimizer = OptimizerKind::gd;
  StepSchedule schedule;
  std::vector<Iterate> steps;              // pre-update states, t = 1..T
  std::vector<double> final_theta;         // post-update state after step T
  std::vector<double> final_mu;
  int projections = 0;
  bool aborted = false;
  std::string diagnostic;
};

// Online protocol: for t = 1..T the loss of the t-th observation is charged
// to the pre-update iterate, then the update uses alpha_t = schedule.at(t).
// gd and mirror run in the natural coordinates on the natural-form log-loss;
// natural and retraction run in the mean coordinates on the mean-form
// log-loss. `init` is a point of the optimizer's own coordinate system and
// must be strictly interior. A rejected step aborts the run, returning the
// partial trajectory with a diagnostic.
Trajectory run_online(const ExponentialFamily& fam, OptimizerKind opt,
                      std::span<const Observation> stream, const StepSchedule& schedule,
                      std::vector<double> init);

}  // namespace mdopt
