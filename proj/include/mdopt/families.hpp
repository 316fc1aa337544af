// Exponential-family catalog: geometry plus samplers and log-losses.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdopt/conjugate_pair.hpp"
#include "mdopt/rng.hpp"

namespace mdopt {

// One sample from a family, with an optional positive weight.
struct Observation {
  std::vector<double> y;
  double weight = 1.0;
};

// A natural-parameter exponential family: a conjugate pair whose G is the
// log-partition function, bound to a sampler for the matching distribution.
// Immutable; samplers are pure functions of explicit generator state.
class ExponentialFamily {
 public:
  ExponentialFamily(std::string name, ConjugatePair pair)
      : name_(std::move(name)), pair_(std::move(pair)) {}

  const std::string& name() const { return name_; }
  int dim() const { return pair_.dim(); }
  const ConjugatePair& pair() const { return pair_; }

  // Sample-space membership: nonnegative integers for poisson coordinates,
  // {0,1} for bernoulli, any finite real for gaussian.
  bool admissible_observation(std::span<const double> y) const;

  // A fixed interior mean point, used as the fallback initializer.
  std::vector<double> default_mean() const;

 private:
  std::string name_;
  ConjugatePair pair_;
};

// Catalog: gaussian | poisson | bernoulli | product. The product family
// cycles gaussian, poisson, bernoulli coordinates up to `dim`.
ExponentialFamily make_family(const std::string& name, int dim);
const std::vector<std::string>& family_names();

// Compact boxes used when drawing random interior points for the identity
// suites: comfortably inside the open domains, away from metric blowup.
Interval primal_sampling_box(ScalarKind kind);
Interval dual_sampling_box(ScalarKind kind);

// Negative log-likelihood in the natural coordinates, up to an additive
// theta-independent constant: G(theta) - <theta, y>, scaled by the weight.
// This form is defined for boundary observations as well; it differs from
// B_G(theta, h(y)) exactly by H_closure(y).
double log_loss_natural(const ExponentialFamily& fam, std::span<const double> theta,
                        const Observation& y);

// Exact gradient of the above: weight * (g(theta) - y).
std::vector<double> log_loss_natural_grad(const ExponentialFamily& fam,
                                          std::span<const double> theta, const Observation& y);

// Negative log-likelihood in the mean coordinates: B_H(y, mu), extended by
// continuity in y to boundary observations, scaled by the weight.
double log_loss_mean(const ExponentialFamily& fam, std::span<const double> mu,
                     const Observation& y);

// Exact gradient: -weight * hess_H(mu) (y - mu).
std::vector<double> log_loss_mean_grad(const ExponentialFamily& fam, std::span<const double> mu,
                                       const Observation& y);

// One draw with mean mu; deterministic given the generator state, which it
// advances. Gaussian coordinates use the normal transform, poisson inversion
// with a capped-retry guard (exact chunking keeps large means exact),
// bernoulli a uniform threshold.
Observation sample(const ExponentialFamily& fam, std::span<const double> mu, CounterRng& rng);

double sample_scalar(ScalarKind kind, double mean, CounterRng& rng);

// T draws y_1..y_T, the draw at step t keyed by (seed, replicate, t).
std::vector<Observation> sample_stream(const ExponentialFamily& fam, std::span<const double> mu,
                                       std::int64_t T, std::uint64_t seed,
                                       std::uint64_t replicate = 0);

// Fisher information in the mean coordinates; identical code path to
// metric_dual.
DiagMetric fisher_information_mean(const ExponentialFamily& fam, std::span<const double> mu);

}  // namespace mdopt
