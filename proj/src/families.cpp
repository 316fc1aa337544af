#include "mdopt/families.hpp"

#include <cmath>
#include <stdexcept>

#include "mdopt/vec.hpp"

namespace mdopt {

bool ExponentialFamily::admissible_observation(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    double v = y[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) return false;
    switch (pair_.coord(i).kind) {
      case ScalarKind::half_square: break;
      case ScalarKind::exponential:
        if (v < 0.0 || v != std::floor(v)) return false;
        break;
      case ScalarKind::softplus:
        if (v != 0.0 && v != 1.0) return false;
        break;
      default: return false;  // mean-side kinds are not sample spaces
    }
  }
  return true;
}

std::vector<double> ExponentialFamily::default_mean() const {
  std::vector<double> mu(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) {
    switch (pair_.coord(i).kind) {
      case ScalarKind::half_square: mu[static_cast<std::size_t>(i)] = 0.0; break;
      case ScalarKind::exponential: mu[static_cast<std::size_t>(i)] = 1.0; break;
      case ScalarKind::softplus: mu[static_cast<std::size_t>(i)] = 0.5; break;
      default: throw std::logic_error("default_mean: bad kind");
    }
  }
  return mu;
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {"gaussian", "poisson", "bernoulli", "product"};
  return names;
}

ExponentialFamily make_family(const std::string& name, int dim) {
  if (dim < 1) throw std::invalid_argument("make_family: dimension must be positive");
  if (name == "gaussian") return {name, ConjugatePair::uniform(ScalarKind::half_square, dim)};
  if (name == "poisson") return {name, ConjugatePair::uniform(ScalarKind::exponential, dim)};
  if (name == "bernoulli") return {name, ConjugatePair::uniform(ScalarKind::softplus, dim)};
  if (name == "product") {
    static const ScalarKind cycle[3] = {ScalarKind::half_square, ScalarKind::exponential,
                                        ScalarKind::softplus};
    std::vector<ScalarConjugate> coords;
    coords.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) coords.push_back(ScalarConjugate{cycle[i % 3]});
    return {name, ConjugatePair(std::move(coords))};
  }
  throw std::invalid_argument("make_family: unknown family '" + name + "'");
}

Interval primal_sampling_box(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::half_square: return {-3.0, 3.0};
    case ScalarKind::exponential: return {-2.5, 2.5};
    case ScalarKind::softplus: return {-4.0, 4.0};
    case ScalarKind::neg_entropy: return {0.1, 10.0};
    case ScalarKind::binary_entropy: return {0.02, 0.98};
  }
  return {-1.0, 1.0};
}

Interval dual_sampling_box(ScalarKind kind) {
  const ScalarConjugate sc{kind};
  const Interval p = primal_sampling_box(kind);
  return {sc.g(p.lo), sc.g(p.hi)};
}

double log_loss_natural(const ExponentialFamily& fam, std::span<const double> theta,
                        const Observation& y) {
  return y.weight * (fam.pair().G(theta) - dot(theta, y.y));
}

std::vector<double> log_loss_natural_grad(const ExponentialFamily& fam,
                                          std::span<const double> theta, const Observation& y) {
  std::vector<double> grad = fam.pair().g(theta);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = y.weight * (grad[i] - y.y[i]);
  return grad;
}

double log_loss_mean(const ExponentialFamily& fam, std::span<const double> mu,
                     const Observation& y) {
  const ConjugatePair& pair = fam.pair();
  pair.dual_domain().require(mu, "mu");
  // B_H(y, mu) with H(y) evaluated by its continuous extension, which is all
  // that is needed for boundary observations (h(y) never appears).
  double s = pair.H_closure(y.y) - pair.H(mu);
  std::vector<double> hm = pair.h(mu);
  for (std::size_t i = 0; i < hm.size(); ++i) s -= hm[i] * (y.y[i] - mu[i]);
  return y.weight * s;
}

std::vector<double> log_loss_mean_grad(const ExponentialFamily& fam, std::span<const double> mu,
                                       const Observation& y) {
  const ConjugatePair& pair = fam.pair();
  pair.dual_domain().require(mu, "mu");
  std::vector<double> grad(mu.size());
  for (int i = 0; i < pair.dim(); ++i) {
    std::size_t k = static_cast<std::size_t>(i);
    grad[k] = -y.weight * pair.coord(i).ddH(mu[k]) * (y.y[k] - mu[k]);
  }
  return grad;
}

namespace {

// Poisson draws by CDF inversion. A fresh uniform is drawn if the walk hits
// the cap (floating-point tail stall); for means above the chunk size the
// draw is split exactly by Poisson additivity.
double poisson_inversion(double lambda, CounterRng& rng) {
  const double cap = lambda + 40.0 * std::sqrt(lambda) + 60.0;
  for (;;) {
    double u = rng.uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    double k = 0.0;
    while (u > cdf && k < cap) {
      k += 1.0;
      p *= lambda / k;
      cdf += p;
    }
    if (u <= cdf) return k;
  }
}

double poisson_draw(double lambda, CounterRng& rng) {
  constexpr double kChunk = 400.0;
  double total = 0.0;
  while (lambda > kChunk) {
    total += poisson_inversion(kChunk, rng);
    lambda -= kChunk;
  }
  return total + poisson_inversion(lambda, rng);
}

}  // namespace

double sample_scalar(ScalarKind kind, double mean, CounterRng& rng) {
  switch (kind) {
    case ScalarKind::half_square: return mean + rng.normal();
    case ScalarKind::exponential: return poisson_draw(mean, rng);
    case ScalarKind::softplus: return rng.uniform() < mean ? 1.0 : 0.0;
    default: throw std::logic_error("sample_scalar: kind has no sampler");
  }
}

Observation sample(const ExponentialFamily& fam, std::span<const double> mu, CounterRng& rng) {
  fam.pair().dual_domain().require(mu, "mu");
  Observation obs;
  obs.y.resize(mu.size());
  for (int i = 0; i < fam.dim(); ++i) {
    std::size_t k = static_cast<std::size_t>(i);
    obs.y[k] = sample_scalar(fam.pair().coord(i).kind, mu[k], rng);
  }
  return obs;
}

std::vector<Observation> sample_stream(const ExponentialFamily& fam, std::span<const double> mu,
                                       std::int64_t T, std::uint64_t seed,
                                       std::uint64_t replicate) {
  std::vector<Observation> stream;
  stream.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 1; t <= T; ++t) {
    CounterRng rng(seed, replicate, static_cast<std::uint64_t>(t));
    stream.push_back(sample(fam, mu, rng));
  }
  return stream;
}

DiagMetric fisher_information_mean(const ExponentialFamily& fam, std::span<const double> mu) {
  return metric_dual(fam.pair(), mu);
}

}  // namespace mdopt
