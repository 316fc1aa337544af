#include "mdopt/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdopt/descent.hpp"
#include "mdopt/vec.hpp"

namespace mdopt {

namespace {

constexpr std::int64_t kInitScanCap = 16;

struct ReplicateOutcome {
  std::vector<double> muhat;
  int projections = 0;
  bool fallback = false;
  bool ok = false;
};

// One natural-gradient update in place: mu -= alpha * solve(hess_H, grad)
// with grad = -hess_H(mu) (y - mu), clamped into the open dual box.
inline void consume(const ConjugatePair& pair, std::vector<double>& mu,
                    std::span<const double> y, double alpha, int& projections) {
  for (int i = 0; i < pair.dim(); ++i) {
    std::size_t k = static_cast<std::size_t>(i);
    const ScalarConjugate& c = pair.coord(i);
    double hdd = c.ddH(mu[k]);
    double grad = -hdd * (y[k] - mu[k]);
    double v = mu[k] - alpha * (grad / hdd);
    const Interval& iv = c.dual();
    if (!std::isfinite(v)) throw StepRejection("efficiency update produced a non-finite mean");
    if (std::isfinite(iv.lo) && v <= iv.lo) {
      v = iv.lo + kDomainMargin;
      ++projections;
    } else if (std::isfinite(iv.hi) && v >= iv.hi) {
      v = iv.hi - kDomainMargin;
      ++projections;
    }
    mu[k] = v;
  }
}

ReplicateOutcome run_replicate(const ExponentialFamily& fam, std::span<const double> mu_true,
                               std::int64_t T, std::uint64_t seed, std::uint64_t r, InitMode mode,
                               std::span<const double> fixed_init) {
  const ConjugatePair& pair = fam.pair();
  const std::size_t p = static_cast<std::size_t>(pair.dim());
  ReplicateOutcome out;

  std::vector<double> y(p);
  auto draw = [&](std::int64_t t) {
    CounterRng rng(seed, r, static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < p; ++i)
      y[i] = sample_scalar(pair.coord(static_cast<int>(i)).kind, mu_true[i], rng);
  };

  try {
    std::vector<double> mu(p);
    std::int64_t consumed = 0;  // observations already folded into mu

    if (mode == InitMode::first_observation) {
      // mu starts as the running mean of the leading observations, averaged
      // forward until it is interior (boundary-valued first draws).
      draw(1);
      mu = y;
      consumed = 1;
      while (pair.dual_domain().first_violation(mu) >= 0 && consumed < std::min(T, kInitScanCap)) {
        ++consumed;
        draw(consumed);
        for (std::size_t i = 0; i < p; ++i) mu[i] += (y[i] - mu[i]) / static_cast<double>(consumed);
      }
      if (pair.dual_domain().first_violation(mu) >= 0) {
        out.fallback = true;
        mode = InitMode::fixed;
      }
    }

    if (mode == InitMode::fixed) {
      mu.assign(fixed_init.begin(), fixed_init.end());
      if (mu.empty()) mu = fam.default_mean();
      pair.dual_domain().require(mu, "init");
      // The initializer counts as one pseudo-observation: y_t is consumed at
      // schedule index t + 1.
      for (std::int64_t t = 1; t <= T; ++t) {
        draw(t);
        consume(pair, mu, y, 1.0 / static_cast<double>(t + 1), out.projections);
      }
    } else {
      for (std::int64_t t = consumed + 1; t <= T; ++t) {
        draw(t);
        consume(pair, mu, y, 1.0 / static_cast<double>(t), out.projections);
      }
    }

    out.muhat = std::move(mu);
    out.ok = true;
  } catch (const std::runtime_error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

EfficiencyReport run_efficiency(const EfficiencyConfig& config, ExecutionPolicy policy) {
  if (config.T < 2) throw std::invalid_argument("run_efficiency: T must be >= 2");
  if (config.M < 2) throw std::invalid_argument("run_efficiency: M must be >= 2");
  const ExponentialFamily fam = make_family(config.family, config.dim);
  const ConjugatePair& pair = fam.pair();
  fam.pair().dual_domain().require(config.mu_true, "mu_true");
  if (!config.fixed_init.empty()) pair.dual_domain().require(config.fixed_init, "init_value");

  const std::size_t p = static_cast<std::size_t>(pair.dim());
  std::vector<ReplicateOutcome> slots(static_cast<std::size_t>(config.M));

  auto work = [&](int r) {
    slots[static_cast<std::size_t>(r)] =
        run_replicate(fam, config.mu_true, config.T, config.seed, static_cast<std::uint64_t>(r),
                      config.init, config.fixed_init);
  };

  if (policy == ExecutionPolicy::parallel) {
#ifdef MDOPT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < config.M; ++r) work(r);
  } else {
    for (int r = 0; r < config.M; ++r) work(r);
  }

  EfficiencyReport rep;
  rep.family = config.family;
  rep.mu_true = config.mu_true;
  rep.T = config.T;
  rep.M = config.M;
  rep.seed = config.seed;
  rep.init = config.init;

  // Deterministic aggregation in replicate order.
  std::vector<double> mean(p, 0.0);
  for (const ReplicateOutcome& s : slots) {
    if (!s.ok) {
      ++rep.dropped;
      continue;
    }
    ++rep.M_used;
    rep.projections += s.projections;
    rep.fallback_inits += s.fallback ? 1 : 0;
    for (std::size_t i = 0; i < p; ++i) mean[i] += s.muhat[i];
  }
  if (rep.M_used < 2) throw std::runtime_error("run_efficiency: fewer than two usable replicates");
  for (std::size_t i = 0; i < p; ++i) mean[i] /= static_cast<double>(rep.M_used);

  std::vector<double> cov(p * p, 0.0);
  for (const ReplicateOutcome& s : slots) {
    if (!s.ok) continue;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        cov[i * p + j] += (s.muhat[i] - mean[i]) * (s.muhat[j] - mean[j]);
  }
  const double scale = static_cast<double>(rep.T) / static_cast<double>(rep.M_used - 1);
  rep.scaled_cov.resize(p * p);
  for (std::size_t k = 0; k < p * p; ++k) rep.scaled_cov[k] = cov[k] * scale;

  // Reference: inverse Fisher information at the true mean (diagonal).
  const DiagMetric info = fisher_information_mean(fam, config.mu_true);
  rep.bound.assign(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) rep.bound[i * p + i] = 1.0 / info.diag()[i];

  // Relative MC error of a variance estimate is sqrt(2/M) under the normal
  // fourth-moment approximation; discrete coordinates get 1.5x for kurtosis.
  auto widen = [&](std::size_t i) {
    ScalarKind k = pair.coord(static_cast<int>(i)).kind;
    return k == ScalarKind::half_square ? 1.0 : 1.5;
  };
  const double rel = std::sqrt(2.0 / static_cast<double>(rep.M_used));

  rep.ratio.assign(p * p, 0.0);
  rep.se.assign(p * p, 0.0);
  rep.excessive_drops = rep.dropped * 100 > rep.M;
  bool ok = !rep.excessive_drops;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      std::size_t k = i * p + j;
      if (i == j) {
        rep.ratio[k] = rep.scaled_cov[k] / rep.bound[k];
        rep.se[k] = rel * widen(i) * rep.bound[k];
      } else {
        rep.ratio[k] = rep.scaled_cov[k];
        rep.se[k] = std::max(widen(i), widen(j)) *
                    std::sqrt(rep.bound[i * p + i] * rep.bound[j * p + j] /
                              static_cast<double>(rep.M_used));
      }
      ok = ok && std::abs(rep.scaled_cov[k] - rep.bound[k]) <= 3.0 * rep.se[k];
    }
  }
  rep.pass = ok;

  if (config.keep_replicates) {
    rep.replicates.reserve(static_cast<std::size_t>(rep.M_used));
    for (const ReplicateOutcome& s : slots)
      if (s.ok) rep.replicates.push_back(s.muhat);
  }
  return rep;
}

double running_mean_identity_check(const ExponentialFamily& fam,
                                   std::span<const Observation> stream) {
  if (stream.empty()) throw std::invalid_argument("running_mean_identity_check: empty stream");
  const ConjugatePair& pair = fam.pair();
  const std::size_t p = static_cast<std::size_t>(pair.dim());

  // Neumaier-compensated running mean, the reference path.
  std::vector<double> sum(p, 0.0), comp(p, 0.0);
  auto add = [&](std::span<const double> y) {
    for (std::size_t i = 0; i < p; ++i) {
      double t = sum[i] + y[i];
      comp[i] += std::abs(sum[i]) >= std::abs(y[i]) ? (sum[i] - t) + y[i] : (y[i] - t) + sum[i];
      sum[i] = t;
    }
  };

  std::vector<double> mu(stream[0].y);
  add(stream[0].y);
  std::size_t consumed = 1;

  // Same init convention as the first-observation efficiency mode.
  while (pair.dual_domain().first_violation(mu) >= 0 &&
         consumed < std::min(stream.size(), static_cast<std::size_t>(kInitScanCap))) {
    const std::vector<double>& y = stream[consumed].y;
    ++consumed;
    for (std::size_t i = 0; i < p; ++i) mu[i] += (y[i] - mu[i]) / static_cast<double>(consumed);
    add(y);
  }
  if (pair.dual_domain().first_violation(mu) >= 0)
    throw std::invalid_argument(
        "running_mean_identity_check: leading observations never leave the boundary");

  double max_dev = 0.0;
  auto compare = [&](std::size_t t) {
    for (std::size_t i = 0; i < p; ++i) {
      double ref = (sum[i] + comp[i]) / static_cast<double>(t);
      max_dev = std::max(max_dev, std::abs(mu[i] - ref));
    }
  };
  compare(consumed);

  int projections = 0;
  for (std::size_t t = consumed + 1; t <= stream.size(); ++t) {
    const std::vector<double>& y = stream[t - 1].y;
    consume(pair, mu, y, 1.0 / static_cast<double>(t), projections);
    add(y);
    compare(t);
  }
  return max_dev;
}

}  // namespace mdopt
