// Monte Carlo check that streaming log-loss estimation with alpha_t = 1/t
// attains the Cramer-Rao covariance scale.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdopt/execution.hpp"
#include "mdopt/families.hpp"

namespace mdopt {

enum class InitMode { first_observation, fixed };

struct EfficiencyConfig {
  std::string family;
  int dim = 1;
  std::vector<double> mu_true;
  std::int64_t T = 0;   // observations per replicate, >= 2
  int M = 0;            // replicates, >= 2
  std::uint64_t seed = 0;
  InitMode init = InitMode::first_observation;
  std::vector<double> fixed_init;  // empty: family default interior point
  bool keep_replicates = false;
};

struct EfficiencyReport {
  std::string family;
  std::vector<double> mu_true;
  std::int64_t T = 0;
  int M = 0;        // requested replicates
  int M_used = 0;   // replicates that completed
  std::uint64_t seed = 0;
  InitMode init = InitMode::first_observation;

  // Row-major p x p matrices.
  std::vector<double> scaled_cov;  // T * Cov(muhat_T), unbiased (M_used - 1)
  std::vector<double> bound;       // inverse Fisher information at mu_true
  std::vector<double> ratio;       // scaled_cov / bound on the diagonal;
                                   // off-diagonal entries report scaled_cov
                                   // directly (the bound there is zero)
  std::vector<double> se;          // Monte Carlo standard error, absolute scale

  int projections = 0;     // safeguard activations across all replicates
  int dropped = 0;         // aborted replicates (excluded from the covariance)
  int fallback_inits = 0;  // replicates whose leading observations never left
                           // the boundary and that used the fixed initializer
  bool excessive_drops = false;  // more than 1% of replicates dropped
  bool pass = false;

  std::vector<std::vector<double>> replicates;  // muhat_T per replicate, if kept

  double entry(const std::vector<double>& m, int i, int j) const {
    return m[static_cast<std::size_t>(i) * mu_true.size() + static_cast<std::size_t>(j)];
  }
};

// For each replicate r: draw y_1..y_T i.i.d. with mean mu_true (stream keyed
// by (seed, r, t)), run natural-gradient descent on the mean-coordinate
// log-loss with alpha_t = 1/t, and record the final estimate. In
// first-observation mode the iterate starts at y_1 (averaging forward past
// boundary-valued leading draws), which makes the recursion reproduce the
// exact running sample mean. In fixed mode the initializer acts as one
// pseudo-observation: y_k is consumed at schedule index k + 1, so the
// estimate is (init + sum y) / (T + 1) and efficiency holds only in the
// T -> infinity limit.
//
// Replicates are independent and may run in parallel; aggregation is a
// serial pass ordered by replicate index, so both policies produce bitwise
// identical reports.
EfficiencyReport run_efficiency(const EfficiencyConfig& config,
                                ExecutionPolicy policy = ExecutionPolicy::parallel);

// max_t |mu_t - mean(y_1..y_t)|_inf for the natural-gradient iterate under
// alpha_t = 1/t and the first-observation initialization, against a
// compensated (Neumaier) running mean. Floating-point accumulation only.
double running_mean_identity_check(const ExponentialFamily& fam,
                                   std::span<const Observation> stream);

}  // namespace mdopt
