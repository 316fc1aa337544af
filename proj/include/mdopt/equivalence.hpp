// Numerical verification that the mirror-descent path, pushed through the
// gradient map, coincides step for step with the natural-gradient path on
// the dual coordinates.
#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mdopt/descent.hpp"
#include "mdopt/execution.hpp"

namespace mdopt {

struct EquivalenceReport {
  std::string family;
  std::int64_t T = 0;
  StepSchedule schedule;
  std::uint64_t seed = 0;
  bool cross = false;  // roles swapped: mirror on mean coords, natural gradient on natural coords

  // Per recorded step t: |g(theta_t) - mu_t|_inf (or |h(mu_t) - theta_t|_inf
  // for cross runs).
  std::vector<double> deviations;
  double final_deviation = 0.0;  // same comparison on the post-update states
  double max_deviation = 0.0;    // max over recorded steps and the final states

  int projections_md = 0;
  int projections_ngd = 0;
  double tolerance = 0.0;
  bool pass = false;       // max_deviation <= tolerance and zero projections
  bool probative = true;   // no safeguard fired in either arm
  bool aborted = false;
  std::string diagnostic;

  Trajectory md;   // mirror arm
  Trajectory ngd;  // natural-gradient arm
};

// Both arms consume the same stream and schedule; the gradient of each arm
// is computed analytically in its own coordinates (never transformed from
// the other arm). The natural-gradient run starts at mu_1 = g(init_theta).
EquivalenceReport verify_equivalence(const ExponentialFamily& fam,
                                     std::span<const Observation> stream,
                                     const StepSchedule& schedule,
                                     std::span<const double> init_theta, double tolerance);

// Roles swapped: mirror descent with B_H proximity on the mean coordinates
// versus natural gradient with metric hess_G on the natural coordinates.
// Deviation is |h(mu_t) - theta_t|_inf. Both arms again start from
// init_theta (the mirror arm at g(init_theta)).
EquivalenceReport verify_cross_parameterization(const ExponentialFamily& fam,
                                                std::span<const Observation> stream,
                                                const StepSchedule& schedule,
                                                std::span<const double> init_theta,
                                                double tolerance);

// One grid cell: a family, a schedule and a seeded stream.
struct EquivalenceCell {
  std::string family;
  int dim = 1;
  std::vector<double> mu_true;
  std::vector<double> init_theta;  // defaults to the origin when empty
  StepSchedule schedule;
  std::uint64_t seed = 0;
  std::int64_t T = 0;
  double tolerance = 1e-8;
  bool cross = false;
};

// Runs every cell independently (optionally in parallel); results are
// aggregated by grid index, so the output is identical for both policies.
std::vector<EquivalenceReport> run_equivalence_grid(std::span<const EquivalenceCell> cells,
                                                    ExecutionPolicy policy);

inline constexpr const char* kEquivalenceCsvHeader =
    "t,theta,mu,g_theta,deviation,projected_md,projected_ngd";

// One row per recorded step. theta is the natural-coordinate arm's iterate,
// mu the mean-coordinate arm's, g_theta the image of theta under g;
// coordinates of multidimensional points are joined by ';'.
void write_equivalence_csv(std::ostream& os, const EquivalenceReport& report);

}  // namespace mdopt
