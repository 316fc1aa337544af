#include "mdopt/equivalence.hpp"

#include <algorithm>
#include <cmath>

#include "mdopt/io.hpp"
#include "mdopt/vec.hpp"

namespace mdopt {

namespace {

void finalize(EquivalenceReport& rep) {
  const std::size_t n = std::min(rep.md.steps.size(), rep.ngd.steps.size());
  rep.deviations.resize(n);
  double max_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = rep.cross ? linf_diff(rep.md.steps[i].theta, rep.ngd.steps[i].theta)
                         : linf_diff(rep.md.steps[i].mu, rep.ngd.steps[i].mu);
    rep.deviations[i] = d;
    max_dev = std::max(max_dev, d);
  }
  rep.aborted = rep.md.aborted || rep.ngd.aborted;
  if (rep.aborted) {
    rep.diagnostic = rep.md.aborted ? rep.md.diagnostic : rep.ngd.diagnostic;
  } else {
    rep.final_deviation = rep.cross ? linf_diff(rep.md.final_theta, rep.ngd.final_theta)
                                    : linf_diff(rep.md.final_mu, rep.ngd.final_mu);
    max_dev = std::max(max_dev, rep.final_deviation);
  }
  rep.max_deviation = max_dev;
  rep.projections_md = rep.md.projections;
  rep.projections_ngd = rep.ngd.projections;
  rep.probative = !rep.aborted && rep.projections_md == 0 && rep.projections_ngd == 0;
  rep.pass = rep.probative && rep.max_deviation <= rep.tolerance;
}

}  // namespace

EquivalenceReport verify_equivalence(const ExponentialFamily& fam,
                                     std::span<const Observation> stream,
                                     const StepSchedule& schedule,
                                     std::span<const double> init_theta, double tolerance) {
  EquivalenceReport rep;
  rep.family = fam.name();
  rep.T = static_cast<std::int64_t>(stream.size());
  rep.schedule = schedule;
  rep.tolerance = tolerance;

  std::vector<double> mu0 = fam.pair().g(init_theta);
  rep.md = run_online(fam, OptimizerKind::mirror, stream, schedule,
                      std::vector<double>(init_theta.begin(), init_theta.end()));
  rep.ngd = run_online(fam, OptimizerKind::natural, stream, schedule, std::move(mu0));
  finalize(rep);
  return rep;
}

EquivalenceReport verify_cross_parameterization(const ExponentialFamily& fam,
                                                std::span<const Observation> stream,
                                                const StepSchedule& schedule,
                                                std::span<const double> init_theta,
                                                double tolerance) {
  EquivalenceReport rep;
  rep.family = fam.name();
  rep.T = static_cast<std::int64_t>(stream.size());
  rep.schedule = schedule;
  rep.tolerance = tolerance;
  rep.cross = true;

  const ConjugatePair& pair = fam.pair();
  const ConjugatePair conj = pair.conjugate();

  rep.md.family = rep.ngd.family = fam.name();
  rep.md.schedule = rep.ngd.schedule = schedule;
  rep.md.optimizer = OptimizerKind::mirror;
  rep.ngd.optimizer = OptimizerKind::natural;

  // Arm A: mirror descent on the mean coordinates (proximity B_H).
  // Arm B: natural gradient on the natural coordinates (metric hess_G).
  // Both are the natural-side updates of the conjugate view of the pair.
  std::vector<double> mu = pair.g(init_theta);
  std::vector<double> theta(init_theta.begin(), init_theta.end());
  double cum_md = 0.0, cum_ngd = 0.0;

  for (std::int64_t t = 1; t <= rep.T; ++t) {
    const Observation& obs = stream[static_cast<std::size_t>(t - 1)];
    double alpha = schedule.at(t);

    std::vector<double> theta_of_mu = conj.g(mu);  // h(mu)
    double loss_md = log_loss_mean(fam, mu, obs);
    cum_md += loss_md;
    std::vector<double> mu_of_theta = pair.g(theta);
    double loss_ngd = log_loss_natural(fam, theta, obs);
    cum_ngd += loss_ngd;

    bool proj_md = false, proj_ngd = false;
    std::vector<double> mu_next, theta_next;
    try {
      StepResult a = mirror_step_proximal(conj, log_loss_mean_grad(fam, mu, obs), mu, alpha);
      mu_next = std::move(a.point);
      proj_md = a.projected;
      StepResult b =
          natural_gradient_step(conj, log_loss_natural_grad(fam, theta, obs), theta, alpha);
      theta_next = std::move(b.point);
      proj_ngd = b.projected;
    } catch (const std::runtime_error& e) {
      rep.md.steps.push_back({t, theta_of_mu, mu, loss_md, cum_md, false});
      rep.ngd.steps.push_back({t, theta, mu_of_theta, loss_ngd, cum_ngd, false});
      rep.md.aborted = true;
      rep.md.diagnostic = e.what();
      finalize(rep);
      return rep;
    }

    rep.md.steps.push_back({t, std::move(theta_of_mu), mu, loss_md, cum_md, proj_md});
    rep.ngd.steps.push_back({t, theta, std::move(mu_of_theta), loss_ngd, cum_ngd, proj_ngd});
    rep.md.projections += proj_md ? 1 : 0;
    rep.ngd.projections += proj_ngd ? 1 : 0;
    mu = std::move(mu_next);
    theta = std::move(theta_next);
  }

  rep.md.final_theta = conj.g(mu);
  rep.md.final_mu = std::move(mu);
  rep.ngd.final_mu = pair.g(theta);
  rep.ngd.final_theta = std::move(theta);
  finalize(rep);
  return rep;
}

std::vector<EquivalenceReport> run_equivalence_grid(std::span<const EquivalenceCell> cells,
                                                    ExecutionPolicy policy) {
  std::vector<EquivalenceReport> reports(cells.size());
  auto run_cell = [&cells, &reports](std::int64_t i) {
    const EquivalenceCell& cell = cells[static_cast<std::size_t>(i)];
    ExponentialFamily fam = make_family(cell.family, cell.dim);
    std::vector<Observation> stream = sample_stream(fam, cell.mu_true, cell.T, cell.seed);
    std::vector<double> init = cell.init_theta;
    if (init.empty()) init.assign(static_cast<std::size_t>(cell.dim), 0.0);
    EquivalenceReport rep =
        cell.cross ? verify_cross_parameterization(fam, stream, cell.schedule, init, cell.tolerance)
                   : verify_equivalence(fam, stream, cell.schedule, init, cell.tolerance);
    rep.seed = cell.seed;
    reports[static_cast<std::size_t>(i)] = std::move(rep);
  };

  const std::int64_t n = static_cast<std::int64_t>(cells.size());
  if (policy == ExecutionPolicy::parallel) {
#ifdef MDOPT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < n; ++i) run_cell(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) run_cell(i);
  }
  return reports;
}

void write_equivalence_csv(std::ostream& os, const EquivalenceReport& report) {
  os << kEquivalenceCsvHeader << '\n';
  const Trajectory& theta_arm = report.cross ? report.ngd : report.md;
  const Trajectory& mu_arm = report.cross ? report.md : report.ngd;
  const std::size_t n = report.deviations.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Iterate& a = theta_arm.steps[i];
    const Iterate& b = mu_arm.steps[i];
    os << a.t << ',' << join_coords(a.theta) << ',' << join_coords(b.mu) << ','
       << join_coords(a.mu) << ',' << format_double(report.deviations[i]) << ','
       << (report.md.steps[i].projected ? 1 : 0) << ','
       << (report.ngd.steps[i].projected ? 1 : 0) << '\n';
  }
}

}  // namespace mdopt
