#include "mdopt/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdopt/equivalence.hpp"
#include "mdopt/io.hpp"
#include "mdopt/vec.hpp"

namespace mdopt {

namespace {

struct Check {
  std::string name;
  bool pass = false;
  std::string details;
};

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string prefix) : prefix_(std::move(prefix)) {}

  std::string path_for(const std::string& name) const { return prefix_ + name; }

  void write(const std::string& name, const std::string& content) {
    const std::string path = path_for(name);
    std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os.flush()) throw std::runtime_error("write failed for '" + path + "'");
    written_.push_back(path);
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::string prefix_;
  std::vector<std::string> written_;
};

std::string equivalence_csv(const EquivalenceReport& rep) {
  std::ostringstream os;
  write_equivalence_csv(os, rep);
  return os.str();
}

void equivalence_checks(const std::string& tag, const EquivalenceReport& rep,
                        std::vector<Check>& checks) {
  {
    std::string d = "max_deviation=" + format_double(rep.max_deviation) +
                    " tolerance=" + format_double(rep.tolerance);
    if (rep.aborted) d += " aborted=\"" + rep.diagnostic + "\"";
    checks.push_back({tag + "_deviation", !rep.aborted && rep.max_deviation <= rep.tolerance, d});
  }
  {
    std::string d = "projections_md=" + std::to_string(rep.projections_md) +
                    " projections_ngd=" + std::to_string(rep.projections_ngd);
    if (!rep.probative) d += " (non-probative: the equivalence assumes interior iterates)";
    checks.push_back({tag + "_probative", rep.probative, d});
  }
}

void run_equivalence_command(const ExperimentConfig& cfg, ArtifactWriter& out,
                             std::vector<Check>& checks) {
  const bool cross = cfg.command == Command::cross_equiv;
  ExponentialFamily fam = make_family(cfg.family, cfg.dim);
  std::vector<Observation> stream = sample_stream(fam, cfg.mu_true, cfg.T, cfg.seed);
  std::vector<double> init_theta(static_cast<std::size_t>(cfg.dim), 0.0);
  EquivalenceReport rep =
      cross ? verify_cross_parameterization(fam, stream, cfg.schedule, init_theta, cfg.tolerance)
            : verify_equivalence(fam, stream, cfg.schedule, init_theta, cfg.tolerance);
  rep.seed = cfg.seed;
  const std::string base = cross ? "cross_equiv.csv" : "equiv.csv";
  out.write(rep.aborted ? base + ".partial" : base, equivalence_csv(rep));
  equivalence_checks(cross ? "cross_equiv" : "equiv", rep, checks);
}

void run_efficiency_command(const ExperimentConfig& cfg, ArtifactWriter& out,
                            std::vector<Check>& checks) {
  EfficiencyConfig ec;
  ec.family = cfg.family;
  ec.dim = cfg.dim;
  ec.mu_true = cfg.mu_true;
  ec.T = cfg.T;
  ec.M = cfg.M;
  ec.seed = cfg.seed;
  ec.init = cfg.init;
  ec.fixed_init = cfg.init_value;
  ec.keep_replicates = cfg.per_replicate;
  EfficiencyReport rep = run_efficiency(ec, cfg.execution);

  const int p = cfg.dim;
  std::string csv = "family,mu_true,T,M,entry_i,entry_j,scaled_cov,bound,ratio,se,pass\n";
  const std::string mu_str = join_coords(rep.mu_true);
  bool band_ok = true;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      double sc = rep.entry(rep.scaled_cov, i, j);
      double bd = rep.entry(rep.bound, i, j);
      double se = rep.entry(rep.se, i, j);
      bool entry_ok = std::abs(sc - bd) <= 3.0 * se;
      band_ok = band_ok && entry_ok;
      csv += rep.family + ',' + mu_str + ',' + std::to_string(rep.T) + ',' +
             std::to_string(rep.M) + ',' + std::to_string(i) + ',' + std::to_string(j) + ',' +
             format_double(sc) + ',' + format_double(bd) + ',' +
             format_double(rep.entry(rep.ratio, i, j)) + ',' + format_double(se) + ',' +
             (entry_ok ? "1" : "0") + '\n';
    }
  }
  out.write("efficiency.csv", csv);

  if (cfg.per_replicate) {
    std::string rcsv = "replicate,muhat\n";
    for (std::size_t r = 0; r < rep.replicates.size(); ++r)
      rcsv += std::to_string(r) + ',' + join_coords(rep.replicates[r]) + '\n';
    out.write("replicates.csv", rcsv);
  }

  {
    std::string d;
    for (int i = 0; i < p; ++i) {
      if (i) d += ' ';
      d += "ratio[" + std::to_string(i) + "]=" + format_double(rep.entry(rep.ratio, i, i)) +
           "±" + format_double(3.0 * rep.entry(rep.se, i, i) / rep.entry(rep.bound, i, i));
    }
    checks.push_back({"efficiency_band", band_ok, d});
  }
  checks.push_back(
      {"efficiency_drops", !rep.excessive_drops,
       "dropped=" + std::to_string(rep.dropped) + "/" + std::to_string(rep.M) +
           " fallback_inits=" + std::to_string(rep.fallback_inits) +
           " projections=" + std::to_string(rep.projections)});
}

void run_trajectory_command(const ExperimentConfig& cfg, ArtifactWriter& out,
                            std::vector<Check>& checks) {
  ExponentialFamily fam = make_family(cfg.family, cfg.dim);
  std::vector<Observation> stream = sample_stream(fam, cfg.mu_true, cfg.T, cfg.seed);
  const bool dual = cfg.optimizer == OptimizerKind::natural ||
                    cfg.optimizer == OptimizerKind::retraction;
  std::vector<double> init;
  if (cfg.init == InitMode::fixed && !cfg.init_value.empty()) {
    init = cfg.init_value;  // coordinates of the optimizer's own space
  } else {
    std::vector<double> zeros(static_cast<std::size_t>(cfg.dim), 0.0);
    init = dual ? fam.pair().g(zeros) : zeros;
  }
  Trajectory traj = run_online(fam, cfg.optimizer, stream, cfg.schedule, std::move(init));

  std::string csv = "t,theta,mu,loss,cumulative_loss,projected\n";
  for (const Iterate& it : traj.steps)
    csv += std::to_string(it.t) + ',' + join_coords(it.theta) + ',' + join_coords(it.mu) + ',' +
           format_double(it.loss) + ',' + format_double(it.cumulative_loss) + ',' +
           (it.projected ? "1" : "0") + '\n';
  out.write(traj.aborted ? "trajectory.csv.partial" : "trajectory.csv", csv);

  std::string d = "steps=" + std::to_string(traj.steps.size()) +
                  " projections=" + std::to_string(traj.projections);
  if (traj.aborted) d += " aborted=\"" + traj.diagnostic + "\"";
  if (!traj.steps.empty())
    d += " final_regret=" + format_double(traj.steps.back().cumulative_loss);
  checks.push_back({"trajectory_completed", !traj.aborted, d});
}

void run_identities_command(const ExperimentConfig& cfg, ArtifactWriter&,
                            std::vector<Check>& checks) {
  ExponentialFamily fam = make_family(cfg.family, cfg.dim);
  const ConjugatePair& pair = fam.pair();
  const std::size_t p = static_cast<std::size_t>(cfg.dim);

  double max_gap = 0.0, max_inverse = 0.0, max_hess = 0.0;
  std::vector<double> a(p), b(p);
  for (int s = 0; s < cfg.samples; ++s) {
    CounterRng rng(cfg.seed, 0, static_cast<std::uint64_t>(s));
    for (std::size_t i = 0; i < p; ++i) {
      Interval box = primal_sampling_box(pair.coord(static_cast<int>(i)).kind);
      a[i] = rng.uniform(box.lo, box.hi);
      b[i] = rng.uniform(box.lo, box.hi);
    }
    double bg = bregman_primal(pair, a, b);
    max_gap = std::max(max_gap, std::abs(duality_gap(pair, a, b)) / std::max(1.0, bg));

    std::vector<double> ga = pair.g(a);
    max_inverse = std::max(max_inverse, linf_diff(pair.h(ga), a));

    DiagMetric hg = pair.hess_G(a);
    DiagMetric hh = pair.hess_H(ga);
    for (std::size_t i = 0; i < p; ++i)
      max_hess = std::max(max_hess, std::abs(hh.diag()[i] * hg.diag()[i] - 1.0));
  }

  checks.push_back({"identities_gap", max_gap <= cfg.tol_gap,
                    "max_rel_gap=" + format_double(max_gap) +
                        " tolerance=" + format_double(cfg.tol_gap)});
  checks.push_back({"identities_inverse", max_inverse <= cfg.tol_inverse,
                    "max_inverse_map=" + format_double(max_inverse) +
                        " tolerance=" + format_double(cfg.tol_inverse)});
  checks.push_back({"identities_hessian", max_hess <= cfg.tol_hessian,
                    "max_hessian_reciprocity=" + format_double(max_hess) +
                        " tolerance=" + format_double(cfg.tol_hessian)});
}

}  // namespace

RunOutcome run(const ExperimentConfig& config, const std::string& out_override, bool quiet) {
  ExperimentConfig cfg = config;
  if (!out_override.empty()) cfg.out = out_override;

  ArtifactWriter out(cfg.out);
  std::vector<Check> checks;

  switch (cfg.command) {
    case Command::equiv:
    case Command::cross_equiv: run_equivalence_command(cfg, out, checks); break;
    case Command::efficiency: run_efficiency_command(cfg, out, checks); break;
    case Command::trajectory: run_trajectory_command(cfg, out, checks); break;
    case Command::identities: run_identities_command(cfg, out, checks); break;
  }

  std::string summary = "# resolved configuration\n";
  summary += serialize_config(cfg);
  summary += "\n";
  bool all_pass = true;
  for (const Check& c : checks) {
    summary += "CHECK " + c.name + ": " + (c.pass ? "PASS" : "FAIL") + " " + c.details + "\n";
    all_pass = all_pass && c.pass;
  }
  out.write("summary.txt", summary);

  if (!quiet) std::fputs(summary.c_str(), stdout);

  RunOutcome outcome;
  outcome.exit_code = all_pass ? 0 : 1;
  outcome.artifacts = out.written();
  outcome.summary_path = out.path_for("summary.txt");
  return outcome;
}

}  // namespace mdopt
