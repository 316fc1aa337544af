// Wall-clock comparison of the serial reference loops against the OpenMP
// loops, with a bitwise check that both produce the same reports.
#include <chrono>
#include <cstdio>
#include <vector>

#include "mdopt/efficiency.hpp"
#include "mdopt/equivalence.hpp"

using namespace mdopt;

namespace {

template <class F>
double time_s(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_efficiency(const EfficiencyReport& a, const EfficiencyReport& b) {
  return a.scaled_cov == b.scaled_cov && a.bound == b.bound && a.ratio == b.ratio &&
         a.se == b.se && a.M_used == b.M_used && a.projections == b.projections &&
         a.dropped == b.dropped && a.pass == b.pass;
}

double default_mean_for(const std::string& fam) {
  if (fam == "bernoulli") return 0.3;
  if (fam == "poisson") return 2.0;
  return 0.5;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", max_threads());
  bool ok = true;

  {
    EfficiencyConfig ec;
    ec.family = "poisson";
    ec.mu_true = {2.0};
    ec.T = 10000;
    ec.M = 2000;
    ec.seed = 42;
    EfficiencyReport serial_rep, parallel_rep;
    double ts = time_s([&] { serial_rep = run_efficiency(ec, ExecutionPolicy::serial); });
    double tp = time_s([&] { parallel_rep = run_efficiency(ec, ExecutionPolicy::parallel); });
    bool same = same_efficiency(serial_rep, parallel_rep);
    ok = ok && same;
    std::printf("efficiency replicates  family=poisson mu*=2 T=%lld M=%d\n",
                static_cast<long long>(ec.T), ec.M);
    std::printf("  serial    %7.3f s\n", ts);
    std::printf("  parallel  %7.3f s   speedup %.2fx   reports identical: %s\n\n", tp, ts / tp,
                same ? "yes" : "NO");
  }

  {
    std::vector<EquivalenceCell> cells;
    std::uint64_t seed = 900;
    for (bool cross : {false, true})
      for (const char* fam : {"gaussian", "poisson", "bernoulli", "product"})
        for (StepSchedule s : {StepSchedule{StepSchedule::Kind::constant, 0.1},
                               StepSchedule{StepSchedule::Kind::inv_sqrt_t, 0.5}}) {
          int dim = fam == std::string("product") ? 3 : 1;
          std::vector<double> mu =
              dim == 3 ? std::vector{0.0, 2.0, 0.3} : std::vector{default_mean_for(fam)};
          cells.push_back({fam, dim, mu, {}, s, ++seed, 5000, 1e-8, cross});
        }
    std::vector<EquivalenceReport> rs, rp;
    double ts = time_s([&] { rs = run_equivalence_grid(cells, ExecutionPolicy::serial); });
    double tp = time_s([&] { rp = run_equivalence_grid(cells, ExecutionPolicy::parallel); });
    bool same = rs.size() == rp.size();
    for (std::size_t i = 0; same && i < rs.size(); ++i)
      same = rs[i].max_deviation == rp[i].max_deviation && rs[i].deviations == rp[i].deviations;
    ok = ok && same;
    std::printf("equivalence grid       %zu cells, T=5000 each\n", cells.size());
    std::printf("  serial    %7.3f s\n", ts);
    std::printf("  parallel  %7.3f s   speedup %.2fx   reports identical: %s\n", tp, ts / tp,
                same ? "yes" : "NO");
  }

  return ok ? 0 : 1;
}
