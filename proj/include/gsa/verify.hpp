#pragma once

#include <cstdint>
#include <vector>

#include "gsa/config.hpp"
#include "gsa/harness.hpp"

namespace gsa {

// Engine driven by synthetic performance vectors drawn uniformly from [-1,1],
// with the mode's schedule computing the learning rates. Draws are floored at
// -1/eta_prev so the exponential update bound holds for every seed.
struct SyntheticRun {
  std::vector<std::vector<double>> phis;
  std::vector<double> etas;  // effective rates, horizon+1 entries
  std::vector<SideInfo> sides;
  std::vector<std::vector<double>> engine_p;
  AuditCounters audit;
};

SyntheticRun run_engine_synthetic(const Kernel& kernel, Mode mode, double budget,
                                  int horizon, std::uint64_t seed);

struct OracleCheck {
  double max_abs_err = 0.0;
  AuditCounters audit;
};

// Max per-coordinate deviation between the engine's p trajectory and the
// path-enumeration oracle fed the same phi and rate sequences.
OracleCheck oracle_equivalence_check(const Kernel& kernel, Mode mode,
                                     double budget, int horizon,
                                     std::uint64_t seed,
                                     std::size_t max_paths = 1000000);

struct AffineCheck {
  bool arms_identical = true;
  double max_q_err = 0.0;
  double max_regret_rel_err = 0.0;
  AuditCounters audit;  // merged over both runs
};

// Runs the same seeded episode on losses l and a*l+b and compares arm choices,
// q trajectories, and comparator regrets (which must scale by a).
AffineCheck affine_invariance_check(const KernelSpec& kernel_spec, Mode mode,
                                    const EnvSpec& env_spec, double budget,
                                    int horizon, std::uint64_t seed,
                                    const std::vector<ComparatorSpec>& comparators,
                                    double a, double b);

struct SimplexCheck {
  double max_sum_err = 0.0;
  double worst_floor_gap = 0.0;  // most negative q_m - eps/M seen
  AuditCounters audit;
};

SimplexCheck simplex_check(const Experiment& exp, int horizon, std::uint64_t seed);

struct MonotoneEtaCheck {
  bool nonincreasing = true;
  int first_bad_round = -1;
  AuditCounters audit;
};

MonotoneEtaCheck monotone_eta_check(const Experiment& exp, int horizon,
                                    std::uint64_t seed);

}  // namespace gsa
