#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsa/engine.hpp"
#include "gsa/environments.hpp"
#include "gsa/kernels.hpp"
#include "gsa/schedules.hpp"

namespace gsa {

enum class ComparatorType { FixedArm, ArmSequence, SwitchingSchedule, Mapping, PeriodMapping };

struct ComparatorSpec {
  std::string id;
  ComparatorType type = ComparatorType::FixedArm;
  int arm = 0;                                   // FixedArm
  std::vector<int> arms;                         // ArmSequence
  std::vector<std::pair<int, int>> schedule;     // SwitchingSchedule: (from round, arm)
  std::vector<int> map;                          // Mapping / PeriodMapping
};

// A comparator resolved against a kernel and an environment: the arm it plays
// every round plus, when the kernel can represent it, the class path behind
// those arms. An empty state path means "not representable" and complexity
// reports +inf.
struct ComparatorPath {
  std::string id;
  std::vector<ClassState> states;
  std::vector<int> arms;
};

ComparatorPath build_comparator_path(const Kernel& kernel,
                                     const ComparatorSpec& spec,
                                     const LossModel& env, int horizon);

// log(max_{t<=T} |Omega_{t-1}|) - log prod_t T(lambda_t | lambda_{t-1}), with
// the step into round 1 priced by the initial prior and |Omega_0| = 1.
// Zero-weight steps (or an unrepresentable path) give +inf.
double path_complexity(const Kernel& kernel, const ComparatorPath& path,
                       int horizon);

struct AuditCounters {
  long update_bound = 0;   // -eta_{t-1} phi_{t,m} <= 1 + 1e-12
  long eta_monotone = 0;   // eta ratio <= 1
  long eta_range = 0;      // eta_t d_t <= budget (full) or <= 1 (bandit)
  long q_floor = 0;        // q_m >= eps_t / M
  int first_round = -1;
  std::string first_what;
  double worst_update_product = 0.0;

  long total() const { return update_bound + eta_monotone + eta_range + q_floor; }
  void merge(const AuditCounters& other);
};

struct RecordOptions {
  bool rows = true;       // per-round ledger rows and comparator series
  bool q_history = false; // full q trajectory (needed by invariance checks)
};

struct LedgerRow {
  int t = 0;
  int arm = 0;  // 0-based
  double eta = 0.0, eps = 0.0, exp_loss = 0.0, d = 0.0, v = 0.0;
};

struct RegretLedger {
  int horizon = 0;
  std::uint64_t seed = 0;
  std::vector<LedgerRow> rows;
  std::vector<std::vector<double>> q_history;
  std::vector<std::string> comparator_ids;
  std::vector<std::vector<double>> comparator_cum;  // cumulative regret series
  std::vector<double> final_regret;                 // per comparator
  double total_expected_loss = 0.0;
  AuditCounters audit;
};

struct EpisodeConfig {
  const Kernel* kernel = nullptr;
  Mode mode = Mode::FullMinShift;
  const LossModel* env = nullptr;
  double budget = 0.0;
  int horizon = 0;
  std::uint64_t seed = 1;
  const std::vector<ComparatorPath>* comparators = nullptr;
  RecordOptions record;
  bool strict_audits = false;  // abort on the first audit violation
};

// One full pass of the selection algorithm. Per round: mix and sample, observe
// per the feedback mode, build phi, update the schedule, exponential update
// with the previous rate, transition with the rate ratio.
RegretLedger run_episode(const EpisodeConfig& config);

// Sum over rounds of E_q[l_t] - l_{t, s_t}; requires q_history.
double expected_regret(const RegretLedger& ledger, const ComparatorPath& path,
                       const LossModel& env);

enum class BoundId { Thm11, Thm12, CorFull, Thm21, CorBandit };

std::string to_string(BoundId id);
std::optional<BoundId> bound_from_string(const std::string& name);

struct BoundValue {
  double rhs = 0.0;
  // Thm21-style decomposition, reported separately.
  double term_sqrt = 0.0, term_log = 0.0, term_ranges = 0.0, term_zeroth = 0.0;
};

BoundValue bound_rhs(BoundId id, double budget, int arms, long horizon,
                     const RangeStats& ranges);

struct BoundReport {
  BoundId id;
  std::string comparator_id;
  double rhs = 0.0, regret = 0.0, slack = 0.0;
  BoundValue detail;
};

// Path-level reference for the class-weight recursion. Keeps one weight per
// class path, applies the exponential update per path and the power
// normalization through each path's class aggregate, then marginalizes to
// arms. etas has horizon+1 entries: etas[t-1] multiplies phi_t and
// etas[t]/etas[t-1] is the power applied after round t (etas[0] pairs with
// round 1, mirroring eta_0 := eta_1).
std::vector<std::vector<double>> brute_force_oracle(
    const Kernel& kernel, const std::vector<std::vector<double>>& phis,
    const std::vector<double>& etas, const std::vector<SideInfo>& sides,
    std::size_t max_paths = 1000000);

}  // namespace gsa
