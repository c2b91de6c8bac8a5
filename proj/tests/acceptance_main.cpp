// Acceptance suite: end-to-end checks of the selection engine against its
// published guarantees. Each criterion prints one pass/fail line; the exit
// code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gsa/config.hpp"
#include "gsa/harness.hpp"
#include "gsa/logsum.hpp"
#include "gsa/verify.hpp"

using namespace gsa;

namespace {

AuditCounters g_audit;  // pooled over every run in criteria 1-6

struct Criterion {
  int id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

EnvSpec fixed_gap_env(int arms, int horizon, double gap = 1.0) {
  EnvSpec spec;
  spec.family = EnvFamily::FixedGap;
  spec.arms = arms;
  spec.horizon = horizon;
  spec.gap = gap;
  return spec;
}

EnvSpec five_switch_env(int horizon) {
  EnvSpec spec;
  spec.family = EnvFamily::Switching;
  spec.arms = 3;
  spec.horizon = horizon;
  spec.switch_times = {1668, 3335, 5002, 6669, 8336};
  return spec;
}

ComparatorSpec five_switch_truth() {
  ComparatorSpec truth;
  truth.id = "truth";
  truth.type = ComparatorType::SwitchingSchedule;
  truth.schedule = {{1, 0}, {1668, 1}, {3335, 2}, {5002, 0}, {6669, 1}, {8336, 2}};
  return truth;
}

RegretLedger run_one(const Kernel& kernel, Mode mode, const LossModel& env,
                     double budget, int horizon, std::uint64_t seed,
                     const std::vector<ComparatorPath>& comparators,
                     bool rows = true) {
  EpisodeConfig cfg;
  cfg.kernel = &kernel;
  cfg.mode = mode;
  cfg.env = &env;
  cfg.budget = budget;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.comparators = &comparators;
  cfg.record.rows = rows;
  RegretLedger ledger = run_episode(cfg);
  g_audit.merge(ledger.audit);
  return ledger;
}

// ---------------------------------------------------------------------------

Criterion criterion1() {
  Criterion c;
  c.id = 1;
  c.name = "oracle equivalence (4 kernels x 3 modes, T=8)";
  struct Case {
    KernelSpec spec;
    std::size_t cap;
  };
  const std::vector<Case> cases = {
      {{KernelFamily::Fixed, 3, 0, 0, false}, 1000000},
      {{KernelFamily::Switching, 3, 0, 0, false}, 1000000},
      {{KernelFamily::Contextual, 2, 2, 0, false}, 1000000},
      // 6^8 class paths at this horizon, above the default cap
      {{KernelFamily::Periodic, 2, 0, 2, false}, 2000000},
  };
  double worst = 0.0;
  std::uint64_t seed = 101;
  for (const auto& kase : cases) {
    const auto kernel = make_kernel(kase.spec);
    for (Mode mode : {Mode::FullCentered, Mode::FullMinShift, Mode::Bandit}) {
      const OracleCheck check =
          oracle_equivalence_check(*kernel, mode, 1.0, 8, seed++, kase.cap);
      g_audit.merge(check.audit);
      worst = std::max(worst, check.max_abs_err);
    }
  }
  c.pass = worst <= 1e-9;
  c.detail = "max |p - oracle| = " + num(worst);
  return c;
}

struct FullFeedbackRun {
  double regret = 0.0;
  double budget = 0.0;
  RangeStats ranges;
  std::vector<double> regret_series;
};

FullFeedbackRun full_run(const KernelSpec& kspec, Mode mode, const EnvSpec& espec,
                         const ComparatorSpec& cspec, int horizon) {
  FullFeedbackRun out;
  const auto kernel = make_kernel(kspec);
  const LossModel env(espec);
  std::vector<ComparatorPath> comparators{
      build_comparator_path(*kernel, cspec, env, horizon)};
  out.budget = path_complexity(*kernel, comparators[0], horizon);
  const RegretLedger ledger =
      run_one(*kernel, mode, env, out.budget, horizon, 1, comparators);
  out.regret = ledger.final_regret[0];
  out.ranges = env.ranges();
  out.regret_series = ledger.comparator_cum[0];
  return out;
}

Criterion criterion2(double& switching_regret, double& switching_budget) {
  Criterion c;
  c.id = 2;
  c.name = "second-order bound, min-shift mode (zero tolerance)";
  ComparatorSpec best;
  best.id = "best";
  best.type = ComparatorType::FixedArm;
  best.arm = 0;
  const FullFeedbackRun a =
      full_run({KernelFamily::Fixed, 10, 0, 0, false}, Mode::FullMinShift,
               fixed_gap_env(10, 10000), best, 10000);
  const double rhs_a = bound_rhs(BoundId::Thm12, a.budget, 10, 10000, a.ranges).rhs;

  const FullFeedbackRun b =
      full_run({KernelFamily::Switching, 3, 0, 0, false}, Mode::FullMinShift,
               five_switch_env(10000), five_switch_truth(), 10000);
  const double rhs_b = bound_rhs(BoundId::Thm12, b.budget, 3, 10000, b.ranges).rhs;
  switching_regret = b.regret;
  switching_budget = b.budget;

  c.pass = a.regret <= rhs_a && b.regret <= rhs_b;
  c.detail = "fixed-gap " + num(a.regret) + " <= " + num(rhs_a) +
             "; 5-switch " + num(b.regret) + " <= " + num(rhs_b) +
             " (W=" + num(b.budget) + ")";
  return c;
}

Criterion criterion3() {
  Criterion c;
  c.id = 3;
  c.name = "first/zeroth-order bound, centered mode (zero tolerance)";
  ComparatorSpec best;
  best.id = "best";
  best.type = ComparatorType::FixedArm;
  best.arm = 0;
  const FullFeedbackRun a =
      full_run({KernelFamily::Fixed, 10, 0, 0, false}, Mode::FullCentered,
               fixed_gap_env(10, 10000), best, 10000);
  const double rhs_a = bound_rhs(BoundId::Thm11, a.budget, 10, 10000, a.ranges).rhs;

  const FullFeedbackRun b =
      full_run({KernelFamily::Switching, 3, 0, 0, false}, Mode::FullCentered,
               five_switch_env(10000), five_switch_truth(), 10000);
  const double rhs_b = bound_rhs(BoundId::Thm11, b.budget, 3, 10000, b.ranges).rhs;

  c.pass = a.regret <= rhs_a && b.regret <= rhs_b;
  c.detail = "fixed-gap " + num(a.regret) + " <= " + num(rhs_a) +
             "; 5-switch " + num(b.regret) + " <= " + num(rhs_b);
  return c;
}

Criterion criterion4() {
  Criterion c;
  c.id = 4;
  c.name = "uniform-range corollary and sublinear growth";
  ComparatorSpec best;
  best.id = "best";
  best.type = ComparatorType::FixedArm;
  best.arm = 0;
  const FullFeedbackRun run =
      full_run({KernelFamily::Fixed, 10, 0, 0, false}, Mode::FullMinShift,
               fixed_gap_env(10, 10000), best, 10000);
  const double r1k = run.regret_series[999];
  const double r10k = run.regret_series[9999];
  const double rhs1k = 6.0 * 1.0 * std::sqrt(run.budget * 1000.0);
  const double rhs10k = 6.0 * 1.0 * std::sqrt(run.budget * 10000.0);
  const double ratio = r10k / r1k;
  c.pass = r1k <= rhs1k && r10k <= rhs10k && ratio <= std::sqrt(10.0) * 1.2;
  c.detail = "regret(1e3) " + num(r1k) + " <= " + num(rhs1k) + "; regret(1e4) " +
             num(r10k) + " <= " + num(rhs10k) + "; growth " + num(ratio) +
             " <= " + num(std::sqrt(10.0) * 1.2);
  return c;
}

Criterion criterion5() {
  Criterion c;
  c.id = 5;
  c.name = "bandit bound, 50 seeds at T=1e4 (zero tolerance on the mean)";
  const auto kernel = make_kernel({KernelFamily::Fixed, 4, 0, 0, false});
  const LossModel env(fixed_gap_env(4, 10000));
  ComparatorSpec best;
  best.id = "best";
  best.type = ComparatorType::FixedArm;
  best.arm = 0;
  std::vector<ComparatorPath> comparators{
      build_comparator_path(*kernel, best, env, 10000)};
  const double budget = path_complexity(*kernel, comparators[0], 10000);
  const double rhs =
      bound_rhs(BoundId::Thm21, budget, 4, 10000, env.ranges()).rhs;

  double total = 0.0;
  int violations = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const RegretLedger ledger =
        run_one(*kernel, Mode::Bandit, env, budget, 10000, seed, comparators,
                /*rows=*/false);
    total += ledger.final_regret[0];
    if (ledger.final_regret[0] > rhs) ++violations;
  }
  const double mean = total / 50.0;
  c.pass = mean <= rhs && violations <= 2;
  c.detail = "mean regret " + num(mean) + " <= " + num(rhs) +
             "; per-seed violations " + std::to_string(violations) + " <= 2";
  return c;
}

Criterion criterion6() {
  Criterion c;
  c.id = 6;
  c.name = "affine invariance, (3,7) and (0.1,-5), all modes, T=1e3";
  struct Setup {
    KernelSpec kernel;
    EnvSpec env;
    ComparatorSpec comparator;
  };
  std::vector<Setup> setups;
  {
    Setup s;
    s.kernel = {KernelFamily::Fixed, 2, 0, 0, false};
    s.env = fixed_gap_env(2, 1000);
    s.comparator = {"best", ComparatorType::FixedArm, 0, {}, {}, {}};
    setups.push_back(s);
  }
  {
    Setup s;
    s.kernel = {KernelFamily::Switching, 2, 0, 0, false};
    s.env.family = EnvFamily::Switching;
    s.env.arms = 2;
    s.env.horizon = 1000;
    s.env.switch_times = {334, 667};
    s.comparator = {"truth",
                    ComparatorType::SwitchingSchedule,
                    0,
                    {},
                    {{1, 0}, {334, 1}, {667, 0}},
                    {}};
    setups.push_back(s);
  }
  {
    Setup s;
    s.kernel = {KernelFamily::Contextual, 2, 2, 0, false};
    s.env.family = EnvFamily::Contextual;
    s.env.arms = 2;
    s.env.contexts = 2;
    s.env.horizon = 1000;
    s.comparator = {"map", ComparatorType::Mapping, 0, {}, {}, {0, 1}};
    setups.push_back(s);
  }
  {
    Setup s;
    s.kernel = {KernelFamily::Periodic, 2, 0, 2, false};
    s.env.family = EnvFamily::Periodic;
    s.env.arms = 2;
    s.env.period = 2;
    s.env.horizon = 1000;
    s.comparator = {"pattern", ComparatorType::PeriodMapping, 0, {}, {}, {0, 1}};
    setups.push_back(s);
  }

  bool arms_ok = true;
  double worst_q = 0.0, worst_regret = 0.0;
  for (const auto& setup : setups) {
    const auto kernel = make_kernel(setup.kernel);
    const LossModel env(setup.env);
    const ComparatorPath path =
        build_comparator_path(*kernel, setup.comparator, env, 1000);
    const double auto_budget = path_complexity(*kernel, path, 1000);
    const std::vector<ComparatorSpec> comparators{setup.comparator};
    for (Mode mode : {Mode::FullCentered, Mode::FullMinShift, Mode::Bandit}) {
      const double budget = auto_budget;
      for (const auto& [a, b] : {std::pair{3.0, 7.0}, std::pair{0.1, -5.0}}) {
        for (std::uint64_t seed : {11ull, 12ull}) {
          const AffineCheck check = affine_invariance_check(
              setup.kernel, mode, setup.env, budget, 1000, seed, comparators,
              a, b);
          g_audit.merge(check.audit);
          arms_ok = arms_ok && check.arms_identical;
          worst_q = std::max(worst_q, check.max_q_err);
          worst_regret = std::max(worst_regret, check.max_regret_rel_err);
        }
      }
    }
  }
  c.pass = arms_ok && worst_q <= 1e-10 && worst_regret <= 1e-9;
  c.detail = std::string("arm choices identical = ") + (arms_ok ? "yes" : "NO") +
             ", max |dq| = " + num(worst_q) + ", regret scaling rel err = " +
             num(worst_regret);
  return c;
}

Criterion criterion7() {
  Criterion c;
  c.id = 7;
  c.name = "assumption audits over criteria 1-6 (zero violations)";
  c.pass = g_audit.total() == 0;
  c.detail = "update-bound " + std::to_string(g_audit.update_bound) +
             ", monotone " + std::to_string(g_audit.eta_monotone) +
             ", eta*range " + std::to_string(g_audit.eta_range) + ", q-floor " +
             std::to_string(g_audit.q_floor) +
             "; worst update product = " + num(g_audit.worst_update_product);
  if (g_audit.first_round >= 0)
    c.detail += "; first: round " + std::to_string(g_audit.first_round) + " " +
                g_audit.first_what;
  return c;
}

Criterion criterion8(double switching_regret, double switching_budget) {
  Criterion c;
  c.id = 8;
  c.name = "matching kernels dominate (full feedback, deterministic)";
  // fixed-kernel learner on the 5-switch stream, same budget, same comparator
  const auto fixed3 = make_kernel({KernelFamily::Fixed, 3, 0, 0, false});
  const LossModel sw_env(five_switch_env(10000));
  std::vector<ComparatorPath> sw_cmp{
      build_comparator_path(*fixed3, five_switch_truth(), sw_env, 10000)};
  const double fixed_on_switching =
      run_one(*fixed3, Mode::FullMinShift, sw_env, switching_budget, 10000, 1,
              sw_cmp, false)
          .final_regret[0];

  // contextual kernel vs fixed kernel on the 2-context alternating stream
  EnvSpec ctx_spec;
  ctx_spec.family = EnvFamily::Contextual;
  ctx_spec.arms = 2;
  ctx_spec.contexts = 2;
  ctx_spec.horizon = 10000;
  const LossModel ctx_env(ctx_spec);
  const ComparatorSpec map_cmp{"map", ComparatorType::Mapping, 0, {}, {}, {0, 1}};
  const auto ctx_kernel = make_kernel({KernelFamily::Contextual, 2, 2, 0, false});
  std::vector<ComparatorPath> ctx_paths{
      build_comparator_path(*ctx_kernel, map_cmp, ctx_env, 10000)};
  const double ctx_budget = path_complexity(*ctx_kernel, ctx_paths[0], 10000);
  const double contextual_regret =
      run_one(*ctx_kernel, Mode::FullMinShift, ctx_env, ctx_budget, 10000, 1,
              ctx_paths, false)
          .final_regret[0];
  const auto fixed2 = make_kernel({KernelFamily::Fixed, 2, 0, 0, false});
  std::vector<ComparatorPath> ctx_fixed_paths{
      build_comparator_path(*fixed2, map_cmp, ctx_env, 10000)};
  const double fixed_on_contextual =
      run_one(*fixed2, Mode::FullMinShift, ctx_env, ctx_budget, 10000, 1,
              ctx_fixed_paths, false)
          .final_regret[0];

  const bool sw_ok = switching_regret < fixed_on_switching;
  const bool ctx_ok = contextual_regret < fixed_on_contextual;
  c.pass = sw_ok && ctx_ok;
  c.detail = "switching " + num(switching_regret) + " < fixed " +
             num(fixed_on_switching) + "; contextual " + num(contextual_regret) +
             " < fixed " + num(fixed_on_contextual);
  return c;
}

Criterion criterion9() {
  Criterion c;
  c.id = 9;
  c.name = "complexity closed form for the fixed kernel";
  const auto kernel = make_kernel({KernelFamily::Fixed, 4, 0, 0, false});
  ComparatorPath path;
  path.arms.assign(10, 1);
  path.states.assign(10, ClassState{KernelFamily::Fixed, 1, 0, {}});
  const double got = path_complexity(*kernel, path, 10);
  const double want = 2.0 * std::log(4.0);  // log M prior + log|Omega| term
  const double got1 = path_complexity(*kernel, path, 1);
  c.pass = std::abs(got - want) <= 1e-12 &&
           std::abs(got1 - std::log(4.0)) <= 1e-12;
  c.detail = "W = " + num(got) + " (expected " + num(want) +
             "), T=1 gives " + num(got1);
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  double switching_regret = 0.0, switching_budget = 0.0;

  auto timed = [&](auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    Criterion c = fn();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
    results.push_back(c);
  };

  timed([&] { return criterion1(); });
  timed([&] { return criterion2(switching_regret, switching_budget); });
  timed([&] { return criterion3(); });
  timed([&] { return criterion4(); });
  timed([&] { return criterion5(); });
  timed([&] { return criterion6(); });
  timed([&] { return criterion7(); });
  timed([&] { return criterion8(switching_regret, switching_budget); });
  timed([&] { return criterion9(); });

  // declared runtime envelopes
  const double limits[] = {10.0, 30.0, 30.0, 30.0, 300.0, 120.0, 1.0, 120.0, 1.0};
  int failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    Criterion& c = results[i];
    if (i < 9 && c.seconds > limits[i]) {
      c.pass = false;
      c.detail += " [over time budget " + num(limits[i]) + "s]";
    }
    if (!c.pass) ++failures;
    std::printf("[%s] criterion %d: %s -- %s (%.2fs)\n",
                c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                c.detail.c_str(), c.seconds);
  }
  if (failures == 0) std::printf("all %zu criteria passed\n", results.size());
  return failures;
}
