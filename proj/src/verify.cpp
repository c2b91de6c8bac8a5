#include "gsa/verify.hpp"

#include <algorithm>
#include <cmath>

#include "gsa/logsum.hpp"
#include "gsa/rng.hpp"

namespace gsa {
namespace {

constexpr double kAuditTol = 1e-12;

void audit_round(AuditCounters& audit, int t, Mode mode, double budget,
                 std::span<const double> phi, double eta_used, double eta_ratio,
                 double eta_now, double d_last, const ArmDistribution& dist) {
  auto flag = [&](const char* what) {
    if (audit.first_round < 0) {
      audit.first_round = t;
      audit.first_what = what;
    }
  };
  for (double v : phi) {
    const double product = -eta_used * v;
    audit.worst_update_product = std::max(audit.worst_update_product, product);
    if (product > 1.0 + kAuditTol) {
      ++audit.update_bound;
      flag("exponential update bound exceeded");
      break;
    }
  }
  if (eta_ratio > 1.0 + kAuditTol) {
    ++audit.eta_monotone;
    flag("learning rate increased");
  }
  const double cap = mode == Mode::Bandit ? 1.0 : budget;
  if (eta_now * d_last > cap * (1.0 + kAuditTol) + 1e-15) {
    ++audit.eta_range;
    flag("eta * range exceeded its cap");
  }
  const double floor = dist.epsilon / dist.q.size();
  for (double qm : dist.q)
    if (qm < floor - 1e-15) {
      ++audit.q_floor;
      flag("selection probability below exploration floor");
      break;
    }
}

}  // namespace

SyntheticRun run_engine_synthetic(const Kernel& kernel, Mode mode, double budget,
                                  int horizon, std::uint64_t seed) {
  SyntheticRun run;
  const int num_arms = kernel.arms();
  Rng rng(seed);
  WeightTable table = init_table(kernel);
  ScheduleState sched(mode, budget, num_arms);
  EtaTracker tracker;
  std::vector<double> eta_hist;
  std::vector<int> class_arms;
  std::vector<double> arm_lw(num_arms);
  const bool contextual = kernel.spec().family == KernelFamily::Contextual;

  for (int t = 1; t <= horizon; ++t) {
    SideInfo side;
    if (contextual) side.context = (t - 1) % kernel.spec().contexts;
    run.sides.push_back(side);
    class_arms.resize(kernel.omega_size(t));
    kernel.arms_at(t, side, class_arms);
    arm_log_weights(table, class_arms, num_arms, arm_lw);
    const double eps = eps_for_round(mode, t, num_arms, budget);
    const ArmDistribution dist = normalize_mix(arm_lw, eps);
    run.engine_p.push_back(dist.p);

    std::vector<double> phi(num_arms);
    for (int m = 0; m < num_arms; ++m) phi[m] = 2.0 * rng.uniform01() - 1.0;
    if (!std::isnan(tracker.eff_prev)) {
      const double lo = -(1.0 - 1e-6) / tracker.eff_prev;
      for (double& v : phi) v = std::max(v, lo);
    }
    update_stats(sched, phi, dist.p);
    eta_hist.push_back(sched.eta_run);
    const auto step = tracker.step(sched.eta_run);
    audit_round(run.audit, t, mode, budget, phi, step.eta_used, step.eta_ratio,
                eta_current(sched), sched.d_last, dist);

    ZTable z = exponential_update(table, phi, class_arms, step.eta_used);
    table = transition(z, kernel, step.eta_ratio);
    run.phis.push_back(std::move(phi));
  }

  int first_informative = horizon;  // 0-based index into eta_hist
  for (int i = 0; i < horizon; ++i)
    if (std::isfinite(eta_hist[i])) {
      first_informative = i;
      break;
    }
  run.etas.resize(horizon + 1);
  for (int i = 0; i <= horizon; ++i) {
    const int j = std::max(i - 1, first_informative);
    run.etas[i] = j < horizon && std::isfinite(eta_hist[j]) ? eta_hist[j] : kEtaCap;
  }
  return run;
}

OracleCheck oracle_equivalence_check(const Kernel& kernel, Mode mode,
                                     double budget, int horizon,
                                     std::uint64_t seed, std::size_t max_paths) {
  const SyntheticRun run =
      run_engine_synthetic(kernel, mode, budget, horizon, seed);
  const auto oracle_p =
      brute_force_oracle(kernel, run.phis, run.etas, run.sides, max_paths);
  OracleCheck check;
  check.audit = run.audit;
  for (int t = 0; t < horizon; ++t)
    for (int m = 0; m < kernel.arms(); ++m)
      check.max_abs_err = std::max(
          check.max_abs_err, std::abs(run.engine_p[t][m] - oracle_p[t][m]));
  return check;
}

AffineCheck affine_invariance_check(const KernelSpec& kernel_spec, Mode mode,
                                    const EnvSpec& env_spec, double budget,
                                    int horizon, std::uint64_t seed,
                                    const std::vector<ComparatorSpec>& comparators,
                                    double a, double b) {
  const auto kernel = make_kernel(kernel_spec);
  EnvSpec transformed = env_spec;
  transformed.affine_a = env_spec.affine_a * a;
  transformed.affine_b = a * env_spec.affine_b + b;
  const LossModel base_env(env_spec), scaled_env(transformed);

  std::vector<ComparatorPath> base_paths, scaled_paths;
  for (const auto& spec : comparators) {
    base_paths.push_back(build_comparator_path(*kernel, spec, base_env, horizon));
    scaled_paths.push_back(
        build_comparator_path(*kernel, spec, scaled_env, horizon));
  }

  EpisodeConfig cfg;
  cfg.kernel = kernel.get();
  cfg.mode = mode;
  cfg.budget = budget;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.record.q_history = true;

  cfg.env = &base_env;
  cfg.comparators = &base_paths;
  const RegretLedger base = run_episode(cfg);
  cfg.env = &scaled_env;
  cfg.comparators = &scaled_paths;
  const RegretLedger scaled = run_episode(cfg);

  AffineCheck check;
  check.audit = base.audit;
  check.audit.merge(scaled.audit);
  for (int t = 0; t < horizon; ++t) {
    if (base.rows[t].arm != scaled.rows[t].arm) check.arms_identical = false;
    for (int m = 0; m < kernel->arms(); ++m)
      check.max_q_err = std::max(
          check.max_q_err,
          std::abs(base.q_history[t][m] - scaled.q_history[t][m]));
  }
  for (std::size_t c = 0; c < comparators.size(); ++c) {
    const double want = a * base.final_regret[c];
    const double got = scaled.final_regret[c];
    const double rel =
        std::abs(got - want) / std::max(1.0, std::abs(want));
    check.max_regret_rel_err = std::max(check.max_regret_rel_err, rel);
  }
  return check;
}

SimplexCheck simplex_check(const Experiment& exp, int horizon, std::uint64_t seed) {
  EpisodeConfig cfg;
  cfg.kernel = exp.kernel.get();
  cfg.mode = exp.config.mode;
  cfg.env = exp.env.get();
  cfg.budget = exp.budget;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.comparators = &exp.comparators;
  cfg.record.q_history = true;
  const RegretLedger ledger = run_episode(cfg);
  SimplexCheck check;
  check.audit = ledger.audit;
  for (int t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (double qm : ledger.q_history[t]) sum += qm;
    check.max_sum_err = std::max(check.max_sum_err, std::abs(sum - 1.0));
    const double floor = ledger.rows[t].eps / exp.kernel->arms();
    for (double qm : ledger.q_history[t])
      check.worst_floor_gap = std::min(check.worst_floor_gap, qm - floor);
  }
  return check;
}

MonotoneEtaCheck monotone_eta_check(const Experiment& exp, int horizon,
                                    std::uint64_t seed) {
  EpisodeConfig cfg;
  cfg.kernel = exp.kernel.get();
  cfg.mode = exp.config.mode;
  cfg.env = exp.env.get();
  cfg.budget = exp.budget;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.comparators = &exp.comparators;
  const RegretLedger ledger = run_episode(cfg);
  MonotoneEtaCheck check;
  check.audit = ledger.audit;
  bool informative = false;
  for (int t = 1; t < horizon; ++t) {
    const double prev = ledger.rows[t - 1].eta, cur = ledger.rows[t].eta;
    if (!informative && cur != prev) informative = true;  // schedule left the cap
    if (informative && cur > prev * (1.0 + kAuditTol)) {
      // a jump off the cap at the first informative round is the documented
      // anchor convention, anything later is a real violation
      if (!(prev == kEtaCap && ledger.rows[t - 1].d == 0.0)) {
        check.nonincreasing = false;
        check.first_bad_round = t + 1;
        break;
      }
    }
  }
  if (ledger.audit.eta_monotone > 0) check.nonincreasing = false;
  return check;
}

}  // namespace gsa
