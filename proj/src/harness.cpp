#include "gsa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsa/logsum.hpp"

namespace gsa {
namespace {

constexpr double kAuditTol = 1e-12;

std::vector<int> arm_sequence_of(const ComparatorSpec& spec, const LossModel& env,
                                 int horizon, int arms) {
  std::vector<int> out(horizon);
  auto check = [&](int a) {
    if (a < 0 || a >= arms)
      throw std::invalid_argument("comparator '" + spec.id + "': arm out of range");
    return a;
  };
  switch (spec.type) {
    case ComparatorType::FixedArm:
      std::fill(out.begin(), out.end(), check(spec.arm));
      break;
    case ComparatorType::ArmSequence:
      if (static_cast<int>(spec.arms.size()) < horizon)
        throw std::invalid_argument("comparator '" + spec.id +
                                    "': arm sequence shorter than horizon");
      for (int t = 0; t < horizon; ++t) out[t] = check(spec.arms[t]);
      break;
    case ComparatorType::SwitchingSchedule: {
      if (spec.schedule.empty() || spec.schedule.front().first != 1)
        throw std::invalid_argument("comparator '" + spec.id +
                                    "': schedule must start at round 1");
      for (std::size_t i = 1; i < spec.schedule.size(); ++i)
        if (spec.schedule[i].first <= spec.schedule[i - 1].first)
          throw std::invalid_argument("comparator '" + spec.id +
                                      "': schedule rounds must increase");
      std::size_t seg = 0;
      for (int t = 1; t <= horizon; ++t) {
        while (seg + 1 < spec.schedule.size() && spec.schedule[seg + 1].first <= t)
          ++seg;
        out[t - 1] = check(spec.schedule[seg].second);
      }
      break;
    }
    case ComparatorType::Mapping: {
      if (!env.has_context())
        throw std::invalid_argument("comparator '" + spec.id +
                                    "': mapping needs a context stream");
      if (static_cast<int>(spec.map.size()) != env.context_alphabet())
        throw std::invalid_argument("comparator '" + spec.id +
                                    "': mapping size must equal context count");
      for (int t = 1; t <= horizon; ++t) out[t - 1] = check(spec.map[env.context_at(t)]);
      break;
    }
    case ComparatorType::PeriodMapping: {
      if (spec.map.empty())
        throw std::invalid_argument("comparator '" + spec.id +
                                    "': period mapping must be nonempty");
      const int period = static_cast<int>(spec.map.size());
      for (int t = 1; t <= horizon; ++t) out[t - 1] = check(spec.map[(t - 1) % period]);
      break;
    }
  }
  return out;
}

// Least-complexity entry class for a constant-class tail: the stay weight
// vanishes at t = 1 for the contextual and periodic kernels, so the path opens
// with the best-scoring neighbour that plays the right arm and hops to the
// target at the first transition.
bool prepend_entry_class(const Kernel& kernel, const ClassState& target,
                         int first_arm, const SideInfo& side1,
                         std::vector<ClassState>& states) {
  double best_score = 0.0;
  std::size_t best = 0;
  const std::size_t count = kernel.omega_size(1);
  for (std::size_t i = 0; i < count; ++i) {
    const ClassState cand = kernel.class_at(i);
    if (kernel.arm_of(cand, 1, side1) != first_arm) continue;
    const double score =
        kernel.initial_weight(cand) * kernel.transition_weight(cand, target, 1);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  if (!(best_score > 0.0)) return false;
  states[0] = kernel.class_at(best);
  return true;
}

std::vector<ClassState> state_path_for_arms(const Kernel& kernel,
                                            const std::vector<int>& arms,
                                            const LossModel& env, int horizon) {
  std::vector<ClassState> states;
  switch (kernel.spec().family) {
    case KernelFamily::Fixed: {
      for (int t = 1; t < horizon; ++t)
        if (arms[t] != arms[0]) return {};
      states.assign(horizon, ClassState{KernelFamily::Fixed, arms[0], 0, {}});
      return states;
    }
    case KernelFamily::Switching: {
      states.resize(horizon);
      int age = 1;
      for (int t = 0; t < horizon; ++t) {
        if (t > 0) age = arms[t] == arms[t - 1] ? age + 1 : 1;
        states[t] = ClassState{KernelFamily::Switching, arms[t], age, {}};
      }
      return states;
    }
    case KernelFamily::Contextual: {
      const int contexts = kernel.spec().contexts;
      if (!env.has_context() || env.context_alphabet() != contexts) return {};
      std::vector<int> map(contexts, -1);
      for (int t = 1; t <= horizon; ++t) {
        const int c = env.context_at(t);
        if (map[c] == -1) map[c] = arms[t - 1];
        else if (map[c] != arms[t - 1]) return {};
      }
      for (int c = 0; c < contexts; ++c)
        if (map[c] == -1) map[c] = c > 0 ? map[c - 1] : 0;
      ClassState target{KernelFamily::Contextual, -1, 0, map};
      states.assign(horizon, target);
      if (horizon >= 2 &&
          !prepend_entry_class(kernel, target, arms[0],
                               SideInfo{env.context_at(1)}, states))
        return states;  // zero-weight opening step, complexity reports +inf
      return states;
    }
    case KernelFamily::Periodic: {
      for (int period = 1; period <= kernel.spec().max_period; ++period) {
        std::vector<int> map(period, -1);
        bool ok = true;
        for (int t = 1; t <= horizon && ok; ++t) {
          const int phase = (t - 1) % period;
          if (map[phase] == -1) map[phase] = arms[t - 1];
          else if (map[phase] != arms[t - 1]) ok = false;
        }
        if (!ok) continue;
        for (int p = 0; p < period; ++p)
          if (map[p] == -1) map[p] = 0;
        ClassState target{KernelFamily::Periodic, -1, 0, map};
        states.assign(horizon, target);
        if (horizon >= 2 &&
            !prepend_entry_class(kernel, target, arms[0], SideInfo{}, states))
          return states;
        return states;
      }
      return {};
    }
  }
  return {};
}

}  // namespace

void AuditCounters::merge(const AuditCounters& other) {
  if (first_round < 0 && other.first_round >= 0) {
    first_round = other.first_round;
    first_what = other.first_what;
  }
  update_bound += other.update_bound;
  eta_monotone += other.eta_monotone;
  eta_range += other.eta_range;
  q_floor += other.q_floor;
  worst_update_product = std::max(worst_update_product, other.worst_update_product);
}

ComparatorPath build_comparator_path(const Kernel& kernel,
                                     const ComparatorSpec& spec,
                                     const LossModel& env, int horizon) {
  ComparatorPath path;
  path.id = spec.id;
  path.arms = arm_sequence_of(spec, env, horizon, kernel.arms());
  path.states = state_path_for_arms(kernel, path.arms, env, horizon);
  return path;
}

double path_complexity(const Kernel& kernel, const ComparatorPath& path,
                       int horizon) {
  if (path.states.empty() || static_cast<int>(path.states.size()) < horizon)
    return kInf;
  double log_prob = std::log(kernel.initial_weight(path.states[0]));
  for (int t = 1; t < horizon; ++t)
    log_prob +=
        std::log(kernel.transition_weight(path.states[t - 1], path.states[t], t));
  std::size_t max_classes = 1;  // |Omega_0| = 1 by convention
  for (int t = 2; t <= horizon; ++t)
    max_classes = std::max(max_classes, kernel.omega_size(t - 1));
  if (std::isinf(log_prob)) return kInf;
  return std::log(static_cast<double>(max_classes)) - log_prob;
}

RegretLedger run_episode(const EpisodeConfig& config) {
  const Kernel& kernel = *config.kernel;
  const LossModel& env = *config.env;
  const int num_arms = kernel.arms();
  if (env.arms() != num_arms)
    throw std::invalid_argument("environment and kernel arm counts differ");
  if (kernel.spec().family == KernelFamily::Contextual) {
    if (!env.has_context())
      throw std::invalid_argument("contextual kernel needs a context stream");
    if (env.context_alphabet() != kernel.spec().contexts)
      throw std::invalid_argument("context alphabet mismatch");
  }
  const int horizon = config.horizon;
  if (horizon < 1 || horizon > env.horizon())
    throw std::invalid_argument("horizon outside the environment range");

  RegretLedger ledger;
  ledger.horizon = horizon;
  ledger.seed = config.seed;
  const std::vector<ComparatorPath> no_comparators;
  const auto& comparators = config.comparators ? *config.comparators : no_comparators;
  for (const auto& c : comparators) ledger.comparator_ids.push_back(c.id);
  ledger.final_regret.assign(comparators.size(), 0.0);
  if (config.record.rows) {
    ledger.rows.reserve(horizon);
    ledger.comparator_cum.assign(comparators.size(), {});
  }

  WeightTable table = init_table(kernel);
  ScheduleState sched(config.mode, config.budget, num_arms);
  EtaTracker tracker;
  Rng rng(config.seed);
  std::vector<double> losses(num_arms), arm_lw(num_arms);
  std::vector<int> class_arms;
  double prev_obs = 0.0;
  bool have_obs = false;

  auto flag = [&](int t, const char* what) {
    if (ledger.audit.first_round < 0) {
      ledger.audit.first_round = t;
      ledger.audit.first_what = what;
    }
    if (config.strict_audits)
      throw std::runtime_error("assumption audit failed at round " +
                               std::to_string(t) + ": " + what);
  };

  for (int t = 1; t <= horizon; ++t) {
    const SideInfo side{env.has_context() ? env.context_at(t) : -1};
    class_arms.resize(kernel.omega_size(t));
    kernel.arms_at(t, side, class_arms);
    arm_log_weights(table, class_arms, num_arms, arm_lw);
    const double eps = eps_for_round(config.mode, t, num_arms, config.budget);
    const ArmDistribution dist = normalize_mix(arm_lw, eps);
    const int arm = sample_arm(dist, rng);
    env.losses_at(t, losses);

    std::vector<double> phi;
    switch (config.mode) {
      case Mode::FullCentered:
        phi = phi_full_centered(losses, dist.p);
        break;
      case Mode::FullMinShift:
        phi = phi_full_minshift(losses);
        break;
      case Mode::Bandit:
        if (!have_obs) prev_obs = losses[arm];  // first observation is its own baseline
        sched.obs_diff_max =
            std::max(sched.obs_diff_max, std::abs(losses[arm] - prev_obs));
        phi = phi_bandit(losses[arm], arm, dist.q, prev_obs);
        break;
    }
    update_stats(sched, phi, dist.p);
    const double eta_now = eta_current(sched);
    const auto step = tracker.step(sched.eta_run);

    for (int m = 0; m < num_arms; ++m) {
      const double product = -step.eta_used * phi[m];
      ledger.audit.worst_update_product =
          std::max(ledger.audit.worst_update_product, product);
      if (product > 1.0 + kAuditTol) {
        ++ledger.audit.update_bound;
        flag(t, "exponential update bound exceeded");
        break;
      }
    }
    if (step.eta_ratio > 1.0 + kAuditTol) {
      ++ledger.audit.eta_monotone;
      flag(t, "learning rate increased");
    }
    const double range_cap = config.mode == Mode::Bandit ? 1.0 : config.budget;
    if (eta_now * sched.d_last > range_cap * (1.0 + kAuditTol) + 1e-15) {
      ++ledger.audit.eta_range;
      flag(t, "eta * range exceeded its cap");
    }
    const double floor = eps / num_arms;
    for (int m = 0; m < num_arms; ++m)
      if (dist.q[m] < floor - 1e-15) {
        ++ledger.audit.q_floor;
        flag(t, "selection probability below exploration floor");
        break;
      }

    double exp_loss = 0.0;
    for (int m = 0; m < num_arms; ++m) exp_loss += dist.q[m] * losses[m];
    ledger.total_expected_loss += exp_loss;
    for (std::size_t c = 0; c < comparators.size(); ++c) {
      ledger.final_regret[c] += exp_loss - losses[comparators[c].arms[t - 1]];
      if (config.record.rows)
        ledger.comparator_cum[c].push_back(ledger.final_regret[c]);
    }
    if (config.record.rows)
      ledger.rows.push_back(LedgerRow{t, arm, eta_now, eps, exp_loss,
                                      sched.d_last, sched.v_last});
    if (config.record.q_history) ledger.q_history.push_back(dist.q);

    ZTable z = exponential_update(table, phi, class_arms, step.eta_used);
    table = transition(z, kernel, step.eta_ratio);
    prev_obs = losses[arm];
    have_obs = true;
  }
  return ledger;
}

double expected_regret(const RegretLedger& ledger, const ComparatorPath& path,
                       const LossModel& env) {
  if (static_cast<int>(ledger.q_history.size()) != ledger.horizon)
    throw std::invalid_argument("ledger lacks the q trajectory");
  double regret = 0.0;
  std::vector<double> losses(env.arms());
  for (int t = 1; t <= ledger.horizon; ++t) {
    env.losses_at(t, losses);
    double exp_loss = 0.0;
    for (int m = 0; m < env.arms(); ++m)
      exp_loss += ledger.q_history[t - 1][m] * losses[m];
    regret += exp_loss - losses[path.arms[t - 1]];
  }
  return regret;
}

std::string to_string(BoundId id) {
  switch (id) {
    case BoundId::Thm11: return "thm11";
    case BoundId::Thm12: return "thm12";
    case BoundId::CorFull: return "cor_full";
    case BoundId::Thm21: return "thm21";
    case BoundId::CorBandit: return "cor_bandit";
  }
  return "?";
}

std::optional<BoundId> bound_from_string(const std::string& name) {
  if (name == "thm11") return BoundId::Thm11;
  if (name == "thm12") return BoundId::Thm12;
  if (name == "cor_full") return BoundId::CorFull;
  if (name == "thm21") return BoundId::Thm21;
  if (name == "cor_bandit") return BoundId::CorBandit;
  return std::nullopt;
}

BoundValue bound_rhs(BoundId id, double budget, int arms, long horizon,
                     const RangeStats& ranges) {
  BoundValue out;
  const double W = budget;
  switch (id) {
    case BoundId::Thm11:
      out.term_zeroth = 2.0 * (1.0 + W) * ranges.max_delta;
      out.term_sqrt = 2.0 * std::sqrt(W * ranges.sum_delta_sq);
      out.rhs = out.term_zeroth + out.term_sqrt;
      return out;
    case BoundId::Thm12:
      out.term_sqrt = 6.0 * std::sqrt(W * ranges.sum_delta_sq);
      out.rhs = out.term_sqrt;
      return out;
    case BoundId::CorFull:
      out.term_sqrt = 6.0 * ranges.max_delta * std::sqrt(W * horizon);
      out.rhs = out.term_sqrt;
      return out;
    case BoundId::Thm21:
    case BoundId::CorBandit: {
      const double uniform = ranges.max_tilde;
      const double sum_sq = id == BoundId::Thm21
                                ? ranges.sum_tilde_sq
                                : uniform * uniform * horizon;
      long top = horizon;
      if (arms * W > 0.0)
        top = std::min<long>(horizon,
                             static_cast<long>(std::ceil(
                                 std::sqrt(horizon / (arms * W)))));
      const double top_sum =
          id == BoundId::Thm21 ? ranges.top_tilde_sum(top) : top * uniform;
      out.term_sqrt = 4.0 * std::sqrt(2.0 * arms * W * sum_sq);
      out.term_log =
          std::sqrt(arms * W * (1.0 + std::log(static_cast<double>(horizon))) *
                    sum_sq);
      out.term_ranges = 2.0 * W * arms * top_sum;
      out.rhs = out.term_sqrt + out.term_log + out.term_ranges;
      return out;
    }
  }
  throw std::invalid_argument("unknown bound");
}

std::vector<std::vector<double>> brute_force_oracle(
    const Kernel& kernel, const std::vector<std::vector<double>>& phis,
    const std::vector<double>& etas, const std::vector<SideInfo>& sides,
    std::size_t max_paths) {
  const int horizon = static_cast<int>(phis.size());
  if (static_cast<int>(etas.size()) != horizon + 1)
    throw std::invalid_argument("need horizon+1 learning rates");
  const int num_arms = kernel.arms();

  struct PathTip {
    std::size_t cls;
    long double weight;
  };
  std::vector<PathTip> frontier;
  for (const auto& wc : kernel.initial_prior())
    frontier.push_back({kernel.index_of(wc.state), wc.weight});
  if (frontier.size() > max_paths)
    throw std::length_error("comparator path count exceeds the oracle cap");

  std::vector<std::vector<double>> probs;
  std::vector<int> class_arms;
  for (int t = 1; t <= horizon; ++t) {
    const SideInfo side =
        static_cast<int>(sides.size()) >= t ? sides[t - 1] : SideInfo{};
    class_arms.resize(kernel.omega_size(t));
    kernel.arms_at(t, side, class_arms);

    std::vector<long double> arm_mass(num_arms, 0.0L);
    for (const auto& tip : frontier) arm_mass[class_arms[tip.cls]] += tip.weight;
    long double total = 0.0L;
    for (long double w : arm_mass) total += w;
    std::vector<double> p(num_arms);
    for (int m = 0; m < num_arms; ++m)
      p[m] = static_cast<double>(arm_mass[m] / total);
    probs.push_back(std::move(p));

    const long double exponent = etas[t - 1];
    for (auto& tip : frontier)
      tip.weight *= std::exp(-exponent *
                             static_cast<long double>(phis[t - 1][class_arms[tip.cls]]));
    if (t == horizon) break;

    // Power normalization acts on each class aggregate; every member path is
    // rescaled by its class's common factor.
    const long double ratio = static_cast<long double>(etas[t]) / etas[t - 1];
    if (ratio != 1.0L) {
      std::vector<long double> class_mass(kernel.omega_size(t), 0.0L);
      for (const auto& tip : frontier) class_mass[tip.cls] += tip.weight;
      std::vector<long double> factor(class_mass.size(), 1.0L);
      for (std::size_t i = 0; i < class_mass.size(); ++i)
        if (class_mass[i] > 0.0L) factor[i] = std::pow(class_mass[i], ratio - 1.0L);
      for (auto& tip : frontier) tip.weight *= factor[tip.cls];
    }

    std::vector<std::vector<std::pair<std::size_t, double>>> rows(
        kernel.omega_size(t));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (const auto& wc : kernel.transitions(kernel.class_at(i), t))
        rows[i].emplace_back(kernel.index_of(wc.state), wc.weight);

    std::size_t next_size = 0;
    for (const auto& tip : frontier) next_size += rows[tip.cls].size();
    if (next_size > max_paths)
      throw std::length_error("comparator path count exceeds the oracle cap");
    std::vector<PathTip> next;
    next.reserve(next_size);
    for (const auto& tip : frontier)
      for (const auto& [succ, weight] : rows[tip.cls])
        next.push_back({succ, tip.weight * weight});
    frontier = std::move(next);
  }
  return probs;
}

}  // namespace gsa
