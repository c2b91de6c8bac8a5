#include "gsa/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsa/logsum.hpp"

namespace gsa {
namespace {

double candidate_eta(const ScheduleState& s) {
  double c = kInf;
  if (s.V > 0.0) c = std::min(c, std::sqrt(s.budget / s.V));
  switch (s.mode) {
    case Mode::FullCentered:
      if (s.D > 0.0) c = std::min(c, s.budget / s.D);
      if (s.Phi < 0.0) c = std::min(c, 1.0 / -s.Phi);
      // |phi| never exceeds the running range, so capping at 1/D keeps the
      // previous round's rate valid for the next centered phi whenever the
      // per-round range is not growing. The min-shift mode needs no cap
      // (phi >= 0) and the bandit mode already carries 1/D.
      if (s.D > 0.0) c = std::min(c, 1.0 / s.D);
      break;
    case Mode::FullMinShift:
      if (s.D > 0.0) c = std::min(c, s.budget / s.D);
      break;
    case Mode::Bandit:
      if (s.D > 0.0) c = std::min(c, 1.0 / s.D);
      // Importance weights are bounded by M/eps, so capping the rate at
      // eps_{t+1} / (M * max observed loss difference) keeps the lagged
      // exponential update bound valid until a larger difference shows up.
      if (s.obs_diff_max > 0.0)
        c = std::min(c, eps_bandit(s.rounds_seen + 1, s.arms, s.budget) /
                            (s.arms * s.obs_diff_max));
      break;
  }
  return c;
}

double reported(const ScheduleState& s) {
  const double v = std::min(s.eta_run, candidate_eta(s));
  return std::isinf(v) ? kEtaCap : v;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::FullCentered: return "full_centered";
    case Mode::FullMinShift: return "full_minshift";
    case Mode::Bandit: return "bandit";
  }
  return "?";
}

ScheduleState::ScheduleState() : eta_run(kInf) {}

ScheduleState::ScheduleState(Mode mode_, double budget_, int arms_)
    : mode(mode_), budget(budget_), arms(arms_), eta_run(kInf) {
  if (!(budget >= 0.0)) throw std::invalid_argument("budget must be >= 0");
}

std::vector<double> phi_full_centered(std::span<const double> losses,
                                      std::span<const double> p) {
  double mean = 0.0;
  for (std::size_t m = 0; m < losses.size(); ++m) mean += p[m] * losses[m];
  std::vector<double> phi(losses.size());
  for (std::size_t m = 0; m < losses.size(); ++m) phi[m] = losses[m] - mean;
  return phi;
}

std::vector<double> phi_full_minshift(std::span<const double> losses) {
  const double lo = *std::min_element(losses.begin(), losses.end());
  std::vector<double> phi(losses.size());
  for (std::size_t m = 0; m < losses.size(); ++m) phi[m] = losses[m] - lo;
  return phi;
}

std::vector<double> phi_bandit(double observed_loss, int arm,
                               std::span<const double> q, double prev_obs_loss) {
  if (arm < 0 || arm >= static_cast<int>(q.size()))
    throw std::invalid_argument("arm index out of range");
  if (!(q[arm] > 0.0))
    throw std::invalid_argument("played arm has zero selection probability");
  std::vector<double> phi(q.size(), 0.0);
  phi[arm] = (observed_loss - prev_obs_loss) / q[arm];
  return phi;
}

void update_stats(ScheduleState& state, std::span<const double> phi,
                  std::span<const double> p) {
  double lo = phi[0], hi = phi[0], v = 0.0;
  for (std::size_t m = 0; m < phi.size(); ++m) {
    lo = std::min(lo, phi[m]);
    hi = std::max(hi, phi[m]);
    v += p[m] * phi[m] * phi[m];
  }
  state.d_last = hi - lo;
  state.v_last = v;
  state.V += v;
  state.D = std::max(state.D, state.d_last);
  state.Phi = state.rounds_seen == 0 ? lo : std::min(state.Phi, lo);
  state.rounds_seen += 1;
  state.eta_run = std::min(state.eta_run, candidate_eta(state));
}

double eta_full_centered(const ScheduleState& state) { return reported(state); }
double eta_full_minshift(const ScheduleState& state) { return reported(state); }
double eta_bandit(const ScheduleState& state) { return reported(state); }
double eta_current(const ScheduleState& state) { return reported(state); }

double eps_bandit(int t, int arms, double budget) {
  if (t < 1) throw std::invalid_argument("round must be >= 1");
  return std::min(0.5, std::sqrt(arms * budget / t));
}

double eps_for_round(Mode mode, int t, int arms, double budget) {
  return mode == Mode::Bandit ? eps_bandit(t, arms, budget) : 0.0;
}

EtaTracker::EtaTracker() : eff_prev(std::numeric_limits<double>::quiet_NaN()) {}

EtaTracker::Step EtaTracker::step(double eta_run) {
  if (std::isinf(eta_run)) {
    // Still degenerate: phi is identically zero, any rate is a no-op.
    return {kEtaCap, 1.0};
  }
  Step out{};
  if (std::isnan(eff_prev)) {
    out.eta_used = eta_run;  // first informative round anchors the history
    out.eta_ratio = 1.0;
  } else {
    out.eta_used = eff_prev;
    out.eta_ratio = eta_run / eff_prev;
  }
  eff_prev = eta_run;
  return out;
}

}  // namespace gsa
