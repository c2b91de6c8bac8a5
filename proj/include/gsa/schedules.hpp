#pragma once

#include <span>
#include <string>
#include <vector>

namespace gsa {

enum class Mode { FullCentered, FullMinShift, Bandit };

std::string to_string(Mode mode);

// Returned when every learning-rate term is still degenerate (no informative
// performance values seen yet).
inline constexpr double kEtaCap = 1.0;

// Running statistics feeding the learning-rate and exploration schedules.
// V and D never decrease, Phi never increases, and the folded learning rate
// eta_run never increases; eta_run stays +inf until the first round with a
// non-constant performance vector.
struct ScheduleState {
  Mode mode = Mode::FullMinShift;
  double budget = 0.0;  // complexity budget, nats
  int arms = 0;

  double V = 0.0;     // sum of per-round second moments
  double D = 0.0;     // max per-round range of phi
  double Phi = 0.0;   // min over rounds and arms of phi
  double eta_run;     // running min of the mode's formula; +inf while degenerate
  double d_last = 0.0, v_last = 0.0;
  double obs_diff_max = 0.0;  // bandit: record |observed - previous| loss gap
  int rounds_seen = 0;

  ScheduleState();
  ScheduleState(Mode mode, double budget, int arms);
};

std::vector<double> phi_full_centered(std::span<const double> losses,
                                      std::span<const double> p);
std::vector<double> phi_full_minshift(std::span<const double> losses);
// Importance-weighted one-hot estimate: zero except at the played arm, where
// it is (observed - prev_obs) / q[arm].
std::vector<double> phi_bandit(double observed_loss, int arm,
                               std::span<const double> q, double prev_obs_loss);

// Folds (d_t, v_t) into the state and refreshes the running learning rate.
void update_stats(ScheduleState& state, std::span<const double> phi,
                  std::span<const double> p);

// min(sqrt(W/V), W/D, 1/|Phi| when Phi < 0, 1/D), as a running minimum;
// kEtaCap while all terms are degenerate. The extra 1/D cap keeps the
// exponential update bound satisfied with the one-round rate lag the weight
// update actually uses.
double eta_full_centered(const ScheduleState& state);
// min(sqrt(W/V), W/D), same running-minimum treatment.
double eta_full_minshift(const ScheduleState& state);
// min(sqrt(W/V), 1/D), further capped at eps_{t+1}/(M * obs_diff_max) so the
// lagged update bound survives the exploration floor shrinking between picks.
double eta_bandit(const ScheduleState& state);
double eta_current(const ScheduleState& state);

// min(1/2, sqrt(M W / t)); full-feedback modes explore nothing.
double eps_bandit(int t, int arms, double budget);
double eps_for_round(Mode mode, int t, int arms, double budget);

// Pairs the learning rates actually entering the weight update. While the
// schedule is degenerate the update is a no-op (phi == 0) and the rate
// history is anchored at the first informative round, mirroring the round-1
// convention eta_0 := eta_1.
struct EtaTracker {
  double eff_prev;  // NaN until the first informative round

  EtaTracker();

  struct Step {
    double eta_used;   // rate multiplying this round's phi
    double eta_ratio;  // power normalization for the transition
  };
  // `eta_run` is ScheduleState::eta_run after update_stats (+inf if still
  // degenerate).
  Step step(double eta_run);
};

}  // namespace gsa
