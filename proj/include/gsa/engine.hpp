#pragma once

#include <span>
#include <vector>

#include "gsa/kernels.hpp"
#include "gsa/rng.hpp"

namespace gsa {

// Log-domain class weights over Omega_round. After every transition the table
// is shifted so its maximum entry is 0; the accumulated shift is kept in
// log_shift so the true (unnormalized) mass of entry i is log_w[i] + log_shift.
// Selection probabilities are invariant to the shift.
struct WeightTable {
  int round = 1;
  double log_shift = 0.0;
  std::vector<double> log_w;
};

// Intermediate table after the exponential performance update.
struct ZTable {
  int round = 1;
  double log_shift = 0.0;
  std::vector<double> log_z;
};

struct ArmDistribution {
  std::vector<double> p;  // algorithmic probabilities
  std::vector<double> q;  // selection probabilities, q = (1-eps) p + eps/M
  double epsilon = 0.0;
};

// Table at round 1 holding the kernel's initial prior (unshifted).
WeightTable init_table(const Kernel& kernel);

// Per-arm log masses: entry m is the log-sum of the weights of all classes
// currently playing m.
std::vector<double> arm_log_weights(const WeightTable& table, const Kernel& kernel,
                                    const SideInfo& side = {});
void arm_log_weights(const WeightTable& table, std::span<const int> arms,
                     int num_arms, std::span<double> out);

ArmDistribution normalize_mix(std::span<const double> arm_log_w, double epsilon);

// Inverse-CDF selection in ascending arm order; a draw landing exactly on a
// cumulative boundary resolves to the lower arm index. Zero-probability arms
// are never selected.
int pick_index(std::span<const double> q, double u);
int sample_arm(const ArmDistribution& dist, Rng& rng);

// log z = log w - eta_prev * phi[arm(class)].
ZTable exponential_update(const WeightTable& table, std::span<const double> phi,
                          const Kernel& kernel, const SideInfo& side,
                          double eta_prev);
ZTable exponential_update(const WeightTable& table, std::span<const double> phi,
                          std::span<const int> arms, double eta_prev);

// Power normalization (log z scaled by eta_ratio) followed by the kernel's
// mass sharing; result is shifted so max log weight is 0. Requires
// 0 < eta_ratio <= 1.
WeightTable transition(const ZTable& z, const Kernel& kernel, double eta_ratio);

// Reference implementation via enumerated transition rows; used to validate
// the kernels' structured advance paths.
WeightTable transition_dense(const ZTable& z, const Kernel& kernel,
                             double eta_ratio);

// True log total mass including the accumulated shift.
double total_log_mass(const WeightTable& table);

}  // namespace gsa
