#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gsa {

enum class EnvFamily { FixedGap, Switching, Contextual, Periodic, DriftingScale };

std::string to_string(EnvFamily family);

struct EnvSpec {
  EnvFamily family = EnvFamily::FixedGap;
  int arms = 2;
  int horizon = 1;
  double gap = 1.0;
  std::vector<int> switch_times;  // rounds at which the best arm advances
  int contexts = 0;               // contextual family
  int period = 0;                 // periodic family
  double scale_end = 1.0;         // drifting-scale family: final range multiplier
  std::uint64_t seed = 0;
  double affine_a = 1.0;          // losses emitted as a*l + b, applied last
  double affine_b = 0.0;
};

// Per-round loss ranges. delta[t-1] is the spread at round t; delta_tilde is
// the two-round extended spread with the round-0 losses taken equal to the
// round-1 losses.
struct RangeStats {
  std::vector<double> delta, delta_tilde;
  double max_delta = 0.0, sum_delta_sq = 0.0;
  double max_tilde = 0.0, sum_tilde_sq = 0.0;

  // Sum of the k largest extended ranges.
  double top_tilde_sum(std::size_t k) const;
};

RangeStats ranges_of(const std::vector<std::vector<double>>& losses);

// Deterministic adversarial loss generators. A given spec always produces the
// same loss matrix; the harness withholds unobserved entries in bandit mode.
class LossModel {
 public:
  explicit LossModel(EnvSpec spec);

  const EnvSpec& spec() const { return spec_; }
  int arms() const { return spec_.arms; }
  int horizon() const { return spec_.horizon; }
  bool has_context() const { return spec_.family == EnvFamily::Contextual; }
  int context_alphabet() const { return spec_.contexts; }

  int context_at(int t) const;
  void losses_at(int t, std::span<double> out) const;
  std::vector<double> losses_at(int t) const;
  RangeStats ranges() const;

 private:
  int best_arm_at(int t) const;
  EnvSpec spec_;
};

}  // namespace gsa
