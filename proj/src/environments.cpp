#include "gsa/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gsa {

std::string to_string(EnvFamily family) {
  switch (family) {
    case EnvFamily::FixedGap: return "fixed_gap";
    case EnvFamily::Switching: return "switching";
    case EnvFamily::Contextual: return "contextual";
    case EnvFamily::Periodic: return "periodic";
    case EnvFamily::DriftingScale: return "drifting_scale";
  }
  return "?";
}

double RangeStats::top_tilde_sum(std::size_t k) const {
  std::vector<double> sorted(delta_tilde);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(k, sorted.size()); ++i) s += sorted[i];
  return s;
}

RangeStats ranges_of(const std::vector<std::vector<double>>& losses) {
  RangeStats r;
  const std::size_t horizon = losses.size();
  r.delta.resize(horizon);
  r.delta_tilde.resize(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& now = losses[t];
    const auto& prev = losses[t == 0 ? 0 : t - 1];
    double lo = now[0], hi = now[0], lo2 = now[0], hi2 = now[0];
    for (std::size_t m = 0; m < now.size(); ++m) {
      lo = std::min(lo, now[m]);
      hi = std::max(hi, now[m]);
      lo2 = std::min({lo2, now[m], prev[m]});
      hi2 = std::max({hi2, now[m], prev[m]});
    }
    r.delta[t] = hi - lo;
    r.delta_tilde[t] = hi2 - lo2;
    r.max_delta = std::max(r.max_delta, r.delta[t]);
    r.sum_delta_sq += r.delta[t] * r.delta[t];
    r.max_tilde = std::max(r.max_tilde, r.delta_tilde[t]);
    r.sum_tilde_sq += r.delta_tilde[t] * r.delta_tilde[t];
  }
  return r;
}

LossModel::LossModel(EnvSpec spec) : spec_(spec) {
  if (spec_.arms < 1) throw std::invalid_argument("environment needs arms >= 1");
  if (spec_.horizon < 1) throw std::invalid_argument("environment needs horizon >= 1");
  if (!(spec_.affine_a > 0.0))
    throw std::invalid_argument("affine scale must be positive");
  switch (spec_.family) {
    case EnvFamily::Contextual:
      if (spec_.contexts < 1)
        throw std::invalid_argument("contextual environment needs contexts >= 1");
      break;
    case EnvFamily::Periodic:
      if (spec_.period < 1)
        throw std::invalid_argument("periodic environment needs period >= 1");
      break;
    case EnvFamily::Switching:
      for (std::size_t i = 0; i < spec_.switch_times.size(); ++i) {
        if (spec_.switch_times[i] < 2 || spec_.switch_times[i] > spec_.horizon)
          throw std::invalid_argument("switch times must lie in [2, horizon]");
        if (i > 0 && spec_.switch_times[i] <= spec_.switch_times[i - 1])
          throw std::invalid_argument("switch times must be increasing");
      }
      break;
    case EnvFamily::DriftingScale:
      if (!(spec_.scale_end > 0.0))
        throw std::invalid_argument("scale_end must be positive");
      break;
    case EnvFamily::FixedGap:
      break;
  }
}

int LossModel::context_at(int t) const {
  if (!has_context()) return -1;
  return (t - 1) % spec_.contexts;
}

int LossModel::best_arm_at(int t) const {
  switch (spec_.family) {
    case EnvFamily::FixedGap:
    case EnvFamily::DriftingScale:
      return 0;
    case EnvFamily::Switching: {
      int segment = 0;
      for (int st : spec_.switch_times)
        if (t >= st) ++segment;
      return segment % spec_.arms;
    }
    case EnvFamily::Contextual:
      return context_at(t) % spec_.arms;
    case EnvFamily::Periodic:
      return ((t - 1) % spec_.period) % spec_.arms;
  }
  return 0;
}

void LossModel::losses_at(int t, std::span<double> out) const {
  if (t < 1 || t > spec_.horizon)
    throw std::out_of_range("round outside the environment horizon");
  double scale = 1.0;
  if (spec_.family == EnvFamily::DriftingScale && spec_.horizon > 1)
    scale = 1.0 + (spec_.scale_end - 1.0) * (t - 1) / (spec_.horizon - 1.0);
  const int best = best_arm_at(t);
  for (int m = 0; m < spec_.arms; ++m) {
    const double raw = m == best ? 0.0 : spec_.gap * scale;
    out[m] = spec_.affine_a * raw + spec_.affine_b;
  }
}

std::vector<double> LossModel::losses_at(int t) const {
  std::vector<double> out(spec_.arms);
  losses_at(t, out);
  return out;
}

RangeStats LossModel::ranges() const {
  std::vector<std::vector<double>> all(spec_.horizon);
  for (int t = 1; t <= spec_.horizon; ++t) all[t - 1] = losses_at(t);
  return ranges_of(all);
}

}  // namespace gsa
