#include "gsa/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "gsa/logsum.hpp"

namespace gsa {
namespace {

void check_finite(const std::vector<double>& log_w, int round) {
  for (double v : log_w)
    if (!std::isfinite(v))
      throw std::runtime_error("weight table collapsed at round " +
                               std::to_string(round));
}

}  // namespace

WeightTable init_table(const Kernel& kernel) {
  const auto prior = kernel.initial_prior();
  if (prior.empty()) throw std::invalid_argument("kernel has no classes");
  WeightTable table;
  table.round = 1;
  table.log_w.assign(kernel.omega_size(1), kNegInf);
  for (const auto& wc : prior) {
    if (!(wc.weight > 0.0))
      throw std::invalid_argument("initial prior weights must be positive");
    table.log_w[kernel.index_of(wc.state)] = std::log(wc.weight);
  }
  check_finite(table.log_w, 1);
  return table;
}

void arm_log_weights(const WeightTable& table, std::span<const int> arms,
                     int num_arms, std::span<double> out) {
  std::vector<double> mx(num_arms, kNegInf);
  const std::size_t n = table.log_w.size();
  for (std::size_t i = 0; i < n; ++i)
    mx[arms[i]] = std::max(mx[arms[i]], table.log_w[i]);
  std::vector<double> sum(num_arms, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int m = arms[i];
    if (std::isfinite(mx[m])) sum[m] += std::exp(table.log_w[i] - mx[m]);
  }
  for (int m = 0; m < num_arms; ++m)
    out[m] = sum[m] > 0.0 ? mx[m] + std::log(sum[m]) : kNegInf;
}

std::vector<double> arm_log_weights(const WeightTable& table,
                                    const Kernel& kernel, const SideInfo& side) {
  std::vector<int> arms(table.log_w.size());
  kernel.arms_at(table.round, side, arms);
  std::vector<double> out(kernel.arms());
  arm_log_weights(table, arms, kernel.arms(), out);
  return out;
}

ArmDistribution normalize_mix(std::span<const double> arm_log_w, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("epsilon must lie in [0,1]");
  const int m_count = static_cast<int>(arm_log_w.size());
  const double total = log_sum_exp(arm_log_w);
  if (!std::isfinite(total))
    throw std::runtime_error("numerical collapse: no arm carries mass");
  ArmDistribution dist;
  dist.epsilon = epsilon;
  dist.p.resize(m_count);
  dist.q.resize(m_count);
  double sum = 0.0;
  for (int m = 0; m < m_count; ++m) {
    dist.p[m] = std::exp(arm_log_w[m] - total);
    sum += dist.p[m];
  }
  for (int m = 0; m < m_count; ++m) {
    dist.p[m] /= sum;
    dist.q[m] = (1.0 - epsilon) * dist.p[m] + epsilon / m_count;
  }
  return dist;
}

int pick_index(std::span<const double> q, double u) {
  double cum = 0.0;
  int last = -1;
  for (std::size_t m = 0; m < q.size(); ++m) {
    if (q[m] <= 0.0) continue;
    cum += q[m];
    last = static_cast<int>(m);
    if (u <= cum) return last;
  }
  if (last < 0) throw std::invalid_argument("distribution has no mass");
  return last;  // u beyond the rounded cumulative tail
}

int sample_arm(const ArmDistribution& dist, Rng& rng) {
  return pick_index(dist.q, rng.uniform01());
}

ZTable exponential_update(const WeightTable& table, std::span<const double> phi,
                          std::span<const int> arms, double eta_prev) {
  ZTable z;
  z.round = table.round;
  z.log_shift = table.log_shift;
  z.log_z.resize(table.log_w.size());
  for (std::size_t i = 0; i < table.log_w.size(); ++i) {
    const double x = eta_prev * phi[arms[i]];
    assert(-x <= 1.0 + 1e-9 && "learning-rate schedule violated its bound");
    z.log_z[i] = table.log_w[i] - x;
  }
  return z;
}

ZTable exponential_update(const WeightTable& table, std::span<const double> phi,
                          const Kernel& kernel, const SideInfo& side,
                          double eta_prev) {
  std::vector<int> arms(table.log_w.size());
  kernel.arms_at(table.round, side, arms);
  return exponential_update(table, phi, arms, eta_prev);
}

WeightTable transition(const ZTable& z, const Kernel& kernel, double eta_ratio) {
  if (!(eta_ratio > 0.0) || eta_ratio > 1.0 + 1e-12)
    throw std::invalid_argument("eta ratio must lie in (0,1]");
  std::vector<double> scaled(z.log_z.size());
  for (std::size_t i = 0; i < scaled.size(); ++i)
    scaled[i] = eta_ratio * z.log_z[i];

  WeightTable next;
  next.round = z.round + 1;
  kernel.advance(scaled, z.round, next.log_w);
  if (next.log_w.size() != kernel.omega_size(z.round + 1))
    throw std::logic_error("kernel advance produced a wrong class count");
  double mx = kNegInf;
  for (double v : next.log_w) mx = std::max(mx, v);
  if (!std::isfinite(mx))
    throw std::runtime_error("weight table collapsed at round " +
                             std::to_string(z.round));
  for (double& v : next.log_w) v -= mx;
  next.log_shift = eta_ratio * z.log_shift + mx;
  check_finite(next.log_w, z.round + 1);
  return next;
}

WeightTable transition_dense(const ZTable& z, const Kernel& kernel,
                             double eta_ratio) {
  if (!(eta_ratio > 0.0) || eta_ratio > 1.0 + 1e-12)
    throw std::invalid_argument("eta ratio must lie in (0,1]");
  const int t = z.round;
  std::vector<double> out(kernel.omega_size(t + 1), kNegInf);
  for (std::size_t i = 0; i < z.log_z.size(); ++i) {
    const double scaled = eta_ratio * z.log_z[i];
    for (const auto& wc : kernel.transitions(kernel.class_at(i), t)) {
      const std::size_t j = kernel.index_of(wc.state);
      out[j] = log_add_exp(out[j], std::log(wc.weight) + scaled);
    }
  }
  WeightTable next;
  next.round = t + 1;
  double mx = kNegInf;
  for (double v : out) mx = std::max(mx, v);
  if (!std::isfinite(mx))
    throw std::runtime_error("weight table collapsed at round " +
                             std::to_string(t));
  next.log_w.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) next.log_w[i] = out[i] - mx;
  next.log_shift = eta_ratio * z.log_shift + mx;
  check_finite(next.log_w, t + 1);
  return next;
}

double total_log_mass(const WeightTable& table) {
  return log_sum_exp(table.log_w) + table.log_shift;
}

}  // namespace gsa
