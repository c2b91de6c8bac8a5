#include "gsa/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "gsa/logsum.hpp"

namespace gsa {
namespace {

constexpr std::size_t kClassSpaceCap = 4096;

void check_arm_range(int arm, int arms) {
  if (arm < 0 || arm >= arms) throw std::invalid_argument("arm index out of range");
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Fixed: return "fixed";
    case KernelFamily::Switching: return "switching";
    case KernelFamily::Contextual: return "contextual";
    case KernelFamily::Periodic: return "periodic";
  }
  return "?";
}

std::string to_string(const ClassState& s) {
  std::string out = to_string(s.family) + "(";
  switch (s.family) {
    case KernelFamily::Fixed: out += "arm=" + std::to_string(s.arm + 1); break;
    case KernelFamily::Switching:
      out += "arm=" + std::to_string(s.arm + 1) + ",age=" + std::to_string(s.age);
      break;
    case KernelFamily::Contextual:
    case KernelFamily::Periodic:
      out += "map=";
      for (std::size_t i = 0; i < s.map.size(); ++i)
        out += (i ? "," : "") + std::to_string(s.map[i] + 1);
      break;
  }
  return out + ")";
}

int region_count(std::span<const int> mapping) {
  if (mapping.empty()) throw std::invalid_argument("empty mapping");
  int runs = 1;
  for (std::size_t i = 1; i < mapping.size(); ++i)
    if (mapping[i] != mapping[i - 1]) ++runs;
  return runs;
}

// ---------------------------------------------------------------------------
// Fixed: one class per arm, identity transitions.

class FixedKernel final : public Kernel {
 public:
  explicit FixedKernel(KernelSpec spec) : Kernel(spec) {
    if (spec.arms < 1) throw std::invalid_argument("fixed kernel needs arms >= 1");
  }

  std::size_t omega_size(int) const override { return spec_.arms; }

  ClassState class_at(std::size_t index) const override {
    return ClassState{KernelFamily::Fixed, static_cast<int>(index), 0, {}};
  }

  std::size_t index_of(const ClassState& s) const override {
    check_arm_range(s.arm, spec_.arms);
    return static_cast<std::size_t>(s.arm);
  }

  std::vector<WeightedClass> initial_prior() const override {
    std::vector<WeightedClass> prior;
    for (int m = 0; m < spec_.arms; ++m)
      prior.push_back({class_at(m), 1.0 / spec_.arms});
    return prior;
  }

  double initial_weight(const ClassState& s) const override {
    check_arm_range(s.arm, spec_.arms);
    return 1.0 / spec_.arms;
  }

  std::vector<WeightedClass> transitions(const ClassState& s, int) const override {
    return {{s, 1.0}};
  }

  double transition_weight(const ClassState& from, const ClassState& to,
                           int) const override {
    return from == to ? 1.0 : 0.0;
  }

  double row_sum(const ClassState&, int) const override { return 1.0; }

  int arm_of(const ClassState& s, int, const SideInfo&) const override {
    return s.arm;
  }

  void arms_at(int, const SideInfo&, std::span<int> out) const override {
    for (int m = 0; m < spec_.arms; ++m) out[m] = m;
  }

  void advance(std::span<const double> log_z, int,
               std::vector<double>& out) const override {
    out.assign(log_z.begin(), log_z.end());
  }
};

// ---------------------------------------------------------------------------
// Switching: classes (arm, age), age = rounds since the last switch. Index
// layout (age-1)*M + arm, so Omega_t has M*t entries.

class SwitchingKernel final : public Kernel {
 public:
  explicit SwitchingKernel(KernelSpec spec) : Kernel(spec) {
    if (spec.arms < 2)
      throw std::invalid_argument("switching kernel needs arms >= 2");
  }

  std::size_t omega_size(int t) const override {
    return static_cast<std::size_t>(spec_.arms) * t;
  }

  ClassState class_at(std::size_t index) const override {
    const int m = static_cast<int>(index % spec_.arms);
    const int age = static_cast<int>(index / spec_.arms) + 1;
    return ClassState{KernelFamily::Switching, m, age, {}};
  }

  std::size_t index_of(const ClassState& s) const override {
    check_arm_range(s.arm, spec_.arms);
    if (s.age < 1) throw std::invalid_argument("switching age must be >= 1");
    return static_cast<std::size_t>(s.age - 1) * spec_.arms + s.arm;
  }

  std::vector<WeightedClass> initial_prior() const override {
    std::vector<WeightedClass> prior;
    for (int m = 0; m < spec_.arms; ++m)
      prior.push_back({ClassState{KernelFamily::Switching, m, 1, {}},
                       1.0 / spec_.arms});
    return prior;
  }

  double initial_weight(const ClassState& s) const override {
    return s.age == 1 ? 1.0 / spec_.arms : 0.0;
  }

  std::vector<WeightedClass> transitions(const ClassState& s, int) const override {
    const double leave = 1.0 / (s.age + 1.0);
    std::vector<WeightedClass> row;
    row.push_back({ClassState{KernelFamily::Switching, s.arm, s.age + 1, {}},
                   1.0 - leave});
    for (int m = 0; m < spec_.arms; ++m) {
      if (m == s.arm) continue;
      row.push_back({ClassState{KernelFamily::Switching, m, 1, {}},
                     leave / (spec_.arms - 1)});
    }
    return row;
  }

  double transition_weight(const ClassState& from, const ClassState& to,
                           int) const override {
    const double leave = 1.0 / (from.age + 1.0);
    if (to.arm == from.arm && to.age == from.age + 1) return 1.0 - leave;
    if (to.arm != from.arm && to.age == 1) return leave / (spec_.arms - 1);
    return 0.0;
  }

  double row_sum(const ClassState&, int) const override { return 1.0; }

  int arm_of(const ClassState& s, int, const SideInfo&) const override {
    return s.arm;
  }

  void arms_at(int t, const SideInfo&, std::span<int> out) const override {
    const std::size_t n = omega_size(t);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = static_cast<int>(i % spec_.arms);
  }

  void advance(std::span<const double> log_z, int t,
               std::vector<double>& out) const override {
    const int M = spec_.arms;
    out.assign(omega_size(t + 1), kNegInf);
    // log(a+1) and log(a/(a+1)) tables, one entry per reachable age
    std::vector<double> log_leave(t + 1), log_stay(t + 1);
    for (int a = 1; a <= t; ++a) {
      log_leave[a] = std::log(a + 1.0);
      log_stay[a] = std::log(a / (a + 1.0));
    }
    // Stay: (m, a) -> (m, a+1) with weight a/(a+1).
    for (int a = 1; a <= t; ++a)
      for (int m = 0; m < M; ++m)
        out[static_cast<std::size_t>(a) * M + m] =
            log_z[static_cast<std::size_t>(a - 1) * M + m] + log_stay[a];
    // Pool the leave mass per arm, then share it to the other arms' age-1
    // classes: out[(m',1)] = 1/(M-1) * sum_{m != m'} sum_a z[(m,a)]/(a+1).
    std::vector<double> mx(M, kNegInf), sum(M, 0.0), pooled(M, kNegInf);
    for (int a = 1; a <= t; ++a)
      for (int m = 0; m < M; ++m)
        mx[m] = std::max(mx[m],
                         log_z[static_cast<std::size_t>(a - 1) * M + m] -
                             log_leave[a]);
    for (int a = 1; a <= t; ++a)
      for (int m = 0; m < M; ++m) {
        if (std::isinf(mx[m])) continue;
        sum[m] += std::exp(log_z[static_cast<std::size_t>(a - 1) * M + m] -
                           log_leave[a] - mx[m]);
      }
    for (int m = 0; m < M; ++m)
      if (sum[m] > 0.0) pooled[m] = mx[m] + std::log(sum[m]);
    const double share = -std::log(M - 1.0);
    for (int m2 = 0; m2 < M; ++m2) {
      double acc = kNegInf;
      for (int m = 0; m < M; ++m)
        if (m != m2) acc = log_add_exp(acc, pooled[m]);
      out[m2] = acc + share;
    }
  }
};

// ---------------------------------------------------------------------------
// Contextual: classes are context-to-arm mappings, indexed as base-M numbers.

class ContextualKernel final : public Kernel {
 public:
  explicit ContextualKernel(KernelSpec spec) : Kernel(spec) {
    if (spec.arms < 1 || spec.contexts < 1)
      throw std::invalid_argument("contextual kernel needs arms >= 1, contexts >= 1");
    std::size_t count = 1;
    for (int j = 0; j < spec.contexts; ++j) {
      count *= spec.arms;
      if (count > kClassSpaceCap)
        throw std::invalid_argument("contextual class space exceeds cap of 4096");
    }
    count_ = count;
    pow_m_.assign(spec.contexts + 1, 1);
    for (int j = 1; j <= spec.contexts; ++j) pow_m_[j] = pow_m_[j - 1] * spec.arms;
    penalty_log_ = -std::log(2.0 * spec.contexts * spec.arms);
    regions_.resize(count_);
    double total = 0.0;
    for (std::size_t i = 0; i < count_; ++i) {
      const ClassState s = class_at(i);
      regions_[i] = region_count(s.map);
      total += std::exp(regions_[i] * penalty_log_);
    }
    penalty_total_ = total;
  }

  std::size_t omega_size(int) const override { return count_; }

  ClassState class_at(std::size_t index) const override {
    ClassState s{KernelFamily::Contextual, -1, 0, {}};
    s.map.resize(spec_.contexts);
    for (int j = 0; j < spec_.contexts; ++j)
      s.map[j] = static_cast<int>((index / pow_m_[j]) % spec_.arms);
    return s;
  }

  std::size_t index_of(const ClassState& s) const override {
    if (static_cast<int>(s.map.size()) != spec_.contexts)
      throw std::invalid_argument("mapping size must equal context count");
    std::size_t idx = 0;
    for (int j = 0; j < spec_.contexts; ++j) {
      check_arm_range(s.map[j], spec_.arms);
      idx += static_cast<std::size_t>(s.map[j]) * pow_m_[j];
    }
    return idx;
  }

  std::vector<WeightedClass> initial_prior() const override {
    std::vector<WeightedClass> prior;
    for (std::size_t i = 0; i < count_; ++i)
      prior.push_back({class_at(i), prior_of(i)});
    return prior;
  }

  double initial_weight(const ClassState& s) const override {
    return prior_of(index_of(s));
  }

  std::vector<WeightedClass> transitions(const ClassState& s, int t) const override {
    const std::size_t self = index_of(s);
    const double norm = spec_.renormalize_rows ? row_sum_raw(self, t) : 1.0;
    std::vector<WeightedClass> row;
    if (t > 1)
      row.push_back({s, (1.0 - 1.0 / t) / norm});
    for (std::size_t j = 0; j < count_; ++j) {
      if (j == self) continue;
      row.push_back({class_at(j),
                     std::exp(regions_[j] * penalty_log_) / t / norm});
    }
    return row;
  }

  double transition_weight(const ClassState& from, const ClassState& to,
                           int t) const override {
    const std::size_t i = index_of(from);
    const double norm = spec_.renormalize_rows ? row_sum_raw(i, t) : 1.0;
    if (from == to) return (1.0 - 1.0 / t) / norm;
    return std::exp(regions_[index_of(to)] * penalty_log_) / t / norm;
  }

  double row_sum(const ClassState& from, int t) const override {
    return spec_.renormalize_rows ? 1.0 : row_sum_raw(index_of(from), t);
  }

  int arm_of(const ClassState& s, int, const SideInfo& side) const override {
    if (side.context < 0 || side.context >= spec_.contexts)
      throw std::invalid_argument("contextual kernel needs a context in range");
    return s.map[side.context];
  }

  void arms_at(int, const SideInfo& side, std::span<int> out) const override {
    if (side.context < 0 || side.context >= spec_.contexts)
      throw std::invalid_argument("contextual kernel needs a context in range");
    const std::size_t p = pow_m_[side.context];
    for (std::size_t i = 0; i < count_; ++i)
      out[i] = static_cast<int>((i / p) % spec_.arms);
  }

  void advance(std::span<const double> log_z, int t,
               std::vector<double>& out) const override {
    std::vector<double> adj(log_z.begin(), log_z.end());
    if (spec_.renormalize_rows)
      for (std::size_t i = 0; i < count_; ++i)
        adj[i] -= std::log(row_sum_raw(i, t));
    const double total = log_sum_exp(adj);
    const double stay = t > 1 ? std::log1p(-1.0 / t) : kNegInf;
    const double lt = std::log(static_cast<double>(t));
    out.assign(count_, kNegInf);
    for (std::size_t j = 0; j < count_; ++j) {
      const double from_others = log_sub_exp(total, adj[j]);
      out[j] = log_add_exp(adj[j] + stay,
                           regions_[j] * penalty_log_ - lt + from_others);
    }
  }

 private:
  double prior_of(std::size_t i) const {
    return std::exp(regions_[i] * penalty_log_) / penalty_total_;
  }

  // Raw (sub-stochastic) row mass: (1-1/t) + (1/t)(S - pen(c_i)).
  double row_sum_raw(std::size_t i, int t) const {
    const double stay = t > 1 ? 1.0 - 1.0 / t : 0.0;
    return stay +
           (penalty_total_ - std::exp(regions_[i] * penalty_log_)) / t;
  }

  std::size_t count_ = 0;
  std::vector<std::size_t> pow_m_;
  std::vector<int> regions_;
  double penalty_log_ = 0.0;
  double penalty_total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Periodic: classes are (per-phase arm table G, period tau), tau <= max
// period. Index layout: classes of period tau occupy a contiguous block and
// encode G as a base-M number, so the length-p prefix of G is (value mod M^p).

class PeriodicKernel final : public Kernel {
 public:
  explicit PeriodicKernel(KernelSpec spec) : Kernel(spec) {
    if (spec.arms < 1 || spec.max_period < 1)
      throw std::invalid_argument("periodic kernel needs arms >= 1, max_period >= 1");
    offsets_.assign(spec.max_period + 2, 0);
    std::size_t block = 1;
    for (int tau = 1; tau <= spec.max_period; ++tau) {
      block *= spec.arms;
      offsets_[tau + 1] = offsets_[tau] + block;
      if (offsets_[tau + 1] > kClassSpaceCap)
        throw std::invalid_argument("periodic class space exceeds cap of 4096");
    }
    count_ = offsets_[spec.max_period + 1];
    log_2m_ = std::log(2.0 * spec.arms);
    // sum over all classes of (2M)^-tau, and the same restricted to
    // extensions of a period-tau class; both depend only on tau.
    all_mass_ = 1.0 - std::pow(2.0, -spec.max_period);
    ext_count_mass_.assign(spec.max_period + 1, 0.0);
    ext_weight_mass_.assign(spec.max_period + 1, 0.0);
    for (int tau = 1; tau <= spec.max_period; ++tau) {
      // sum_{tau' > tau} M^(tau'-tau) (2M)^(tau - tau') = 1 - 2^-(taub-tau)
      ext_weight_mass_[tau] = 1.0 - std::pow(2.0, -(spec.max_period - tau));
      // sum_{k: extension} (2M)^-tau_k = M^-tau (2^-tau - 2^-taub)
      ext_count_mass_[tau] = std::pow(static_cast<double>(spec.arms), -tau) *
                             (std::pow(2.0, -tau) - std::pow(2.0, -spec.max_period));
    }
  }

  std::size_t omega_size(int) const override { return count_; }

  ClassState class_at(std::size_t index) const override {
    const int tau = period_of(index);
    std::size_t r = index - offsets_[tau];
    ClassState s{KernelFamily::Periodic, -1, 0, {}};
    s.map.resize(tau);
    for (int i = 0; i < tau; ++i) {
      s.map[i] = static_cast<int>(r % spec_.arms);
      r /= spec_.arms;
    }
    return s;
  }

  std::size_t index_of(const ClassState& s) const override {
    const int tau = static_cast<int>(s.map.size());
    if (tau < 1 || tau > spec_.max_period)
      throw std::invalid_argument("period out of range");
    std::size_t r = 0, p = 1;
    for (int i = 0; i < tau; ++i) {
      check_arm_range(s.map[i], spec_.arms);
      r += static_cast<std::size_t>(s.map[i]) * p;
      p *= spec_.arms;
    }
    return offsets_[tau] + r;
  }

  std::vector<WeightedClass> initial_prior() const override {
    std::vector<WeightedClass> prior;
    for (std::size_t i = 0; i < count_; ++i)
      prior.push_back({class_at(i), initial_of(i)});
    return prior;
  }

  double initial_weight(const ClassState& s) const override {
    return initial_of(index_of(s));
  }

  std::vector<WeightedClass> transitions(const ClassState& s, int t) const override {
    const std::size_t self = index_of(s);
    const double norm = spec_.renormalize_rows ? row_sum_raw(self, t) : 1.0;
    std::vector<WeightedClass> row;
    for (std::size_t k = 0; k < count_; ++k) {
      const double w = step_weight(self, k, t);
      if (w > 0.0) row.push_back({class_at(k), w / norm});
    }
    return row;
  }

  double transition_weight(const ClassState& from, const ClassState& to,
                           int t) const override {
    const std::size_t i = index_of(from);
    const double norm = spec_.renormalize_rows ? row_sum_raw(i, t) : 1.0;
    return step_weight(i, index_of(to), t) / norm;
  }

  double row_sum(const ClassState& from, int t) const override {
    return spec_.renormalize_rows ? 1.0 : row_sum_raw(index_of(from), t);
  }

  int arm_of(const ClassState& s, int t, const SideInfo&) const override {
    const int tau = static_cast<int>(s.map.size());
    return s.map[(t - 1) % tau];
  }

  void arms_at(int t, const SideInfo&, std::span<int> out) const override {
    for (int tau = 1; tau <= spec_.max_period; ++tau) {
      const int phase = (t - 1) % tau;
      std::size_t p = 1;
      for (int i = 0; i < phase; ++i) p *= spec_.arms;
      for (std::size_t idx = offsets_[tau]; idx < offsets_[tau + 1]; ++idx)
        out[idx] = static_cast<int>(((idx - offsets_[tau]) / p) % spec_.arms);
    }
  }

  void advance(std::span<const double> log_z, int t,
               std::vector<double>& out) const override {
    std::vector<double> adj(log_z.begin(), log_z.end());
    if (spec_.renormalize_rows)
      for (std::size_t i = 0; i < count_; ++i)
        adj[i] -= std::log(row_sum_raw(i, t));
    const double total = log_sum_exp(adj);
    const double stay = t > 1 ? std::log1p(-1.0 / t) : kNegInf;
    const double l2t = -std::log(2.0 * t);
    out.assign(count_, kNegInf);
    for (std::size_t k = 0; k < count_; ++k) {
      const int tau_k = period_of(k);
      const std::size_t r = k - offsets_[tau_k];
      double acc = adj[k] + stay;
      // Mass that flows along the prefix chain of k.
      double own = adj[k];
      std::size_t mod = 1;
      for (int p = 1; p < tau_k; ++p) {
        mod *= spec_.arms;
        const std::size_t pref = offsets_[p] + (r % mod);
        acc = log_add_exp(acc, adj[pref] + l2t + (p - tau_k) * log_2m_);
        own = log_add_exp(own, adj[pref]);
      }
      // Everything that neither equals k nor prefixes it.
      const double rest = log_sub_exp(total, own);
      acc = log_add_exp(acc, l2t - tau_k * log_2m_ + rest);
      out[k] = acc;
    }
  }

 private:
  int period_of(std::size_t index) const {
    int tau = 1;
    while (index >= offsets_[tau + 1]) ++tau;
    return tau;
  }

  double initial_of(std::size_t i) const {
    return 0.5 * std::exp(-period_of(i) * log_2m_);
  }

  bool is_prefix(std::size_t i, int tau_i, std::size_t k, int tau_k) const {
    if (tau_i >= tau_k) return false;
    std::size_t mod = 1;
    for (int p = 0; p < tau_i; ++p) mod *= spec_.arms;
    return (k - offsets_[tau_k]) % mod == i - offsets_[tau_i];
  }

  double step_weight(std::size_t i, std::size_t k, int t) const {
    const int tau_i = period_of(i), tau_k = period_of(k);
    if (i == k) return t > 1 ? 1.0 - 1.0 / t : 0.0;
    if (is_prefix(i, tau_i, k, tau_k))
      return std::exp((tau_i - tau_k) * log_2m_) / (2.0 * t);
    return std::exp(-tau_k * log_2m_) / (2.0 * t);
  }

  double row_sum_raw(std::size_t i, int t) const {
    const int tau = period_of(i);
    const double stay = t > 1 ? 1.0 - 1.0 / t : 0.0;
    const double others =
        all_mass_ - std::exp(-tau * log_2m_) - ext_count_mass_[tau];
    return stay + (ext_weight_mass_[tau] + others) / (2.0 * t);
  }

  std::size_t count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> ext_weight_mass_, ext_count_mass_;
  double log_2m_ = 0.0;
  double all_mass_ = 0.0;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::Fixed: return std::make_unique<FixedKernel>(spec);
    case KernelFamily::Switching: return std::make_unique<SwitchingKernel>(spec);
    case KernelFamily::Contextual: return std::make_unique<ContextualKernel>(spec);
    case KernelFamily::Periodic: return std::make_unique<PeriodicKernel>(spec);
  }
  throw std::invalid_argument("unknown kernel family");
}

}  // namespace gsa
