#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gsa {

enum class KernelFamily { Fixed, Switching, Contextual, Periodic };

std::string to_string(KernelFamily family);

// Side information a class may need to resolve its current arm.
struct SideInfo {
  int context = -1;  // 0-based, -1 when no context stream is present
};

// One comparator equivalence class. `arm`/`age` are used by the fixed and
// switching families; `map` is the context-to-arm table (contextual, size =
// context alphabet) or the per-phase arm table (periodic, size = period).
struct ClassState {
  KernelFamily family = KernelFamily::Fixed;
  int arm = -1;
  int age = 0;
  std::vector<int> map;

  bool operator==(const ClassState&) const = default;
};

std::string to_string(const ClassState& s);

struct WeightedClass {
  ClassState state;
  double weight = 0.0;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::Fixed;
  int arms = 1;
  int contexts = 0;    // contextual only
  int max_period = 0;  // periodic only
  bool renormalize_rows = false;
};

// Number of maximal runs of equal consecutive values in a mapping.
int region_count(std::span<const int> mapping);

// Comparator-class contract: initial prior over classes, per-round transition
// weights, current-arm resolution, and a dense indexing of the class set so
// weight tables can live in flat arrays.
//
// Class indices are stable across rounds; only the switching family has a
// round-dependent class count (ages 1..t are reachable at round t).
class Kernel {
 public:
  explicit Kernel(KernelSpec spec) : spec_(spec) {}
  virtual ~Kernel() = default;

  const KernelSpec& spec() const { return spec_; }
  int arms() const { return spec_.arms; }

  virtual std::size_t omega_size(int t) const = 0;
  virtual ClassState class_at(std::size_t index) const = 0;
  virtual std::size_t index_of(const ClassState& state) const = 0;

  virtual std::vector<WeightedClass> initial_prior() const = 0;
  virtual double initial_weight(const ClassState& state) const = 0;

  // Successors of `state` with positive weight at round t. Weights sum to 1
  // exactly for fixed/switching, to <= 1 otherwise (or to 1 when
  // renormalize_rows is set).
  virtual std::vector<WeightedClass> transitions(const ClassState& state,
                                                 int t) const = 0;
  virtual double transition_weight(const ClassState& from,
                                   const ClassState& to, int t) const = 0;
  virtual double row_sum(const ClassState& from, int t) const = 0;

  virtual int arm_of(const ClassState& state, int t,
                     const SideInfo& side = {}) const = 0;

  // Arm played by every class index at round t; out.size() == omega_size(t).
  virtual void arms_at(int t, const SideInfo& side, std::span<int> out) const = 0;

  // Mass sharing step: out[j] = log sum_i T(j|i; t) exp(log_z[i]), with
  // log_z over Omega_t and out over Omega_{t+1}. Log-domain throughout.
  virtual void advance(std::span<const double> log_z, int t,
                       std::vector<double>& out) const = 0;

 protected:
  KernelSpec spec_;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec);

}  // namespace gsa
