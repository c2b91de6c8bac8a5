#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsa/environments.hpp"
#include "gsa/harness.hpp"
#include "gsa/kernels.hpp"
#include "gsa/schedules.hpp"

namespace gsa {

// Carries every validation problem found in one pass.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct SweepSpec {
  std::string axis;  // one of: T, M, W, gap
  std::vector<double> values;
};

struct RunConfig {
  KernelSpec kernel;
  Mode mode = Mode::FullMinShift;
  bool budget_auto = true;
  double budget = 0.0;
  EnvSpec env;
  int horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<ComparatorSpec> comparators;
  std::string output_dir = "out";
  bool export_losses = false;
  std::optional<SweepSpec> sweep;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// A config resolved into live objects: kernel, environment, comparator paths,
// and the effective complexity budget ("auto" = the largest declared
// comparator complexity, which must be finite).
struct Experiment {
  RunConfig config;
  std::unique_ptr<Kernel> kernel;
  std::unique_ptr<LossModel> env;
  std::vector<ComparatorPath> comparators;
  std::vector<double> complexities;
  double budget = 0.0;
  int binding_comparator = -1;  // largest finite complexity, -1 if none
};

Experiment resolve(const RunConfig& config);

}  // namespace gsa
