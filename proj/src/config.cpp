#include "gsa/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gsa/logsum.hpp"

namespace gsa {
namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& parts) {
  std::string out = "invalid configuration:";
  for (const auto& p : parts) out += "\n  - " + p;
  return out;
}

struct Collector {
  std::vector<std::string> errors;
  void add(const std::string& msg) { errors.push_back(msg); }
};

std::optional<KernelFamily> kernel_family_of(const std::string& name) {
  if (name == "fixed") return KernelFamily::Fixed;
  if (name == "switching") return KernelFamily::Switching;
  if (name == "contextual") return KernelFamily::Contextual;
  if (name == "periodic") return KernelFamily::Periodic;
  return std::nullopt;
}

std::optional<EnvFamily> env_family_of(const std::string& name) {
  if (name == "fixed_gap") return EnvFamily::FixedGap;
  if (name == "switching") return EnvFamily::Switching;
  if (name == "contextual") return EnvFamily::Contextual;
  if (name == "periodic") return EnvFamily::Periodic;
  if (name == "drifting_scale") return EnvFamily::DriftingScale;
  return std::nullopt;
}

std::optional<Mode> mode_of(const std::string& name) {
  if (name == "full_centered") return Mode::FullCentered;
  if (name == "full_minshift") return Mode::FullMinShift;
  if (name == "bandit") return Mode::Bandit;
  return std::nullopt;
}

// 1-based arms in files, 0-based in memory.
std::vector<int> to_internal_arms(const json& arr) {
  std::vector<int> out;
  for (const auto& v : arr) out.push_back(v.get<int>() - 1);
  return out;
}

ComparatorSpec parse_comparator(const json& j, std::size_t index, Collector& errs) {
  ComparatorSpec spec;
  spec.id = j.value("id", "comparator_" + std::to_string(index + 1));
  const std::string type = j.value("type", "");
  if (type == "fixed_arm") {
    spec.type = ComparatorType::FixedArm;
    spec.arm = j.value("arm", 1) - 1;
  } else if (type == "arm_sequence") {
    spec.type = ComparatorType::ArmSequence;
    if (j.contains("arms")) spec.arms = to_internal_arms(j.at("arms"));
    else errs.add("comparator '" + spec.id + "': arm_sequence needs 'arms'");
  } else if (type == "switching_schedule") {
    spec.type = ComparatorType::SwitchingSchedule;
    if (j.contains("schedule")) {
      for (const auto& entry : j.at("schedule"))
        spec.schedule.emplace_back(entry.at(0).get<int>(),
                                   entry.at(1).get<int>() - 1);
    } else {
      errs.add("comparator '" + spec.id + "': switching_schedule needs 'schedule'");
    }
  } else if (type == "mapping") {
    spec.type = ComparatorType::Mapping;
    if (j.contains("map")) spec.map = to_internal_arms(j.at("map"));
    else errs.add("comparator '" + spec.id + "': mapping needs 'map'");
  } else if (type == "period_mapping") {
    spec.type = ComparatorType::PeriodMapping;
    if (j.contains("map")) spec.map = to_internal_arms(j.at("map"));
    else errs.add("comparator '" + spec.id + "': period_mapping needs 'map'");
  } else {
    errs.add("comparator '" + spec.id + "': unknown type '" + type + "'");
  }
  return spec;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }

  Collector errs;
  RunConfig cfg;

  if (!root.contains("kernel")) {
    errs.add("missing 'kernel' section");
  } else {
    const auto& k = root.at("kernel");
    const std::string fam = k.value("family", "");
    if (auto f = kernel_family_of(fam)) cfg.kernel.family = *f;
    else errs.add("unknown kernel family '" + fam + "'");
    cfg.kernel.arms = k.value("arms", 0);
    cfg.kernel.contexts = k.value("contexts", 0);
    cfg.kernel.max_period = k.value("max_period", 0);
    cfg.kernel.renormalize_rows = k.value("renormalize_rows", false);
    if (cfg.kernel.arms < 1) errs.add("kernel needs arms >= 1");
    if (cfg.kernel.family == KernelFamily::Switching && cfg.kernel.arms < 2)
      errs.add("switching kernel needs arms >= 2");
    if (cfg.kernel.family == KernelFamily::Contextual && cfg.kernel.contexts < 1)
      errs.add("contextual kernel needs contexts >= 1");
    if (cfg.kernel.family == KernelFamily::Periodic && cfg.kernel.max_period < 1)
      errs.add("periodic kernel needs max_period >= 1");
  }

  const std::string mode_name = root.value("mode", "full_minshift");
  if (auto m = mode_of(mode_name)) cfg.mode = *m;
  else errs.add("unknown mode '" + mode_name + "'");

  cfg.horizon = root.value("T", 0);
  if (cfg.horizon < 1) errs.add("T must be >= 1");

  if (root.contains("w_budget") && root.at("w_budget").is_number()) {
    cfg.budget_auto = false;
    cfg.budget = root.at("w_budget").get<double>();
    if (!(cfg.budget >= 0.0)) errs.add("w_budget must be >= 0");
  } else if (root.contains("w_budget") && root.at("w_budget") != json("auto")) {
    errs.add("w_budget must be a number or \"auto\"");
  }

  if (!root.contains("environment")) {
    errs.add("missing 'environment' section");
  } else {
    const auto& e = root.at("environment");
    const std::string fam = e.value("family", "");
    if (auto f = env_family_of(fam)) cfg.env.family = *f;
    else errs.add("unknown environment family '" + fam + "'");
    cfg.env.arms = e.value("arms", cfg.kernel.arms);
    if (cfg.env.arms != cfg.kernel.arms)
      errs.add("environment and kernel arm counts differ");
    cfg.env.horizon = cfg.horizon;
    cfg.env.gap = e.value("gap", 1.0);
    cfg.env.contexts = e.value("contexts", cfg.kernel.family == KernelFamily::Contextual
                                               ? cfg.kernel.contexts
                                               : 0);
    cfg.env.period = e.value("period", 0);
    cfg.env.scale_end = e.value("scale_end", 1.0);
    cfg.env.seed = e.value("seed", 0);
    if (e.contains("switch_times"))
      for (const auto& v : e.at("switch_times")) cfg.env.switch_times.push_back(v.get<int>());
    if (e.contains("affine")) {
      cfg.env.affine_a = e.at("affine").value("a", 1.0);
      cfg.env.affine_b = e.at("affine").value("b", 0.0);
    }
    if (cfg.kernel.family == KernelFamily::Contextual &&
        cfg.env.family == EnvFamily::Contextual &&
        cfg.env.contexts != cfg.kernel.contexts)
      errs.add("environment and kernel context alphabets differ");
  }

  if (root.contains("seeds")) {
    for (const auto& v : root.at("seeds")) cfg.seeds.push_back(v.get<std::uint64_t>());
    if (cfg.seeds.empty()) errs.add("seed list must be nonempty");
  } else {
    cfg.seeds = {1};
  }

  if (root.contains("comparators"))
    for (std::size_t i = 0; i < root.at("comparators").size(); ++i)
      cfg.comparators.push_back(parse_comparator(root.at("comparators")[i], i, errs));
  if (cfg.budget_auto && cfg.comparators.empty())
    errs.add("w_budget \"auto\" needs at least one comparator");

  cfg.output_dir = root.value("output_dir", "out");
  cfg.export_losses = root.value("export_losses", false);

  if (root.contains("sweep")) {
    SweepSpec sweep;
    sweep.axis = root.at("sweep").value("axis", "");
    if (sweep.axis != "T" && sweep.axis != "M" && sweep.axis != "W" &&
        sweep.axis != "gap")
      errs.add("sweep axis must be one of T, M, W, gap");
    if (root.at("sweep").contains("values"))
      for (const auto& v : root.at("sweep").at("values"))
        sweep.values.push_back(v.get<double>());
    if (sweep.values.empty()) errs.add("sweep needs a nonempty value list");
    cfg.sweep = sweep;
  }

  if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Experiment resolve(const RunConfig& config) {
  Experiment exp;
  exp.config = config;
  Collector errs;
  try {
    exp.kernel = make_kernel(config.kernel);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("kernel: ") + e.what()});
  }
  try {
    exp.env = std::make_unique<LossModel>(config.env);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("environment: ") + e.what()});
  }

  for (const auto& spec : config.comparators) {
    try {
      exp.comparators.push_back(
          build_comparator_path(*exp.kernel, spec, *exp.env, config.horizon));
      exp.complexities.push_back(
          path_complexity(*exp.kernel, exp.comparators.back(), config.horizon));
    } catch (const std::exception& e) {
      errs.add(e.what());
      exp.comparators.push_back(ComparatorPath{spec.id, {}, {}});
      exp.complexities.push_back(kInf);
    }
  }
  if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));

  double max_complexity = -kInf;
  for (std::size_t i = 0; i < exp.complexities.size(); ++i) {
    if (std::isfinite(exp.complexities[i]) && exp.complexities[i] > max_complexity) {
      max_complexity = exp.complexities[i];
      exp.binding_comparator = static_cast<int>(i);
    }
  }

  if (config.budget_auto) {
    for (std::size_t i = 0; i < exp.complexities.size(); ++i)
      if (!std::isfinite(exp.complexities[i]))
        errs.add("comparator '" + config.comparators[i].id +
                 "' not representable under the " +
                 to_string(config.kernel.family) + " kernel");
    if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));
    exp.budget = max_complexity;
  } else {
    exp.budget = config.budget;
    for (std::size_t i = 0; i < exp.complexities.size(); ++i)
      if (std::isfinite(exp.complexities[i]) &&
          exp.complexities[i] > exp.budget * (1.0 + 1e-12))
        errs.add("comparator '" + config.comparators[i].id +
                 "' has complexity above the declared w_budget");
    if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));
  }
  return exp;
}

}  // namespace gsa
