#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gsa/config.hpp"
#include "gsa/harness.hpp"
#include "gsa/verify.hpp"

namespace {

using namespace gsa;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAudit = 2;

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CommonOpts {
  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = -1;
  int parallel = 1;
  bool strict = false;
};

RunConfig load(const CommonOpts& opts) {
  RunConfig cfg = parse_config(opts.config_path);
  if (!opts.out_override.empty()) cfg.output_dir = opts.out_override;
  if (opts.seed_override >= 0)
    cfg.seeds = {static_cast<std::uint64_t>(opts.seed_override)};
  return cfg;
}

void write_ledger_csv(const std::filesystem::path& path, const RegretLedger& ledger) {
  std::ofstream out(path);
  out << "t,arm,eta,eps,exp_loss";
  for (const auto& id : ledger.comparator_ids) out << ",regret_" << id;
  out << "\n";
  for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
    const auto& row = ledger.rows[i];
    out << row.t << ',' << row.arm + 1 << ',' << fmt12(row.eta) << ','
        << fmt12(row.eps) << ',' << fmt12(row.exp_loss);
    for (const auto& series : ledger.comparator_cum) out << ',' << fmt12(series[i]);
    out << "\n";
  }
}

void write_losses_csv(const std::filesystem::path& path, const LossModel& env) {
  std::ofstream out(path);
  out << "t,m,loss\n";
  std::vector<double> losses(env.arms());
  for (int t = 1; t <= env.horizon(); ++t) {
    env.losses_at(t, losses);
    for (int m = 0; m < env.arms(); ++m)
      out << t << ',' << m + 1 << ',' << fmt12(losses[m]) << "\n";
  }
}

std::vector<BoundId> bounds_for(Mode mode) {
  switch (mode) {
    case Mode::FullCentered: return {BoundId::Thm11, BoundId::CorFull};
    case Mode::FullMinShift: return {BoundId::Thm12, BoundId::CorFull};
    case Mode::Bandit: return {BoundId::Thm21, BoundId::CorBandit};
  }
  return {};
}

RegretLedger run_seed(const Experiment& exp, std::uint64_t seed, bool strict,
                      bool want_rows) {
  EpisodeConfig cfg;
  cfg.kernel = exp.kernel.get();
  cfg.mode = exp.config.mode;
  cfg.env = exp.env.get();
  cfg.budget = exp.budget;
  cfg.horizon = exp.config.horizon;
  cfg.seed = seed;
  cfg.comparators = &exp.comparators;
  cfg.record.rows = want_rows;
  cfg.strict_audits = strict;
  return run_episode(cfg);
}

int cmd_run(const CommonOpts& opts) {
  const RunConfig cfg = load(opts);
  const Experiment exp = resolve(cfg);
  std::filesystem::create_directories(cfg.output_dir);

  std::cout << "kernel " << to_string(cfg.kernel.family) << " arms "
            << cfg.kernel.arms << ", mode " << to_string(cfg.mode)
            << ", T " << cfg.horizon << ", budget " << fmt12(exp.budget)
            << (cfg.budget_auto ? " (auto)" : "") << "\n";

  std::vector<RegretLedger> ledgers;
  for (std::uint64_t seed : cfg.seeds) {
    ledgers.push_back(run_seed(exp, seed, opts.strict, true));
    write_ledger_csv(std::filesystem::path(cfg.output_dir) /
                         ("ledger_seed" + std::to_string(seed) + ".csv"),
                     ledgers.back());
  }
  if (cfg.export_losses)
    write_losses_csv(std::filesystem::path(cfg.output_dir) / "losses.csv",
                     *exp.env);

  AuditCounters audit;
  for (const auto& ledger : ledgers) audit.merge(ledger.audit);

  nlohmann::json report;
  {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    report["generated_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now).count();
  }
  report["mode"] = to_string(cfg.mode);
  report["budget"] = exp.budget;
  report["audit_violations"] = audit.total();
  report["reports"] = nlohmann::json::array();

  std::cout << "seed  exp_loss";
  for (const auto& id : (ledgers.empty() ? std::vector<std::string>{}
                                         : ledgers.front().comparator_ids))
    std::cout << "  regret_" << id;
  std::cout << "\n";
  for (const auto& ledger : ledgers) {
    std::cout << ledger.seed << "  " << fmt12(ledger.total_expected_loss);
    for (double r : ledger.final_regret) std::cout << "  " << fmt12(r);
    std::cout << "\n";
  }

  if (exp.binding_comparator >= 0) {
    double mean_regret = 0.0;
    for (const auto& ledger : ledgers)
      mean_regret += ledger.final_regret[exp.binding_comparator];
    mean_regret /= ledgers.size();
    const RangeStats ranges = exp.env->ranges();
    for (BoundId id : bounds_for(cfg.mode)) {
      const BoundValue value = bound_rhs(id, exp.budget, cfg.kernel.arms,
                                         cfg.horizon, ranges);
      nlohmann::json entry;
      entry["bound_id"] = to_string(id);
      entry["comparator"] = exp.comparators[exp.binding_comparator].id;
      entry["rhs"] = value.rhs;
      entry["regret"] = mean_regret;
      entry["slack"] = value.rhs - mean_regret;
      entry["terms"] = {{"sqrt", value.term_sqrt},
                        {"log", value.term_log},
                        {"ranges", value.term_ranges},
                        {"zeroth", value.term_zeroth}};
      report["reports"].push_back(entry);
      std::cout << to_string(id) << ": rhs " << fmt12(value.rhs) << ", regret "
                << fmt12(mean_regret) << ", slack "
                << fmt12(value.rhs - mean_regret) << "\n";
    }
  }
  std::ofstream(std::filesystem::path(cfg.output_dir) / "bounds.json")
      << report.dump(2) << "\n";

  if (audit.total() > 0) {
    std::cout << "assumption audit violations: " << audit.total() << " (first at round "
              << audit.first_round << ": " << audit.first_what << ")\n";
    return kExitAudit;
  }
  return kExitOk;
}

KernelSpec desk_scale(const KernelSpec& spec) {
  KernelSpec out = spec;
  out.arms = std::min(spec.arms, spec.family == KernelFamily::Contextual ||
                                         spec.family == KernelFamily::Periodic
                                     ? 2
                                     : 3);
  if (out.family == KernelFamily::Switching) out.arms = std::max(out.arms, 2);
  if (out.family == KernelFamily::Contextual) out.contexts = std::min(spec.contexts, 2);
  if (out.family == KernelFamily::Periodic) out.max_period = std::min(spec.max_period, 2);
  return out;
}

int cmd_verify(const CommonOpts& opts) {
  const RunConfig cfg = load(opts);
  const Experiment exp = resolve(cfg);
  bool all_ok = true;
  auto suite = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
    all_ok = all_ok && ok;
  };

  {
    const KernelSpec desk = desk_scale(cfg.kernel);
    const auto kernel = make_kernel(desk);
    const OracleCheck check =
        oracle_equivalence_check(*kernel, cfg.mode, 1.0, 8, 1);
    suite("oracle-equivalence", check.max_abs_err <= 1e-9,
          "max |p - oracle| = " + fmt12(check.max_abs_err));
  }
  {
    const int horizon = std::min(cfg.horizon, 300);
    AffineCheck worst;
    for (const auto& [a, b] : {std::pair{3.0, 7.0}, std::pair{0.1, -5.0}}) {
      const AffineCheck check = affine_invariance_check(
          cfg.kernel, cfg.mode, exp.config.env, exp.budget, horizon,
          cfg.seeds.front(), cfg.comparators, a, b);
      worst.arms_identical = worst.arms_identical && check.arms_identical;
      worst.max_q_err = std::max(worst.max_q_err, check.max_q_err);
      worst.max_regret_rel_err =
          std::max(worst.max_regret_rel_err, check.max_regret_rel_err);
    }
    suite("affine-invariance",
          worst.arms_identical && worst.max_q_err <= 1e-10 &&
              worst.max_regret_rel_err <= 1e-9,
          "arms identical = " + std::string(worst.arms_identical ? "yes" : "no") +
              ", max |dq| = " + fmt12(worst.max_q_err) +
              ", regret rel err = " + fmt12(worst.max_regret_rel_err));
  }
  {
    const SimplexCheck check =
        simplex_check(exp, std::min(cfg.horizon, 2000), cfg.seeds.front());
    suite("simplex", check.max_sum_err <= 1e-12 &&
                         check.worst_floor_gap >= -1e-15 &&
                         check.audit.q_floor == 0,
          "max |sum q - 1| = " + fmt12(check.max_sum_err));
  }
  {
    const MonotoneEtaCheck check =
        monotone_eta_check(exp, std::min(cfg.horizon, 2000), cfg.seeds.front());
    suite("monotone-eta", check.nonincreasing,
          check.nonincreasing
              ? "rates nonincreasing"
              : "rate increased at round " + std::to_string(check.first_bad_round));
  }
  return all_ok ? kExitOk : kExitAudit;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis_flag) {
  RunConfig base = load(opts);
  if (!base.sweep && axis_flag.empty())
    throw ConfigError({"sweep needs a 'sweep' section or --axis with --values"});
  const SweepSpec sweep = base.sweep ? *base.sweep : SweepSpec{axis_flag, {}};

  struct Point {
    double value = 0.0;
    double mean_regret = 0.0, rhs = 0.0;
    std::string error;
  };
  auto run_point = [&](double value) {
    Point point;
    point.value = value;
    try {
      RunConfig cfg = base;
      cfg.sweep.reset();
      if (sweep.axis == "T") {
        cfg.horizon = static_cast<int>(value);
        cfg.env.horizon = cfg.horizon;
      } else if (sweep.axis == "M") {
        cfg.kernel.arms = static_cast<int>(value);
        cfg.env.arms = cfg.kernel.arms;
      } else if (sweep.axis == "W") {
        cfg.budget_auto = false;
        cfg.budget = value;
      } else {
        cfg.env.gap = value;
      }
      const Experiment exp = resolve(cfg);
      if (exp.binding_comparator < 0)
        throw ConfigError({"sweep needs at least one representable comparator"});
      double mean = 0.0;
      for (std::uint64_t seed : cfg.seeds)
        mean += run_seed(exp, seed, opts.strict, false)
                    .final_regret[exp.binding_comparator];
      point.mean_regret = mean / cfg.seeds.size();
      point.rhs = bound_rhs(bounds_for(cfg.mode).front(), exp.budget,
                            cfg.kernel.arms, cfg.horizon, exp.env->ranges())
                      .rhs;
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    return point;
  };

  std::vector<Point> points(sweep.values.size());
  const int workers = std::max(1, opts.parallel);
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> futures;
  for (int w = 0; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < sweep.values.size(); i = next++)
        points[i] = run_point(sweep.values[i]);
    }));
  for (auto& f : futures) f.get();

  std::filesystem::create_directories(base.output_dir);
  std::ofstream csv(std::filesystem::path(base.output_dir) / "sweep.csv");
  csv << sweep.axis << ",mean_regret,bound_rhs,slack\n";
  bool any_error = false;
  for (const auto& point : points) {
    if (!point.error.empty()) {
      std::cerr << sweep.axis << " = " << fmt12(point.value) << ": "
                << point.error << "\n";
      any_error = true;
      continue;
    }
    csv << fmt12(point.value) << ',' << fmt12(point.mean_regret) << ','
        << fmt12(point.rhs) << ',' << fmt12(point.rhs - point.mean_regret)
        << "\n";
    std::cout << sweep.axis << " = " << fmt12(point.value) << ": regret "
              << fmt12(point.mean_regret) << ", rhs " << fmt12(point.rhs)
              << "\n";
  }
  return any_error ? kExitConfig : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized selection algorithm runner"};
  app.require_subcommand(1);
  CommonOpts opts;
  std::string axis_flag;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "run-config JSON file")
        ->required();
    cmd->add_option("--out", opts.out_override, "output directory override");
    cmd->add_option("--seed-override", opts.seed_override,
                    "replace the config seed list with one seed");
    cmd->add_option("--parallel", opts.parallel, "worker threads for sweeps");
    cmd->add_flag("--strict-assumptions", opts.strict,
                  "abort runs on the first assumption-audit violation");
  };

  CLI::App* run = app.add_subcommand("run", "run episodes and write ledgers");
  add_common(run);
  CLI::App* verify =
      app.add_subcommand("verify", "desk-scale correctness suites");
  add_common(verify);
  CLI::App* sweep = app.add_subcommand("sweep", "grid of runs along one axis");
  add_common(sweep);
  sweep->add_option("--axis", axis_flag, "sweep axis when absent from config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opts);
    if (verify->parsed()) return cmd_verify(opts);
    return cmd_sweep(opts, axis_flag);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAudit;
  }
}
