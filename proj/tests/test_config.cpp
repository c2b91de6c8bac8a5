#include <cmath>

#include "doctest.h"
#include "gsa/config.hpp"
#include "gsa/logsum.hpp"

using namespace gsa;

namespace {

const char* kMinimal = R"({
  "kernel": {"family": "fixed", "arms": 3},
  "mode": "full_minshift",
  "w_budget": 2.5,
  "environment": {"family": "fixed_gap", "gap": 1.0},
  "T": 32
})";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config parses with defaults") {
  const RunConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.kernel.family == KernelFamily::Fixed);
  CHECK(cfg.kernel.arms == 3);
  CHECK(cfg.env.arms == 3);
  CHECK(cfg.horizon == 32);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
  CHECK(cfg.output_dir == "out");
  CHECK(!cfg.budget_auto);
  CHECK(cfg.budget == doctest::Approx(2.5));
  const Experiment exp = resolve(cfg);
  CHECK(exp.budget == doctest::Approx(2.5));
  CHECK(exp.comparators.empty());
}

TEST_CASE("a zero max period is rejected") {
  const char* text = R"({
    "kernel": {"family": "periodic", "arms": 2, "max_period": 0},
    "w_budget": 1.0,
    "environment": {"family": "fixed_gap"},
    "T": 8
  })";
  CHECK_THROWS_AS(parse_config_text(text), ConfigError);
}

TEST_CASE("auto budget with an unrepresentable comparator is an error") {
  const char* text = R"({
    "kernel": {"family": "fixed", "arms": 2},
    "w_budget": "auto",
    "environment": {"family": "switching", "switch_times": [5]},
    "T": 10,
    "comparators": [
      {"id": "track", "type": "switching_schedule", "schedule": [[1, 1], [5, 2]]}
    ]
  })";
  const RunConfig cfg = parse_config_text(text);
  try {
    resolve(cfg);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("not representable") != std::string::npos);
  }
}

TEST_CASE("auto budget equals the largest comparator complexity") {
  const char* text = R"({
    "kernel": {"family": "switching", "arms": 2},
    "w_budget": "auto",
    "environment": {"family": "switching", "switch_times": [5]},
    "T": 10,
    "comparators": [
      {"id": "fixed1", "type": "fixed_arm", "arm": 1},
      {"id": "track", "type": "switching_schedule", "schedule": [[1, 1], [5, 2]]}
    ]
  })";
  const Experiment exp = resolve(parse_config_text(text));
  CHECK(exp.binding_comparator == 1);
  CHECK(exp.budget ==
        doctest::Approx(std::max(exp.complexities[0], exp.complexities[1])));
  CHECK(std::isfinite(exp.budget));
}

TEST_CASE("a declared budget below a comparator complexity is rejected") {
  const char* text = R"({
    "kernel": {"family": "fixed", "arms": 4},
    "w_budget": 0.5,
    "environment": {"family": "fixed_gap"},
    "T": 16,
    "comparators": [{"id": "best", "type": "fixed_arm", "arm": 1}]
  })";
  CHECK_THROWS_AS(resolve(parse_config_text(text)), ConfigError);
}

TEST_CASE("every validation problem is reported at once") {
  const char* text = R"({
    "kernel": {"family": "nope", "arms": 0},
    "mode": "sideways",
    "environment": {"family": "mystery", "arms": 9},
    "T": 0
  })";
  try {
    parse_config_text(text);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.errors().size() >= 4);
  }
}

TEST_CASE("arm count mismatches between kernel and environment are rejected") {
  const char* text = R"({
    "kernel": {"family": "fixed", "arms": 3},
    "w_budget": 3.0,
    "environment": {"family": "fixed_gap", "arms": 4},
    "T": 8
  })";
  CHECK_THROWS_AS(parse_config_text(text), ConfigError);
}

TEST_CASE("arms and contexts are one-based in files") {
  const char* text = R"({
    "kernel": {"family": "contextual", "arms": 2, "contexts": 2},
    "w_budget": "auto",
    "environment": {"family": "contextual"},
    "T": 12,
    "comparators": [{"id": "map", "type": "mapping", "map": [1, 2]}]
  })";
  const Experiment exp = resolve(parse_config_text(text));
  CHECK(exp.comparators[0].arms[0] == 0);
  CHECK(exp.comparators[0].arms[1] == 1);
  CHECK(std::isfinite(exp.budget));
}

TEST_CASE("sweep section") {
  const char* text = R"({
    "kernel": {"family": "fixed", "arms": 2},
    "w_budget": 2.0,
    "environment": {"family": "fixed_gap"},
    "T": 8,
    "sweep": {"axis": "gap", "values": [0.5, 1.0, 2.0]}
  })";
  const RunConfig cfg = parse_config_text(text);
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->axis == "gap");
  CHECK(cfg.sweep->values.size() == 3);

  const char* bad = R"({
    "kernel": {"family": "fixed", "arms": 2},
    "w_budget": 2.0,
    "environment": {"family": "fixed_gap"},
    "T": 8,
    "sweep": {"axis": "nonsense", "values": [1]}
  })";
  CHECK_THROWS_AS(parse_config_text(bad), ConfigError);
}

TEST_CASE("malformed JSON is reported as such") {
  CHECK_THROWS_AS(parse_config_text("{ not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/path.json"), ConfigError);
}

}  // TEST_SUITE
