#include "hetnet/config.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace hetnet;

namespace {

std::string key_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config fills preset defaults", "[config]") {
  const SimConfig c = parse_config("preset=indoor, seed=42");
  CHECK(c.seed == 42);
  CHECK(c.preset == Preset::indoor());
  CHECK(c.trials == 80);
  CHECK(c.f2.max_iterations == 500);
  CHECK(c.f1.max_outer == 50);
  CHECK(c.r_min == RateTarget{});

  const SimConfig o = parse_config("[scenario]\npreset = outdoor\nmacro_users = 6  # fewer\n[run]\ntrials=3\n");
  CHECK(o.preset.environment == Environment::Outdoor);
  CHECK(o.preset.phantom_power_dbm == 30.0);
  CHECK(o.preset.macro_users == 6);
  CHECK(o.trials == 3);
}

TEST_CASE("config errors name the key", "[config]") {
  CHECK(key_of("fooo=1") == "fooo");
  CHECK(key_of("trials=abc") == "trials");
  CHECK(key_of("seed=1\nseed=2") == "seed");
  CHECK(key_of("[solver]\nseed=3") == "seed");
  CHECK(key_of("subcarriers_f1=0") == "subcarriers_f1");
  CHECK(key_of("r_min=-1") == "r_min");
  CHECK(key_of("preset=rural") == "preset");
  CHECK(key_of("[nowhere]\nseed=1") != "");
}

TEST_CASE("round trip", "[config]") {
  SimConfig c = parse_config("preset=outdoor, seed=9");
  c.r_min = {0.25, true};
  c.rmin_grid = {0.0, 1.5, 3.25};
  c.f2.step_scale = 0.1 + 0.2;
  c.preset.propagation.per_subcarrier_fading = false;
  c.out = "runs/a";
  const SimConfig back = parse_config(serialize(c));
  CHECK(back == c);
  CHECK(back.rmin_grid == c.rmin_grid);
  CHECK(back.f2.step_scale == c.f2.step_scale);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(back).size() == 16);
  c.seed = 10;
  CHECK(config_hash(back) != config_hash(c));
}

TEST_CASE("rate targets", "[config]") {
  CHECK(parse_rate_target("2x") == RateTarget{2.0, true});
  CHECK(parse_rate_target("3.5") == RateTarget{3.5, false});
  CHECK(format_rate_target({0.5, true}) == "0.5x");
  CHECK_THROWS(parse_rate_target("x"));
}

TEST_CASE("preset key resets scenario overrides", "[config]") {
  SimConfig c;
  set_value(c, "macro_users", "3");
  set_value(c, "trials", "7");
  set_value(c, "preset", "outdoor");
  CHECK(c.preset == Preset::outdoor());
  CHECK(c.trials == 7);
  CHECK_THROWS_AS(set_value(c, "nope", "1"), ConfigError);
}
