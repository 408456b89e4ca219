// Run configuration: scenario overrides, solver settings and run controls in
// a sectioned key=value text format.
#ifndef HETNET_CONFIG_HPP
#define HETNET_CONFIG_HPP

#include "hetnet/montecarlo.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hetnet {

/// A value that is either absolute (nats) or a multiple of macro-only
/// capacity, written with an "x" suffix ("0.5x").
struct RateTarget {
  double value = 0.0;
  bool relative = false;

  bool operator==(const RateTarget&) const = default;
};

RateTarget parse_rate_target(std::string_view text);
std::string format_rate_target(const RateTarget& target);

struct SimConfig {
  Preset preset = Preset::indoor();
  f1::Options f1;
  f2::Options f2;
  RateTarget r_min;
  RateTarget rmin_max{1.1, true};      // sweep upper end
  int rmin_points = 12;
  std::vector<double> rmin_grid;       // explicit sweep grid; overrides max/points
  std::uint64_t seed = 1;
  int trials = 80;
  int validate_instances = 5;          // oracle instances per band
  std::string out = "out";

  ExperimentConfig experiment() const;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Lines of key=value (several per line may be separated by commas), optional
/// [scenario] / [solver] / [run] headers, '#' comments. "preset" resets the
/// scenario to that preset's defaults before any other key applies.
SimConfig parse_config(std::string_view text);

/// Sets one key as if it appeared in the config text ("preset" resets the
/// scenario). Does not validate.
void set_value(SimConfig& config, const std::string& key, std::string_view value);

/// Every key, grouped by section; parse_config(serialize(c)) reproduces c.
std::string serialize(const SimConfig& config);

/// Throws ConfigError naming the offending key.
void validate(const SimConfig& config);

/// FNV-1a 64 of the serialized form, as 16 hex digits.
std::string config_hash(const SimConfig& config);

bool operator==(const SimConfig& a, const SimConfig& b);

}  // namespace hetnet

#endif  // HETNET_CONFIG_HPP
