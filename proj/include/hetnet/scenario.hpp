// Indoor / outdoor deployments and their channel realizations.
#ifndef HETNET_SCENARIO_HPP
#define HETNET_SCENARIO_HPP

#include "hetnet/channel.hpp"
#include "hetnet/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hetnet {

enum class Environment { Indoor, Outdoor };

const char* to_string(Environment env);
Environment environment_from_string(const std::string& name);

struct Preset {
  Environment environment = Environment::Indoor;
  double macro_radius_m = 1000.0;
  double phantom_radius_m = 50.0;
  double macro_power_dbm = 47.0;
  double phantom_power_dbm = 23.0;
  int macro_users = 10;
  int phantom_cells = 4;
  int users_per_phantom = 5;
  int subcarriers_f1 = 8;
  int subcarriers_f2 = 8;
  double bandwidth_hz = 180e3;
  int trials = 80;
  double ring_fraction = 0.5;   // phantom BS ring radius / macro radius
  PropagationParams propagation;

  static Preset indoor();
  static Preset outdoor();
  static Preset of(Environment env) { return env == Environment::Indoor ? indoor() : outdoor(); }

  /// Budgets from the BS powers, masks P_TH / N, noise over one subcarrier.
  NetworkConfig network(double r_min = 0.0) const;

  bool operator==(const Preset&) const = default;
};

struct Deployment {
  Preset preset;
  std::uint64_t seed = 0;
  std::vector<Eigen::Vector2d> base_stations;   // index = cell, macro at the origin
  std::vector<Eigen::Vector2d> users;           // global user index
  std::vector<int> user_cell;

  double distance(int cell, int user) const { return (base_stations[static_cast<std::size_t>(cell)] - users[static_cast<std::size_t>(user)]).norm(); }
};

/// Users around their serving BS with uniform angle and folded Gaussian
/// distance (sigma = R / 3) clamped to [d_min, R]; deterministic per seed.
Deployment generate(const Preset& preset, std::uint64_t seed);

/// Link type from transmitting cell to a user served by `rx_cell`.
LinkType link_type(int tx_cell, int rx_cell, Environment env);

/// Fresh shadowing per (BS, user) link, fading per link and subcarrier
/// (or per link when per_subcarrier_fading is off). F2 has no macro.
ChannelGains realize_gains(const Deployment& deployment, Band band, Rng& rng);

}  // namespace hetnet

#endif  // HETNET_SCENARIO_HPP
