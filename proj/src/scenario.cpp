#include "hetnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hetnet {

const char* to_string(Environment env) { return env == Environment::Indoor ? "indoor" : "outdoor"; }

Environment environment_from_string(const std::string& name) {
  if (name == "indoor") return Environment::Indoor;
  if (name == "outdoor") return Environment::Outdoor;
  throw std::invalid_argument("unknown preset '" + name + "' (expected indoor or outdoor)");
}

Preset Preset::indoor() { return Preset{}; }

Preset Preset::outdoor() {
  Preset p;
  p.environment = Environment::Outdoor;
  p.phantom_radius_m = 250.0;
  p.phantom_power_dbm = 30.0;
  return p;
}

NetworkConfig Preset::network(double r_min) const {
  return NetworkConfig::uniform(phantom_cells, macro_users, users_per_phantom, subcarriers_f1, subcarriers_f2,
                                dbm_to_watts(macro_power_dbm), dbm_to_watts(phantom_power_dbm),
                                noise_power(bandwidth_hz, propagation.noise_psd_dbm_hz), r_min);
}

namespace {

Eigen::Vector2d polar(double radius, double angle) { return {radius * std::cos(angle), radius * std::sin(angle)}; }

}  // namespace

Deployment generate(const Preset& preset, std::uint64_t seed) {
  if (preset.phantom_cells < 0 || preset.macro_users < 1 || preset.users_per_phantom < 1)
    throw std::invalid_argument("generate: invalid user or cell counts");
  if (preset.ring_fraction * preset.macro_radius_m + preset.phantom_radius_m > preset.macro_radius_m + 1e-9)
    throw std::invalid_argument("generate: phantom cells must lie inside the macro cell");

  Deployment d;
  d.preset = preset;
  d.seed = seed;
  d.base_stations.push_back(Eigen::Vector2d::Zero());
  const double ring = preset.ring_fraction * preset.macro_radius_m;
  for (int m = 0; m < preset.phantom_cells; ++m)
    d.base_stations.push_back(polar(ring, 2.0 * std::numbers::pi * m / preset.phantom_cells));

  Rng rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  auto place = [&](int cell, double radius) {
    std::normal_distribution<double> spread(0.0, radius / 3.0);
    while (true) {
      const double r = std::clamp(std::abs(spread(rng)), kMinLinkDistance, radius);
      const Eigen::Vector2d pos = d.base_stations[static_cast<std::size_t>(cell)] + polar(r, angle(rng));
      const bool clear = std::all_of(d.base_stations.begin(), d.base_stations.end(),
                                     [&](const Eigen::Vector2d& bs) { return (bs - pos).norm() >= kMinLinkDistance; });
      if (clear) {
        d.users.push_back(pos);
        d.user_cell.push_back(cell);
        return;
      }
    }
  };
  for (int k = 0; k < preset.macro_users; ++k) place(0, preset.macro_radius_m);
  for (int m = 1; m <= preset.phantom_cells; ++m)
    for (int k = 0; k < preset.users_per_phantom; ++k) place(m, preset.phantom_radius_m);
  return d;
}

LinkType link_type(int tx_cell, int rx_cell, Environment env) {
  if (tx_cell == 0) return rx_cell == 0 ? LinkType::MbsToMue : LinkType::MbsInterferingPue;
  if (rx_cell == 0) return LinkType::PbsInterferingMue;
  return env == Environment::Indoor ? LinkType::PbsToIndoorPue : LinkType::PbsToOutdoorPue;
}

ChannelGains realize_gains(const Deployment& deployment, Band band, Rng& rng) {
  const Preset& preset = deployment.preset;
  const int cells = static_cast<int>(deployment.base_stations.size());
  const int users = static_cast<int>(deployment.users.size());
  const int n = band == Band::F1 ? preset.subcarriers_f1 : preset.subcarriers_f2;
  const PropagationParams& prop = preset.propagation;

  ChannelGains gains(band, cells, users, n);
  for (int j = gains.first_transmitter(); j < cells; ++j) {
    for (int u = 0; u < users; ++u) {
      const LinkType link = link_type(j, deployment.user_cell[static_cast<std::size_t>(u)], preset.environment);
      const int rx = deployment.user_cell[static_cast<std::size_t>(u)];
      const bool cross_phantom = preset.environment == Environment::Indoor && j != 0 && rx != 0 && rx != j;
      const double loss = path_loss_db(link, deployment.distance(j, u), prop) +
                          (cross_phantom ? prop.cross_phantom_walls * prop.wall_loss_db : 0.0);
      const double shadow = draw_shadow_db(rng, prop);
      const double link_fade = prop.per_subcarrier_fading ? 0.0 : draw_fade(rng);
      for (int i = 0; i < n; ++i) {
        const double fade = prop.per_subcarrier_fading ? draw_fade(rng) : link_fade;
        gains.at(j, u, i) = gain_from_loss(loss, shadow, fade);
      }
    }
  }
  return gains;
}

}  // namespace hetnet
