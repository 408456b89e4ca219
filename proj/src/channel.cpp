#include "hetnet/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hetnet {

const char* to_string(LinkType link) {
  switch (link) {
    case LinkType::MbsToMue: return "MbsToMue";
    case LinkType::MbsInterferingPue: return "MbsInterferingPue";
    case LinkType::PbsToIndoorPue: return "PbsToIndoorPue";
    case LinkType::PbsToOutdoorPue: return "PbsToOutdoorPue";
    case LinkType::PbsInterferingMue: return "PbsInterferingMue";
  }
  return "?";
}

double path_loss_db(LinkType link, double distance_m, const PropagationParams& params) {
  if (!std::isfinite(distance_m) || distance_m < kMinLinkDistance)
    throw std::domain_error("path_loss_db: distance below " + std::to_string(kMinLinkDistance) + " m");
  const double lg = std::log10(distance_m);
  switch (link) {
    case LinkType::MbsToMue: return 15.3 + 37.6 * lg;
    case LinkType::MbsInterferingPue: return 15.3 + 37.6 * lg + params.wall_loss_db;
    case LinkType::PbsToIndoorPue: return 38.46 + 20.0 * lg;
    case LinkType::PbsToOutdoorPue: return 15.3 + 37.6 * lg;
    case LinkType::PbsInterferingMue: return 38.46 + 20.0 * lg + params.wall_loss_db;
  }
  throw std::domain_error("path_loss_db: unknown link type");
}

double draw_shadow_db(Rng& rng, const PropagationParams& params) {
  if (params.shadow_sigma_db == 0.0) return 0.0;
  std::normal_distribution<double> shadow(0.0, params.shadow_sigma_db);
  return shadow(rng);
}

double draw_fade(Rng& rng) {
  std::exponential_distribution<double> fade(1.0);
  return fade(rng);
}

LinkDraw sample_link_randomness(Rng& rng, const PropagationParams& params) {
  const double shadow = draw_shadow_db(rng, params);
  return {shadow, draw_fade(rng)};
}

double gain_from_loss(double loss_db, double shadow_db, double fade_gain) {
  return std::max(fade_gain, kMinFadeGain) * std::pow(10.0, (shadow_db - loss_db) / 10.0);
}

double composite_gain(LinkType link, double distance_m, double shadow_db, double fade_gain,
                      const PropagationParams& params) {
  return gain_from_loss(path_loss_db(link, distance_m, params), shadow_db, fade_gain);
}

double noise_power(double bandwidth_hz, double psd_dbm_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("noise_power: bandwidth must be > 0");
  return dbm_to_watts(psd_dbm_hz + 10.0 * std::log10(bandwidth_hz));
}

}  // namespace hetnet
