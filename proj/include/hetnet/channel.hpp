// Link budget: path loss per link type, log-normal shadowing and Rayleigh
// fading, combined into linear power gains.
#ifndef HETNET_CHANNEL_HPP
#define HETNET_CHANNEL_HPP

#include <cstdint>
#include <cmath>
#include <random>
#include <utility>

namespace hetnet {

using Rng = std::mt19937_64;

enum class LinkType { MbsToMue, MbsInterferingPue, PbsToIndoorPue, PbsToOutdoorPue, PbsInterferingMue };

inline constexpr int kLinkTypeCount = 5;
inline constexpr double kMinLinkDistance = 1.0;   // meters
inline constexpr double kMinFadeGain = 1e-30;

const char* to_string(LinkType link);

struct PropagationParams {
  double wall_loss_db = 10.0;
  double shadow_sigma_db = 10.0;          // standard deviation
  double noise_psd_dbm_hz = -174.0;
  bool per_subcarrier_fading = true;      // false: one fade per link
  int cross_phantom_walls = 2;            // wall losses on indoor links to another phantom cell's users

  bool operator==(const PropagationParams&) const = default;
};

/// Path loss in dB. Throws std::domain_error when d < kMinLinkDistance.
double path_loss_db(LinkType link, double distance_m, const PropagationParams& params = {});

struct LinkDraw {
  double shadow_db;
  double fade_gain;
};

double draw_shadow_db(Rng& rng, const PropagationParams& params);
double draw_fade(Rng& rng);
LinkDraw sample_link_randomness(Rng& rng, const PropagationParams& params = {});

/// fade * 10^((shadow - loss) / 10), with the fade clamped below at kMinFadeGain.
double gain_from_loss(double loss_db, double shadow_db, double fade_gain);
double composite_gain(LinkType link, double distance_m, double shadow_db, double fade_gain,
                      const PropagationParams& params = {});

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

/// Thermal noise over `bandwidth_hz` at the given PSD, in watts.
double noise_power(double bandwidth_hz, double psd_dbm_hz = -174.0);

}  // namespace hetnet

#endif  // HETNET_CHANNEL_HPP
