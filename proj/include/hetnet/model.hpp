// Core domain types and the rate / interference primitives shared by every
// allocator. Rates are in nats per channel use; powers and gains are linear.
#ifndef HETNET_MODEL_HPP
#define HETNET_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

enum class Band { F1, F2 };

std::string to_string(Band band);

/// Absolute slack on watts used by every budget / mask check.
inline constexpr double kPowerTolerance = 1e-9;
/// Relative slack on rates.
inline constexpr double kRateTolerance = 1e-9;

/// Cell 0 is the macrocell, cells 1..M are phantom cells. Users are indexed
/// globally (macro users first, then each phantom cell's users in order);
/// `local` user indices count from zero inside their own cell.
struct NetworkConfig {
  int phantom_cells = 0;
  std::vector<int> users;       // K_0 .. K_M
  int subcarriers_f1 = 1;
  int subcarriers_f2 = 1;
  Eigen::VectorXd budget;       // P_TH per cell, watts
  Eigen::VectorXd mask_f1;      // per-subcarrier cap per cell on F1, watts
  Eigen::VectorXd mask_f2;      // same on F2 (macro entry unused)
  double r_min = 0.0;           // macro minimum sum rate, nats
  double noise_power = 1.0;     // watts per subcarrier

  int num_cells() const { return phantom_cells + 1; }
  int subcarriers(Band band) const { return band == Band::F1 ? subcarriers_f1 : subcarriers_f2; }
  const Eigen::VectorXd& mask(Band band) const { return band == Band::F1 ? mask_f1 : mask_f2; }
  int users_in(int cell) const { return users.at(static_cast<std::size_t>(cell)); }
  int total_users() const;
  int user_offset(int cell) const;
  int global_user(int cell, int local) const { return user_offset(cell) + local; }
  int cell_of(int global_user) const;

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;

  /// Uniform layout: every phantom cell has the same user count and power,
  /// masks are P_TH / N on each band.
  static NetworkConfig uniform(int phantom_cells, int macro_users, int users_per_phantom,
                               int subcarriers_f1, int subcarriers_f2, double macro_budget,
                               double phantom_budget, double noise_power, double r_min = 0.0);
};

/// Linear power gains h(tx cell, global user, subcarrier) on one band. The F2
/// tensor carries no macro transmitter.
class ChannelGains {
 public:
  ChannelGains() = default;
  ChannelGains(Band band, int num_cells, int num_users, int num_subcarriers, double fill = 1.0);

  Band band() const { return band_; }
  int num_cells() const { return num_cells_; }
  int num_users() const { return num_users_; }
  int num_subcarriers() const { return num_subcarriers_; }
  bool has_transmitter(int cell) const { return cell >= first_transmitter() && cell < num_cells_; }
  int first_transmitter() const { return band_ == Band::F1 ? 0 : 1; }

  double operator()(int tx, int user, int subcarrier) const { return from(tx)(user, subcarrier); }
  double& at(int tx, int user, int subcarrier);

  /// users x subcarriers block radiated by one transmitter.
  const Eigen::MatrixXd& from(int tx) const;
  Eigen::MatrixXd& from(int tx);

  /// Throws std::invalid_argument unless every gain is finite and > 0.
  void validate() const;

 private:
  Band band_ = Band::F1;
  int num_cells_ = 0;
  int num_users_ = 0;
  int num_subcarriers_ = 0;
  std::vector<Eigen::MatrixXd> per_tx_;
};

/// OFDMA allocation on one band: each (cell, subcarrier) slot holds at most one
/// local user index, and a transmit power.
class Allocation {
 public:
  Allocation() = default;
  Allocation(Band band, int num_cells, int num_subcarriers);

  Band band() const { return band_; }
  int num_cells() const { return static_cast<int>(power_.rows()); }
  int num_subcarriers() const { return static_cast<int>(power_.cols()); }

  std::optional<int> user(int cell, int subcarrier) const { return assign_[slot(cell, subcarrier)]; }
  double power(int cell, int subcarrier) const { return power_(cell, subcarrier); }
  const Eigen::MatrixXd& powers() const { return power_; }

  void assign(int cell, int subcarrier, int local_user, double power = 0.0);
  void set_power(int cell, int subcarrier, double power);
  void clear(int cell, int subcarrier);
  void clear_cell(int cell);

  /// Sum of powers the given local user holds in the cell.
  double user_power(int cell, int local_user) const;

  /// Throws std::invalid_argument on any invariant violation: unknown user,
  /// power on an empty slot, negative power, mask or budget overrun, or a
  /// transmitting macro on F2.
  void validate(const NetworkConfig& config) const;

  bool operator==(const Allocation& other) const;

 private:
  std::size_t slot(int cell, int subcarrier) const {
    return static_cast<std::size_t>(cell) * static_cast<std::size_t>(power_.cols()) +
           static_cast<std::size_t>(subcarrier);
  }

  Band band_ = Band::F1;
  std::vector<std::optional<int>> assign_;
  Eigen::MatrixXd power_;
};

struct RateReport {
  Eigen::VectorXd user_rate;  // per global user
  Eigen::VectorXd cell_rate;  // per cell
  double phantom_total = 0.0;
  double macro_total = 0.0;
};

/// ln(1 + h p / I). Throws std::domain_error outside h > 0, p >= 0, I > 0.
template <typename Scalar>
Scalar rate(Scalar gain, Scalar power, Scalar interference) {
  using std::isfinite;
  if (!isfinite(gain) || !isfinite(power) || !isfinite(interference) || gain <= Scalar(0) ||
      power < Scalar(0) || interference <= Scalar(0)) {
    throw std::domain_error("rate: requires finite h > 0, p >= 0, I > 0");
  }
  return std::log1p(gain * power / interference);
}

/// Interference plus noise seen by `local_user` of `cell` on `subcarrier`. On
/// F1 every other cell contributes; on F2 the macro is silent.
double interference(const Allocation& alloc, const ChannelGains& gains, const NetworkConfig& config,
                    int cell, int local_user, int subcarrier);

RateReport throughput(const Allocation& alloc, const ChannelGains& gains, const NetworkConfig& config);

inline double nats_to_bits_per_second(double nats, double bandwidth_hz) {
  return nats * bandwidth_hz / std::log(2.0);
}

}  // namespace hetnet

#endif  // HETNET_MODEL_HPP
