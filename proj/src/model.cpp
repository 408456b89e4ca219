#include "hetnet/model.hpp"

#include <numeric>
#include <sstream>

namespace hetnet {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

bool positive_finite(const Eigen::VectorXd& v) {
  return v.allFinite() && (v.array() > 0.0).all();
}

}  // namespace

std::string to_string(Band band) { return band == Band::F1 ? "F1" : "F2"; }

// NetworkConfig ------------------------------------------------------------

int NetworkConfig::total_users() const { return std::accumulate(users.begin(), users.end(), 0); }

int NetworkConfig::user_offset(int cell) const {
  if (cell < 0 || cell > phantom_cells) fail("user_offset: cell out of range");
  return std::accumulate(users.begin(), users.begin() + cell, 0);
}

int NetworkConfig::cell_of(int global_user) const {
  int offset = 0;
  for (int m = 0; m < num_cells(); ++m) {
    offset += users[static_cast<std::size_t>(m)];
    if (global_user < offset) return m;
  }
  fail("cell_of: user index out of range");
}

void NetworkConfig::validate() const {
  if (phantom_cells < 0) fail("NetworkConfig: phantom_cells must be >= 0");
  if (static_cast<int>(users.size()) != num_cells()) fail("NetworkConfig: need one user count per cell");
  for (int k : users)
    if (k < 1) fail("NetworkConfig: every cell needs at least one user");
  if (subcarriers_f1 < 1 || subcarriers_f2 < 1) fail("NetworkConfig: subcarrier counts must be >= 1");
  if (budget.size() != num_cells() || mask_f1.size() != num_cells() || mask_f2.size() != num_cells())
    fail("NetworkConfig: budget and masks need one entry per cell");
  if (!positive_finite(budget) || !positive_finite(mask_f1) || !positive_finite(mask_f2))
    fail("NetworkConfig: powers must be finite and > 0");
  if ((mask_f1.array() > budget.array()).any() || (mask_f2.array() > budget.array()).any())
    fail("NetworkConfig: mask exceeds budget");
  if (!std::isfinite(r_min) || r_min < 0.0) fail("NetworkConfig: r_min must be >= 0");
  if (!std::isfinite(noise_power) || noise_power <= 0.0) fail("NetworkConfig: noise_power must be > 0");
}

NetworkConfig NetworkConfig::uniform(int phantom_cells, int macro_users, int users_per_phantom,
                                     int subcarriers_f1, int subcarriers_f2, double macro_budget,
                                     double phantom_budget, double noise_power, double r_min) {
  NetworkConfig c;
  c.phantom_cells = phantom_cells;
  c.users.assign(static_cast<std::size_t>(phantom_cells + 1), users_per_phantom);
  c.users[0] = macro_users;
  c.subcarriers_f1 = subcarriers_f1;
  c.subcarriers_f2 = subcarriers_f2;
  c.budget = Eigen::VectorXd::Constant(phantom_cells + 1, phantom_budget);
  c.budget(0) = macro_budget;
  c.mask_f1 = c.budget / subcarriers_f1;
  c.mask_f2 = c.budget / subcarriers_f2;
  c.noise_power = noise_power;
  c.r_min = r_min;
  c.validate();
  return c;
}

// ChannelGains -------------------------------------------------------------

ChannelGains::ChannelGains(Band band, int num_cells, int num_users, int num_subcarriers, double fill)
    : band_(band), num_cells_(num_cells), num_users_(num_users), num_subcarriers_(num_subcarriers) {
  if (num_cells < 1 || num_users < 1 || num_subcarriers < 1) fail("ChannelGains: empty shape");
  per_tx_.resize(static_cast<std::size_t>(num_cells));
  for (int j = first_transmitter(); j < num_cells; ++j)
    per_tx_[static_cast<std::size_t>(j)] = Eigen::MatrixXd::Constant(num_users, num_subcarriers, fill);
}

const Eigen::MatrixXd& ChannelGains::from(int tx) const {
  if (!has_transmitter(tx)) fail("ChannelGains: no transmitter " + std::to_string(tx) + " on " + to_string(band_));
  return per_tx_[static_cast<std::size_t>(tx)];
}

Eigen::MatrixXd& ChannelGains::from(int tx) {
  if (!has_transmitter(tx)) fail("ChannelGains: no transmitter " + std::to_string(tx) + " on " + to_string(band_));
  return per_tx_[static_cast<std::size_t>(tx)];
}

double& ChannelGains::at(int tx, int user, int subcarrier) { return from(tx)(user, subcarrier); }

void ChannelGains::validate() const {
  for (int j = first_transmitter(); j < num_cells_; ++j) {
    const auto& block = per_tx_[static_cast<std::size_t>(j)];
    if (!block.allFinite() || (block.array() <= 0.0).any())
      fail("ChannelGains: gains must be finite and > 0 (transmitter " + std::to_string(j) + ")");
  }
}

// Allocation ---------------------------------------------------------------

Allocation::Allocation(Band band, int num_cells, int num_subcarriers)
    : band_(band),
      assign_(static_cast<std::size_t>(num_cells) * static_cast<std::size_t>(num_subcarriers)),
      power_(Eigen::MatrixXd::Zero(num_cells, num_subcarriers)) {}

void Allocation::assign(int cell, int subcarrier, int local_user, double power) {
  if (local_user < 0) fail("Allocation::assign: negative user index");
  assign_[slot(cell, subcarrier)] = local_user;
  power_(cell, subcarrier) = power;
}

void Allocation::set_power(int cell, int subcarrier, double power) {
  if (!assign_[slot(cell, subcarrier)] && power != 0.0) fail("Allocation::set_power: slot is unassigned");
  power_(cell, subcarrier) = power;
}

void Allocation::clear(int cell, int subcarrier) {
  assign_[slot(cell, subcarrier)].reset();
  power_(cell, subcarrier) = 0.0;
}

void Allocation::clear_cell(int cell) {
  for (int i = 0; i < num_subcarriers(); ++i) clear(cell, i);
}

double Allocation::user_power(int cell, int local_user) const {
  double total = 0.0;
  for (int i = 0; i < num_subcarriers(); ++i)
    if (user(cell, i) == local_user) total += power_(cell, i);
  return total;
}

void Allocation::validate(const NetworkConfig& config) const {
  if (num_cells() != config.num_cells() || num_subcarriers() != config.subcarriers(band_))
    fail("Allocation: shape does not match the network on " + to_string(band_));
  const Eigen::VectorXd& mask = config.mask(band_);
  for (int m = 0; m < num_cells(); ++m) {
    double cell_total = 0.0;
    for (int i = 0; i < num_subcarriers(); ++i) {
      const double p = power_(m, i);
      const auto k = user(m, i);
      std::ostringstream where;
      where << "Allocation(" << to_string(band_) << "): cell " << m << " subcarrier " << i;
      if (!std::isfinite(p) || p < 0.0) fail(where.str() + " has negative or non-finite power");
      if (!k) {
        if (p != 0.0) fail(where.str() + " carries power but no user");
        continue;
      }
      if (band_ == Band::F2 && m == 0) fail(where.str() + ": the macro does not transmit on F2");
      if (*k >= config.users_in(m)) fail(where.str() + " names an unknown user");
      if (p > mask(m) + kPowerTolerance) fail(where.str() + " exceeds the spectral mask");
      cell_total += p;
    }
    if (cell_total > config.budget(m) + kPowerTolerance)
      fail("Allocation(" + to_string(band_) + "): cell " + std::to_string(m) + " exceeds its power budget");
  }
}

bool Allocation::operator==(const Allocation& other) const {
  return band_ == other.band_ && assign_ == other.assign_ && power_.rows() == other.power_.rows() &&
         power_.cols() == other.power_.cols() && power_ == other.power_;
}

// Rates --------------------------------------------------------------------

double interference(const Allocation& alloc, const ChannelGains& gains, const NetworkConfig& config,
                    int cell, int local_user, int subcarrier) {
  if (alloc.band() != gains.band()) fail("interference: allocation and gains are on different bands");
  if (local_user < 0 || local_user >= config.users_in(cell)) fail("interference: user does not belong to cell");
  const int user = config.global_user(cell, local_user);
  double total = config.noise_power;
  for (int j = gains.first_transmitter(); j < gains.num_cells(); ++j) {
    if (j == cell) continue;
    const double p = alloc.power(j, subcarrier);
    if (p > 0.0) total += gains(j, user, subcarrier) * p;
  }
  return total;
}

RateReport throughput(const Allocation& alloc, const ChannelGains& gains, const NetworkConfig& config) {
  if (alloc.band() != gains.band()) fail("throughput: allocation and gains are on different bands");
  alloc.validate(config);

  RateReport report;
  report.user_rate = Eigen::VectorXd::Zero(config.total_users());
  report.cell_rate = Eigen::VectorXd::Zero(config.num_cells());
  for (int m = gains.first_transmitter(); m < config.num_cells(); ++m) {
    for (int i = 0; i < alloc.num_subcarriers(); ++i) {
      const auto k = alloc.user(m, i);
      if (!k) continue;
      const int u = config.global_user(m, *k);
      const double r = rate(gains(m, u, i), alloc.power(m, i), interference(alloc, gains, config, m, *k, i));
      report.user_rate(u) += r;
      report.cell_rate(m) += r;
    }
  }
  report.macro_total = report.cell_rate(0);
  report.phantom_total = report.cell_rate.tail(config.phantom_cells).sum();
  return report;
}

}  // namespace hetnet
