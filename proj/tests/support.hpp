// Seeded generators for property tests.
#ifndef HETNET_TEST_SUPPORT_HPP
#define HETNET_TEST_SUPPORT_HPP

#include "hetnet/model.hpp"
#include "hetnet/nlp_solver.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace hetnet::testing {

using Gen = std::mt19937_64;

inline double uniform(Gen& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
inline int pick(Gen& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
inline double log_uniform(Gen& g, double lo, double hi) {
  return std::exp(uniform(g, std::log(lo), std::log(hi)));
}

inline NetworkConfig random_network(Gen& g, int max_cells = 3, int max_users = 3, int max_subcarriers = 4) {
  const int m = pick(g, 1, max_cells);
  NetworkConfig c = NetworkConfig::uniform(m, pick(g, 1, max_users), pick(g, 1, max_users), pick(g, 1, max_subcarriers),
                                           pick(g, 1, max_subcarriers), uniform(g, 1.0, 20.0), uniform(g, 0.1, 2.0),
                                           log_uniform(g, 1e-3, 1.0));
  return c;
}

inline ChannelGains random_gains(Gen& g, const NetworkConfig& c, Band band, double lo = 1e-3, double hi = 10.0) {
  ChannelGains gains(band, c.num_cells(), c.total_users(), c.subcarriers(band));
  for (int j = gains.first_transmitter(); j < c.num_cells(); ++j)
    for (int u = 0; u < c.total_users(); ++u)
      for (int i = 0; i < c.subcarriers(band); ++i) gains.at(j, u, i) = log_uniform(g, lo, hi);
  return gains;
}

/// Every slot of every transmitting cell assigned to a random user at a
/// random feasible power.
inline Allocation random_allocation(Gen& g, const NetworkConfig& c, Band band) {
  const int n = c.subcarriers(band);
  Allocation a(band, c.num_cells(), n);
  for (int m = band == Band::F1 ? 0 : 1; m < c.num_cells(); ++m) {
    const double share = std::min(c.mask(band)(m), c.budget(m) / n);
    for (int i = 0; i < n; ++i) a.assign(m, i, pick(g, 0, c.users_in(m) - 1), uniform(g, 0.0, share));
  }
  return a;
}

/// Random phantom powers inside the problem's boxes (macro row left zero).
inline Eigen::MatrixXd random_powers(Gen& g, const PowerProblem& p) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(p.num_cells, p.num_subcarriers);
  for (int m = 1; m < p.num_cells; ++m)
    for (int i = 0; i < p.num_subcarriers; ++i)
      if (p.active(m, i)) x(m, i) = uniform(g, 0.0, std::min(p.mask(m), p.budget(m) / p.num_subcarriers));
  return x;
}

}  // namespace hetnet::testing

#endif  // HETNET_TEST_SUPPORT_HPP
