// Macro-only allocation: best-gain subcarrier assignment and cap-limited
// water-filling under a total power budget.
#ifndef HETNET_WATERFILL_HPP
#define HETNET_WATERFILL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hetnet {

/// The [x]_0^cap bracket: 0 below zero, cap above cap, x in between.
template <typename Scalar>
constexpr Scalar cap_clamp(Scalar x, Scalar cap) {
  if (x >= cap) return cap;
  if (x <= Scalar(0)) return Scalar(0);
  return x;
}

/// Per-subcarrier argmax over users of a users x subcarriers gain matrix.
/// Ties go to the lowest user index.
template <typename Derived>
std::vector<int> macro_assignment(const Eigen::MatrixBase<Derived>& gains) {
  if (gains.rows() < 1) throw std::invalid_argument("macro_assignment: no users");
  std::vector<int> best(static_cast<std::size_t>(gains.cols()), 0);
  for (Eigen::Index i = 0; i < gains.cols(); ++i) {
    Eigen::Index k = 0;
    for (Eigen::Index u = 1; u < gains.rows(); ++u)
      if (gains(u, i) > gains(k, i)) k = u;
    best[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }
  return best;
}

template <typename Scalar>
struct WaterfillResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> powers;
  Scalar water_level{};   // 1 / Psi
  Scalar budget_used{};
};

/// Water-filling over carriers with floors f_i (noise / gain): p_i =
/// [L - f_i]_0^{cap_i}, where the level L makes the powers sum to
/// min(budget, sum caps).
template <typename DerivedF, typename DerivedC>
WaterfillResult<typename DerivedF::Scalar> waterfill_floors(const Eigen::MatrixBase<DerivedF>& floors,
                                                            typename DerivedF::Scalar budget,
                                                            const Eigen::MatrixBase<DerivedC>& caps) {
  using Scalar = typename DerivedF::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = floors.size();
  if (caps.size() != n) throw std::invalid_argument("waterfill: floors and caps differ in size");
  if (n == 0) throw std::invalid_argument("waterfill: no carriers");
  if (!(budget >= Scalar(0)) || (caps.array() < Scalar(0)).any())
    throw std::invalid_argument("waterfill: budget and caps must be >= 0");

  const Vector f = floors;
  const Vector c = caps;
  auto fill = [&](Scalar level) {
    Vector p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = cap_clamp(level - f(i), c(i));
    return p;
  };

  WaterfillResult<Scalar> out;
  const Scalar cap_total = c.sum();
  if (budget == Scalar(0) || cap_total == Scalar(0)) {
    out.powers = Vector::Zero(n);
    out.water_level = f.minCoeff();
    return out;
  }
  if (cap_total <= budget) {
    out.powers = c;
    out.water_level = (f + c).maxCoeff();
    out.budget_used = cap_total;
    return out;
  }

  Scalar lo = f.minCoeff();
  Scalar hi = f.maxCoeff() + budget;
  for (int it = 0; it < 200 && hi - lo > Scalar(1e-12); ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (fill(mid).sum() < budget) lo = mid; else hi = mid;
  }

  // Solve the level exactly for the active set found by bisection.
  Scalar level = hi;
  {
    const Vector p = fill(level);
    Scalar fixed = 0, floor_sum = 0;
    int interior = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (p(i) >= c(i) && c(i) > Scalar(0)) fixed += c(i);
      else if (p(i) > Scalar(0)) { floor_sum += f(i); ++interior; }
    }
    if (interior > 0) {
      const Scalar exact = (budget - fixed + floor_sum) / interior;
      const Vector q = fill(exact);
      if (std::abs(q.sum() - budget) <= std::abs(p.sum() - budget)) level = exact;
    }
  }
  out.powers = fill(level);
  out.water_level = level;
  out.budget_used = out.powers.sum();
  return out;
}

/// Cap-limited water-filling on best-user gains with a common noise power.
template <typename DerivedG, typename DerivedC>
WaterfillResult<typename DerivedG::Scalar> capped_waterfill(const Eigen::MatrixBase<DerivedG>& best_gains,
                                                            typename DerivedG::Scalar noise,
                                                            typename DerivedG::Scalar budget,
                                                            const Eigen::MatrixBase<DerivedC>& caps) {
  if ((best_gains.array() <= 0).any() || !(noise > 0))
    throw std::invalid_argument("capped_waterfill: gains and noise must be > 0");
  return waterfill_floors(best_gains.cwiseInverse() * noise, budget, caps);
}

/// Sum over carriers of ln(1 + h p / noise_i).
template <typename DerivedG, typename DerivedP, typename DerivedN>
typename DerivedG::Scalar sum_rate(const Eigen::MatrixBase<DerivedG>& gains, const Eigen::MatrixBase<DerivedP>& powers,
                                   const Eigen::MatrixBase<DerivedN>& noise) {
  typename DerivedG::Scalar total = 0;
  for (Eigen::Index i = 0; i < gains.size(); ++i) total += std::log1p(gains(i) * powers(i) / noise(i));
  return total;
}

}  // namespace hetnet

#endif  // HETNET_WATERFILL_HPP
