#include "hetnet/nlp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace hetnet {

int PowerProblem::num_variables() const { return static_cast<int>(active.bottomRows(num_cells - 1).count()); }

PowerProblem make_power_problem(const ChannelGains& gains, const NetworkConfig& config, const Allocation& alloc) {
  if (gains.band() != alloc.band()) throw std::invalid_argument("make_power_problem: band mismatch");
  const Band band = gains.band();
  const int cells = config.num_cells();
  const int n = config.subcarriers(band);
  if (alloc.num_cells() != cells || alloc.num_subcarriers() != n)
    throw std::invalid_argument("make_power_problem: allocation shape mismatch");

  PowerProblem pb;
  pb.band = band;
  pb.num_cells = cells;
  pb.num_subcarriers = n;
  pb.coupling.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(cells, cells));
  pb.active = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(cells, n, false);
  pb.macro_power = Eigen::VectorXd::Zero(n);
  pb.budget = config.budget;
  pb.mask = config.mask(band);
  pb.noise = config.noise_power;
  pb.r_min = config.r_min;

  for (int i = 0; i < n; ++i) {
    for (int m = gains.first_transmitter(); m < cells; ++m) {
      const auto k = alloc.user(m, i);
      if (!k) continue;
      pb.active(m, i) = true;
      const int u = config.global_user(m, *k);
      for (int j = gains.first_transmitter(); j < cells; ++j) pb.coupling[static_cast<std::size_t>(i)](j, m) = gains(j, u, i);
    }
    if (band == Band::F1 && pb.active(0, i)) pb.macro_power(i) = alloc.power(0, i);
  }
  pb.macro_constrained = band == Band::F1 && pb.active.row(0).any();
  return pb;
}

namespace {

// Interference-plus-noise and useful signal for every (cell, subcarrier).
struct LinkState {
  Eigen::MatrixXd signal;
  Eigen::MatrixXd interference;
};

LinkState link_state(const PowerProblem& pb, const Eigen::MatrixXd& p) {
  LinkState s{Eigen::MatrixXd::Zero(pb.num_cells, pb.num_subcarriers),
              Eigen::MatrixXd::Constant(pb.num_cells, pb.num_subcarriers, pb.noise)};
  for (int i = 0; i < pb.num_subcarriers; ++i) {
    const Eigen::MatrixXd& c = pb.coupling[static_cast<std::size_t>(i)];
    for (int m = 0; m < pb.num_cells; ++m) {
      if (!pb.active(m, i)) continue;
      double interf = pb.noise;
      for (int j = 0; j < pb.num_cells; ++j)
        if (j != m && p(j, i) > 0.0) interf += c(j, m) * p(j, i);
      s.interference(m, i) = interf;
      s.signal(m, i) = c(m, m) * p(m, i);
    }
  }
  return s;
}

Eigen::MatrixXd with_macro(const PowerProblem& pb, const Eigen::MatrixXd& powers) {
  if (powers.rows() != pb.num_cells || powers.cols() != pb.num_subcarriers)
    throw std::invalid_argument("power matrix shape does not match the problem");
  Eigen::MatrixXd p = powers;
  p.row(0) = pb.macro_power.transpose();
  return p;
}

// d/dp_j of ln(1 + S/I) through I, per unit coupling gain.
inline double cross_sensitivity(double signal, double interf) {
  return -signal / (interf * (interf + signal));
}

struct Evaluation {
  double objective = 0.0;
  double macro_rate = 0.0;
  Eigen::MatrixXd objective_grad;
  Eigen::MatrixXd macro_grad;
};

Evaluation evaluate(const PowerProblem& pb, const Eigen::MatrixXd& p, bool want_macro) {
  const LinkState s = link_state(pb, p);
  Evaluation e;
  e.objective_grad = Eigen::MatrixXd::Zero(pb.num_cells, pb.num_subcarriers);
  if (want_macro) e.macro_grad = Eigen::MatrixXd::Zero(pb.num_cells, pb.num_subcarriers);
  for (int i = 0; i < pb.num_subcarriers; ++i) {
    const Eigen::MatrixXd& c = pb.coupling[static_cast<std::size_t>(i)];
    for (int n = 1; n < pb.num_cells; ++n) {
      if (!pb.active(n, i)) continue;
      const double sig = s.signal(n, i);
      const double interf = s.interference(n, i);
      e.objective += std::log1p(sig / interf);
      e.objective_grad(n, i) += c(n, n) / (interf + sig);
      const double sens = cross_sensitivity(sig, interf);
      for (int m = 1; m < pb.num_cells; ++m)
        if (m != n && pb.active(m, i)) e.objective_grad(m, i) += c(m, n) * sens;
    }
    if (want_macro && pb.active(0, i)) {
      const double sig = s.signal(0, i);
      const double interf = s.interference(0, i);
      e.macro_rate += std::log1p(sig / interf);
      const double sens = cross_sensitivity(sig, interf);
      for (int m = 1; m < pb.num_cells; ++m)
        if (pb.active(m, i)) e.macro_grad(m, i) = c(m, 0) * sens;
    }
  }
  return e;
}

// Flattened view of the free variables, normalized by the per-cell mask.
class VariableMap {
 public:
  explicit VariableMap(const PowerProblem& pb) : pb_(pb) {
    index_ = Eigen::MatrixXi::Constant(pb.num_cells, pb.num_subcarriers, -1);
    for (int m = 1; m < pb.num_cells; ++m) {
      std::vector<int> group;
      for (int i = 0; i < pb.num_subcarriers; ++i) {
        if (!pb.active(m, i)) continue;
        index_(m, i) = static_cast<int>(slots_.size());
        group.push_back(static_cast<int>(slots_.size()));
        slots_.push_back({m, i});
      }
      if (!group.empty()) {
        groups_.push_back(std::move(group));
        group_cap_.push_back(pb.budget(m) / pb.mask(m));
      }
    }
  }

  int size() const { return static_cast<int>(slots_.size()); }
  int index(int cell, int sc) const { return index_(cell, sc); }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  double group_cap(std::size_t g) const { return group_cap_[g]; }

  // A group whose box alone keeps it inside the budget never needs the
  // budget constraint.
  bool group_can_bind(std::size_t g) const {
    return static_cast<double>(groups_[g].size()) > group_cap_[g] + 1e-12;
  }

  Eigen::MatrixXd to_powers(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(pb_.num_cells, pb_.num_subcarriers);
    p.row(0) = pb_.macro_power.transpose();
    for (int v = 0; v < size(); ++v) p(slots_[v].cell, slots_[v].sc) = pb_.mask(slots_[v].cell) * x(v);
    return p;
  }

  Eigen::VectorXd from_powers(const Eigen::MatrixXd& p) const {
    Eigen::VectorXd x(size());
    for (int v = 0; v < size(); ++v) x(v) = p(slots_[v].cell, slots_[v].sc) / pb_.mask(slots_[v].cell);
    return x;
  }

  Eigen::VectorXd project(const Eigen::VectorXd& y) const {
    Eigen::VectorXd x(size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& idx = groups_[g];
      Eigen::VectorXd sub(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t a = 0; a < idx.size(); ++a) sub(static_cast<Eigen::Index>(a)) = y(idx[a]);
      sub = project_capped_box(sub, group_cap_[g]);
      for (std::size_t a = 0; a < idx.size(); ++a) x(idx[a]) = sub(static_cast<Eigen::Index>(a));
    }
    return x;
  }

  // Scales each over-budget group down onto its budget.
  Eigen::VectorXd fit_budgets(Eigen::VectorXd x) const {
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      double total = 0.0;
      for (int v : groups_[g]) total += x(v);
      if (total > group_cap_[g])
        for (int v : groups_[g]) x(v) *= group_cap_[g] / total;
    }
    return x;
  }

 private:
  struct Slot {
    int cell;
    int sc;
  };
  const PowerProblem& pb_;
  std::vector<Slot> slots_;
  Eigen::MatrixXi index_;
  std::vector<std::vector<int>> groups_;
  std::vector<double> group_cap_;
};

// Rates with gradient and Hessian in normalized variables. With
// T = I + S, ln(1 + S/I) = ln T - ln I, so every second derivative is a
// rank-one term in the couplings.
struct Model {
  double objective = 0.0;
  double macro_rate = 0.0;
  Eigen::VectorXd objective_grad, macro_grad;
  Eigen::MatrixXd objective_hess, macro_hess;
};

Model model_at(const PowerProblem& pb, const VariableMap& vars, const Eigen::VectorXd& x, bool want_macro) {
  const int nv = vars.size();
  const Eigen::MatrixXd p = vars.to_powers(x);
  Model md;
  md.objective_grad = Eigen::VectorXd::Zero(nv);
  md.objective_hess = Eigen::MatrixXd::Zero(nv, nv);
  if (want_macro) {
    md.macro_grad = Eigen::VectorXd::Zero(nv);
    md.macro_hess = Eigen::MatrixXd::Zero(nv, nv);
  }
  std::vector<int> idx;
  std::vector<double> coef;
  for (int i = 0; i < pb.num_subcarriers; ++i) {
    const Eigen::MatrixXd& c = pb.coupling[static_cast<std::size_t>(i)];
    for (int n = want_macro ? 0 : 1; n < pb.num_cells; ++n) {
      if (!pb.active(n, i)) continue;
      double interf = pb.noise;
      for (int j = 0; j < pb.num_cells; ++j)
        if (j != n && p(j, i) > 0.0) interf += c(j, n) * p(j, i);
      const double sig = c(n, n) * p(n, i);
      const double total = interf + sig;
      const double r = std::log1p(sig / interf);
      Eigen::VectorXd& grad = n == 0 ? md.macro_grad : md.objective_grad;
      Eigen::MatrixXd& hess = n == 0 ? md.macro_hess : md.objective_hess;
      (n == 0 ? md.macro_rate : md.objective) += r;

      idx.clear();
      coef.clear();
      for (int j = 1; j < pb.num_cells; ++j) {
        const int v = vars.index(j, i);
        if (v < 0) continue;
        idx.push_back(v);
        coef.push_back(c(j, n) * pb.mask(j));
      }
      const int own = vars.index(n, i);
      const double own_scale = 1.0 / total;
      const double cross_scale = sig * (total + interf) / (interf * interf * total * total);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        grad(idx[a]) += idx[a] == own ? coef[a] * own_scale : -coef[a] * sig / (interf * total);
        for (std::size_t b = 0; b < idx.size(); ++b) {
          const double cc = coef[a] * coef[b];
          hess(idx[a], idx[b]) += idx[a] == own || idx[b] == own ? -cc * own_scale * own_scale : cc * cross_scale;
        }
      }
    }
  }
  return md;
}

// Augmented-Lagrangian merit: macro rate >= r_min and, where they can bind,
// per-cell budgets.
struct Merit {
  double rho = 1.0;
  double nu = 0.0;
  bool constrained = false;
  double r_min = 0.0;
  std::vector<double> budget_nu;   // per group; empty when no budget can bind
};

struct Point {
  Eigen::VectorXd x;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double merit = 0.0;
  double objective = 0.0;
  double macro_rate = 0.0;
  std::vector<double> group_sum;
};

class Ascent {
 public:
  Ascent(const PowerProblem& pb, const VariableMap& vars, const SolveOptions& opt)
      : pb_(pb), vars_(vars), opt_(opt) {}

  long evaluations() const { return evaluations_; }
  int iterations() const { return iterations_; }

  Point at(const Eigen::VectorXd& x, const Merit& merit) {
    ++evaluations_;
    const Model md = model_at(pb_, vars_, x, merit.constrained);
    Point pt;
    pt.x = x;
    pt.objective = md.objective;
    pt.macro_rate = md.macro_rate;
    pt.merit = md.objective;
    pt.grad = md.objective_grad;
    pt.hess = md.objective_hess;
    if (merit.constrained) {
      const double shifted = std::max(0.0, merit.nu + merit.rho * (merit.r_min - md.macro_rate));
      pt.merit -= (shifted * shifted - merit.nu * merit.nu) / (2.0 * merit.rho);
      pt.grad += shifted * md.macro_grad;
      pt.hess += shifted * md.macro_hess;
      if (shifted > 0.0) pt.hess -= merit.rho * md.macro_grad * md.macro_grad.transpose();
    }
    for (std::size_t g = 0; g < merit.budget_nu.size(); ++g) {
      const auto& idx = vars_.groups()[g];
      double total = 0.0;
      for (int v : idx) total += x(v);
      pt.group_sum.push_back(total);
      if (!vars_.group_can_bind(g)) continue;
      const double nu = merit.budget_nu[g];
      const double shifted = std::max(0.0, nu + merit.rho * (total - vars_.group_cap(g)));
      pt.merit -= (shifted * shifted - nu * nu) / (2.0 * merit.rho);
      for (int v : idx) pt.grad(v) -= shifted;
      if (shifted > 0.0)
        for (int a : idx)
          for (int b : idx) pt.hess(a, b) -= merit.rho;
    }
    return pt;
  }

  // Newton-type ascent direction on the variables off their bounds, scaled
  // gradient on the rest.
  Eigen::VectorXd direction(const Point& pt) const {
    const int nv = vars_.size();
    std::vector<int> free;
    Eigen::VectorXd d(nv);
    for (int v = 0; v < nv; ++v) {
      const bool at_lower = pt.x(v) <= 0.0 && pt.grad(v) < 0.0;
      const bool at_upper = pt.x(v) >= 1.0 && pt.grad(v) > 0.0;
      if (at_lower || at_upper) d(v) = pt.grad(v) / std::max(std::abs(pt.hess(v, v)), 1e-300);
      else free.push_back(v);
    }
    if (free.empty()) return d;
    const int nf = static_cast<int>(free.size());
    Eigen::MatrixXd b(nf, nf);
    Eigen::VectorXd g(nf);
    for (int a = 0; a < nf; ++a) {
      g(a) = pt.grad(free[a]);
      for (int c = 0; c < nf; ++c) b(a, c) = -pt.hess(free[a], free[c]);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    Eigen::VectorXd lambda = eig.eigenvalues().cwiseAbs();
    const double floor = std::max(lambda.maxCoeff() * 1e-12, 1e-300);
    lambda = lambda.cwiseMax(floor);
    const Eigen::VectorXd step = eig.eigenvectors() * (eig.eigenvectors().transpose() * g).cwiseQuotient(lambda);
    for (int a = 0; a < nf; ++a) d(free[a]) = step(a);
    return d;
  }

  Eigen::VectorXd diagonal_direction(const Point& pt) const {
    Eigen::VectorXd d(vars_.size());
    for (int v = 0; v < vars_.size(); ++v) d(v) = pt.grad(v) / std::max(std::abs(pt.hess(v, v)), 1e-300);
    return d;
  }

  static Eigen::VectorXd clamp(const Eigen::VectorXd& y) { return y.cwiseMax(0.0).cwiseMin(1.0); }

  // Predicted merit gain of the projected Newton step (objective units).
  double stationarity(const Point& pt) const {
    return std::max(0.0, pt.grad.dot(clamp(pt.x + direction(pt)) - pt.x));
  }

  bool settled(const Point& pt, double measure) const {
    return measure <= opt_.tolerance * (1.0 + std::abs(pt.merit));
  }

  // Projected Newton ascent on the unit box with Armijo backtracking along
  // the projection arc. Returns true once the predicted gain is below
  // tolerance * (1 + |merit|).
  bool climb(Point& pt, const Merit& merit) {
    for (int it = 0; it < opt_.max_iterations; ++it) {
      Eigen::VectorXd d = direction(pt);
      const double measure = pt.grad.dot(clamp(pt.x + d) - pt.x);
      if (measure <= 0.0) d = diagonal_direction(pt);
      else if (settled(pt, measure)) return true;
      ++iterations_;
      bool accepted = false;
      double step = 1.0;
      Point next;
      for (int halving = 0; halving < 60; ++halving) {
        const Eigen::VectorXd xn = clamp(pt.x + step * d);
        const Eigen::VectorXd dx = xn - pt.x;
        if (dx.lpNorm<Eigen::Infinity>() == 0.0) break;
        next = at(xn, merit);
        if (next.merit >= pt.merit + opt_.armijo * pt.grad.dot(dx)) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) return settled(pt, measure);
      pt = std::move(next);
    }
    return settled(pt, stationarity(pt));
  }

 private:
  const PowerProblem& pb_;
  const VariableMap& vars_;
  const SolveOptions& opt_;
  long evaluations_ = 0;
  int iterations_ = 0;
};

struct Candidate {
  Eigen::VectorXd x;
  double objective = -std::numeric_limits<double>::infinity();
  double macro_rate = 0.0;
  bool converged = false;
};

}  // namespace

ObjectiveGradient objective_and_gradient(const PowerProblem& problem, const Eigen::MatrixXd& powers) {
  const Evaluation e = evaluate(problem, with_macro(problem, powers), false);
  return {e.objective, e.objective_grad};
}

ObjectiveGradient macro_rate_and_gradient(const PowerProblem& problem, const Eigen::MatrixXd& powers) {
  const Evaluation e = evaluate(problem, with_macro(problem, powers), true);
  return {e.macro_rate, e.macro_grad};
}

Eigen::VectorXd project_capped_box(const Eigen::VectorXd& y, double cap) {
  Eigen::VectorXd x = y.cwiseMax(0.0).cwiseMin(1.0);
  if (x.sum() <= cap) return x;
  if (cap <= 0.0) return Eigen::VectorXd::Zero(y.size());
  auto shifted = [&](double tau) { return (y.array() - tau).cwiseMax(0.0).cwiseMin(1.0).matrix().eval(); };
  double lo = 0.0, hi = y.maxCoeff();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shifted(mid).sum() > cap) lo = mid; else hi = mid;
  }
  // Exact shift for the free set found by bisection.
  const Eigen::VectorXd z = shifted(hi);
  double fixed = 0.0, free_sum = 0.0;
  int free_count = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) >= 1.0) fixed += 1.0;
    else if (z(i) > 0.0) { free_sum += y(i); ++free_count; }
  }
  double tau = hi;
  if (free_count > 0) {
    const double exact = (free_sum + fixed - cap) / free_count;
    if (std::abs(shifted(exact).sum() - cap) <= std::abs(z.sum() - cap)) tau = exact;
  }
  x = shifted(tau);
  // Never leave the feasible side through rounding.
  const double total = x.sum();
  if (total > cap) x *= cap / total;
  return x;
}

SolveReport solve_phantom_powers(const PowerProblem& pb, const SolveOptions& opt) {
  const VariableMap vars(pb);
  SolveReport report;
  report.powers = vars.to_powers(Eigen::VectorXd::Zero(vars.size()));

  const Evaluation base = evaluate(pb, report.powers, pb.macro_constrained);
  report.macro_rate = base.macro_rate;
  const double target = pb.r_min;
  if (pb.macro_constrained && base.macro_rate < target - kRateTolerance * std::max(1.0, target))
    throw std::invalid_argument("solve_phantom_powers: macro rate target unreachable even without phantom power");
  if (vars.size() == 0) {
    report.converged = true;
    return report;
  }
  const double floor_rate = std::min(target, base.macro_rate);

  bool budgets_bind = false;
  for (std::size_t g = 0; g < vars.groups().size(); ++g) budgets_bind = budgets_bind || vars.group_can_bind(g);

  Ascent ascent(pb, vars, opt);

  auto macro_rate_at = [&](const Eigen::VectorXd& x) {
    return evaluate(pb, vars.to_powers(x), true).macro_rate;
  };

  // Budgets by per-cell scale-down, then the macro target by pulling x back
  // along the ray to the origin. Both only lower powers.
  auto restore = [&](Eigen::VectorXd x) {
    x = vars.fit_budgets(Ascent::clamp(x));
    if (!pb.macro_constrained || macro_rate_at(x) >= floor_rate) return x;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (macro_rate_at(mid * x) >= floor_rate) lo = mid; else hi = mid;
    }
    return (lo * x).eval();
  };

  // Infeasibility plus complementarity: |max(c, -nu / rho)| with c <= 0 feasible.
  auto violation_of = [&](const Point& pt, const Merit& merit) {
    double v = 0.0;
    if (pb.macro_constrained) v = std::abs(std::max(target - pt.macro_rate, -merit.nu / merit.rho));
    for (std::size_t g = 0; g < pt.group_sum.size(); ++g)
      if (vars.group_can_bind(g))
        v = std::max(v, std::abs(std::max(pt.group_sum[g] - vars.group_cap(g), -merit.budget_nu[g] / merit.rho)));
    return v;
  };

  auto run_start = [&](const Eigen::VectorXd& x0) {
    Candidate cand;
    bool stationary = false;
    Merit merit{1.0, 0.0, pb.macro_constrained, target, {}};
    if (budgets_bind) merit.budget_nu.assign(vars.groups().size(), 0.0);
    Point pt = ascent.at(vars.project(x0), merit);
    if (!merit.constrained && !budgets_bind) {
      stationary = ascent.climb(pt, merit);
    } else {
      double previous = std::numeric_limits<double>::infinity();
      for (int round = 0; round < opt.max_penalty_rounds; ++round) {
        stationary = ascent.climb(pt, merit);
        const double violation = violation_of(pt, merit);
        if (violation <= opt.constraint_tolerance && stationary) break;
        if (merit.constrained) merit.nu = std::max(0.0, merit.nu + merit.rho * (target - pt.macro_rate));
        for (std::size_t g = 0; g < merit.budget_nu.size(); ++g)
          merit.budget_nu[g] = std::max(0.0, merit.budget_nu[g] + merit.rho * (pt.group_sum[g] - vars.group_cap(g)));
        if (violation > opt.constraint_tolerance && violation > 0.25 * previous) merit.rho *= 2.0;
        previous = std::max(violation, 0.0);
        pt = ascent.at(pt.x, merit);
      }
      stationary = stationary && violation_of(pt, merit) <= opt.constraint_tolerance;
    }
    cand.x = restore(pt.x);
    const Evaluation e = evaluate(pb, vars.to_powers(cand.x), pb.macro_constrained);
    cand.objective = e.objective;
    cand.macro_rate = pb.macro_constrained ? e.macro_rate : base.macro_rate;
    cand.converged = stationary;
    return cand;
  };

  std::vector<Eigen::VectorXd> starts;
  std::vector<bool> keep_as_is;
  if (opt.warm_start) {
    const Eigen::VectorXd w = vars.project(vars.from_powers(*opt.warm_start));
    starts.push_back(w);
    keep_as_is.push_back(true);
  }
  if (pb.macro_constrained) {
    // Knapsack-style start: switch variables on in order of phantom gain per
    // unit of macro loss (each measured alone at full mask), the last one
    // only as far as the macro target allows.
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(vars.size());
    const Evaluation at_zero = evaluate(pb, vars.to_powers(zero), true);
    std::vector<std::pair<double, int>> order;
    for (int v = 0; v < vars.size(); ++v) {
      Eigen::VectorXd e = zero;
      e(v) = 1.0;
      const Evaluation one = evaluate(pb, vars.to_powers(e), true);
      const double gain = one.objective - at_zero.objective;
      const double loss = std::max(at_zero.macro_rate - one.macro_rate, 1e-300);
      order.push_back({-gain / loss, v});
    }
    std::sort(order.begin(), order.end());
    Eigen::VectorXd x = zero;
    for (const auto& [key, v] : order) {
      x(v) = 1.0;
      if (macro_rate_at(x) >= floor_rate) continue;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        x(v) = 0.5 * (lo + hi);
        if (macro_rate_at(x) >= floor_rate) lo = x(v); else hi = x(v);
      }
      x(v) = lo;
      break;
    }
    starts.push_back(vars.fit_budgets(x));
    keep_as_is.push_back(true);
  }

  Rng rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < std::max(opt.restarts, starts.empty() ? 1 : 0); ++r) {
    Eigen::VectorXd x0(vars.size());
    if (r == 0) x0.setZero();
    else if (r == 1) x0.setConstant(0.5);
    else for (int v = 0; v < vars.size(); ++v) x0(v) = unit(rng);
    starts.push_back(x0);
    keep_as_is.push_back(false);
  }

  Candidate best;
  bool any_converged = false;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (keep_as_is[s]) {
      Candidate as_is;
      as_is.x = restore(starts[s]);
      const Evaluation e = evaluate(pb, vars.to_powers(as_is.x), pb.macro_constrained);
      as_is.objective = e.objective;
      as_is.macro_rate = pb.macro_constrained ? e.macro_rate : base.macro_rate;
      if (as_is.objective > best.objective) best = as_is;
    }
    Candidate cand = run_start(starts[s]);
    any_converged = any_converged || cand.converged;
    if (cand.objective > best.objective) best = std::move(cand);
  }

  report.powers = vars.to_powers(best.x);
  report.objective = best.objective;
  report.macro_rate = best.macro_rate;
  report.converged = any_converged;
  report.iterations = ascent.iterations();
  report.restarts = opt.restarts;
  report.evaluations = ascent.evaluations();
  return report;
}

}  // namespace hetnet
