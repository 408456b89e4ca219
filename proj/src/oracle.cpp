#include "hetnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace hetnet {

namespace {

// One joint choice of (user, level) for every phantom cell on one subcarrier.
struct Entry {
  double value = 0.0;
  double macro = 0.0;
  std::vector<int> user;    // per phantom cell, -1 = idle
  std::vector<int> level;
};

class Enumerator {
 public:
  Enumerator(const BandProblem& pb, const OracleBudget& budget, const Allocation* fixed)
      : pb_(pb), cfg_(pb.config), budget_(budget), fixed_(fixed) {
    band_ = pb.gains.band();
    phantoms_ = cfg_.phantom_cells;
    n_ = cfg_.subcarriers(band_);
    levels_ = budget.levels;
    if (levels_ < 2) throw std::invalid_argument("oracle: need at least two grid levels");
    constrained_ = band_ == Band::F1 && pb.macro.num_cells() == cfg_.num_cells();
    if (constrained_) {
      constrained_ = false;
      for (int i = 0; i < n_; ++i) constrained_ = constrained_ || pb.macro.user(0, i).has_value();
    }
    check_budget();
    build_tables();
  }

  OracleResult solve() {
    const int keys = key_count();
    usage_.assign(static_cast<std::size_t>(keys), 0.0);
    chosen_.assign(static_cast<std::size_t>(n_), 0);
    best_choice_.clear();
    suffix_value_.assign(static_cast<std::size_t>(n_ + 1), 0.0);
    suffix_macro_.assign(static_cast<std::size_t>(n_ + 1), 0.0);
    for (int i = n_ - 1; i >= 0; --i) {
      double mv = -std::numeric_limits<double>::infinity(), mm = mv;
      for (const Entry& e : tables_[static_cast<std::size_t>(i)]) {
        mv = std::max(mv, e.value);
        mm = std::max(mm, e.macro);
      }
      suffix_value_[static_cast<std::size_t>(i)] = suffix_value_[static_cast<std::size_t>(i + 1)] + mv;
      suffix_macro_[static_cast<std::size_t>(i)] = suffix_macro_[static_cast<std::size_t>(i + 1)] + mm;
    }
    search(0, 0.0, 0.0);

    OracleResult out;
    out.assignments = assignments_;
    out.grid_points = points_;
    out.allocation = Allocation(band_, cfg_.num_cells(), n_);
    if (constrained_)
      for (int i = 0; i < n_; ++i)
        if (const auto k = pb_.macro.user(0, i)) out.allocation.assign(0, i, *k, pb_.macro.power(0, i));
    if (best_choice_.empty()) return out;

    out.feasible = true;
    out.objective = best_value_;
    out.macro_rate = best_macro_;
    for (int i = 0; i < n_; ++i) {
      const Entry& e = tables_[static_cast<std::size_t>(i)][static_cast<std::size_t>(best_choice_[static_cast<std::size_t>(i)])];
      for (int c = 0; c < phantoms_; ++c) {
        const int m = c + 1;
        if (e.user[static_cast<std::size_t>(c)] < 0) continue;
        out.allocation.assign(m, i, e.user[static_cast<std::size_t>(c)], power_at(m, e.level[static_cast<std::size_t>(c)]));
      }
    }
    out.grid_step_slack = step_slack();
    return out;
  }

 private:
  double power_at(int cell, int level) const {
    return cfg_.mask(band_)(cell) * static_cast<double>(level) / static_cast<double>(levels_ - 1);
  }

  int key_count() const {
    return pb_.scope == BudgetScope::PerCell ? phantoms_ : cfg_.total_users() - cfg_.users_in(0);
  }

  int key_of(int cell, int local_user) const {
    if (pb_.scope == BudgetScope::PerCell) return cell - 1;
    return cfg_.global_user(cell, local_user) - cfg_.users_in(0);
  }

  double key_budget(int key) const {
    if (pb_.scope == BudgetScope::PerCell) return cfg_.budget(key + 1);
    return cfg_.budget(cfg_.cell_of(key + cfg_.users_in(0)));
  }

  // Candidate users of phantom cell m on subcarrier i.
  std::vector<int> users_for(int m, int i) const {
    if (fixed_) {
      if (const auto k = fixed_->user(m, i)) return {*k};
      return {};
    }
    std::vector<int> all(static_cast<std::size_t>(cfg_.users_in(m)));
    std::iota(all.begin(), all.end(), 0);
    return all;
  }

  void check_budget() {
    const long long variables = static_cast<long long>(phantoms_) * n_;
    if (variables > budget_.max_variables)
      throw OracleBudgetExceeded("oracle: " + std::to_string(variables) + " variables exceed the budget of " +
                                 std::to_string(budget_.max_variables));
    long double assignments = 1, points = 1;
    for (int i = 0; i < n_; ++i) {
      long double per_sc = 1;
      for (int m = 1; m <= phantoms_; ++m) {
        const auto users = users_for(m, i);
        assignments *= std::max<std::size_t>(users.size(), 1);
        per_sc *= users.empty() ? 1.0L : static_cast<long double>(users.size()) * (levels_ - 1) + 1;
      }
      points *= per_sc;
    }
    if (assignments > static_cast<long double>(budget_.max_assignments))
      throw OracleBudgetExceeded("oracle: assignment count exceeds the budget");
    if (points > static_cast<long double>(budget_.max_points))
      throw OracleBudgetExceeded("oracle: grid size exceeds the budget");
    assignments_ = static_cast<long long>(assignments);
    points_ = static_cast<long long>(points);
  }

  // Rates on subcarrier i for the given per-cell choice.
  void score(int i, Entry& e) const {
    const Eigen::VectorXd& mask = cfg_.mask(band_);
    std::vector<double> p(static_cast<std::size_t>(cfg_.num_cells()), 0.0);
    if (constrained_ && pb_.macro.user(0, i)) p[0] = pb_.macro.power(0, i);
    for (int c = 0; c < phantoms_; ++c)
      if (e.user[static_cast<std::size_t>(c)] >= 0)
        p[static_cast<std::size_t>(c + 1)] = mask(c + 1) * e.level[static_cast<std::size_t>(c)] / (levels_ - 1);

    const int first = pb_.gains.first_transmitter();
    auto sinr_rate = [&](int m, int u) {
      double interf = cfg_.noise_power;
      for (int j = first; j < cfg_.num_cells(); ++j)
        if (j != m) interf += pb_.gains(j, u, i) * p[static_cast<std::size_t>(j)];
      return std::log1p(pb_.gains(m, u, i) * p[static_cast<std::size_t>(m)] / interf);
    };
    e.value = 0.0;
    for (int c = 0; c < phantoms_; ++c)
      if (e.user[static_cast<std::size_t>(c)] >= 0 && e.level[static_cast<std::size_t>(c)] > 0)
        e.value += sinr_rate(c + 1, cfg_.global_user(c + 1, e.user[static_cast<std::size_t>(c)]));
    e.macro = 0.0;
    if (constrained_)
      if (const auto k = pb_.macro.user(0, i)) e.macro = sinr_rate(0, cfg_.global_user(0, *k));
  }

  void build_tables() {
    tables_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      // Per cell options: idle, or (user, level >= 1).
      std::vector<std::vector<std::pair<int, int>>> options(static_cast<std::size_t>(phantoms_));
      for (int c = 0; c < phantoms_; ++c) {
        auto& opts = options[static_cast<std::size_t>(c)];
        const auto users = users_for(c + 1, i);
        opts.push_back({users.empty() ? -1 : users.front(), 0});
        for (int k : users)
          for (int l = 1; l < levels_; ++l) opts.push_back({k, l});
      }
      std::vector<std::size_t> odometer(static_cast<std::size_t>(phantoms_), 0);
      auto& table = tables_[static_cast<std::size_t>(i)];
      while (true) {
        Entry e;
        e.user.resize(static_cast<std::size_t>(phantoms_));
        e.level.resize(static_cast<std::size_t>(phantoms_));
        for (int c = 0; c < phantoms_; ++c) {
          const auto& [k, l] = options[static_cast<std::size_t>(c)][odometer[static_cast<std::size_t>(c)]];
          e.user[static_cast<std::size_t>(c)] = k;
          e.level[static_cast<std::size_t>(c)] = l;
        }
        score(i, e);
        table.push_back(std::move(e));
        int c = 0;
        for (; c < phantoms_; ++c) {
          auto& digit = odometer[static_cast<std::size_t>(c)];
          if (++digit < options[static_cast<std::size_t>(c)].size()) break;
          digit = 0;
        }
        if (c == phantoms_) break;
      }
      std::stable_sort(table.begin(), table.end(), [](const Entry& a, const Entry& b) { return a.value > b.value; });
    }
  }

  bool fits(const Entry& e, int i, double sign) {
    bool ok = true;
    for (int c = 0; c < phantoms_; ++c) {
      const int k = e.user[static_cast<std::size_t>(c)];
      if (k < 0 || e.level[static_cast<std::size_t>(c)] == 0) continue;
      const int key = key_of(c + 1, k);
      usage_[static_cast<std::size_t>(key)] += sign * power_at(c + 1, e.level[static_cast<std::size_t>(c)]);
      if (sign > 0 && usage_[static_cast<std::size_t>(key)] > key_budget(key) + kPowerTolerance) ok = false;
    }
    (void)i;
    return ok;
  }

  void search(int i, double value, double macro) {
    if (i == n_) {
      if (constrained_ && macro < cfg_.r_min) return;
      if (best_choice_.empty() || value > best_value_) {
        best_value_ = value;
        best_macro_ = macro;
        best_choice_ = chosen_;
      }
      return;
    }
    const auto& table = tables_[static_cast<std::size_t>(i)];
    const double rest_value = suffix_value_[static_cast<std::size_t>(i + 1)];
    const double rest_macro = suffix_macro_[static_cast<std::size_t>(i + 1)];
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      const Entry& e = table[idx];
      if (!best_choice_.empty() && value + e.value + rest_value <= best_value_) break;
      if (constrained_ && macro + e.macro + rest_macro < cfg_.r_min) continue;
      const bool ok = fits(e, i, +1.0);
      if (ok) {
        chosen_[static_cast<std::size_t>(i)] = static_cast<int>(idx);
        search(i + 1, value + e.value, macro + e.macro);
      }
      fits(e, i, -1.0);
    }
  }

  double step_slack() const {
    double slack = 0.0;
    for (int i = 0; i < n_; ++i) {
      const Entry& e = tables_[static_cast<std::size_t>(i)][static_cast<std::size_t>(best_choice_[static_cast<std::size_t>(i)])];
      for (int c = 0; c < phantoms_; ++c) {
        if (e.level[static_cast<std::size_t>(c)] == 0) continue;
        Entry lower = e;
        --lower.level[static_cast<std::size_t>(c)];
        score(i, lower);
        slack = std::max(slack, e.value - lower.value);
      }
    }
    return slack;
  }

  const BandProblem& pb_;
  const NetworkConfig& cfg_;
  OracleBudget budget_;
  const Allocation* fixed_;
  Band band_ = Band::F1;
  int phantoms_ = 0;
  int n_ = 0;
  int levels_ = 0;
  bool constrained_ = false;
  long long assignments_ = 0;
  long long points_ = 0;
  std::vector<std::vector<Entry>> tables_;
  std::vector<double> suffix_value_, suffix_macro_, usage_;
  std::vector<int> chosen_, best_choice_;
  double best_value_ = 0.0, best_macro_ = 0.0;
};

void check_problem(const BandProblem& problem) {
  problem.config.validate();
  problem.gains.validate();
  if (problem.gains.num_cells() != problem.config.num_cells() ||
      problem.gains.num_users() != problem.config.total_users() ||
      problem.gains.num_subcarriers() != problem.config.subcarriers(problem.gains.band()))
    throw std::invalid_argument("oracle: gains do not match the network");
}

}  // namespace

OracleResult brute_force(const BandProblem& problem, const OracleBudget& budget) {
  check_problem(problem);
  return Enumerator(problem, budget, nullptr).solve();
}

OracleResult grid_power_search(const BandProblem& problem, const Allocation& assignment, const OracleBudget& budget) {
  check_problem(problem);
  if (assignment.band() != problem.gains.band()) throw std::invalid_argument("grid_power_search: band mismatch");
  return Enumerator(problem, budget, &assignment).solve();
}

}  // namespace hetnet
