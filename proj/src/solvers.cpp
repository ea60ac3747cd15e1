// Copyright 2026 The Recourse Forge Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "recourse/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace recourse {

namespace {

// Feasibility pre-filters tolerate this much accumulation noise; exact
// acceptance always re-checks through classify().
constexpr double kBenefitSlack = 1e-6;
// Subtrees whose bound exceeds the incumbent by more than this are cut.
// Ties and near-ties survive so the canonical representative is found.
constexpr double kPruneSlack = 1e-9;

struct SearchBudget {
  std::chrono::steady_clock::time_point start;
  double limit_seconds;
  uint64_t node_limit;
  uint64_t nodes = 0;
  bool truncated = false;

  explicit SearchBudget(const SolverConfig& cfg)
      : start(std::chrono::steady_clock::now()),
        limit_seconds(cfg.time_limit_seconds),
        node_limit(cfg.node_limit) {}

  // Counts a node; returns false once a resource limit is hit.
  bool tick() {
    if (truncated) return false;
    ++nodes;
    if (nodes > node_limit) {
      truncated = true;
      return false;
    }
    if ((nodes & 0x3ff) == 0 && std::isfinite(limit_seconds)) {
      const std::chrono::duration<double> e =
          std::chrono::steady_clock::now() - start;
      if (e.count() > limit_seconds) {
        truncated = true;
        return false;
      }
    }
    return true;
  }

  std::chrono::duration<double> elapsed() const {
    return std::chrono::steady_clock::now() - start;
  }
};

std::vector<int> resolve_allowed(const SolverConfig& cfg, size_t catalog_size) {
  std::vector<int> allowed;
  if (cfg.allowed_actions.empty()) {
    allowed.resize(catalog_size);
    std::iota(allowed.begin(), allowed.end(), 0);
    return allowed;
  }
  allowed = cfg.allowed_actions;
  std::sort(allowed.begin(), allowed.end());
  allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
  for (int j : allowed) {
    if (j < 0 || static_cast<size_t>(j) >= catalog_size) {
      throw IndexOutOfRangeError("allowed action " + std::to_string(j) +
                                 " outside catalog");
    }
  }
  return allowed;
}

// Canonical cost of a sorted entry list: catalog costs accumulated in
// ascending index order. Exact solvers and brute-force oracles both build
// costs through this single path so equal sets compare bit-identically.
double canonical_cost(const std::vector<CfeEntry>& sorted_entries,
                      const ActionCatalog& catalog) {
  double total = 0.0;
  for (const CfeEntry& e : sorted_entries) {
    total += catalog.cost_of(static_cast<size_t>(e.action));
  }
  return total;
}

// Incumbent tracking with the canonical tie rule.
struct Incumbent {
  bool found = false;
  std::vector<CfeEntry> entries;  // sorted
  double cost = std::numeric_limits<double>::infinity();

  void offer(std::vector<CfeEntry> sorted, double candidate_cost) {
    if (found) {
      if (candidate_cost > cost) return;
      if (candidate_cost == cost &&
          !std::lexicographical_compare(sorted.begin(), sorted.end(),
                                        entries.begin(), entries.end(),
                                        entry_less)) {
        return;
      }
    }
    entries = std::move(sorted);
    cost = candidate_cost;
    found = true;
  }
};

// ---------------------------------------------------------------------------
// hl-discrete: weighted set cover
// ---------------------------------------------------------------------------

struct DiscreteSearch {
  const ActionCatalog& catalog;
  const SolverConfig& config;
  SearchBudget budget;

  std::vector<int> actions;                   // allowed catalog indices
  std::vector<double> action_cost;            // parallel to `actions`
  std::vector<std::vector<int>> action_rows;  // deficient-row ids per action
  std::vector<std::vector<int>> row_actions;  // local action ids per row
  std::vector<double> residual;               // per deficient row
  std::vector<double> dual;                   // root dual prices per row
  std::vector<char> selected, banned;
  std::vector<int> chosen;  // local ids, in selection order
  std::vector<int> zero_cost_actions;  // local ids with cost == 0
  double current_cost = 0.0;
  int open_rows = 0;
  Incumbent incumbent;

  DiscreteSearch(const AgentState& agent, const ActionCatalog& cat,
                 const ThresholdClassifier& thr, const SolverConfig& cfg)
      : catalog(cat), config(cfg), budget(cfg) {
    const size_t n = agent.dim();
    std::vector<int> row_of(n, -1);
    std::vector<double> need;
    for (size_t i = 0; i < n; ++i) {
      const double d = thr.thresholds[i] - agent.features[i];
      if (d > 0.0) {
        row_of[i] = static_cast<int>(need.size());
        need.push_back(d);
      }
    }
    residual = need;
    open_rows = static_cast<int>(residual.size());

    const std::vector<int> allowed = resolve_allowed(cfg, cat.size());
    row_actions.resize(residual.size());
    for (int j : allowed) {
      const DiscreteAction& a = cat.discrete[static_cast<size_t>(j)];
      std::vector<int> rows;
      for (size_t i = 0; i < n; ++i) {
        if (a.capabilities[i] && row_of[i] >= 0) rows.push_back(row_of[i]);
      }
      const int local = static_cast<int>(actions.size());
      if (a.cost == 0.0) {
        zero_cost_actions.push_back(local);
      } else if (rows.empty()) {
        continue;  // positive cost, covers nothing deficient: never useful
      }
      actions.push_back(j);
      action_cost.push_back(a.cost);
      for (int r : rows) row_actions[static_cast<size_t>(r)].push_back(local);
      action_rows.push_back(std::move(rows));
    }
    selected.assign(actions.size(), 0);
    banned.assign(actions.size(), 0);

    for (size_t r = 0; r < residual.size(); ++r) {
      if (static_cast<double>(row_actions[r].size()) < residual[r]) {
        throw InfeasibleError(
            "deficient feature cannot be covered by the catalog");
      }
    }
  }

  // Greedy ratio cover; initial incumbent and dual ascent step sizing.
  void greedy_incumbent() {
    std::vector<double> res = residual;
    std::vector<char> taken(actions.size(), 0);
    std::vector<CfeEntry> picks;
    int open = open_rows;
    while (open > 0) {
      int best = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < actions.size(); ++k) {
        if (taken[k]) continue;
        double covered = 0.0;
        for (int r : action_rows[k]) {
          if (res[static_cast<size_t>(r)] > 0.0) {
            covered += std::min(res[static_cast<size_t>(r)], 1.0);
          }
        }
        if (covered <= 0.0) continue;
        const double ratio = action_cost[k] / covered;
        if (ratio < best_ratio) {
          best_ratio = ratio;
          best = static_cast<int>(k);
        }
      }
      if (best < 0) return;  // unreachable after the feasibility check
      taken[static_cast<size_t>(best)] = 1;
      picks.push_back({actions[static_cast<size_t>(best)], +1});
      for (int r : action_rows[static_cast<size_t>(best)]) {
        auto& v = res[static_cast<size_t>(r)];
        if (v > 0.0) {
          v -= 1.0;
          if (v <= 0.0) --open;
        }
      }
    }
    std::sort(picks.begin(), picks.end(), entry_less);
    const double cost = canonical_cost(picks, catalog);
    incumbent.offer(std::move(picks), cost);
  }

  // Subgradient ascent on the dual of the root LP relaxation. Any y >= 0
  // yields an admissible bound by weak duality, so convergence quality
  // only affects pruning power, never exactness.
  void fit_root_duals(int iterations) {
    dual.assign(residual.size(), 0.0);
    if (residual.empty() || actions.empty()) return;
    for (size_t r = 0; r < residual.size(); ++r) {
      double cheapest = std::numeric_limits<double>::infinity();
      for (int k : row_actions[r]) {
        const size_t kk = static_cast<size_t>(k);
        cheapest = std::min(
            cheapest,
            action_cost[kk] / static_cast<double>(action_rows[kk].size()));
      }
      dual[r] = cheapest;
    }
    const double target = incumbent.found
                              ? incumbent.cost
                              : std::accumulate(action_cost.begin(),
                                                action_cost.end(), 0.0);
    std::vector<double> best = dual;
    double best_value = dual_value(dual);
    std::vector<double> grad(residual.size());
    double theta = 2.0;
    for (int it = 0; it < iterations; ++it) {
      for (size_t r = 0; r < residual.size(); ++r) grad[r] = residual[r];
      for (size_t k = 0; k < actions.size(); ++k) {
        double q = 0.0;
        for (int r : action_rows[k]) q += dual[static_cast<size_t>(r)];
        if (q > action_cost[k]) {
          for (int r : action_rows[k]) grad[static_cast<size_t>(r)] -= 1.0;
        }
      }
      double norm2 = 0.0;
      for (double g : grad) norm2 += g * g;
      if (norm2 <= 1e-14) break;
      const double value = dual_value(dual);
      if (value > best_value) {
        best_value = value;
        best = dual;
      }
      const double step = theta * std::max(target - value, 1e-3) / norm2;
      for (size_t r = 0; r < residual.size(); ++r) {
        dual[r] = std::max(0.0, dual[r] + step * grad[r]);
      }
      theta *= 0.97;
    }
    if (dual_value(dual) < best_value) dual = best;
  }

  double dual_value(const std::vector<double>& y) const {
    double v = 0.0;
    for (size_t r = 0; r < residual.size(); ++r) v += residual[r] * y[r];
    for (size_t k = 0; k < actions.size(); ++k) {
      double q = 0.0;
      for (int r : action_rows[k]) q += y[static_cast<size_t>(r)];
      if (q > action_cost[k]) v -= q - action_cost[k];
    }
    return v;
  }

  // Admissible bound on the cost still required below this node.
  double residual_bound() const {
    double cheap_bound = 0.0;
    for (size_t r = 0; r < residual.size(); ++r) {
      if (residual[r] <= 0.0) continue;
      double cheapest = std::numeric_limits<double>::infinity();
      for (int k : row_actions[r]) {
        const size_t kk = static_cast<size_t>(k);
        if (!selected[kk] && !banned[kk]) {
          cheapest = std::min(cheapest, action_cost[kk]);
        }
      }
      if (!std::isfinite(cheapest)) {
        return std::numeric_limits<double>::infinity();  // dead subtree
      }
      cheap_bound = std::max(cheap_bound, cheapest);
    }
    if (config.discrete_bound == SolverConfig::DiscreteBound::min_cover ||
        dual.empty()) {
      return cheap_bound;
    }
    // Lagrangian value of the residual problem under the root prices.
    double v = 0.0;
    for (size_t r = 0; r < residual.size(); ++r) {
      if (residual[r] > 0.0) v += residual[r] * dual[r];
    }
    for (size_t k = 0; k < actions.size(); ++k) {
      if (selected[k] || banned[k]) continue;
      double q = 0.0;
      for (int r : action_rows[k]) {
        if (residual[static_cast<size_t>(r)] > 0.0) {
          q += dual[static_cast<size_t>(r)];
        }
      }
      if (q > action_cost[k]) v -= q - action_cost[k];
    }
    return std::max(v, cheap_bound);
  }

  void accept_leaf() {
    std::vector<CfeEntry> entries;
    entries.reserve(chosen.size());
    for (int k : chosen) {
      entries.push_back({actions[static_cast<size_t>(k)], +1});
    }
    std::sort(entries.begin(), entries.end(), entry_less);
    // Zero-cost allowed actions below the largest chosen index join the
    // canonical representative for free; the tie rule prefers them.
    if (!entries.empty() && !zero_cost_actions.empty()) {
      const int top = entries.back().action;
      bool extended = false;
      for (int k : zero_cost_actions) {
        const size_t kk = static_cast<size_t>(k);
        if (!selected[kk] && actions[kk] < top) {
          entries.push_back({actions[kk], +1});
          extended = true;
        }
      }
      if (extended) std::sort(entries.begin(), entries.end(), entry_less);
    }
    const double cost = canonical_cost(entries, catalog);
    incumbent.offer(std::move(entries), cost);
  }

  void dfs() {
    if (!budget.tick()) return;
    if (open_rows == 0) {
      accept_leaf();
      return;
    }
    const double bound = current_cost + residual_bound();
    if (!std::isfinite(bound) ||
        (incumbent.found && bound > incumbent.cost + kPruneSlack)) {
      return;
    }

    // Branch on the open row with the fewest available covering actions.
    int row = -1;
    size_t fewest = std::numeric_limits<size_t>::max();
    for (size_t r = 0; r < residual.size(); ++r) {
      if (residual[r] <= 0.0) continue;
      size_t avail = 0;
      for (int k : row_actions[r]) {
        const size_t kk = static_cast<size_t>(k);
        if (!selected[kk] && !banned[kk]) ++avail;
      }
      if (avail < fewest) {
        fewest = avail;
        row = static_cast<int>(r);
      }
    }
    if (row < 0 || fewest == 0) return;

    std::vector<int> candidates;
    for (int k : row_actions[static_cast<size_t>(row)]) {
      const size_t kk = static_cast<size_t>(k);
      if (!selected[kk] && !banned[kk]) candidates.push_back(k);
    }
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      const size_t aa = static_cast<size_t>(a), bb = static_cast<size_t>(b);
      if (action_cost[aa] != action_cost[bb]) {
        return action_cost[aa] < action_cost[bb];
      }
      return actions[aa] < actions[bb];
    });

    // Child k takes candidate k and bans candidates 0..k-1, partitioning
    // the covers of this row without duplication.
    for (size_t c = 0; c < candidates.size() && !budget.truncated; ++c) {
      const size_t k = static_cast<size_t>(candidates[c]);
      selected[k] = 1;
      chosen.push_back(candidates[c]);
      current_cost += action_cost[k];
      for (int r : action_rows[k]) {
        auto& v = residual[static_cast<size_t>(r)];
        const bool was_open = v > 0.0;
        v -= 1.0;
        if (was_open && v <= 0.0) --open_rows;
      }

      dfs();

      for (int r : action_rows[k]) {
        auto& v = residual[static_cast<size_t>(r)];
        const bool was_closed = v <= 0.0;
        v += 1.0;
        if (was_closed && v > 0.0) ++open_rows;
      }
      current_cost -= action_cost[k];
      chosen.pop_back();
      selected[k] = 0;
      banned[k] = 1;
    }
    for (int c : candidates) banned[static_cast<size_t>(c)] = 0;
  }
};

// ---------------------------------------------------------------------------
// hl-continuous: signed subset covering a required margin
// ---------------------------------------------------------------------------

struct ContinuousSearch {
  const AgentState& agent;
  const ActionCatalog& catalog;
  const SolverConfig& config;
  Classifier clf;
  SearchBudget budget;

  struct Item {
    int action;      // catalog index
    double cost;
    double benefit;  // c . v for the raw vector
  };
  std::vector<Item> items;  // sorted by cost per unit |benefit|
  std::vector<double> suffix_gain;      // sum of |benefit| from position k on
  std::vector<char> suffix_zero_cost;   // any zero-cost item from k on
  double required = 0.0;                // margin - (c.x + b)
  std::vector<CfeEntry> chosen;
  double current_cost = 0.0;
  double current_benefit = 0.0;
  Incumbent incumbent;

  ContinuousSearch(const AgentState& a, const ActionCatalog& cat,
                   const LinearClassifier& lin, const SolverConfig& cfg)
      : agent(a), catalog(cat), config(cfg), clf(lin), budget(cfg) {
    double score = lin.intercept;
    for (size_t i = 0; i < a.dim(); ++i) {
      score += lin.weights[i] * a.features[i];
    }
    required = lin.margin - score;

    for (int j : resolve_allowed(cfg, cat.size())) {
      const ContinuousAction& act = cat.continuous[static_cast<size_t>(j)];
      double w = 0.0;
      for (size_t i = 0; i < a.dim(); ++i) w += lin.weights[i] * act.effect[i];
      items.push_back({j, act.cost, w});
    }
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
      const double rx = std::abs(x.benefit) > 0.0
                            ? x.cost / std::abs(x.benefit)
                            : std::numeric_limits<double>::infinity();
      const double ry = std::abs(y.benefit) > 0.0
                            ? y.cost / std::abs(y.benefit)
                            : std::numeric_limits<double>::infinity();
      if (rx != ry) return rx < ry;
      return x.action < y.action;
    });
    suffix_gain.assign(items.size() + 1, 0.0);
    suffix_zero_cost.assign(items.size() + 1, 0);
    for (size_t k = items.size(); k-- > 0;) {
      suffix_gain[k] = suffix_gain[k + 1] + std::abs(items[k].benefit);
      suffix_zero_cost[k] =
          suffix_zero_cost[k + 1] || items[k].cost == 0.0;
    }
  }

  double fractional_bound(size_t pos, double deficit) const {
    if (deficit <= 0.0) return 0.0;
    double extra = 0.0;
    for (size_t k = pos; k < items.size(); ++k) {
      const double gain = std::abs(items[k].benefit);
      if (gain <= 0.0) break;  // sorted: everything after is useless too
      if (gain >= deficit) {
        return extra + items[k].cost * (deficit / gain);
      }
      extra += items[k].cost;
      deficit -= gain;
    }
    return std::numeric_limits<double>::infinity();  // cannot be covered
  }

  // Verifies through the real classifier (and the optional nonnegativity
  // constraint) before adopting a candidate; the search accumulator is
  // only a pre-filter.
  void offer_candidate() {
    std::vector<CfeEntry> entries = chosen;
    std::sort(entries.begin(), entries.end(), entry_less);
    const double cost = canonical_cost(entries, catalog);
    if (incumbent.found && cost > incumbent.cost + kPruneSlack) return;
    Cfe cfe;
    cfe.entries = entries;
    cfe.total_cost = cost;
    const AgentState after = apply_cfe(agent, cfe, catalog);
    if (classify(after, clf) != Label::positive) return;
    if (config.enforce_nonnegative_state) {
      for (double v : after.features) {
        if (v < 0.0) return;
      }
    }
    incumbent.offer(std::move(entries), cost);
  }

  void dfs(size_t pos) {
    if (!budget.tick()) return;
    const double deficit = required - current_benefit;
    bool settled = false;
    if (deficit <= kBenefitSlack) {
      offer_candidate();
      // Once feasible, only zero-cost inclusions can still matter for the
      // tie rule (any other extension strictly raises cost). Under the
      // nonnegativity constraint later inclusions can also repair state
      // feasibility, so the search continues in full.
      settled = !config.enforce_nonnegative_state;
    }
    if (pos >= items.size()) return;
    if (settled && !suffix_zero_cost[pos]) return;

    const double completion =
        fractional_bound(pos, deficit - kBenefitSlack);
    if (!std::isfinite(completion) && deficit > kBenefitSlack) return;
    if (incumbent.found &&
        current_cost + std::max(completion, 0.0) >
            incumbent.cost + kPruneSlack) {
      return;
    }

    const Item& it = items[pos];
    if (!settled || it.cost == 0.0) {
      // Dominated-sign pruning: a positive-benefit action never appears
      // with -1 in a canonical optimum (flipping it keeps validity and
      // the tie rule prefers +1). The reverse does not hold: when slack
      // allows, +1 on a negative-benefit action is canonical, so both
      // signs are searched there. The nonnegativity constraint voids
      // the dominance argument entirely.
      int signs[2];
      int num_signs;
      if (config.enforce_nonnegative_state || it.benefit < 0.0) {
        signs[0] = +1;
        signs[1] = -1;
        num_signs = 2;
      } else {
        signs[0] = +1;
        num_signs = 1;
      }
      for (int si = 0; si < num_signs; ++si) {
        const int s = signs[si];
        const double contribution = s * it.benefit;
        if (!config.enforce_nonnegative_state && contribution < 0.0 &&
            deficit - contribution - kBenefitSlack > suffix_gain[pos + 1]) {
          continue;  // margin can no longer be reached down this branch
        }
        chosen.push_back({it.action, s});
        current_cost += it.cost;
        current_benefit += contribution;
        dfs(pos + 1);
        current_benefit -= contribution;
        current_cost -= it.cost;
        chosen.pop_back();
        if (budget.truncated) return;
      }
    }
    if (!budget.truncated) dfs(pos + 1);  // exclude
  }
};

// ---------------------------------------------------------------------------
// low-level grid search
// ---------------------------------------------------------------------------

struct GridSearch {
  const AgentState& agent;
  const LowLevelProblem& problem;
  Classifier clf;
  SearchBudget budget;

  struct Option {
    int feature;
    int step;  // index into the feature's grid
    double cost;
    double benefit;
  };
  std::vector<int> order;                    // feature visit order
  std::vector<std::vector<Option>> options;  // per feature, cost-ascending
  std::vector<Option> pool;                  // positive-benefit, ratio-sorted
  std::vector<int> choice;                   // grid index per feature, -1 open
  double required = 0.0;
  double current_cost = 0.0;
  double current_benefit = 0.0;

  bool found = false;
  std::vector<int> best_choice;
  double best_cost = std::numeric_limits<double>::infinity();

  GridSearch(const AgentState& a, const LowLevelProblem& p,
             const LinearClassifier& lin, const SolverConfig& cfg)
      : agent(a), problem(p), clf(lin), budget(cfg) {
    double score = lin.intercept;
    for (size_t i = 0; i < a.dim(); ++i) {
      score += lin.weights[i] * a.features[i];
    }
    required = lin.margin - score;

    const size_t n = p.dim();
    options.resize(n);
    choice.assign(n, -1);
    std::vector<double> best_ratio(n, std::numeric_limits<double>::infinity());
    for (size_t i = 0; i < n; ++i) {
      for (size_t s = 0; s < p.grids[i].size(); ++s) {
        const GridStep& g = p.grids[i][s];
        options[i].push_back({static_cast<int>(i), static_cast<int>(s), g.cost,
                              lin.weights[i] * g.delta});
      }
      std::sort(options[i].begin(), options[i].end(),
                [](const Option& x, const Option& y) {
                  if (x.cost != y.cost) return x.cost < y.cost;
                  return x.step < y.step;
                });
      for (const Option& o : options[i]) {
        if (o.benefit > 0.0) {
          pool.push_back(o);
          best_ratio[i] = std::min(best_ratio[i], o.cost / o.benefit);
        }
      }
    }
    std::sort(pool.begin(), pool.end(), [](const Option& x, const Option& y) {
      const double rx = x.cost / x.benefit;
      const double ry = y.cost / y.benefit;
      if (rx != ry) return rx < ry;
      if (x.feature != y.feature) return x.feature < y.feature;
      return x.step < y.step;
    });

    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      const auto bx = best_ratio[static_cast<size_t>(x)];
      const auto by = best_ratio[static_cast<size_t>(y)];
      if (bx != by) return bx < by;
      return x < y;
    });
  }

  // Relaxation: fractional steps, several per feature. Only ever weaker
  // than the true completion cost, so admissible.
  double fractional_bound(double deficit) const {
    if (deficit <= 0.0) return 0.0;
    double extra = 0.0;
    for (const Option& o : pool) {
      if (choice[static_cast<size_t>(o.feature)] >= 0) continue;
      if (o.benefit >= deficit) {
        return extra + o.cost * (deficit / o.benefit);
      }
      extra += o.cost;
      deficit -= o.benefit;
    }
    return std::numeric_limits<double>::infinity();
  }

  void offer_leaf() {
    AgentState after = agent;
    double cost = 0.0;
    for (size_t i = 0; i < problem.dim(); ++i) {
      const GridStep& g = problem.grids[i][static_cast<size_t>(choice[i])];
      after.features[i] += g.delta;
      cost += g.cost;
    }
    if (classify(after, clf) != Label::positive) return;
    if (found) {
      if (cost > best_cost) return;
      if (cost == best_cost &&
          !std::lexicographical_compare(choice.begin(), choice.end(),
                                        best_choice.begin(),
                                        best_choice.end())) {
        return;
      }
    }
    found = true;
    best_cost = cost;
    best_choice = choice;
  }

  void dfs(size_t depth) {
    if (!budget.tick()) return;
    if (depth == order.size()) {
      if (required - current_benefit <= kBenefitSlack) offer_leaf();
      return;
    }
    const double completion =
        fractional_bound(required - current_benefit - kBenefitSlack);
    if (!std::isfinite(completion)) return;
    if (found && current_cost + completion > best_cost + kPruneSlack) return;

    const size_t f = static_cast<size_t>(order[depth]);
    for (const Option& o : options[f]) {
      choice[f] = o.step;
      current_cost += o.cost;
      current_benefit += o.benefit;
      dfs(depth + 1);
      current_benefit -= o.benefit;
      current_cost -= o.cost;
      choice[f] = -1;
      if (budget.truncated) return;
    }
  }
};

}  // namespace

void LowLevelProblem::validate() const {
  if (!immutable_mask.empty() && immutable_mask.size() != grids.size()) {
    throw DimensionMismatchError("immutable mask length differs from grids");
  }
  for (size_t i = 0; i < grids.size(); ++i) {
    bool has_zero = false;
    for (const GridStep& g : grids[i]) {
      if (g.delta == 0.0 && g.cost == 0.0) has_zero = true;
      if (g.cost < 0.0) {
        throw ConfigError("grid step costs must be nonnegative (feature " +
                          std::to_string(i) + ")");
      }
    }
    if (!has_zero) {
      throw ConfigError(
          "every grid must contain the zero step at cost 0 (feature " +
          std::to_string(i) + ")");
    }
    if (!immutable_mask.empty() && immutable_mask[i] && grids[i].size() != 1) {
      throw ConfigError("immutable feature " + std::to_string(i) +
                        " must carry the singleton {0} grid");
    }
  }
}

SolveResult solve_hl_discrete(const AgentState& agent,
                              const ActionCatalog& catalog,
                              const Classifier& clf,
                              const SolverConfig& config) {
  if (catalog.kind != ActionKind::discrete) {
    throw KindMismatchError("solve_hl_discrete requires a discrete catalog");
  }
  const auto* thr = std::get_if<ThresholdClassifier>(&clf);
  if (thr == nullptr) {
    throw KindMismatchError(
        "solve_hl_discrete requires a threshold classifier");
  }
  if (agent.dim() != classifier_dim(clf) ||
      (catalog.size() > 0 && agent.dim() != catalog.dim())) {
    throw DimensionMismatchError("solve_hl_discrete: dimension mismatch");
  }

  SolveResult result;
  if (classify(agent, clf) == Label::positive) {
    result.already_positive = true;
    result.optimal = true;
    return result;
  }
  if (catalog.size() == 0) {
    throw InfeasibleError("empty action catalog");
  }

  DiscreteSearch search(agent, catalog, *thr, config);
  search.greedy_incumbent();
  if (config.discrete_bound == SolverConfig::DiscreteBound::lp_dual) {
    search.fit_root_duals(120);
  }
  search.dfs();

  if (!search.incumbent.found) {
    throw InfeasibleError("no action subset covers every deficiency");
  }
  result.cfe.entries = search.incumbent.entries;
  result.cfe.total_cost = search.incumbent.cost;
  result.optimal = !search.budget.truncated;
  result.nodes_explored = search.budget.nodes;
  result.wall_time = search.budget.elapsed();
  return result;
}

SolveResult solve_hl_continuous(const AgentState& agent,
                                const ActionCatalog& catalog,
                                const Classifier& clf,
                                const SolverConfig& config) {
  if (catalog.kind != ActionKind::continuous) {
    throw KindMismatchError(
        "solve_hl_continuous requires a continuous catalog");
  }
  const auto* lin = std::get_if<LinearClassifier>(&clf);
  if (lin == nullptr) {
    throw KindMismatchError("solve_hl_continuous requires a linear classifier");
  }
  if (agent.dim() != classifier_dim(clf) ||
      (catalog.size() > 0 && agent.dim() != catalog.dim())) {
    throw DimensionMismatchError("solve_hl_continuous: dimension mismatch");
  }

  SolveResult result;
  if (classify(agent, clf) == Label::positive) {
    result.already_positive = true;
    result.optimal = true;
    return result;
  }

  ContinuousSearch search(agent, catalog, *lin, config);
  if (search.suffix_gain.empty() ||
      search.suffix_gain[0] < search.required - kBenefitSlack) {
    throw InfeasibleError(
        "even taking every action at its better sign cannot reach the margin");
  }
  search.dfs(0);

  if (!search.incumbent.found) {
    throw InfeasibleError("no sign assignment reaches the required margin");
  }
  result.cfe.entries = search.incumbent.entries;
  result.cfe.total_cost = search.incumbent.cost;
  result.optimal = !search.budget.truncated;
  result.nodes_explored = search.budget.nodes;
  result.wall_time = search.budget.elapsed();
  return result;
}

LowLevelSolution solve_low_level(const AgentState& agent,
                                 const LowLevelProblem& problem,
                                 const Classifier& clf,
                                 const SolverConfig& config) {
  const auto* lin = std::get_if<LinearClassifier>(&clf);
  if (lin == nullptr) {
    throw KindMismatchError("solve_low_level requires a linear classifier");
  }
  problem.validate();
  if (agent.dim() != classifier_dim(clf) || agent.dim() != problem.dim()) {
    throw DimensionMismatchError("solve_low_level: dimension mismatch");
  }

  LowLevelSolution result;
  if (classify(agent, clf) == Label::positive) {
    result.already_positive = true;
    result.optimal = true;
    return result;
  }

  GridSearch search(agent, problem, *lin, config);
  search.dfs(0);
  if (!search.found) {
    throw InfeasibleError("no grid combination flips the classifier");
  }
  for (size_t i = 0; i < problem.dim(); ++i) {
    const GridStep& g =
        problem.grids[i][static_cast<size_t>(search.best_choice[i])];
    if (g.delta != 0.0) {
      result.deltas.push_back({static_cast<int>(i), g.delta, g.cost});
    }
  }
  result.total_cost = search.best_cost;
  result.optimal = !search.budget.truncated;
  result.nodes_explored = search.budget.nodes;
  result.wall_time = search.budget.elapsed();
  return result;
}

Cfe brute_force_discrete(const AgentState& agent, const ActionCatalog& catalog,
                         const Classifier& clf) {
  if (catalog.kind != ActionKind::discrete) {
    throw KindMismatchError("brute_force_discrete requires a discrete catalog");
  }
  if (catalog.size() > 20) {
    throw CatalogTooLargeError(
        "brute_force_discrete enumerates subsets; catalog limit is 20");
  }
  const auto* thr = std::get_if<ThresholdClassifier>(&clf);
  if (thr == nullptr) {
    throw KindMismatchError(
        "brute_force_discrete requires a threshold classifier");
  }
  const size_t n = agent.dim();
  const size_t J = catalog.size();

  std::vector<double> counts(agent.features);
  int deficient = 0;
  for (size_t i = 0; i < n; ++i) {
    if (counts[i] < thr->thresholds[i]) ++deficient;
  }

  Incumbent incumbent;
  auto consider = [&](uint32_t mask) {
    if (deficient != 0) return;
    std::vector<CfeEntry> entries;
    for (size_t j = 0; j < J; ++j) {
      if (mask & (1u << j)) entries.push_back({static_cast<int>(j), +1});
    }
    const double cost = canonical_cost(entries, catalog);
    incumbent.offer(std::move(entries), cost);
  };

  // Gray-code walk: one action flips per step, so the coverage counts
  // update in O(n) per subset.
  uint32_t gray = 0;
  consider(0);
  const uint64_t total = 1ull << J;
  for (uint64_t it = 1; it < total; ++it) {
    const uint32_t next = static_cast<uint32_t>(it ^ (it >> 1));
    const uint32_t flipped = next ^ gray;
    const size_t j = static_cast<size_t>(std::countr_zero(flipped));
    const int dir = (next & flipped) ? +1 : -1;
    const DiscreteAction& a = catalog.discrete[j];
    for (size_t i = 0; i < n; ++i) {
      if (!a.capabilities[i]) continue;
      const bool was_ok = counts[i] >= thr->thresholds[i];
      counts[i] += dir;
      const bool now_ok = counts[i] >= thr->thresholds[i];
      if (was_ok && !now_ok) ++deficient;
      if (!was_ok && now_ok) --deficient;
    }
    gray = next;
    consider(next);
  }
  if (!incumbent.found) {
    throw InfeasibleError("no subset of the catalog is a valid CFE");
  }
  Cfe cfe;
  cfe.entries = incumbent.entries;
  cfe.total_cost = incumbent.cost;
  return cfe;
}

Cfe brute_force_continuous(const AgentState& agent,
                           const ActionCatalog& catalog, const Classifier& clf,
                           const SolverConfig& config) {
  if (catalog.kind != ActionKind::continuous) {
    throw KindMismatchError(
        "brute_force_continuous requires a continuous catalog");
  }
  if (catalog.size() > 12) {
    throw CatalogTooLargeError(
        "brute_force_continuous enumerates 3^|J| assignments; "
        "catalog limit is 12");
  }
  const auto* lin = std::get_if<LinearClassifier>(&clf);
  if (lin == nullptr) {
    throw KindMismatchError(
        "brute_force_continuous requires a linear classifier");
  }
  const size_t J = catalog.size();
  double base = lin->intercept;
  for (size_t i = 0; i < agent.dim(); ++i) {
    base += lin->weights[i] * agent.features[i];
  }
  std::vector<double> w(J, 0.0);
  for (size_t j = 0; j < J; ++j) {
    for (size_t i = 0; i < agent.dim(); ++i) {
      w[j] += lin->weights[i] * catalog.continuous[j].effect[i];
    }
  }

  Incumbent incumbent;
  std::vector<CfeEntry> chosen;

  auto verify_and_offer = [&]() {
    std::vector<CfeEntry> entries = chosen;
    std::sort(entries.begin(), entries.end(), entry_less);
    const double exact_cost = canonical_cost(entries, catalog);
    if (incumbent.found && exact_cost > incumbent.cost + kPruneSlack) return;
    Cfe cfe;
    cfe.entries = entries;
    cfe.total_cost = exact_cost;
    const AgentState after = apply_cfe(agent, cfe, catalog);
    if (classify(after, clf) != Label::positive) return;
    if (config.enforce_nonnegative_state) {
      for (double v : after.features) {
        if (v < 0.0) return;
      }
    }
    incumbent.offer(std::move(entries), exact_cost);
  };

  auto rec = [&](auto&& self, size_t j, double score) -> void {
    if (j == J) {
      if (score >= lin->margin - kBenefitSlack) verify_and_offer();
      return;
    }
    self(self, j + 1, score);  // exclude
    for (int s : {+1, -1}) {
      chosen.push_back({static_cast<int>(j), s});
      self(self, j + 1, score + s * w[j]);
      chosen.pop_back();
    }
  };
  rec(rec, 0, base);

  if (!incumbent.found) {
    throw InfeasibleError(
        "no sign assignment over the catalog is a valid CFE");
  }
  Cfe cfe;
  cfe.entries = incumbent.entries;
  cfe.total_cost = incumbent.cost;
  return cfe;
}

Cfe canonicalize_cfe(const std::vector<Cfe>& candidates) {
  if (candidates.empty()) {
    throw EmptyCandidatesError("canonicalize_cfe: no candidates");
  }
  const Cfe* best = &candidates.front();
  for (const Cfe& c : candidates) {
    if (cfe_lex_less(c, *best)) best = &c;
  }
  return *best;
}

}  // namespace recourse
