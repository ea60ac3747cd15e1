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

#ifndef RECOURSE_SOLVERS_HPP
#define RECOURSE_SOLVERS_HPP

#include <chrono>
#include <cstdint>
#include <limits>
#include <vector>

#include "recourse/core.hpp"

namespace recourse {

struct SolverConfig {
  /// Lower bound for the discrete search. lp_dual runs a safeguarded dual
  /// ascent on the LP relaxation of the residual covering problem (weak
  /// duality keeps it admissible at any iteration count); min_cover is the
  /// cheaper max-over-features bound.
  enum class DiscreteBound { lp_dual, min_cover };
  DiscreteBound discrete_bound = DiscreteBound::lp_dual;

  uint64_t node_limit = 10'000'000;
  double time_limit_seconds = std::numeric_limits<double>::infinity();

  /// Continuous solver only: also require x + sum z_j v_j >= 0 elementwise.
  bool enforce_nonnegative_state = false;

  /// Restrict the search to this subset of catalog indices (empty = all).
  /// Returned CFEs still use global catalog indices.
  std::vector<int> allowed_actions;
};

struct SolveResult {
  Cfe cfe;
  bool optimal = false;          // search closed the gap
  bool already_positive = false; // agent needed no CFE
  uint64_t nodes_explored = 0;
  std::chrono::duration<double> wall_time{0};
};

/// Minimum-cost subset of discrete actions covering every deficient
/// feature of a threshold-classified agent (weighted set cover).
/// Best-first branch and bound; ties broken by the canonical rule.
/// Throws InfeasibleError when some deficiency cannot be covered.
SolveResult solve_hl_discrete(const AgentState& agent,
                              const ActionCatalog& catalog,
                              const Classifier& clf,
                              const SolverConfig& config = {});

/// Minimum-cost signed subset of continuous actions pushing a linear
/// classifier's score past its margin. The bilinear a_j(2e_j - 1) term is
/// searched as a ternary inclusion state per action.
SolveResult solve_hl_continuous(const AgentState& agent,
                                const ActionCatalog& catalog,
                                const Classifier& clf,
                                const SolverConfig& config = {});

/// Enumerates all subsets. Guard: catalog size <= 20.
Cfe brute_force_discrete(const AgentState& agent, const ActionCatalog& catalog,
                         const Classifier& clf);

/// Enumerates all 3^|J| sign assignments. Guard: catalog size <= 12.
Cfe brute_force_continuous(const AgentState& agent,
                           const ActionCatalog& catalog, const Classifier& clf,
                           const SolverConfig& config = {});

/// Deterministic tie rule over equal-cost valid CFEs: lexicographically
/// smallest (index, sign) sequence, +1 before -1.
Cfe canonicalize_cfe(const std::vector<Cfe>& candidates);

// ---------------------------------------------------------------------------
// Low-level (feature-grid) recourse
// ---------------------------------------------------------------------------

struct GridStep {
  double delta = 0.0;
  double cost = 0.0;
};

/// Discretized per-feature action grid. Every grid must contain the zero
/// step at cost zero; immutable features carry the singleton {0} grid.
struct LowLevelProblem {
  std::vector<std::vector<GridStep>> grids;
  std::vector<bool> immutable_mask;

  size_t dim() const { return grids.size(); }
  void validate() const;
};

struct FeatureDelta {
  int feature = 0;
  double delta = 0.0;
  double cost = 0.0;
};

/// Result of the grid solver, reported as a feature-delta map. Features
/// left at their zero step (including immutable ones) are omitted.
struct LowLevelSolution {
  std::vector<FeatureDelta> deltas;
  double total_cost = 0.0;
  bool optimal = false;
  bool already_positive = false;
  uint64_t nodes_explored = 0;
  std::chrono::duration<double> wall_time{0};
};

/// Picks one grid step per feature at minimum total cost subject to the
/// linear classifier flipping. Exact branch and bound with a fractional
/// completion bound.
LowLevelSolution solve_low_level(const AgentState& agent,
                                 const LowLevelProblem& problem,
                                 const Classifier& clf,
                                 const SolverConfig& config = {});

}  // namespace recourse

#endif  // RECOURSE_SOLVERS_HPP
