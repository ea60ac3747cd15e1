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

#ifndef RECOURSE_CORE_HPP
#define RECOURSE_CORE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recourse/errors.hpp"

namespace recourse {

using FeatureVector = std::vector<double>;

/// An agent's feature vector plus an optional group label.
///
/// Binary datasets store raw features as 0/1 reals. After discrete actions
/// are applied the vector holds additive capability counts, which may
/// exceed 1; render_binary() clamps back to a 0/1 profile.
struct AgentState {
  FeatureVector features;
  std::optional<std::string> group;

  size_t dim() const { return features.size(); }
};

/// Binary capability vector with a nonnegative cost.
struct DiscreteAction {
  std::vector<uint8_t> capabilities;  // entries in {0,1}
  double cost = 0.0;
  std::string name;
};

/// Signed real-vector action with a nonnegative cost. The same vector can
/// be applied added or subtracted; the cost is identical either way.
struct ContinuousAction {
  FeatureVector effect;
  double cost = 0.0;
  std::string name;
};

enum class ActionKind { discrete, continuous };

/// Ordered, densely indexed list of actions. Index order is load-bearing:
/// hl-id labels and canonical CFE forms depend on it, and serialization
/// round-trips must preserve it.
struct ActionCatalog {
  ActionKind kind = ActionKind::discrete;
  std::vector<DiscreteAction> discrete;
  std::vector<ContinuousAction> continuous;

  size_t size() const {
    return kind == ActionKind::discrete ? discrete.size() : continuous.size();
  }
  size_t dim() const;
  double cost_of(size_t index) const;
};

struct LinearClassifier {
  FeatureVector weights;
  double intercept = 0.0;
  double margin = 1e-6;  // realizes the strict inequality; must be > 0
};

struct ThresholdClassifier {
  FeatureVector thresholds;  // entries >= 0
};

using Classifier = std::variant<LinearClassifier, ThresholdClassifier>;

size_t classifier_dim(const Classifier& clf);

enum class Label { positive, negative };

/// One CFE entry: a catalog action index and a sign. Discrete CFEs only
/// use +1; continuous CFEs may subtract an action's effect with -1.
struct CfeEntry {
  int action = 0;
  int sign = +1;

  friend bool operator==(const CfeEntry&, const CfeEntry&) = default;
};

/// Canonical entry order: ascending action index, and +1 before -1 for the
/// (degenerate) comparison of two entries on the same action.
bool entry_less(const CfeEntry& a, const CfeEntry& b);

/// A counterfactual explanation: a canonical set of catalog action indices
/// with signs, its total cost, and an optional hl-id label.
///
/// Canonical form: entries sorted ascending by action index, no duplicate
/// index, and total_cost equal to the sum of catalog costs of the included
/// actions accumulated in entry order (signs never change cost).
struct Cfe {
  std::vector<CfeEntry> entries;
  double total_cost = 0.0;
  std::optional<int> hl_id;

  size_t num_actions() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  friend bool operator==(const Cfe& a, const Cfe& b) {
    return a.entries == b.entries;
  }
};

/// Lexicographic order on entry lists; the deterministic tie rule used
/// everywhere equal-cost CFEs must be ranked.
bool cfe_lex_less(const Cfe& a, const Cfe& b);

/// Builds a canonical Cfe from arbitrary entries: sorts, rejects
/// duplicates, recomputes total_cost from the catalog.
Cfe make_cfe(std::vector<CfeEntry> entries, const ActionCatalog& catalog);

/// Recomputes total cost from the catalog in canonical entry order.
double cfe_cost(const Cfe& cfe, const ActionCatalog& catalog);

enum class ProblemKind { hl_discrete, hl_continuous, low_level };

struct AgentCfePair {
  AgentState agent;
  Cfe cfe;
  ProblemKind problem_kind = ProblemKind::hl_discrete;
};

/// Validating constructor for AgentCfePair: throws unless the CFE flips
/// the classifier for the agent.
AgentCfePair make_pair_checked(AgentState agent, Cfe cfe, ProblemKind kind,
                               const ActionCatalog& catalog,
                               const Classifier& clf);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Threshold: positive iff x_i >= t_i for every feature.
/// Linear: positive iff c.x + b >= margin.
Label classify(const AgentState& state, const Classifier& clf);

/// Additive capability accounting: returns x_i + capabilities_i per
/// feature. Counts are kept unclamped so overshoot stays observable.
AgentState apply_discrete_action(const AgentState& state,
                                 const DiscreteAction& action);

/// Returns x + sign * effect elementwise; no bound constraints.
AgentState apply_continuous_action(const AgentState& state,
                                   const ContinuousAction& action, int sign);

/// Folds the per-entry application over the CFE; order-independent.
AgentState apply_cfe(const AgentState& state, const Cfe& cfe,
                     const ActionCatalog& catalog);

/// True iff the post-CFE state classifies positive.
bool is_valid_cfe(const AgentState& state, const Cfe& cfe,
                  const ActionCatalog& catalog, const Classifier& clf);

/// Clamps capability counts back to a 0/1 profile.
AgentState render_binary(const AgentState& state);

/// Validation helper for binary datasets: every feature in {0,1}.
bool is_binary_state(const AgentState& state);

}  // namespace recourse

#endif  // RECOURSE_CORE_HPP
