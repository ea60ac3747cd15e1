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

#include "recourse/core.hpp"

#include <algorithm>
#include <cmath>

namespace recourse {

namespace {

std::string at_index(const char* what, size_t i) {
  return std::string(what) + " at action index " + std::to_string(i);
}

}  // namespace

size_t ActionCatalog::dim() const {
  if (kind == ActionKind::discrete) {
    return discrete.empty() ? 0 : discrete.front().capabilities.size();
  }
  return continuous.empty() ? 0 : continuous.front().effect.size();
}

double ActionCatalog::cost_of(size_t index) const {
  if (index >= size()) {
    throw IndexOutOfRangeError(at_index("no such action", index));
  }
  return kind == ActionKind::discrete ? discrete[index].cost
                                      : continuous[index].cost;
}

size_t classifier_dim(const Classifier& clf) {
  if (const auto* lin = std::get_if<LinearClassifier>(&clf)) {
    return lin->weights.size();
  }
  return std::get<ThresholdClassifier>(clf).thresholds.size();
}

bool entry_less(const CfeEntry& a, const CfeEntry& b) {
  if (a.action != b.action) return a.action < b.action;
  return a.sign > b.sign;  // +1 sorts before -1
}

bool cfe_lex_less(const Cfe& a, const Cfe& b) {
  return std::lexicographical_compare(a.entries.begin(), a.entries.end(),
                                      b.entries.begin(), b.entries.end(),
                                      entry_less);
}

Cfe make_cfe(std::vector<CfeEntry> entries, const ActionCatalog& catalog) {
  std::sort(entries.begin(), entries.end(), entry_less);
  for (size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].action == entries[i - 1].action) {
      throw RecourseError(at_index("duplicate CFE entry", entries[i].action));
    }
  }
  Cfe cfe;
  cfe.entries = std::move(entries);
  cfe.total_cost = cfe_cost(cfe, catalog);
  return cfe;
}

double cfe_cost(const Cfe& cfe, const ActionCatalog& catalog) {
  double total = 0.0;
  for (const CfeEntry& e : cfe.entries) {
    if (e.action < 0 || static_cast<size_t>(e.action) >= catalog.size()) {
      throw IndexOutOfRangeError(at_index("CFE entry out of range", e.action));
    }
    total += catalog.cost_of(static_cast<size_t>(e.action));
  }
  return total;
}

AgentCfePair make_pair_checked(AgentState agent, Cfe cfe, ProblemKind kind,
                               const ActionCatalog& catalog,
                               const Classifier& clf) {
  if (!is_valid_cfe(agent, cfe, catalog, clf)) {
    throw RecourseError("agent-CFE pair rejected: CFE does not flip the classifier");
  }
  return AgentCfePair{std::move(agent), std::move(cfe), kind};
}

Label classify(const AgentState& state, const Classifier& clf) {
  if (state.dim() != classifier_dim(clf)) {
    throw DimensionMismatchError("classify: state has " +
                                 std::to_string(state.dim()) +
                                 " features, classifier expects " +
                                 std::to_string(classifier_dim(clf)));
  }
  if (const auto* lin = std::get_if<LinearClassifier>(&clf)) {
    double score = lin->intercept;
    for (size_t i = 0; i < state.dim(); ++i) {
      score += lin->weights[i] * state.features[i];
    }
    return score >= lin->margin ? Label::positive : Label::negative;
  }
  const auto& thr = std::get<ThresholdClassifier>(clf);
  for (size_t i = 0; i < state.dim(); ++i) {
    if (state.features[i] < thr.thresholds[i]) return Label::negative;
  }
  return Label::positive;
}

AgentState apply_discrete_action(const AgentState& state,
                                 const DiscreteAction& action) {
  if (state.dim() != action.capabilities.size()) {
    throw DimensionMismatchError("apply_discrete_action: dimension mismatch");
  }
  AgentState out = state;
  for (size_t i = 0; i < out.dim(); ++i) {
    out.features[i] += action.capabilities[i];
  }
  return out;
}

AgentState apply_continuous_action(const AgentState& state,
                                   const ContinuousAction& action, int sign) {
  if (state.dim() != action.effect.size()) {
    throw DimensionMismatchError("apply_continuous_action: dimension mismatch");
  }
  AgentState out = state;
  for (size_t i = 0; i < out.dim(); ++i) {
    out.features[i] += sign * action.effect[i];
  }
  return out;
}

AgentState apply_cfe(const AgentState& state, const Cfe& cfe,
                     const ActionCatalog& catalog) {
  AgentState out = state;
  for (const CfeEntry& e : cfe.entries) {
    if (e.action < 0 || static_cast<size_t>(e.action) >= catalog.size()) {
      throw IndexOutOfRangeError(at_index("CFE entry out of range", e.action));
    }
    const size_t j = static_cast<size_t>(e.action);
    if (catalog.kind == ActionKind::discrete) {
      if (e.sign != +1) {
        throw KindMismatchError("discrete CFE entries must have sign +1");
      }
      out = apply_discrete_action(out, catalog.discrete[j]);
    } else {
      if (e.sign != +1 && e.sign != -1) {
        throw KindMismatchError("continuous CFE entry sign must be +1 or -1");
      }
      out = apply_continuous_action(out, catalog.continuous[j], e.sign);
    }
  }
  return out;
}

bool is_valid_cfe(const AgentState& state, const Cfe& cfe,
                  const ActionCatalog& catalog, const Classifier& clf) {
  return classify(apply_cfe(state, cfe, catalog), clf) == Label::positive;
}

AgentState render_binary(const AgentState& state) {
  AgentState out = state;
  for (double& v : out.features) {
    v = v >= 1.0 ? 1.0 : (v <= 0.0 ? 0.0 : v);
  }
  return out;
}

bool is_binary_state(const AgentState& state) {
  return std::all_of(state.features.begin(), state.features.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

}  // namespace recourse
