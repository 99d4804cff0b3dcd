/*
 * Copyright (c) 2026, the antientropy authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

// Transition relation of the replicated store. Every step of a run is one
// Action; enabled_actions lists the choices open to the scheduler in a state
// and apply_action executes one of them. Both are pure functions of the
// state, so exploration, replay and fuzzing share the same semantics.

#ifndef ANTIENTROPY_PROTOCOL_HPP_
#define ANTIENTROPY_PROTOCOL_HPP_

#include <vector>

#include "antientropy/action.hpp"
#include "antientropy/cluster.hpp"
#include "antientropy/scenario.hpp"
#include "antientropy/types.hpp"

namespace antientropy {

// Everything immutable across a run: the configuration, the script being
// driven, and the effective fault caps (scenario override or caller default).
struct RunContext {
  Config cfg;
  const Scenario* scenario = nullptr;
  FaultBudget faults;
};

RunContext make_context(const Scenario& s, const FaultBudget& default_faults = FaultBudget{});

ClusterState initial_state(const RunContext& ctx);

// All actions the scheduler may take next, in canonical order: action kind
// first (enum order), then payload fields ascending. Returns {} once the
// state is dead (an expectation was violated) or the run is finished.
std::vector<Action> enabled_actions(const RunContext& ctx, const ClusterState& s);

// Executes one action. The action must be enabled; preconditions are
// re-checked and a violation throws std::logic_error.
void apply_action(const RunContext& ctx, ClusterState& s, const Action& a);

// Quiescent-phase bookkeeping, shared with the checker and the tests.
bool cluster_settled(const ClusterState& s);
bool pump_done(const RunContext& ctx, const ClusterState& s);
int pump_reads_issued(const ClusterState& s);
int pump_reads_completed(const ClusterState& s);

// True when every remaining directive has run, every client op finished and
// nothing is in flight. Dead states never count as finished.
bool run_finished(const RunContext& ctx, const ClusterState& s);

}  // namespace antientropy

#endif  // ANTIENTROPY_PROTOCOL_HPP_
