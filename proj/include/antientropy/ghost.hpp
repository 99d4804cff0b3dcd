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

#ifndef ANTIENTROPY_GHOST_HPP_
#define ANTIENTROPY_GHOST_HPP_

#include <cstdint>
#include <set>

#include "antientropy/cluster.hpp"
#include "antientropy/types.hpp"

// Ghost instrumentation: observes protocol transitions and maintains the
// taint ledger plus the checkable predicates built on it. Everything here is
// write-only from the protocol's point of view; no transition's enabledness
// or effect depends on any value computed in this module. The paired-run
// fingerprint check enforces that separation.

namespace antientropy {

// Marks op_id as the run's single tainted write. Every replica that currently
// has a pending copy of it enters the pending-tainted set and the copies'
// ghost bits are raised. The simulation invokes this atomically with the
// put that issues the op, so the set starts as the op's full preference list.
void taint_write(ClusterState& s, OpId op_id);

// Transition hooks. Each receives the copy being moved and keeps the ledger
// aligned with where tainted copies actually sit.
void taint_on_deliver(ClusterState& s, ReplicaId r, const WriteOp& op);
void taint_on_to_hint(ClusterState& s, ReplicaId r, const WriteOp& op);
void taint_on_handoff(ClusterState& s, ReplicaId r, const WriteOp& op);
void taint_on_lose(ClusterState& s, ReplicaId r, const WriteOp& op);
void taint_on_wipe(ClusterState& s, ReplicaId r, Key k);
void taint_on_destroy_hints(ClusterState& s, CoordinatorId c);

// Every replica responsible for the tainted key holds the tainted write
// somewhere: pending, hinted, or applied. Holds from issuance onward under
// transient faults; permanent faults (loss, wipe, hint destruction) break it.
bool taint_safety_invariant(const Config& cfg, const ClusterState& s);

// Termination measure for the hinted-handoff delivery phase: every hint entry
// counts 1 and every pending entry 2, so a delivery (-2), a divert-to-hint
// (-2+1) and a handoff (-1) all strictly decrease it.
uint64_t delivery_rank(const ClusterState& s);

// All replicas responsible for the tainted key have applied the tainted
// write. Meaningful at delivery_rank zero.
bool delivery_end_predicate(const Config& cfg, const ClusterState& s);

// Residual work standing between the current state and read-repair
// convergence: undelivered messages, unhanded hints, and a whole-preference-
// list charge for each spawned repair that has not fired yet (it may still
// enqueue up to N-1 messages).
uint64_t convergence_rank(const Config& cfg, const ClusterState& s);

// All live replicas responsible for key report the same value set.
bool convergence_predicate(const Config& cfg, const ClusterState& s, Key key,
                           const std::set<ReplicaId>& live);

std::set<ReplicaId> live_replicas(const Config& cfg, const ClusterState& s, Key key);

}  // namespace antientropy

#endif  // ANTIENTROPY_GHOST_HPP_
