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

#include "antientropy/ghost.hpp"

namespace antientropy {

void taint_write(ClusterState& s, OpId op_id) {
  AE_REQUIRE(!s.taint.tainted_op.has_value(), "taint_write: a write is already tainted");
  bool found = false;
  for (StoreEntry& e : s.pending) {
    if (e.op.op_id != op_id) continue;
    e.op.tainted = true;
    s.taint.pending_tainted.insert(e.replica);
    s.taint.tainted_key = e.op.key;
    found = true;
  }
  AE_REQUIRE(found, "taint_write: op has no pending copies (must run at issuance)");
  s.taint.tainted_op = op_id;
}

void taint_on_deliver(ClusterState& s, ReplicaId r, const WriteOp& op) {
  if (!op.tainted) return;
  s.taint.pending_tainted.erase(r);
  s.taint.store_tainted.insert(r);
}

void taint_on_to_hint(ClusterState& s, ReplicaId r, const WriteOp& op) {
  if (!op.tainted) return;
  s.taint.pending_tainted.erase(r);
  s.taint.hinted_tainted.insert(r);
}

void taint_on_handoff(ClusterState& s, ReplicaId r, const WriteOp& op) {
  if (!op.tainted) return;
  s.taint.hinted_tainted.erase(r);
  s.taint.store_tainted.insert(r);
}

void taint_on_lose(ClusterState& s, ReplicaId r, const WriteOp& op) {
  if (!op.tainted) return;
  s.taint.pending_tainted.erase(r);
}

void taint_on_wipe(ClusterState& s, ReplicaId r, Key k) {
  if (s.taint.tainted_key && *s.taint.tainted_key == k) s.taint.store_tainted.erase(r);
}

void taint_on_destroy_hints(ClusterState& s, CoordinatorId c) {
  auto it = s.hint_stores.find(c);
  if (it == s.hint_stores.end()) return;
  for (const StoreEntry& e : it->second)
    if (e.op.tainted) s.taint.hinted_tainted.erase(e.replica);
}

bool taint_safety_invariant(const Config& cfg, const ClusterState& s) {
  AE_REQUIRE(s.taint.tainted_op.has_value(), "safety invariant needs a tainted write");
  const TaintLedger& t = s.taint;
  for (ReplicaId r : preference_list(cfg, *t.tainted_key)) {
    if (!t.pending_tainted.count(r) && !t.hinted_tainted.count(r) &&
        !t.store_tainted.count(r))
      return false;
  }
  return true;
}

uint64_t delivery_rank(const ClusterState& s) {
  uint64_t rank = 2 * s.pending.size();
  for (const auto& [c, entries] : s.hint_stores) rank += entries.size();
  return rank;
}

bool delivery_end_predicate(const Config& cfg, const ClusterState& s) {
  AE_REQUIRE(s.taint.tainted_op.has_value(), "delivery end predicate needs a tainted write");
  for (ReplicaId r : preference_list(cfg, *s.taint.tainted_key))
    if (!s.taint.store_tainted.count(r)) return false;
  return true;
}

uint64_t convergence_rank(const Config& cfg, const ClusterState& s) {
  uint64_t rank = s.pending.size();
  for (const auto& [c, entries] : s.hint_stores) rank += entries.size();
  for (const ClientOpState& op : s.client_ops)
    if (op.repair_spawned && !op.repair_fired)
      rank += static_cast<uint64_t>(cfg.replication);
  return rank;
}

std::set<ReplicaId> live_replicas(const Config& cfg, const ClusterState& s, Key key) {
  std::set<ReplicaId> out;
  for (ReplicaId r : preference_list(cfg, key))
    if (s.alive[static_cast<size_t>(r)]) out.insert(r);
  return out;
}

bool convergence_predicate(const Config& cfg, const ClusterState& s, Key key,
                           const std::set<ReplicaId>& live) {
  bool first = true;
  std::set<Value> expected;
  for (ReplicaId r : live) {
    const RegisterState* reg = s.store(r, key);
    std::set<Value> got = reg ? query(*reg) : std::set<Value>{};
    if (first) {
      expected = got;
      first = false;
    } else if (got != expected) {
      return false;
    }
  }
  (void)cfg;
  return true;
}

}  // namespace antientropy
