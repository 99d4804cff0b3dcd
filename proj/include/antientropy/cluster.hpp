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

#ifndef ANTIENTROPY_CLUSTER_HPP_
#define ANTIENTROPY_CLUSTER_HPP_

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "antientropy/register.hpp"
#include "antientropy/types.hpp"

namespace antientropy {

// One replication message in flight (or parked in a hint store): a write
// destined for one replica. Stores are multisets kept as sorted vectors so
// that equal multisets compare and fingerprint equal regardless of the order
// in which entries were enqueued.
struct StoreEntry {
  ReplicaId replica = 0;
  WriteOp op;

  bool operator==(const StoreEntry&) const = default;
};

inline bool entry_less(const StoreEntry& a, const StoreEntry& b) {
  if (a.replica != b.replica) return a.replica < b.replica;
  return a.op.op_id < b.op.op_id;
}

enum class OpKind { put, get };
enum class Outcome { none, ok, failed };

struct ClientOpState {
  OpKind kind = OpKind::put;
  Key key = 0;
  Value value = 0;             // puts only
  Expect expect = Expect::any;
  bool done = false;
  Outcome outcome = Outcome::none;
  std::optional<OpId> issued;  // the WriteOp a put created
  std::set<ReplicaId> acks;    // puts: replicas whose copy was delivered while waiting
  std::map<ReplicaId, RegisterState> replies;  // gets: local-store snapshots
  std::set<Value> values;      // gets: result of the completed read
  bool repair_spawned = false;
  bool repair_fired = false;
  bool pump = false;           // issued by the convergence checker, not the script
  int directive_index = -1;    // position in the scenario script, -1 for pump reads

  bool operator==(const ClientOpState&) const = default;
};

// Ghost bookkeeping for the one tainted write: which replicas currently hold
// its copy in the pending store, in a hint store, or applied in their local
// store. Written only by the taint hooks; protocol decisions never read it.
struct TaintLedger {
  std::optional<OpId> tainted_op;
  std::optional<Key> tainted_key;
  std::set<ReplicaId> pending_tainted;
  std::set<ReplicaId> hinted_tainted;
  std::set<ReplicaId> store_tainted;

  bool operator==(const TaintLedger&) const = default;
};

// Per-run caps on explorer-injected fault actions. Stored in the state so
// that action enabledness stays a pure function of the state.
struct FaultBudget {
  int max_failure_toggles = 2;
  int max_wipes = 1;    // also covers destroy-hints
  int max_losses = 1;

  bool operator==(const FaultBudget&) const = default;
};

struct ClusterState {
  // Replica-local register stores. Absent entries are never-written registers;
  // a wiped register is erased so wiped and never-written states coincide.
  std::map<std::pair<ReplicaId, Key>, RegisterState> local_stores;
  // Hint stores, one multiset per coordinator.
  std::map<CoordinatorId, std::vector<StoreEntry>> hint_stores;
  // The network: replication messages not yet delivered, hinted, or lost.
  std::vector<StoreEntry> pending;
  std::vector<uint8_t> alive;
  std::vector<ClientOpState> client_ops;
  TaintLedger taint;  // ghost

  bool stop = false;
  QuiesceMode quiesce = QuiesceMode::none;
  Key quiesce_key = 0;
  // Read budget for the convergence pump, frozen when quiescence starts.
  uint32_t pump_bound = 0;

  OpId next_op_seq = 1;
  std::vector<uint32_t> lww_clock;   // per coordinator
  std::map<Key, VClock> mv_clock;    // per key, held at the key's coordinator

  size_t script_pos = 0;
  // Set when a client op completes against its expectation; such runs no
  // longer represent the scenario and are dead ends, not violations.
  bool dead = false;

  FaultBudget fault_budget;
  int used_failure_toggles = 0;
  int used_wipes = 0;
  int used_losses = 0;

  bool operator==(const ClusterState&) const = default;

  const RegisterState* store(ReplicaId r, Key k) const {
    auto it = local_stores.find({r, k});
    return it == local_stores.end() ? nullptr : &it->second;
  }
};

void insert_entry(std::vector<StoreEntry>& store, StoreEntry e);
// Removes one copy matching (replica, op_id); false if absent.
bool remove_entry(std::vector<StoreEntry>& store, ReplicaId r, OpId id);
const StoreEntry* find_entry(const std::vector<StoreEntry>& store, ReplicaId r, OpId id);

// 64-bit FNV-1a over an explicit canonical byte stream; stable across runs
// and platforms, unlike std::hash.
class Fingerprinter {
 public:
  void bytes(const void* data, size_t n);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void b(bool v) { u32(v ? 1u : 0u); }
  uint64_t value() const { return h_; }

 private:
  uint64_t h_ = 1469598103934665603ull;
};

// Hash of the full simulation state. Multiset contents hash order-insensitively
// (the stores are kept sorted). With include_ghost the taint ledger and the
// tainted bits on message copies are folded in (the explorer dedups on that);
// without, the result covers exactly the protocol-visible state, which the
// ghost-separation check compares across tainted/untainted paired runs.
uint64_t state_fingerprint(const ClusterState& s, bool include_ghost = true);

}  // namespace antientropy

#endif  // ANTIENTROPY_CLUSTER_HPP_
