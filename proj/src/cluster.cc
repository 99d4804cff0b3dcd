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

#include "antientropy/cluster.hpp"

#include <algorithm>

namespace antientropy {

void insert_entry(std::vector<StoreEntry>& store, StoreEntry e) {
  auto pos = std::upper_bound(store.begin(), store.end(), e,
                              [](const StoreEntry& a, const StoreEntry& b) {
                                return entry_less(a, b);
                              });
  store.insert(pos, std::move(e));
}

bool remove_entry(std::vector<StoreEntry>& store, ReplicaId r, OpId id) {
  for (auto it = store.begin(); it != store.end(); ++it) {
    if (it->replica == r && it->op.op_id == id) {
      store.erase(it);
      return true;
    }
  }
  return false;
}

const StoreEntry* find_entry(const std::vector<StoreEntry>& store, ReplicaId r, OpId id) {
  for (const StoreEntry& e : store)
    if (e.replica == r && e.op.op_id == id) return &e;
  return nullptr;
}

void Fingerprinter::bytes(const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 1099511628211ull;
  }
}

void Fingerprinter::u32(uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  bytes(b, 4);
}

void Fingerprinter::u64(uint64_t v) {
  u32(static_cast<uint32_t>(v));
  u32(static_cast<uint32_t>(v >> 32));
}

namespace {

void hash_vclock(Fingerprinter& fp, const VClock& vc) {
  fp.u32(static_cast<uint32_t>(vc.size()));
  for (uint32_t c : vc) fp.u32(c);
}

void hash_register(Fingerprinter& fp, const RegisterState& reg) {
  fp.u32(static_cast<uint32_t>(reg.kind));
  fp.b(reg.cell.has_value());
  if (reg.cell) {
    fp.i32(reg.cell->value);
    fp.u32(reg.cell->stamp.ts);
    fp.u32(reg.cell->stamp.tiebreak);
  }
  fp.u32(static_cast<uint32_t>(reg.siblings.size()));
  for (const Sibling& s : reg.siblings) {
    fp.i32(s.value);
    hash_vclock(fp, s.vclock);
  }
  fp.u32(static_cast<uint32_t>(reg.delivered.size()));
  for (OpId id : reg.delivered) fp.u32(id);
}

void hash_op(Fingerprinter& fp, const WriteOp& op, bool include_ghost) {
  fp.u32(op.op_id);
  fp.i32(op.key);
  fp.i32(op.origin);
  fp.u32(static_cast<uint32_t>(op.kind));
  fp.i32(op.lww.value);
  fp.u32(op.lww.stamp.ts);
  fp.u32(op.lww.stamp.tiebreak);
  fp.u32(static_cast<uint32_t>(op.siblings.size()));
  for (const Sibling& s : op.siblings) {
    fp.i32(s.value);
    hash_vclock(fp, s.vclock);
  }
  if (include_ghost) fp.b(op.tainted);
}

void hash_entries(Fingerprinter& fp, const std::vector<StoreEntry>& store, bool include_ghost) {
  fp.u32(static_cast<uint32_t>(store.size()));
  for (const StoreEntry& e : store) {
    fp.i32(e.replica);
    hash_op(fp, e.op, include_ghost);
  }
}

}  // namespace

uint64_t state_fingerprint(const ClusterState& s, bool include_ghost) {
  Fingerprinter fp;

  fp.u32(static_cast<uint32_t>(s.local_stores.size()));
  for (const auto& [loc, reg] : s.local_stores) {
    fp.i32(loc.first);
    fp.i32(loc.second);
    hash_register(fp, reg);
  }

  fp.u32(static_cast<uint32_t>(s.hint_stores.size()));
  for (const auto& [c, entries] : s.hint_stores) {
    fp.i32(c);
    hash_entries(fp, entries, include_ghost);
  }
  hash_entries(fp, s.pending, include_ghost);

  fp.u32(static_cast<uint32_t>(s.alive.size()));
  for (uint8_t a : s.alive) fp.b(a != 0);

  fp.u32(static_cast<uint32_t>(s.client_ops.size()));
  for (const ClientOpState& op : s.client_ops) {
    fp.u32(static_cast<uint32_t>(op.kind));
    fp.i32(op.key);
    fp.i32(op.value);
    fp.u32(static_cast<uint32_t>(op.expect));
    fp.b(op.done);
    fp.u32(static_cast<uint32_t>(op.outcome));
    fp.b(op.issued.has_value());
    if (op.issued) fp.u32(*op.issued);
    fp.u32(static_cast<uint32_t>(op.acks.size()));
    for (ReplicaId r : op.acks) fp.i32(r);
    fp.u32(static_cast<uint32_t>(op.replies.size()));
    for (const auto& [r, reg] : op.replies) {
      fp.i32(r);
      hash_register(fp, reg);
    }
    fp.u32(static_cast<uint32_t>(op.values.size()));
    for (Value v : op.values) fp.i32(v);
    fp.b(op.repair_spawned);
    fp.b(op.repair_fired);
    fp.b(op.pump);
    fp.i32(op.directive_index);
  }

  fp.b(s.stop);
  fp.u32(static_cast<uint32_t>(s.quiesce));
  fp.i32(s.quiesce_key);
  fp.u32(s.pump_bound);
  fp.u32(s.next_op_seq);
  fp.u32(static_cast<uint32_t>(s.lww_clock.size()));
  for (uint32_t c : s.lww_clock) fp.u32(c);
  fp.u32(static_cast<uint32_t>(s.mv_clock.size()));
  for (const auto& [k, vc] : s.mv_clock) {
    fp.i32(k);
    hash_vclock(fp, vc);
  }
  fp.u64(s.script_pos);
  fp.b(s.dead);
  fp.i32(s.fault_budget.max_failure_toggles);
  fp.i32(s.fault_budget.max_wipes);
  fp.i32(s.fault_budget.max_losses);
  fp.i32(s.used_failure_toggles);
  fp.i32(s.used_wipes);
  fp.i32(s.used_losses);

  if (include_ghost) {
    const TaintLedger& t = s.taint;
    fp.b(t.tainted_op.has_value());
    if (t.tainted_op) fp.u32(*t.tainted_op);
    if (t.tainted_key) fp.i32(*t.tainted_key);
    for (const std::set<ReplicaId>* set :
         {&t.pending_tainted, &t.hinted_tainted, &t.store_tainted}) {
      fp.u32(static_cast<uint32_t>(set->size()));
      for (ReplicaId r : *set) fp.i32(r);
    }
  }

  return fp.value();
}

}  // namespace antientropy
