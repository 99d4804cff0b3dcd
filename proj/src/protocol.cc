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

#include "antientropy/protocol.hpp"

#include <algorithm>

#include "antientropy/ghost.hpp"
#include "antientropy/register.hpp"

namespace antientropy {

namespace {

int find_waiting_op(const ClusterState& s) {
  for (size_t i = 0; i < s.client_ops.size(); ++i)
    if (!s.client_ops[i].done) return static_cast<int>(i);
  return -1;
}

bool has_unfired_repair(const ClusterState& s) {
  for (const ClientOpState& op : s.client_ops)
    if (op.repair_spawned && !op.repair_fired) return true;
  return false;
}

RegisterState& ensure_store(ClusterState& s, ReplicaId r, Key key, RegisterKind kind) {
  auto it = s.local_stores.find({r, key});
  if (it == s.local_stores.end()) {
    RegisterState fresh;
    fresh.kind = kind;
    it = s.local_stores.emplace(std::make_pair(r, key), fresh).first;
  }
  return it->second;
}

RegisterState store_snapshot(const RunContext& ctx, const ClusterState& s, ReplicaId r,
                             Key key) {
  // A replica answers a read with its register content. The delivered log is
  // replica-local bookkeeping, not part of the reply.
  if (const RegisterState* p = s.store(r, key)) {
    RegisterState reply = *p;
    reply.delivered.clear();
    return reply;
  }
  RegisterState blank;
  blank.kind = ctx.cfg.register_kind;
  return blank;
}

int puts_before(const Scenario& sc, size_t directive_index) {
  int n = 0;
  for (size_t i = 0; i < directive_index; ++i)
    if (sc.script[i].kind == DirectiveKind::put) ++n;
  return n;
}

// True once every alive replica on the key's preference list has replied.
bool all_alive_replied(const RunContext& ctx, const ClusterState& s,
                       const ClientOpState& op) {
  for (ReplicaId r : preference_list(ctx.cfg, op.key))
    if (s.alive[static_cast<size_t>(r)] && !op.replies.count(r)) return false;
  return op.replies.size() >= 1;
}

std::vector<uint32_t> reply_subsets(const ClientOpState& op, int want) {
  std::vector<ReplicaId> ids;
  for (const auto& [r, reg] : op.replies) ids.push_back(r);
  std::vector<uint32_t> masks;
  if (want <= 0 || static_cast<size_t>(want) > ids.size()) return masks;
  std::vector<int> pick(static_cast<size_t>(want));
  // walk all index combinations of size `want`
  for (int i = 0; i < want; ++i) pick[static_cast<size_t>(i)] = i;
  while (true) {
    uint32_t m = 0;
    for (int idx : pick) m |= 1u << ids[static_cast<size_t>(idx)];
    masks.push_back(m);
    int j = want - 1;
    while (j >= 0 &&
           pick[static_cast<size_t>(j)] == static_cast<int>(ids.size()) - want + j)
      --j;
    if (j < 0) break;
    ++pick[static_cast<size_t>(j)];
    for (int t = j + 1; t < want; ++t)
      pick[static_cast<size_t>(t)] = pick[static_cast<size_t>(t - 1)] + 1;
  }
  std::sort(masks.begin(), masks.end());
  return masks;
}

void start_put(const RunContext& ctx, ClusterState& s, const Directive& d,
               int directive_index) {
  ClientOpState op;
  op.kind = OpKind::put;
  op.key = d.key;
  op.value = d.value;
  op.expect = d.expect;
  op.directive_index = directive_index;

  OpId id = s.next_op_seq++;
  op.issued = id;

  CoordinatorId coord = coordinator_of(ctx.cfg, d.key);
  WriteOp w;
  w.op_id = id;
  w.key = d.key;
  w.origin = coord;
  w.kind = ctx.cfg.register_kind;
  if (w.kind == RegisterKind::lww) {
    w.lww.value = d.value;
    w.lww.stamp = next_lww_stamp(s.lww_clock[static_cast<size_t>(coord)], id);
  } else {
    VClock& vc = s.mv_clock[d.key];
    if (vc.empty()) vc.assign(static_cast<size_t>(ctx.cfg.num_replicas), 0);
    Sibling sb;
    sb.value = d.value;
    sb.vclock = next_mv_stamp(vc, coord);
    w.siblings = {sb};
  }
  for (ReplicaId r : preference_list(ctx.cfg, d.key))
    insert_entry(s.pending, StoreEntry{r, w});
  s.client_ops.push_back(op);

  int put_number = puts_before(*ctx.scenario, static_cast<size_t>(directive_index)) + 1;
  if (ctx.scenario->tainted_put && *ctx.scenario->tainted_put == put_number)
    taint_write(s, id);
}

void start_get(const RunContext& ctx, ClusterState& s, Key key, Expect expect, bool pump,
               int directive_index) {
  (void)ctx;
  ClientOpState op;
  op.kind = OpKind::get;
  op.key = key;
  op.expect = expect;
  op.pump = pump;
  op.directive_index = directive_index;
  s.client_ops.push_back(op);
}

void do_fail(ClusterState& s, ReplicaId r) {
  AE_REQUIRE(s.alive[static_cast<size_t>(r)], "fail on dead replica");
  s.alive[static_cast<size_t>(r)] = 0;
  ++s.used_failure_toggles;
}

void do_recover(ClusterState& s, ReplicaId r) {
  AE_REQUIRE(!s.alive[static_cast<size_t>(r)], "recover on live replica");
  s.alive[static_cast<size_t>(r)] = 1;
  ++s.used_failure_toggles;
}

void do_wipe(ClusterState& s, ReplicaId r, Key key) {
  s.local_stores.erase({r, key});
  taint_on_wipe(s, r, key);
  ++s.used_wipes;
}

void do_destroy(ClusterState& s, CoordinatorId c) {
  taint_on_destroy_hints(s, c);
  s.hint_stores.erase(c);
  ++s.used_wipes;
}

void enter_quiescence(const RunContext& ctx, ClusterState& s, QuiesceMode mode, Key key) {
  s.stop = true;
  for (auto& a : s.alive) a = 1;
  s.quiesce = mode;
  s.quiesce_key = key;
  if (mode == QuiesceMode::convergence_check)
    s.pump_bound = static_cast<uint32_t>(convergence_rank(ctx.cfg, s)) + 1;
}

void do_script_next(const RunContext& ctx, ClusterState& s) {
  AE_REQUIRE(s.script_pos < ctx.scenario->script.size(), "script exhausted");
  int idx = static_cast<int>(s.script_pos);
  const Directive& d = ctx.scenario->script[s.script_pos++];
  switch (d.kind) {
    case DirectiveKind::put: start_put(ctx, s, d, idx); break;
    case DirectiveKind::get: start_get(ctx, s, d.key, d.expect, false, idx); break;
    case DirectiveKind::fail: do_fail(s, d.replica); break;
    case DirectiveKind::recover: do_recover(s, d.replica); break;
    case DirectiveKind::wipe: do_wipe(s, d.replica, d.key); break;
    case DirectiveKind::destroy: do_destroy(s, d.coord); break;
    case DirectiveKind::quiesce: enter_quiescence(ctx, s, d.qmode, d.key); break;
  }
}

void do_put_step(ClusterState& s, int op_i) {
  ClientOpState& op = s.client_ops[static_cast<size_t>(op_i)];
  AE_REQUIRE(op.kind == OpKind::put && !op.done, "put_step on wrong op");
  op.outcome = Outcome::ok;
  op.done = true;
  op.acks.clear();  // nothing reads acks past completion; keep states canonical
  if (op.expect == Expect::fail) s.dead = true;
}

void do_timeout(ClusterState& s, int op_i) {
  ClientOpState& op = s.client_ops[static_cast<size_t>(op_i)];
  AE_REQUIRE(!op.done, "timeout on finished op");
  op.outcome = Outcome::failed;
  op.done = true;
  op.acks.clear();
  op.replies.clear();  // a timed out get never spawns a repair
  if (op.expect == Expect::ok) s.dead = true;
}

void do_read_local(const RunContext& ctx, ClusterState& s, int op_i, ReplicaId r) {
  ClientOpState& op = s.client_ops[static_cast<size_t>(op_i)];
  AE_REQUIRE(op.kind == OpKind::get, "read_local on a put");
  AE_REQUIRE(!op.replies.count(r), "duplicate reply");
  op.replies[r] = store_snapshot(ctx, s, r, op.key);
}

void do_get_step(const RunContext& ctx, ClusterState& s, int op_i, uint32_t mask) {
  ClientOpState& op = s.client_ops[static_cast<size_t>(op_i)];
  AE_REQUIRE(op.kind == OpKind::get && !op.done, "get_step on wrong op");
  std::vector<const RegisterState*> used;
  for (const auto& [r, reg] : op.replies)
    if (mask & (1u << r)) used.push_back(&reg);
  AE_REQUIRE(!used.empty(), "get_step with empty reply subset");
  RegisterState resolved = resolve(ctx.cfg.register_kind, used);
  op.values = query(resolved);
  op.outcome = Outcome::ok;
  op.done = true;
  if (op.expect == Expect::fail) s.dead = true;
  // A completed read hands its reply set to the repair path; the repair
  // fires later, at a point the scheduler picks. Without a repair the
  // replies are dead weight, dropped so equivalent states coincide.
  if (ctx.cfg.read_repair)
    op.repair_spawned = true;
  else
    op.replies.clear();
}

void do_repair_fire(const RunContext& ctx, ClusterState& s, int op_i) {
  ClientOpState& op = s.client_ops[static_cast<size_t>(op_i)];
  AE_REQUIRE(op.repair_spawned && !op.repair_fired, "repair not pending");
  op.repair_fired = true;
  // a fired repair accepts no further replies, so drop its working set
  std::map<ReplicaId, RegisterState> replies = std::move(op.replies);
  op.replies.clear();

  std::vector<const RegisterState*> all;
  for (const auto& [r, reg] : replies) all.push_back(&reg);
  if (all.empty()) return;
  RegisterState resolved = resolve(ctx.cfg.register_kind, all);

  std::vector<ReplicaId> stale;
  for (const auto& [r, reg] : replies)
    if (!content_equal(reg, resolved)) stale.push_back(r);
  if (stale.empty()) return;

  WriteOp w;
  w.op_id = s.next_op_seq++;
  w.key = op.key;
  w.origin = coordinator_of(ctx.cfg, op.key);
  w.kind = ctx.cfg.register_kind;
  if (w.kind == RegisterKind::lww) {
    AE_REQUIRE(resolved.cell.has_value(), "repair from empty lww resolve");
    w.lww = *resolved.cell;
  } else {
    w.siblings = resolved.siblings;
  }
  for (ReplicaId r : stale) insert_entry(s.pending, StoreEntry{r, w});
}

void ack_if_waiting(ClusterState& s, ReplicaId r, OpId id) {
  for (ClientOpState& op : s.client_ops)
    if (!op.done && op.kind == OpKind::put && op.issued && *op.issued == id)
      op.acks.insert(r);
}

void do_deliver(const RunContext& ctx, ClusterState& s, ReplicaId r, OpId id) {
  const StoreEntry* e = find_entry(s.pending, r, id);
  AE_REQUIRE(e != nullptr, "deliver without pending copy");
  WriteOp w = e->op;
  remove_entry(s.pending, r, id);
  apply_write(ensure_store(s, r, w.key, ctx.cfg.register_kind), w);
  taint_on_deliver(s, r, w);
  ack_if_waiting(s, r, id);
}

void do_to_hint(ClusterState& s, ReplicaId r, OpId id) {
  const StoreEntry* e = find_entry(s.pending, r, id);
  AE_REQUIRE(e != nullptr, "to_hint without pending copy");
  WriteOp w = e->op;
  remove_entry(s.pending, r, id);
  insert_entry(s.hint_stores[w.origin], StoreEntry{r, w});
  taint_on_to_hint(s, r, w);
}

void do_lose(ClusterState& s, ReplicaId r, OpId id) {
  const StoreEntry* e = find_entry(s.pending, r, id);
  AE_REQUIRE(e != nullptr, "lose without pending copy");
  WriteOp w = e->op;
  remove_entry(s.pending, r, id);
  ++s.used_losses;
  taint_on_lose(s, r, w);
}

void do_handoff(const RunContext& ctx, ClusterState& s, CoordinatorId c, ReplicaId r,
                OpId id) {
  auto it = s.hint_stores.find(c);
  AE_REQUIRE(it != s.hint_stores.end(), "handoff from empty hint store");
  const StoreEntry* e = find_entry(it->second, r, id);
  AE_REQUIRE(e != nullptr, "handoff without hint");
  WriteOp w = e->op;
  remove_entry(it->second, r, id);
  if (it->second.empty()) s.hint_stores.erase(it);
  apply_write(ensure_store(s, r, w.key, ctx.cfg.register_kind), w);
  taint_on_handoff(s, r, w);
}

}  // namespace

RunContext make_context(const Scenario& s, const FaultBudget& default_faults) {
  RunContext ctx;
  ctx.cfg = s.cfg;
  ctx.scenario = &s;
  ctx.faults = s.fault_budget ? *s.fault_budget : default_faults;
  return ctx;
}

ClusterState initial_state(const RunContext& ctx) {
  ClusterState s;
  s.alive.assign(static_cast<size_t>(ctx.cfg.num_replicas), 1);
  s.lww_clock.assign(static_cast<size_t>(ctx.cfg.num_replicas), 0);
  s.fault_budget = ctx.faults;
  return s;
}

bool cluster_settled(const ClusterState& s) {
  if (!s.pending.empty()) return false;
  for (const auto& [c, vec] : s.hint_stores)
    if (!vec.empty()) return false;
  if (find_waiting_op(s) >= 0) return false;
  if (has_unfired_repair(s)) return false;
  return true;
}

int pump_reads_issued(const ClusterState& s) {
  int n = 0;
  for (const ClientOpState& op : s.client_ops)
    if (op.pump) ++n;
  return n;
}

int pump_reads_completed(const ClusterState& s) {
  int n = 0;
  for (const ClientOpState& op : s.client_ops)
    if (op.pump && op.done) ++n;
  return n;
}

bool pump_done(const RunContext& ctx, const ClusterState& s) {
  if (!cluster_settled(s)) return false;
  if (pump_reads_completed(s) < 1) return false;
  std::set<ReplicaId> live = live_replicas(ctx.cfg, s, s.quiesce_key);
  return convergence_predicate(ctx.cfg, s, s.quiesce_key, live);
}

std::vector<Action> enabled_actions(const RunContext& ctx, const ClusterState& s) {
  std::vector<Action> out;
  if (s.dead) return out;
  const Config& cfg = ctx.cfg;
  const Scenario& sc = *ctx.scenario;
  int waiting = find_waiting_op(s);

  auto push = [&out](ActionKind k, int op_i = -1, ReplicaId r = -1, CoordinatorId c = -1,
                     OpId id = 0, Key key = 0, uint32_t mask = 0) {
    Action a;
    a.kind = k;
    a.op_index = op_i;
    a.replica = r;
    a.coord = c;
    a.id = id;
    a.key = key;
    a.reply_subset = mask;
    out.push_back(a);
  };

  if (!s.stop && s.script_pos < sc.script.size() && waiting < 0) {
    const Directive& d = sc.script[s.script_pos];
    // A directive waits until it is applicable: free fault toggles may have
    // raced a scripted fail/recover onto the wrong side.
    bool gated = (d.kind == DirectiveKind::quiesce && has_unfired_repair(s)) ||
                 (d.kind == DirectiveKind::fail &&
                  !s.alive[static_cast<size_t>(d.replica)]) ||
                 (d.kind == DirectiveKind::recover &&
                  s.alive[static_cast<size_t>(d.replica)]);
    if (!gated) push(ActionKind::script_next);
  }

  if (s.stop && s.quiesce == QuiesceMode::convergence_check && cluster_settled(s) &&
      !pump_done(ctx, s) &&
      pump_reads_issued(s) < static_cast<int>(s.pump_bound)) {
    push(ActionKind::pump_get, -1, -1, -1, 0, s.quiesce_key);
  }

  for (size_t i = 0; i < s.client_ops.size(); ++i) {
    const ClientOpState& op = s.client_ops[i];
    if (op.kind == OpKind::put && !op.done &&
        static_cast<int>(op.acks.size()) >= cfg.write_cl)
      push(ActionKind::put_step, static_cast<int>(i));
  }

  for (size_t i = 0; i < s.client_ops.size(); ++i) {
    const ClientOpState& op = s.client_ops[i];
    if (op.kind != OpKind::get || op.done) continue;
    if (op.pump) {
      if (all_alive_replied(ctx, s, op)) {
        uint32_t m = 0;
        for (const auto& [r, reg] : op.replies) m |= 1u << r;
        push(ActionKind::get_step, static_cast<int>(i), -1, -1, 0, 0, m);
      }
    } else if (static_cast<int>(op.replies.size()) >= cfg.read_cl) {
      for (uint32_t m : reply_subsets(op, cfg.read_cl))
        push(ActionKind::get_step, static_cast<int>(i), -1, -1, 0, 0, m);
    }
  }

  for (size_t i = 0; i < s.client_ops.size(); ++i) {
    const ClientOpState& op = s.client_ops[i];
    if (op.done || op.pump) continue;
    bool below = op.kind == OpKind::put
                     ? static_cast<int>(op.acks.size()) < cfg.write_cl
                     : static_cast<int>(op.replies.size()) < cfg.read_cl;
    if (below) push(ActionKind::op_timeout, static_cast<int>(i));
  }

  for (size_t i = 0; i < s.client_ops.size(); ++i) {
    const ClientOpState& op = s.client_ops[i];
    if (op.kind != OpKind::get) continue;
    bool open = op.outcome == Outcome::none ||
                (op.repair_spawned && !op.repair_fired);
    if (!open) continue;
    for (ReplicaId r : preference_list(cfg, op.key))
      if (s.alive[static_cast<size_t>(r)] && !op.replies.count(r))
        push(ActionKind::read_local, static_cast<int>(i), r);
  }

  for (size_t i = 0; i < s.client_ops.size(); ++i) {
    const ClientOpState& op = s.client_ops[i];
    if (!op.repair_spawned || op.repair_fired) continue;
    if (op.pump && !all_alive_replied(ctx, s, op)) continue;
    push(ActionKind::repair_fire, static_cast<int>(i));
  }

  for (const StoreEntry& e : s.pending)
    if (s.alive[static_cast<size_t>(e.replica)])
      push(ActionKind::net_deliver, -1, e.replica, -1, e.op.op_id);

  if (cfg.hinted_handoff && cfg.failure_mode != FailureMode::none) {
    for (const StoreEntry& e : s.pending)
      if (!s.alive[static_cast<size_t>(e.replica)])
        push(ActionKind::net_to_hint, -1, e.replica, -1, e.op.op_id);
  }

  if (cfg.failure_mode == FailureMode::permanent && !s.stop &&
      s.used_losses < s.fault_budget.max_losses) {
    for (const StoreEntry& e : s.pending)
      push(ActionKind::net_lose, -1, e.replica, -1, e.op.op_id);
  }

  for (const auto& [c, vec] : s.hint_stores) {
    if (!s.alive[static_cast<size_t>(c)]) continue;
    for (const StoreEntry& e : vec)
      if (s.alive[static_cast<size_t>(e.replica)])
        push(ActionKind::handoff, -1, e.replica, c, e.op.op_id);
  }

  if (cfg.failure_mode != FailureMode::none && !s.stop &&
      s.used_failure_toggles < s.fault_budget.max_failure_toggles) {
    for (ReplicaId r = 0; r < cfg.num_replicas; ++r)
      if (s.alive[static_cast<size_t>(r)]) push(ActionKind::fail_replica, -1, r);
    for (ReplicaId r = 0; r < cfg.num_replicas; ++r)
      if (!s.alive[static_cast<size_t>(r)]) push(ActionKind::recover_replica, -1, r);
  }

  if (cfg.failure_mode == FailureMode::permanent && !s.stop &&
      s.used_wipes < s.fault_budget.max_wipes) {
    for (const auto& [loc, reg] : s.local_stores)
      if (!reg.is_default())
        push(ActionKind::wipe_store, -1, loc.first, -1, 0, loc.second);
    for (const auto& [c, vec] : s.hint_stores)
      if (!vec.empty()) push(ActionKind::destroy_hints, -1, -1, c);
  }

  return out;
}

void apply_action(const RunContext& ctx, ClusterState& s, const Action& a) {
  AE_REQUIRE(!s.dead, "action applied to dead state");
  switch (a.kind) {
    case ActionKind::script_next:
      do_script_next(ctx, s);
      break;
    case ActionKind::pump_get:
      AE_REQUIRE(s.stop && s.quiesce == QuiesceMode::convergence_check,
                 "pump read outside quiescence");
      start_get(ctx, s, s.quiesce_key, Expect::any, true, -1);
      break;
    case ActionKind::put_step:
      do_put_step(s, a.op_index);
      break;
    case ActionKind::get_step:
      do_get_step(ctx, s, a.op_index, a.reply_subset);
      break;
    case ActionKind::op_timeout:
      do_timeout(s, a.op_index);
      break;
    case ActionKind::read_local:
      do_read_local(ctx, s, a.op_index, a.replica);
      break;
    case ActionKind::repair_fire:
      do_repair_fire(ctx, s, a.op_index);
      break;
    case ActionKind::net_deliver:
      do_deliver(ctx, s, a.replica, a.id);
      break;
    case ActionKind::net_to_hint:
      do_to_hint(s, a.replica, a.id);
      break;
    case ActionKind::net_lose:
      do_lose(s, a.replica, a.id);
      break;
    case ActionKind::handoff:
      do_handoff(ctx, s, a.coord, a.replica, a.id);
      break;
    case ActionKind::fail_replica:
      do_fail(s, a.replica);
      break;
    case ActionKind::recover_replica:
      do_recover(s, a.replica);
      break;
    case ActionKind::wipe_store:
      do_wipe(s, a.replica, a.key);
      break;
    case ActionKind::destroy_hints:
      do_destroy(s, a.coord);
      break;
  }
}

bool run_finished(const RunContext& ctx, const ClusterState& s) {
  return !s.dead && enabled_actions(ctx, s).empty();
}

}  // namespace antientropy
