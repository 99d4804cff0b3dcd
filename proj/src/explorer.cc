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

#include "antientropy/explorer.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

#include "antientropy/ghost.hpp"

namespace antientropy {

namespace {

// Model soundness assertions along one edge. A failure here is a bug in the
// transition relation, not a property of the scenario, so it throws.
void assert_edge_sound(const RunContext& ctx, const ClusterState& parent,
                       const ClusterState& child, const Action& a) {
  if (ctx.cfg.failure_mode != FailureMode::permanent) {
    // Nothing can destroy data outside permanent mode: every issued write
    // keeps exactly one copy per responsible replica, somewhere.
    for (const ClientOpState& op : child.client_ops) {
      if (!op.issued) continue;
      OpId id = *op.issued;
      size_t copies = 0;
      for (const StoreEntry& e : child.pending)
        if (e.op.op_id == id) ++copies;
      for (const auto& [c, vec] : child.hint_stores)
        for (const StoreEntry& e : vec)
          if (e.op.op_id == id) ++copies;
      for (ReplicaId r : preference_list(ctx.cfg, op.key)) {
        const RegisterState* reg = child.store(r, op.key);
        if (reg && reg->delivered.count(id)) ++copies;
      }
      AE_REQUIRE(copies == static_cast<size_t>(ctx.cfg.replication),
                 "write copies not conserved");
    }
  }

  if (parent.stop && child.stop && parent.quiesce == QuiesceMode::delivery_check) {
    // Only drain moves remain after a delivery quiesce, and every one of them
    // strictly lowers the rank: two for a direct delivery, one for a handoff
    // (its to-hint half already paid the other one).
    uint64_t cost = a.kind == ActionKind::net_deliver ? 2
                    : a.kind == ActionKind::handoff   ? 1
                                                      : 0;
    AE_REQUIRE(cost > 0, "non-drain action during delivery quiescence");
    AE_REQUIRE(delivery_rank(parent) == delivery_rank(child) + cost,
               "delivery rank step mismatch");
  }

  if (parent.stop && child.stop && parent.quiesce == QuiesceMode::convergence_check) {
    AE_REQUIRE(pump_reads_issued(child) <= static_cast<int>(child.pump_bound),
               "pump read budget breached");
    uint64_t before = convergence_rank(ctx.cfg, parent);
    uint64_t after = convergence_rank(ctx.cfg, child);
    if (a.kind == ActionKind::net_deliver || a.kind == ActionKind::handoff)
      AE_REQUIRE(before == after + 1, "convergence rank step mismatch");
    if (a.kind == ActionKind::repair_fire)
      AE_REQUIRE(after <= before, "repair raised the convergence rank");
  }
}

bool seq_matches(const std::vector<std::set<Value>>& want,
                 const std::vector<std::pair<Outcome, std::set<Value>>>& got) {
  if (want.size() != got.size()) return false;
  for (size_t i = 0; i < want.size(); ++i)
    if (got[i].first != Outcome::ok || got[i].second != want[i]) return false;
  return true;
}

// Checks a single finished (or partial) path against the scenario's checks.
// exists-read only makes sense when the caller demands confirmation of a
// specific path (replay of a witness); random walks skip it.
std::pair<bool, std::string> evaluate_path_checks(const RunContext& ctx,
                                                  const Scenario& sc,
                                                  const ClusterState& s, bool finished,
                                                  bool invariant_held,
                                                  bool require_exists) {
  auto reads = read_outcomes(s);
  for (const Check& ck : sc.checks) {
    switch (ck.kind) {
      case CheckKind::exists_read:
        if (require_exists && !(finished && seq_matches(ck.reads, reads)))
          return {false, "path does not realize the expected read sequence"};
        break;
      case CheckKind::forall_no_read:
        if (finished && seq_matches(ck.reads, reads))
          return {false, "path realizes a forbidden read sequence"};
        break;
      case CheckKind::eventual_delivery:
        if (!invariant_held)
          return {false, "safety invariant violated after a quiescent step"};
        if (finished && s.stop && s.quiesce == QuiesceMode::delivery_check &&
            !delivery_end_predicate(ctx.cfg, s))
          return {false, "tainted write missing from a responsible replica after drain"};
        break;
      case CheckKind::convergence:
        if (finished && s.stop && s.quiesce == QuiesceMode::convergence_check &&
            !pump_done(ctx, s))
          return {false, "read pump ended with divergent stores"};
        break;
    }
  }
  return {true, ""};
}

struct Walker {
  RunContext ctx;
  Budget budget;
  const Scenario* sc = nullptr;
  ExploreResult res;
  std::unordered_map<uint64_t, size_t> seen;
  Schedule path;

  bool all_decided() const {
    if (res.checks.empty()) return false;
    for (const CheckOutcome& c : res.checks)
      if (!c.decided) return false;
    return true;
  }

  void decide(size_t i, bool pass, const std::string& detail) {
    CheckOutcome& c = res.checks[i];
    if (c.decided) return;
    c.decided = true;
    c.pass = pass;
    c.schedule = path;
    c.detail = detail;
  }

  void inspect_edge(const ClusterState& parent, const ClusterState& child,
                    const Action& a) {
    assert_edge_sound(ctx, parent, child, a);
    // A breached safety invariant before quiescence is ordinary permanent-mode
    // behavior, not yet a verdict: the breach may heal (read repair re-pends a
    // copy) or, if it persists into the drain, it forces the end predicate
    // false at the rank-zero terminal, where the full path becomes the
    // counterexample schedule. Deciding here would capture a prefix that does
    // not replay to a finished run.
    if (child.stop && child.quiesce == QuiesceMode::convergence_check)
      res.max_pump_reads = std::max(res.max_pump_reads, pump_reads_issued(child));
  }

  void inspect_terminal(const ClusterState& s) {
    auto reads = read_outcomes(s);
    for (size_t i = 0; i < sc->checks.size(); ++i) {
      const Check& ck = sc->checks[i];
      switch (ck.kind) {
        case CheckKind::exists_read:
          if (seq_matches(ck.reads, reads))
            decide(i, true, "read sequence reached");
          break;
        case CheckKind::forall_no_read:
          if (seq_matches(ck.reads, reads))
            decide(i, false, "forbidden read sequence reached");
          break;
        case CheckKind::eventual_delivery:
          if (s.stop && s.quiesce == QuiesceMode::delivery_check) {
            AE_REQUIRE(delivery_rank(s) == 0, "terminal with undelivered copies");
            if (!delivery_end_predicate(ctx.cfg, s))
              decide(i, false,
                     "tainted write missing from a responsible replica after drain");
          }
          break;
        case CheckKind::convergence:
          if (s.stop && s.quiesce == QuiesceMode::convergence_check && !pump_done(ctx, s))
            decide(i, false, "read pump ended with divergent stores");
          break;
      }
    }
  }

  void visit(const ClusterState& s, size_t depth) {
    std::vector<Action> acts = enabled_actions(ctx, s);
    if (acts.empty()) {
      inspect_terminal(s);
      return;
    }
    if (depth >= budget.max_steps) {
      res.truncated = true;
      return;
    }
    for (const Action& a : acts) {
      if (all_decided()) return;
      ClusterState child = s;
      apply_action(ctx, child, a);
      ++res.transitions;
      path.push_back(a);
      inspect_edge(s, child, a);
      if (!child.dead) {
        bool skip = false;
        if (budget.dedup) {
          uint64_t fp = state_fingerprint(child, true);
          auto it = seen.find(fp);
          if (it != seen.end() && it->second <= depth + 1) {
            skip = true;
          } else {
            seen[fp] = depth + 1;
          }
        }
        if (!skip) {
          ++res.states;
          visit(child, depth + 1);
        }
      }
      path.pop_back();
    }
  }
};

}  // namespace

bool ExploreResult::all_pass() const {
  for (const CheckOutcome& c : checks)
    if (!c.decided || !c.pass) return false;
  return true;
}

bool ExploreResult::any_fail() const {
  for (const CheckOutcome& c : checks)
    if (c.decided && !c.pass) return true;
  return false;
}

ExploreResult explore(const Scenario& sc, const Budget& b) {
  Walker w;
  w.ctx = make_context(sc, b.faults);
  w.budget = b;
  w.sc = &sc;
  w.res.checks.resize(sc.checks.size());

  ClusterState init = initial_state(w.ctx);
  w.res.states = 1;
  w.visit(init, 0);

  bool early = w.all_decided();
  w.res.complete = !w.res.truncated && !early;

  // Checks the walk never decided settle by exhaustion, when the walk was
  // actually exhaustive.
  for (size_t i = 0; i < w.res.checks.size(); ++i) {
    CheckOutcome& c = w.res.checks[i];
    if (c.decided || w.res.truncated) continue;
    c.decided = true;
    switch (sc.checks[i].kind) {
      case CheckKind::exists_read:
        c.pass = false;
        c.detail = "read sequence unreachable";
        break;
      case CheckKind::forall_no_read:
        c.pass = true;
        c.detail = "no schedule realizes the sequence";
        break;
      case CheckKind::eventual_delivery:
        c.pass = true;
        c.detail = "every schedule delivers the tainted write everywhere";
        break;
      case CheckKind::convergence:
        c.pass = true;
        c.detail = "every schedule converges within the read budget";
        break;
    }
  }

  bool any_schedule = false;
  bool any_open = false;
  for (const CheckOutcome& c : w.res.checks) {
    if (c.decided && !c.schedule.empty()) any_schedule = true;
    if (!c.decided) any_open = true;
  }
  if (any_open)
    w.res.verdict = Verdict::budget_exceeded;
  else if (any_schedule)
    w.res.verdict = Verdict::witness_found;
  else
    w.res.verdict = Verdict::exhausted;
  return w.res;
}

std::vector<std::pair<Outcome, std::set<Value>>> read_outcomes(const ClusterState& s) {
  std::vector<std::pair<Outcome, std::set<Value>>> out;
  for (const ClientOpState& op : s.client_ops)
    if (op.kind == OpKind::get && !op.pump && op.directive_index >= 0)
      out.emplace_back(op.outcome, op.values);
  return out;
}

ReplayResult replay_schedule(const Scenario& sc, const Schedule& sched,
                             const FaultBudget& default_faults) {
  RunContext ctx = make_context(sc, default_faults);
  ReplayResult r;
  ClusterState s = initial_state(ctx);
  bool invariant_held = true;

  for (size_t i = 0; i < sched.size(); ++i) {
    const Action& want = sched[i];
    std::vector<Action> acts = enabled_actions(ctx, s);
    if (std::find(acts.begin(), acts.end(), want) == acts.end()) {
      r.error_step = static_cast<int>(i);
      r.error = "step " + std::to_string(i) + ": '" + encode_action(want) +
                "' is not enabled";
      r.final_state = s;
      return r;
    }
    ClusterState parent = s;
    apply_action(ctx, s, want);
    assert_edge_sound(ctx, parent, s, want);
    if (s.stop && s.quiesce == QuiesceMode::delivery_check && s.taint.tainted_op &&
        !taint_safety_invariant(ctx.cfg, s))
      invariant_held = false;

    StepRecord rec;
    rec.action = want;
    rec.fp_full = state_fingerprint(s, true);
    rec.fp_model = state_fingerprint(s, false);
    rec.delivery_rk = delivery_rank(s);
    rec.convergence_rk = convergence_rank(ctx.cfg, s);
    rec.pending_tainted = s.taint.pending_tainted.size();
    rec.hinted_tainted = s.taint.hinted_tainted.size();
    rec.store_tainted = s.taint.store_tainted.size();
    r.steps.push_back(rec);

    if (s.dead) {
      r.error_step = static_cast<int>(i);
      r.error = "step " + std::to_string(i) + ": '" + encode_action(want) +
                "' violated an expectation";
      r.final_state = s;
      return r;
    }
  }

  r.ok = true;
  r.final_state = s;
  r.finished = enabled_actions(ctx, s).empty();
  auto [pass, detail] =
      evaluate_path_checks(ctx, sc, s, r.finished, invariant_held, true);
  r.checks_pass = pass;
  r.check_detail = detail;
  return r;
}

FuzzResult fuzz(const Scenario& sc, uint64_t seed, int runs, const Budget& b) {
  RunContext ctx = make_context(sc, b.faults);
  FuzzResult fr;
  fr.runs = runs;

  uint64_t digest = 1469598103934665603ull;
  auto mix = [&digest](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      digest ^= (v >> (8 * i)) & 0xffu;
      digest *= 1099511628211ull;
    }
  };

  for (int run = 0; run < runs; ++run) {
    std::mt19937_64 rng(seed + static_cast<uint64_t>(run));
    ClusterState s = initial_state(ctx);
    FuzzRun rl;
    rl.seed = seed + static_cast<uint64_t>(run);
    bool invariant_held = true;

    for (size_t step = 0; step < b.max_steps; ++step) {
      std::vector<Action> acts = enabled_actions(ctx, s);
      if (acts.empty()) {
        rl.finished = true;
        break;
      }
      const Action& a = acts[static_cast<size_t>(rng() % acts.size())];
      ClusterState parent = s;
      apply_action(ctx, s, a);
      assert_edge_sound(ctx, parent, s, a);
      if (s.stop && s.quiesce == QuiesceMode::delivery_check && s.taint.tainted_op &&
          !taint_safety_invariant(ctx.cfg, s))
        invariant_held = false;
      rl.schedule.push_back(a);
      ++rl.steps;
      if (s.dead) {
        rl.dead = true;
        break;
      }
    }

    rl.final_fp = state_fingerprint(s, true);
    if (!rl.dead) {
      auto [pass, detail] =
          evaluate_path_checks(ctx, sc, s, rl.finished, invariant_held, false);
      rl.checks_pass = pass;
      if (!pass) ++fr.violations;
    }

    mix(rl.seed);
    mix(static_cast<uint64_t>(rl.steps));
    mix(rl.final_fp);
    mix((rl.finished ? 1u : 0u) | (rl.dead ? 2u : 0u) | (rl.checks_pass ? 4u : 0u));
    fr.run_log.push_back(std::move(rl));
  }
  fr.digest = digest;
  return fr;
}

}  // namespace antientropy
