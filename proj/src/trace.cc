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

#include "antientropy/trace.hpp"

#include <cstdio>

#include "antientropy/ghost.hpp"
#include "antientropy/register.hpp"

namespace antientropy {

std::string fp_hex(uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return std::string(buf);
}

std::string check_kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::exists_read: return "exists-read";
    case CheckKind::forall_no_read: return "forall-no-read";
    case CheckKind::eventual_delivery: return "delivery";
    case CheckKind::convergence: return "converge";
  }
  return "?";
}

nlohmann::json state_summary_json(const Scenario& sc, const Config& cfg,
                                  const ClusterState& s) {
  nlohmann::json out;
  out["alive"] = nlohmann::json::array();
  for (uint8_t a : s.alive) out["alive"].push_back(a != 0);

  out["stores"] = nlohmann::json::array();
  for (const auto& [loc, reg] : s.local_stores) {
    nlohmann::json e;
    e["replica"] = loc.first;
    e["key"] = sc.key_name(loc.second);
    e["values"] = nlohmann::json::array();
    for (Value v : query(reg)) e["values"].push_back(v);
    out["stores"].push_back(e);
  }

  out["pending"] = s.pending.size();
  size_t hints = 0;
  for (const auto& [c, vec] : s.hint_stores) hints += vec.size();
  out["hints"] = hints;

  out["converged"] = nlohmann::json::object();
  for (size_t k = 0; k < sc.key_names.size(); ++k) {
    Key key = static_cast<Key>(k);
    std::set<ReplicaId> live = live_replicas(cfg, s, key);
    out["converged"][sc.key_names[k]] = convergence_predicate(cfg, s, key, live);
  }
  return out;
}

nlohmann::json trace_json(const Scenario& sc, const Schedule& sched,
                          const ReplayResult& r) {
  nlohmann::json out;
  out["scenario"] = {{"name", sc.name}, {"text", serialize_scenario(sc)}};
  out["schedule"] = nlohmann::json::array();
  for (const Action& a : sched) out["schedule"].push_back(encode_action(a));

  out["steps"] = nlohmann::json::array();
  for (const StepRecord& st : r.steps) {
    nlohmann::json e;
    e["action"] = encode_action(st.action);
    e["fingerprint"] = fp_hex(st.fp_full);
    e["model_fingerprint"] = fp_hex(st.fp_model);
    e["delivery_rank"] = st.delivery_rk;
    e["convergence_rank"] = st.convergence_rk;
    e["ghost"] = {{"pending", st.pending_tainted},
                  {"hinted", st.hinted_tainted},
                  {"stored", st.store_tainted}};
    out["steps"].push_back(e);
  }

  out["ok"] = r.ok;
  if (!r.ok) {
    out["error"] = r.error;
    out["error_step"] = r.error_step;
  }
  out["finished"] = r.finished;
  out["checks_pass"] = r.checks_pass;
  if (!r.check_detail.empty()) out["check_detail"] = r.check_detail;
  out["final"] = state_summary_json(sc, sc.cfg, r.final_state);
  return out;
}

nlohmann::json explore_json(const Scenario& sc, const ExploreResult& r) {
  nlohmann::json out;
  out["scenario"] = {{"name", sc.name}, {"text", serialize_scenario(sc)}};
  switch (r.verdict) {
    case Verdict::witness_found: out["verdict"] = "witness-found"; break;
    case Verdict::exhausted: out["verdict"] = "exhausted"; break;
    case Verdict::budget_exceeded: out["verdict"] = "budget-exceeded"; break;
  }
  out["states"] = r.states;
  out["transitions"] = r.transitions;
  out["truncated"] = r.truncated;
  out["max_pump_reads"] = r.max_pump_reads;
  out["checks"] = nlohmann::json::array();
  for (size_t i = 0; i < r.checks.size(); ++i) {
    const CheckOutcome& c = r.checks[i];
    nlohmann::json e;
    e["kind"] = check_kind_name(sc.checks[i].kind);
    e["decided"] = c.decided;
    e["pass"] = c.pass;
    e["detail"] = c.detail;
    e["schedule"] = nlohmann::json::array();
    for (const Action& a : c.schedule) e["schedule"].push_back(encode_action(a));
    out["checks"].push_back(e);
  }
  return out;
}

}  // namespace antientropy
