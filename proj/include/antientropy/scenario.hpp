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

#ifndef ANTIENTROPY_SCENARIO_HPP_
#define ANTIENTROPY_SCENARIO_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "antientropy/action.hpp"
#include "antientropy/cluster.hpp"
#include "antientropy/types.hpp"

namespace antientropy {

enum class DirectiveKind { put, get, fail, recover, wipe, destroy, quiesce };

struct Directive {
  DirectiveKind kind = DirectiveKind::put;
  Key key = 0;
  Value value = 0;
  Expect expect = Expect::any;
  ReplicaId replica = -1;
  CoordinatorId coord = -1;
  QuiesceMode qmode = QuiesceMode::none;
  int line = 0;

  bool operator==(const Directive& o) const {
    return kind == o.kind && key == o.key && value == o.value && expect == o.expect &&
           replica == o.replica && coord == o.coord && qmode == o.qmode;
  }
};

enum class CheckKind { exists_read, forall_no_read, eventual_delivery, convergence };

struct Check {
  CheckKind kind = CheckKind::exists_read;
  // exists_read / forall_no_read: one value set per get directive, in script
  // order. An empty set stands for the never-written default.
  std::vector<std::set<Value>> reads;
  Key key = 0;  // convergence

  bool operator==(const Check&) const = default;
};

struct Scenario {
  std::string name;  // builtins only; empty for parsed files
  Config cfg;
  std::vector<Directive> script;  // taint excluded; see tainted_put
  std::vector<Check> checks;
  // 1-based index of the put whose write is tainted, applied at issuance.
  std::optional<int> tainted_put;
  std::vector<std::string> key_names;  // intern table, Key = index

  // Fault-action caps this scenario needs (e.g. fig2's scripted schedule
  // loses two messages). Not part of the on-disk format or equality.
  std::optional<FaultBudget> fault_budget;

  int num_puts() const;
  int num_gets() const;
  Key key_of(const std::string& name);           // interns
  std::string key_name(Key k) const;

  bool operator==(const Scenario& o) const {
    return cfg == o.cfg && script == o.script && checks == o.checks &&
           tainted_put == o.tainted_put && key_names == o.key_names;
  }
};

// Line-oriented scenario text. Throws ScenarioError with the offending line
// number on malformed input or an inconsistent scenario.
struct ScenarioError : std::runtime_error {
  int line;
  ScenarioError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

// Structural checks beyond syntax: ids in range, taint references a put,
// delivery checks have a taint and a delivery quiesce, convergence checks a
// matching quiesce, quiesce last. parse_scenario runs this itself.
void validate_scenario(const Scenario& s);

const std::vector<std::string>& builtin_names();
Scenario builtin_scenario(const std::string& name);  // throws std::invalid_argument
// Canonical schedule for builtins that ship one (fig2); empty otherwise.
Schedule builtin_schedule(const std::string& name);
std::string builtin_summary(const std::string& name);

}  // namespace antientropy

#endif  // ANTIENTROPY_SCENARIO_HPP_
