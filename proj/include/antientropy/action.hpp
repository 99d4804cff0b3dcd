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

#ifndef ANTIENTROPY_ACTION_HPP_
#define ANTIENTROPY_ACTION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "antientropy/types.hpp"

namespace antientropy {

// One scheduling choice. The payload pins the exact choice (which message,
// which replica, which reply subset), so a schedule of actions replays to the
// same trace every time.
enum class ActionKind {
  script_next,      // run the next scenario directive
  pump_get,         // convergence checker issues a read of the quiesce key
  put_step,         // complete a put that reached its write threshold
  get_step,         // complete a get from a chosen reply subset
  op_timeout,       // give up on a waiting client op below threshold
  read_local,       // a replica's local-store snapshot reaches the read
  repair_fire,      // the spawned read-repair resolves and enqueues writes
  net_deliver,      // apply one pending copy at its target replica
  net_to_hint,      // divert one pending copy for a down replica into a hint
  net_lose,         // drop one pending copy (permanent mode)
  handoff,          // replay one hint into its recovered target's store
  fail_replica,
  recover_replica,
  wipe_store,       // reset one register to never-written (permanent mode)
  destroy_hints,    // drop one coordinator's hint store (permanent mode)
};

struct Action {
  ActionKind kind = ActionKind::script_next;
  int op_index = -1;      // client op, for op-addressed kinds
  ReplicaId replica = -1; // target replica / failed replica
  CoordinatorId coord = -1;
  OpId id = 0;            // message identity for network and handoff kinds
  Key key = 0;            // wipe_store, pump_get
  uint32_t reply_subset = 0;  // get_step: bitmask of replica ids used

  bool operator==(const Action&) const = default;
};

using Schedule = std::vector<Action>;

// Stable text encoding, e.g. "deliver r=1 id=3" or "get-step op=2 use=0,2".
std::string encode_action(const Action& a);
// Inverse of encode_action; throws std::invalid_argument on malformed input.
Action decode_action(const std::string& text);

}  // namespace antientropy

#endif  // ANTIENTROPY_ACTION_HPP_
