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

#ifndef ANTIENTROPY_REGISTER_HPP_
#define ANTIENTROPY_REGISTER_HPP_

#include <compare>
#include <optional>
#include <set>
#include <vector>

#include "antientropy/types.hpp"

namespace antientropy {

// Last-writer-wins stamp, totally ordered by (ts, tiebreak). Timestamps are
// per-coordinator logical clocks; ties across coordinators break on the op id.
struct LwwStamp {
  uint32_t ts = 0;
  OpId tiebreak = 0;
  auto operator<=>(const LwwStamp&) const = default;
};

// Vector clock over replica ids, fixed size num_replicas. Partial order is
// pointwise.
using VClock = std::vector<uint32_t>;

bool vc_leq(const VClock& a, const VClock& b);
inline bool vc_lt(const VClock& a, const VClock& b) { return vc_leq(a, b) && a != b; }
inline bool vc_concurrent(const VClock& a, const VClock& b) {
  return !vc_leq(a, b) && !vc_leq(b, a);
}

struct Sibling {
  Value value = 0;
  VClock vclock;
  auto operator<=>(const Sibling&) const = default;
};

struct LwwCell {
  Value value = 0;
  LwwStamp stamp;
  auto operator<=>(const LwwCell&) const = default;
};

// Op-based replicated register. For lww the content is at most one stamped
// cell; for mv it is an antichain of siblings kept sorted. The delivered set
// makes apply idempotent per op id. A default-constructed register is the
// never-written state and reads as the empty value set.
struct RegisterState {
  RegisterKind kind = RegisterKind::lww;
  std::optional<LwwCell> cell;       // lww only
  std::vector<Sibling> siblings;     // mv only; sorted, pairwise concurrent
  std::set<OpId> delivered;

  bool is_default() const { return !cell && siblings.empty() && delivered.empty(); }
  bool operator==(const RegisterState&) const = default;
};

// One replication message. Client puts carry exactly one value (the lww cell
// or a single sibling); repair writes for mv registers may carry the whole
// resolved sibling set so that one message per stale replier suffices.
struct WriteOp {
  OpId op_id = 0;
  Key key = 0;
  CoordinatorId origin = 0;
  RegisterKind kind = RegisterKind::lww;
  LwwCell lww;                       // lww only
  std::vector<Sibling> siblings;     // mv only; sorted
  bool tainted = false;  // ghost: set at issuance, carried with every copy,
                         // never read by protocol decisions

  bool operator==(const WriteOp&) const = default;
};

// Applies op to reg. Duplicate op ids are no-ops; otherwise lww keeps the
// greater stamp and mv merges the incoming siblings into the antichain.
void apply_write(RegisterState& reg, const WriteOp& op);

// Client-visible content: empty set for a never-written register.
std::set<Value> query(const RegisterState& reg);

// Joins the replies into a single register state that dominates-or-equals
// every reply: lww takes the maximal stamp, mv the antichain of the sibling
// union. Delivered sets are unioned. Order-insensitive and idempotent.
RegisterState resolve(RegisterKind kind, const std::vector<const RegisterState*>& replies);

// Equality of client-meaningful content (cell/siblings), ignoring delivered.
bool content_equal(const RegisterState& a, const RegisterState& b);

// Stamps for new puts. The lww clock is the coordinator's logical timestamp
// counter; the mv clock is the coordinator's per-key vector clock, bumped in
// its own component. Both mutate the clock they are given.
LwwStamp next_lww_stamp(uint32_t& coordinator_clock, OpId tiebreak);
VClock next_mv_stamp(VClock& coordinator_clock, CoordinatorId self);

}  // namespace antientropy

#endif  // ANTIENTROPY_REGISTER_HPP_
