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

#include "antientropy/register.hpp"

#include <algorithm>

namespace antientropy {

bool vc_leq(const VClock& a, const VClock& b) {
  AE_REQUIRE(a.size() == b.size(), "vector clocks must have equal width");
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

namespace {

// Inserts one sibling into a sorted antichain: dropped if dominated by or
// equal to an existing sibling, otherwise added after evicting everything it
// strictly dominates.
void merge_sibling(std::vector<Sibling>& antichain, const Sibling& s) {
  for (const Sibling& e : antichain) {
    if (e == s) return;
    if (vc_lt(s.vclock, e.vclock)) return;
  }
  antichain.erase(std::remove_if(antichain.begin(), antichain.end(),
                                 [&](const Sibling& e) { return vc_lt(e.vclock, s.vclock); }),
                  antichain.end());
  antichain.insert(std::upper_bound(antichain.begin(), antichain.end(), s), s);
}

}  // namespace

void apply_write(RegisterState& reg, const WriteOp& op) {
  AE_REQUIRE(reg.kind == op.kind, "register/op kind mismatch");
  if (!reg.delivered.insert(op.op_id).second) return;  // duplicate delivery
  if (op.kind == RegisterKind::lww) {
    if (!reg.cell || reg.cell->stamp < op.lww.stamp) reg.cell = op.lww;
  } else {
    for (const Sibling& s : op.siblings) merge_sibling(reg.siblings, s);
  }
}

std::set<Value> query(const RegisterState& reg) {
  std::set<Value> out;
  if (reg.kind == RegisterKind::lww) {
    if (reg.cell) out.insert(reg.cell->value);
  } else {
    for (const Sibling& s : reg.siblings) out.insert(s.value);
  }
  return out;
}

RegisterState resolve(RegisterKind kind, const std::vector<const RegisterState*>& replies) {
  RegisterState out;
  out.kind = kind;
  for (const RegisterState* r : replies) {
    AE_REQUIRE(r->kind == kind, "resolve: reply kind mismatch");
    out.delivered.insert(r->delivered.begin(), r->delivered.end());
    if (kind == RegisterKind::lww) {
      if (r->cell && (!out.cell || out.cell->stamp < r->cell->stamp)) out.cell = r->cell;
    } else {
      for (const Sibling& s : r->siblings) merge_sibling(out.siblings, s);
    }
  }
  return out;
}

bool content_equal(const RegisterState& a, const RegisterState& b) {
  return a.kind == b.kind && a.cell == b.cell && a.siblings == b.siblings;
}

LwwStamp next_lww_stamp(uint32_t& coordinator_clock, OpId tiebreak) {
  return LwwStamp{++coordinator_clock, tiebreak};
}

VClock next_mv_stamp(VClock& coordinator_clock, CoordinatorId self) {
  AE_REQUIRE(self >= 0 && static_cast<size_t>(self) < coordinator_clock.size(),
             "mv stamp: coordinator out of range");
  ++coordinator_clock[static_cast<size_t>(self)];
  return coordinator_clock;
}

}  // namespace antientropy
