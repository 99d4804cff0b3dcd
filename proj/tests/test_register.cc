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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "antientropy/register.hpp"

using namespace antientropy;

namespace {

WriteOp lww_op(OpId id, Value v, uint32_t ts, OpId tiebreak) {
  WriteOp w;
  w.op_id = id;
  w.kind = RegisterKind::lww;
  w.lww.value = v;
  w.lww.stamp = LwwStamp{ts, tiebreak};
  return w;
}

WriteOp mv_op(OpId id, Value v, const VClock& vc) {
  WriteOp w;
  w.op_id = id;
  w.kind = RegisterKind::mv;
  Sibling s;
  s.value = v;
  s.vclock = vc;
  w.siblings = {s};
  return w;
}

// Independent reference for the sibling set: keep every sibling that no other
// one strictly dominates, collapse duplicates, sort.
std::vector<Sibling> oracle_antichain(std::vector<Sibling> in) {
  std::vector<Sibling> out;
  for (const Sibling& s : in) {
    bool keep = true;
    for (const Sibling& t : in) {
      if (t == s) continue;
      if (vc_lt(s.vclock, t.vclock)) keep = false;
    }
    if (keep && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("vector clock partial order") {
  VClock a{1, 0}, b{1, 1}, c{0, 1};
  CHECK(vc_leq(a, a));
  CHECK(vc_leq(a, b));
  CHECK(!vc_leq(b, a));
  CHECK(vc_lt(a, b));
  CHECK(!vc_lt(a, a));
  CHECK(vc_concurrent(a, c));
  CHECK(!vc_concurrent(a, b));
  CHECK_THROWS_AS(vc_leq(VClock{1}, VClock{1, 2}), std::logic_error);
}

TEST_CASE("lww keeps the greatest stamp under every delivery order") {
  std::vector<WriteOp> ops = {lww_op(1, 10, 1, 1), lww_op(2, 20, 2, 2),
                              lww_op(3, 30, 2, 3)};
  std::sort(ops.begin(), ops.end(),
            [](const WriteOp& a, const WriteOp& b) { return a.op_id < b.op_id; });
  do {
    RegisterState reg;
    reg.kind = RegisterKind::lww;
    for (const WriteOp& w : ops) apply_write(reg, w);
    REQUIRE(reg.cell.has_value());
    CHECK(reg.cell->value == 30);  // stamp (2,3) beats (2,2) beats (1,1)
    CHECK(query(reg) == std::set<Value>{30});
  } while (std::next_permutation(ops.begin(), ops.end(),
                                 [](const WriteOp& a, const WriteOp& b) {
                                   return a.op_id < b.op_id;
                                 }));
}

TEST_CASE("delivered set makes redelivery a no-op") {
  RegisterState reg;
  reg.kind = RegisterKind::lww;
  apply_write(reg, lww_op(1, 10, 5, 1));
  RegisterState once = reg;
  apply_write(reg, lww_op(1, 99, 9, 1));  // same op id: ignored entirely
  CHECK(reg == once);

  RegisterState mv;
  mv.kind = RegisterKind::mv;
  apply_write(mv, mv_op(1, 10, {1, 0}));
  apply_write(mv, mv_op(2, 11, {0, 1}));
  RegisterState twice = mv;
  apply_write(twice, mv_op(1, 10, {1, 0}));
  CHECK(twice == mv);
}

TEST_CASE("lww stamp allocation is strictly increasing per coordinator") {
  uint32_t clock = 0;
  LwwStamp s1 = next_lww_stamp(clock, 7);
  LwwStamp s2 = next_lww_stamp(clock, 3);
  CHECK(s1.ts == 1);
  CHECK(s1.tiebreak == 7);
  CHECK(s2.ts == 2);
  CHECK(s1 < s2);
}

TEST_CASE("mv stamp bumps the coordinator component") {
  VClock clock{0, 0, 0};
  VClock v1 = next_mv_stamp(clock, 1);
  VClock v2 = next_mv_stamp(clock, 1);
  CHECK(v1 == VClock{0, 1, 0});
  CHECK(v2 == VClock{0, 2, 0});
  CHECK(vc_lt(v1, v2));
}

TEST_CASE("mv sibling set equals the dominance oracle under every order") {
  std::vector<Sibling> sibs = {
      Sibling{10, {1, 0}},
      Sibling{11, {0, 1}},
      Sibling{12, {1, 1}},  // dominates both singles
      Sibling{13, {2, 0}},  // concurrent with {1,1}
  };
  std::vector<Sibling> expect = oracle_antichain(sibs);
  REQUIRE(expect.size() == 2);  // {12 @ [1,1]} and {13 @ [2,0]} survive

  std::vector<int> idx = {0, 1, 2, 3};
  do {
    RegisterState reg;
    reg.kind = RegisterKind::mv;
    OpId id = 1;
    for (int i : idx) {
      WriteOp w;
      w.op_id = id++;
      w.kind = RegisterKind::mv;
      w.siblings = {sibs[static_cast<size_t>(i)]};
      apply_write(reg, w);
    }
    CHECK(reg.siblings == expect);
  } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("mv merge matches the oracle on all small multisets") {
  std::vector<Sibling> alphabet = {
      Sibling{10, {1, 0}},
      Sibling{11, {0, 1}},
      Sibling{12, {1, 1}},
  };
  // every multiset of size <= 3 over the alphabet, every delivery order
  for (size_t a = 0; a < alphabet.size(); ++a)
    for (size_t b = 0; b <= alphabet.size(); ++b)
      for (size_t c = 0; c <= alphabet.size(); ++c) {
        std::vector<Sibling> bag = {alphabet[a]};
        if (b < alphabet.size()) bag.push_back(alphabet[b]);
        if (c < alphabet.size()) bag.push_back(alphabet[c]);
        std::vector<Sibling> expect = oracle_antichain(bag);

        std::vector<size_t> idx(bag.size());
        for (size_t i = 0; i < bag.size(); ++i) idx[i] = i;
        do {
          RegisterState reg;
          reg.kind = RegisterKind::mv;
          OpId id = 1;
          for (size_t i : idx) {
            WriteOp w;
            w.op_id = id++;
            w.kind = RegisterKind::mv;
            w.siblings = {bag[i]};
            apply_write(reg, w);
          }
          CHECK(reg.siblings == expect);
        } while (std::next_permutation(idx.begin(), idx.end()));
      }
}

TEST_CASE("resolve joins lww replies") {
  RegisterState r1, r2;
  r1.kind = r2.kind = RegisterKind::lww;
  apply_write(r1, lww_op(1, 5, 2, 1));
  apply_write(r2, lww_op(2, 7, 3, 2));
  RegisterState joined = resolve(RegisterKind::lww, {&r1, &r2});
  CHECK(query(joined) == std::set<Value>{7});
  CHECK(joined.delivered == std::set<OpId>{1, 2});
  // join is commutative
  CHECK(content_equal(joined, resolve(RegisterKind::lww, {&r2, &r1})));
}

TEST_CASE("resolve joins mv replies into one antichain") {
  RegisterState r1, r2;
  r1.kind = r2.kind = RegisterKind::mv;
  apply_write(r1, mv_op(1, 10, {1, 0}));
  apply_write(r2, mv_op(2, 11, {0, 1}));
  RegisterState joined = resolve(RegisterKind::mv, {&r1, &r2});
  CHECK(query(joined) == std::set<Value>{10, 11});
  RegisterState r3;
  r3.kind = RegisterKind::mv;
  apply_write(r3, mv_op(3, 12, {1, 1}));
  RegisterState joined2 = resolve(RegisterKind::mv, {&r1, &r2, &r3});
  CHECK(query(joined2) == std::set<Value>{12});
}

TEST_CASE("content equality ignores the delivered set") {
  RegisterState a, b;
  a.kind = b.kind = RegisterKind::lww;
  apply_write(a, lww_op(1, 5, 2, 1));
  apply_write(b, lww_op(2, 5, 2, 1));  // same cell via a different op id
  CHECK(content_equal(a, b));
  CHECK(a != b);
  apply_write(b, lww_op(3, 9, 4, 3));
  CHECK(!content_equal(a, b));
}

TEST_CASE("default registers read as the never-written value") {
  RegisterState lww;
  CHECK(query(lww).empty());
  RegisterState mv;
  mv.kind = RegisterKind::mv;
  CHECK(query(mv).empty());
  CHECK(lww.is_default());
}
