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

#ifndef ANTIENTROPY_TYPES_HPP_
#define ANTIENTROPY_TYPES_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace antientropy {

using Key = int32_t;          // interned small integer; see Scenario::key_names
using Value = int32_t;
using ReplicaId = int32_t;
using CoordinatorId = int32_t;
using OpId = uint32_t;        // globally unique per run, issued from a monotone counter

enum class RegisterKind { lww, mv };
enum class FailureMode { none, transient, permanent };
enum class Expect { ok, fail, any };
enum class QuiesceMode { none, delivery_check, convergence_check };

// Throws std::logic_error; used for harness sequencing errors and model
// invariant breaches (never for property violations, which produce witnesses).
#define AE_REQUIRE(cond, msg)                                   \
  do {                                                          \
    if (!(cond)) throw std::logic_error(std::string("model: ") + (msg)); \
  } while (0)

struct Config {
  int num_replicas = 3;
  int replication = 3;   // preference list length N
  int read_cl = 1;       // R
  int write_cl = 1;      // W
  RegisterKind register_kind = RegisterKind::lww;
  bool hinted_handoff = true;
  bool read_repair = true;
  FailureMode failure_mode = FailureMode::none;
  // Permits permanent failure mode with read repair disabled. Such a cluster
  // can silently lose acknowledged writes; requiring the flag keeps that an
  // explicit choice (used by the negative-control check).
  bool allow_unsafe = false;

  void validate() const {
    if (num_replicas < 1) throw std::invalid_argument("config: num_replicas must be >= 1");
    if (replication < 1 || replication > num_replicas)
      throw std::invalid_argument("config: rf must satisfy 1 <= rf <= replicas");
    if (read_cl < 1 || read_cl > replication)
      throw std::invalid_argument("config: R must satisfy 1 <= R <= rf");
    if (write_cl < 1 || write_cl > replication)
      throw std::invalid_argument("config: W must satisfy 1 <= W <= rf");
    if (failure_mode == FailureMode::permanent && !read_repair && !allow_unsafe)
      throw std::invalid_argument(
          "config: failures=permanent with rr=off loses writes; set unsafe=on to allow");
  }

  bool operator==(const Config&) const = default;
};

// Deterministic modular key placement: the head replica is key mod
// num_replicas and the list continues with the next replication-1 replicas in
// ring order. Stable across runs, no hashing involved.
inline std::vector<ReplicaId> preference_list(const Config& cfg, Key key) {
  std::vector<ReplicaId> out;
  out.reserve(static_cast<size_t>(cfg.replication));
  int n = cfg.num_replicas;
  ReplicaId head = static_cast<ReplicaId>(((key % n) + n) % n);
  for (int i = 0; i < cfg.replication; ++i)
    out.push_back(static_cast<ReplicaId>((head + i) % n));
  return out;
}

inline CoordinatorId coordinator_of(const Config& cfg, Key key) {
  return preference_list(cfg, key).front();
}

inline bool replica_responsible(const Config& cfg, Key key, ReplicaId r) {
  for (ReplicaId p : preference_list(cfg, key))
    if (p == r) return true;
  return false;
}

}  // namespace antientropy

#endif  // ANTIENTROPY_TYPES_HPP_
