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

// Exhaustive schedule exploration, schedule replay and random walks over the
// transition relation. The explorer hunts one deciding event per check: a
// matching terminal for exists-read, a counterexample for everything else.

#ifndef ANTIENTROPY_EXPLORER_HPP_
#define ANTIENTROPY_EXPLORER_HPP_

#include <string>
#include <vector>

#include "antientropy/protocol.hpp"

namespace antientropy {

struct Budget {
  size_t max_steps = 40;   // longest schedule considered
  bool dedup = true;       // prune states already seen at equal or lower depth
  FaultBudget faults;      // default caps; a scenario's own budget wins
};

enum class Verdict {
  witness_found,    // some check was decided by an explicit schedule
  exhausted,        // the reachable space was fully walked, nothing found
  budget_exceeded,  // paths were cut at max_steps and a check stayed open
};

struct CheckOutcome {
  bool decided = false;
  bool pass = false;
  Schedule schedule;   // witness (exists-read) or counterexample (the rest)
  std::string detail;
};

struct ExploreResult {
  Verdict verdict = Verdict::exhausted;
  std::vector<CheckOutcome> checks;  // parallel to Scenario::checks
  uint64_t states = 0;               // distinct states visited
  uint64_t transitions = 0;
  bool truncated = false;            // some path hit max_steps
  bool complete = false;             // walk finished without early exit
  int max_pump_reads = 0;            // convergence statistic across all paths
  bool all_pass() const;
  bool any_fail() const;
};

ExploreResult explore(const Scenario& sc, const Budget& b);

struct StepRecord {
  Action action;
  uint64_t fp_full = 0;    // state fingerprint including the taint ledger
  uint64_t fp_model = 0;   // fingerprint of protocol-visible state only
  uint64_t delivery_rk = 0;
  uint64_t convergence_rk = 0;
  size_t pending_tainted = 0;
  size_t hinted_tainted = 0;
  size_t store_tainted = 0;
};

struct ReplayResult {
  bool ok = false;           // every scheduled action was enabled in turn
  int error_step = -1;
  std::string error;
  std::vector<StepRecord> steps;
  ClusterState final_state;
  bool finished = false;     // no action enabled after the last step
  bool checks_pass = true;   // scenario checks evaluated against this path
  std::string check_detail;
};

ReplayResult replay_schedule(const Scenario& sc, const Schedule& sched,
                             const FaultBudget& default_faults = FaultBudget{});

struct FuzzRun {
  uint64_t seed = 0;
  int steps = 0;
  bool finished = false;
  bool dead = false;
  bool checks_pass = true;
  uint64_t final_fp = 0;
  Schedule schedule;
};

struct FuzzResult {
  int runs = 0;
  int violations = 0;   // runs whose path failed a scenario check
  uint64_t digest = 0;  // order-sensitive hash over all run summaries
  std::vector<FuzzRun> run_log;
};

FuzzResult fuzz(const Scenario& sc, uint64_t seed, int runs, const Budget& b);

// Value sets returned by the script's reads, in script order; empty optional
// entries stand for reads that timed out.
std::vector<std::pair<Outcome, std::set<Value>>> read_outcomes(const ClusterState& s);

}  // namespace antientropy

#endif  // ANTIENTROPY_EXPLORER_HPP_
