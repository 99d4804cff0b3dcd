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

#ifndef ANTIENTROPY_TRACE_HPP_
#define ANTIENTROPY_TRACE_HPP_

#include <string>

#include "json.hpp"

#include "antientropy/explorer.hpp"

namespace antientropy {

// 16 hex digits, zero padded, stable across platforms.
std::string fp_hex(uint64_t fp);

std::string check_kind_name(CheckKind k);

// Per-replica view of the final stores plus liveness and per-key agreement.
nlohmann::json state_summary_json(const Scenario& sc, const Config& cfg,
                                  const ClusterState& s);

// Full machine-readable record of one replayed schedule.
nlohmann::json trace_json(const Scenario& sc, const Schedule& sched,
                          const ReplayResult& r);

// Machine-readable record of one exploration.
nlohmann::json explore_json(const Scenario& sc, const ExploreResult& r);

}  // namespace antientropy

#endif  // ANTIENTROPY_TRACE_HPP_
