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

#include "antientropy/action.hpp"

#include <sstream>

namespace antientropy {

namespace {

std::string subset_to_list(uint32_t mask) {
  std::string out;
  for (int r = 0; r < 32; ++r) {
    if (!(mask & (1u << r))) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(r);
  }
  return out;
}

uint32_t list_to_subset(const std::string& list) {
  uint32_t mask = 0;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int r = std::stoi(tok);
    if (r < 0 || r >= 32) throw std::invalid_argument("action: reply subset out of range");
    mask |= 1u << r;
  }
  return mask;
}

}  // namespace

std::string encode_action(const Action& a) {
  std::ostringstream os;
  switch (a.kind) {
    case ActionKind::script_next:
      os << "script";
      break;
    case ActionKind::pump_get:
      os << "pump-get k=" << a.key;
      break;
    case ActionKind::put_step:
      os << "put-step op=" << a.op_index;
      break;
    case ActionKind::get_step:
      os << "get-step op=" << a.op_index << " use=" << subset_to_list(a.reply_subset);
      break;
    case ActionKind::op_timeout:
      os << "timeout op=" << a.op_index;
      break;
    case ActionKind::read_local:
      os << "read-ls op=" << a.op_index << " r=" << a.replica;
      break;
    case ActionKind::repair_fire:
      os << "repair op=" << a.op_index;
      break;
    case ActionKind::net_deliver:
      os << "deliver r=" << a.replica << " id=" << a.id;
      break;
    case ActionKind::net_to_hint:
      os << "to-hint r=" << a.replica << " id=" << a.id;
      break;
    case ActionKind::net_lose:
      os << "lose r=" << a.replica << " id=" << a.id;
      break;
    case ActionKind::handoff:
      os << "handoff c=" << a.coord << " r=" << a.replica << " id=" << a.id;
      break;
    case ActionKind::fail_replica:
      os << "fail r=" << a.replica;
      break;
    case ActionKind::recover_replica:
      os << "recover r=" << a.replica;
      break;
    case ActionKind::wipe_store:
      os << "wipe r=" << a.replica << " k=" << a.key;
      break;
    case ActionKind::destroy_hints:
      os << "destroy c=" << a.coord;
      break;
  }
  return os.str();
}

Action decode_action(const std::string& text) {
  std::istringstream is(text);
  std::string head;
  is >> head;

  // Key=value fields in any order after the head token.
  auto fields = [&is]() {
    std::vector<std::pair<std::string, std::string>> out;
    std::string tok;
    while (is >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("action: expected key=value, got '" + tok + "'");
      out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return out;
  }();

  Action a;
  auto get = [&fields](const std::string& name) -> const std::string& {
    for (const auto& [k, v] : fields)
      if (k == name) return v;
    throw std::invalid_argument("action: missing field '" + name + "'");
  };

  if (head == "script") {
    a.kind = ActionKind::script_next;
  } else if (head == "pump-get") {
    a.kind = ActionKind::pump_get;
    a.key = std::stoi(get("k"));
  } else if (head == "put-step") {
    a.kind = ActionKind::put_step;
    a.op_index = std::stoi(get("op"));
  } else if (head == "get-step") {
    a.kind = ActionKind::get_step;
    a.op_index = std::stoi(get("op"));
    a.reply_subset = list_to_subset(get("use"));
  } else if (head == "timeout") {
    a.kind = ActionKind::op_timeout;
    a.op_index = std::stoi(get("op"));
  } else if (head == "read-ls") {
    a.kind = ActionKind::read_local;
    a.op_index = std::stoi(get("op"));
    a.replica = std::stoi(get("r"));
  } else if (head == "repair") {
    a.kind = ActionKind::repair_fire;
    a.op_index = std::stoi(get("op"));
  } else if (head == "deliver") {
    a.kind = ActionKind::net_deliver;
    a.replica = std::stoi(get("r"));
    a.id = static_cast<OpId>(std::stoul(get("id")));
  } else if (head == "to-hint") {
    a.kind = ActionKind::net_to_hint;
    a.replica = std::stoi(get("r"));
    a.id = static_cast<OpId>(std::stoul(get("id")));
  } else if (head == "lose") {
    a.kind = ActionKind::net_lose;
    a.replica = std::stoi(get("r"));
    a.id = static_cast<OpId>(std::stoul(get("id")));
  } else if (head == "handoff") {
    a.kind = ActionKind::handoff;
    a.coord = std::stoi(get("c"));
    a.replica = std::stoi(get("r"));
    a.id = static_cast<OpId>(std::stoul(get("id")));
  } else if (head == "fail") {
    a.kind = ActionKind::fail_replica;
    a.replica = std::stoi(get("r"));
  } else if (head == "recover") {
    a.kind = ActionKind::recover_replica;
    a.replica = std::stoi(get("r"));
  } else if (head == "wipe") {
    a.kind = ActionKind::wipe_store;
    a.replica = std::stoi(get("r"));
    a.key = std::stoi(get("k"));
  } else if (head == "destroy") {
    a.kind = ActionKind::destroy_hints;
    a.coord = std::stoi(get("c"));
  } else {
    throw std::invalid_argument("action: unknown kind '" + head + "'");
  }
  return a;
}

}  // namespace antientropy
