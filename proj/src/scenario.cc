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

#include "antientropy/scenario.hpp"

#include <algorithm>
#include <sstream>

namespace antientropy {

int Scenario::num_puts() const {
  return static_cast<int>(
      std::count_if(script.begin(), script.end(),
                    [](const Directive& d) { return d.kind == DirectiveKind::put; }));
}

int Scenario::num_gets() const {
  return static_cast<int>(
      std::count_if(script.begin(), script.end(),
                    [](const Directive& d) { return d.kind == DirectiveKind::get; }));
}

Key Scenario::key_of(const std::string& name) {
  for (size_t i = 0; i < key_names.size(); ++i)
    if (key_names[i] == name) return static_cast<Key>(i);
  key_names.push_back(name);
  return static_cast<Key>(key_names.size() - 1);
}

std::string Scenario::key_name(Key k) const {
  AE_REQUIRE(k >= 0 && static_cast<size_t>(k) < key_names.size(), "unknown key id");
  return key_names[static_cast<size_t>(k)];
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, int line, const std::string& what) {
  try {
    size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ScenarioError(line, "expected integer " + what + ", got '" + tok + "'");
  }
}

Expect parse_expect(const std::string& tok, int line) {
  if (tok == "expect=ok") return Expect::ok;
  if (tok == "expect=fail") return Expect::fail;
  if (tok == "expect=any") return Expect::any;
  throw ScenarioError(line, "bad expectation '" + tok + "'");
}

std::set<Value> parse_value_set(const std::string& tok, int line) {
  std::set<Value> out;
  if (tok == "bot") return out;  // the never-written default
  std::stringstream ss(tok);
  std::string part;
  while (std::getline(ss, part, ','))
    out.insert(parse_int(part, line, "value"));
  return out;
}

std::string render_value_set(const std::set<Value>& vs) {
  if (vs.empty()) return "bot";
  std::string out;
  for (Value v : vs) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

Config parse_config_line(const std::vector<std::string>& toks, int line) {
  Config cfg;
  cfg.hinted_handoff = false;
  cfg.read_repair = false;
  bool saw_replicas = false, saw_rf = false, saw_r = false, saw_w = false;
  for (size_t i = 1; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ScenarioError(line, "config token '" + t + "' is not key=value");
    std::string k = t.substr(0, eq), v = t.substr(eq + 1);
    if (k == "replicas") {
      cfg.num_replicas = parse_int(v, line, "replicas");
      saw_replicas = true;
    } else if (k == "rf") {
      cfg.replication = parse_int(v, line, "rf");
      saw_rf = true;
    } else if (k == "R") {
      cfg.read_cl = parse_int(v, line, "R");
      saw_r = true;
    } else if (k == "W") {
      cfg.write_cl = parse_int(v, line, "W");
      saw_w = true;
    } else if (k == "register") {
      if (v == "lww") cfg.register_kind = RegisterKind::lww;
      else if (v == "mv") cfg.register_kind = RegisterKind::mv;
      else throw ScenarioError(line, "register must be lww or mv");
    } else if (k == "hh") {
      if (v == "on") cfg.hinted_handoff = true;
      else if (v == "off") cfg.hinted_handoff = false;
      else throw ScenarioError(line, "hh must be on or off");
    } else if (k == "rr") {
      if (v == "on") cfg.read_repair = true;
      else if (v == "off") cfg.read_repair = false;
      else throw ScenarioError(line, "rr must be on or off");
    } else if (k == "failures") {
      if (v == "none") cfg.failure_mode = FailureMode::none;
      else if (v == "transient") cfg.failure_mode = FailureMode::transient;
      else if (v == "permanent") cfg.failure_mode = FailureMode::permanent;
      else throw ScenarioError(line, "failures must be none, transient, or permanent");
    } else if (k == "unsafe") {
      if (v == "on") cfg.allow_unsafe = true;
      else if (v == "off") cfg.allow_unsafe = false;
      else throw ScenarioError(line, "unsafe must be on or off");
    } else {
      throw ScenarioError(line, "unknown config key '" + k + "'");
    }
  }
  if (!saw_replicas || !saw_rf || !saw_r || !saw_w)
    throw ScenarioError(line, "config needs replicas=, rf=, R= and W=");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(line, e.what());
  }
  return cfg;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  bool have_config = false;
  std::optional<int> taint_line;
  int puts_seen = 0;

  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string stripped = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::vector<std::string> toks = tokenize(stripped);
    if (toks.empty()) continue;
    const std::string& head = toks[0];

    if (!have_config) {
      if (head != "config")
        throw ScenarioError(line, "first directive must be the config line");
      s.cfg = parse_config_line(toks, line);
      have_config = true;
      continue;
    }

    Directive d;
    d.line = line;
    if (head == "put") {
      if (toks.size() < 3 || toks.size() > 4)
        throw ScenarioError(line, "usage: put <key> <value> [expect=...]");
      d.kind = DirectiveKind::put;
      d.key = s.key_of(toks[1]);
      d.value = parse_int(toks[2], line, "value");
      d.expect = toks.size() == 4 ? parse_expect(toks[3], line) : Expect::any;
      ++puts_seen;
      s.script.push_back(d);
    } else if (head == "get") {
      if (toks.size() < 2 || toks.size() > 3)
        throw ScenarioError(line, "usage: get <key> [expect=...]");
      d.kind = DirectiveKind::get;
      d.key = s.key_of(toks[1]);
      d.expect = toks.size() == 3 ? parse_expect(toks[2], line) : Expect::any;
      s.script.push_back(d);
    } else if (head == "fail" || head == "recover") {
      if (toks.size() != 2) throw ScenarioError(line, "usage: " + head + " <replica>");
      d.kind = head == "fail" ? DirectiveKind::fail : DirectiveKind::recover;
      d.replica = parse_int(toks[1], line, "replica");
      s.script.push_back(d);
    } else if (head == "wipe") {
      if (toks.size() != 3) throw ScenarioError(line, "usage: wipe <replica> <key>");
      d.kind = DirectiveKind::wipe;
      d.replica = parse_int(toks[1], line, "replica");
      d.key = s.key_of(toks[2]);
      s.script.push_back(d);
    } else if (head == "destroy") {
      if (toks.size() != 2) throw ScenarioError(line, "usage: destroy <coordinator>");
      d.kind = DirectiveKind::destroy;
      d.coord = parse_int(toks[1], line, "coordinator");
      s.script.push_back(d);
    } else if (head == "taint") {
      if (toks.size() != 2) throw ScenarioError(line, "usage: taint <put-index>");
      if (s.tainted_put)
        throw ScenarioError(line, "taint may appear at most once");
      s.tainted_put = parse_int(toks[1], line, "put index");
      taint_line = line;
    } else if (head == "quiesce") {
      if (toks.size() < 2) throw ScenarioError(line, "usage: quiesce delivery|converge <key>");
      d.kind = DirectiveKind::quiesce;
      if (toks[1] == "delivery") {
        if (toks.size() != 2) throw ScenarioError(line, "usage: quiesce delivery");
        d.qmode = QuiesceMode::delivery_check;
      } else if (toks[1] == "converge") {
        if (toks.size() != 3) throw ScenarioError(line, "usage: quiesce converge <key>");
        d.qmode = QuiesceMode::convergence_check;
        d.key = s.key_of(toks[2]);
      } else {
        throw ScenarioError(line, "quiesce mode must be delivery or converge");
      }
      s.script.push_back(d);
    } else if (head == "check") {
      if (toks.size() < 2) throw ScenarioError(line, "empty check");
      Check c;
      if (toks[1] == "exists-read" || toks[1] == "forall-no-read") {
        c.kind = toks[1] == "exists-read" ? CheckKind::exists_read : CheckKind::forall_no_read;
        if (toks.size() < 3)
          throw ScenarioError(line, toks[1] + " needs at least one value set");
        for (size_t i = 2; i < toks.size(); ++i)
          c.reads.push_back(parse_value_set(toks[i], line));
      } else if (toks[1] == "delivery") {
        if (toks.size() != 2) throw ScenarioError(line, "usage: check delivery");
        c.kind = CheckKind::eventual_delivery;
      } else if (toks[1] == "converge") {
        if (toks.size() != 3) throw ScenarioError(line, "usage: check converge <key>");
        c.kind = CheckKind::convergence;
        c.key = s.key_of(toks[2]);
      } else {
        throw ScenarioError(line, "unknown check '" + toks[1] + "'");
      }
      s.checks.push_back(c);
    } else {
      throw ScenarioError(line, "unknown directive '" + head + "'");
    }
  }

  if (!have_config) throw ScenarioError(line ? line : 1, "missing config line");
  if (s.tainted_put && (*s.tainted_put < 1 || *s.tainted_put > puts_seen))
    throw ScenarioError(*taint_line, "taint index " + std::to_string(*s.tainted_put) +
                                         " does not name a put (have " +
                                         std::to_string(puts_seen) + ")");
  validate_scenario(s);
  return s;
}

void validate_scenario(const Scenario& s) {
  auto fail_at = [](const Directive& d, const std::string& msg) {
    throw ScenarioError(d.line ? d.line : 1, msg);
  };

  int quiesce_at = -1;
  QuiesceMode qmode = QuiesceMode::none;
  Key qkey = 0;
  for (size_t i = 0; i < s.script.size(); ++i) {
    const Directive& d = s.script[i];
    switch (d.kind) {
      case DirectiveKind::put:
      case DirectiveKind::get:
        if (d.key < 0 || static_cast<size_t>(d.key) >= s.key_names.size())
          fail_at(d, "unknown key id");
        break;
      case DirectiveKind::fail:
      case DirectiveKind::recover:
        if (d.replica < 0 || d.replica >= s.cfg.num_replicas)
          fail_at(d, "replica " + std::to_string(d.replica) + " out of range");
        if (s.cfg.failure_mode == FailureMode::none)
          fail_at(d, "failure directives need failures=transient or permanent");
        break;
      case DirectiveKind::wipe:
        if (d.replica < 0 || d.replica >= s.cfg.num_replicas)
          fail_at(d, "replica " + std::to_string(d.replica) + " out of range");
        if (s.cfg.failure_mode != FailureMode::permanent)
          fail_at(d, "wipe needs failures=permanent");
        break;
      case DirectiveKind::destroy:
        if (d.coord < 0 || d.coord >= s.cfg.num_replicas)
          fail_at(d, "coordinator " + std::to_string(d.coord) + " out of range");
        if (s.cfg.failure_mode != FailureMode::permanent)
          fail_at(d, "destroy needs failures=permanent");
        break;
      case DirectiveKind::quiesce:
        if (quiesce_at >= 0) fail_at(d, "quiesce may appear at most once");
        quiesce_at = static_cast<int>(i);
        qmode = d.qmode;
        qkey = d.key;
        break;
    }
  }
  if (quiesce_at >= 0 && quiesce_at + 1 != static_cast<int>(s.script.size())) {
    fail_at(s.script[static_cast<size_t>(quiesce_at)],
            "quiesce must be the last directive");
  }

  for (const Check& c : s.checks) {
    switch (c.kind) {
      case CheckKind::exists_read:
      case CheckKind::forall_no_read:
        if (static_cast<int>(c.reads.size()) != s.num_gets())
          throw ScenarioError(1, "read check lists " + std::to_string(c.reads.size()) +
                                     " reads but the script has " +
                                     std::to_string(s.num_gets()) + " gets");
        break;
      case CheckKind::eventual_delivery:
        if (!s.tainted_put)
          throw ScenarioError(1, "check delivery needs a taint directive");
        if (qmode != QuiesceMode::delivery_check)
          throw ScenarioError(1, "check delivery needs quiesce delivery");
        break;
      case CheckKind::convergence:
        if (qmode != QuiesceMode::convergence_check || qkey != c.key)
          throw ScenarioError(1, "check converge needs quiesce converge on the same key");
        if (!s.cfg.read_repair)
          throw ScenarioError(1, "check converge needs rr=on");
        break;
    }
  }
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  const Config& c = s.cfg;
  os << "config replicas=" << c.num_replicas << " rf=" << c.replication << " R=" << c.read_cl
     << " W=" << c.write_cl
     << " register=" << (c.register_kind == RegisterKind::lww ? "lww" : "mv")
     << " hh=" << (c.hinted_handoff ? "on" : "off")
     << " rr=" << (c.read_repair ? "on" : "off") << " failures=";
  switch (c.failure_mode) {
    case FailureMode::none: os << "none"; break;
    case FailureMode::transient: os << "transient"; break;
    case FailureMode::permanent: os << "permanent"; break;
  }
  if (c.allow_unsafe) os << " unsafe=on";
  os << "\n";

  auto expect_suffix = [](Expect e) -> std::string {
    switch (e) {
      case Expect::ok: return " expect=ok";
      case Expect::fail: return " expect=fail";
      case Expect::any: return "";
    }
    return "";
  };

  int puts_emitted = 0;
  for (const Directive& d : s.script) {
    switch (d.kind) {
      case DirectiveKind::put:
        os << "put " << s.key_name(d.key) << " " << d.value << expect_suffix(d.expect)
           << "\n";
        ++puts_emitted;
        if (s.tainted_put && *s.tainted_put == puts_emitted)
          os << "taint " << puts_emitted << "\n";
        break;
      case DirectiveKind::get:
        os << "get " << s.key_name(d.key) << expect_suffix(d.expect) << "\n";
        break;
      case DirectiveKind::fail:
        os << "fail " << d.replica << "\n";
        break;
      case DirectiveKind::recover:
        os << "recover " << d.replica << "\n";
        break;
      case DirectiveKind::wipe:
        os << "wipe " << d.replica << " " << s.key_name(d.key) << "\n";
        break;
      case DirectiveKind::destroy:
        os << "destroy " << d.coord << "\n";
        break;
      case DirectiveKind::quiesce:
        if (d.qmode == QuiesceMode::delivery_check) os << "quiesce delivery\n";
        else os << "quiesce converge " << s.key_name(d.key) << "\n";
        break;
    }
  }

  for (const Check& ck : s.checks) {
    switch (ck.kind) {
      case CheckKind::exists_read:
      case CheckKind::forall_no_read:
        os << "check " << (ck.kind == CheckKind::exists_read ? "exists-read" : "forall-no-read");
        for (const auto& vs : ck.reads) os << " " << render_value_set(vs);
        os << "\n";
        break;
      case CheckKind::eventual_delivery:
        os << "check delivery\n";
        break;
      case CheckKind::convergence:
        os << "check converge " << s.key_name(ck.key) << "\n";
        break;
    }
  }
  return os.str();
}

namespace {

Scenario make_builtin(const std::string& name, const std::string& text) {
  Scenario s = parse_scenario(text);
  s.name = name;
  return s;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"s1", "s2", "s3", "s4", "fig2"};
  return names;
}

std::string builtin_summary(const std::string& name) {
  if (name == "s1") return "a write that timed out below quorum is still readable";
  if (name == "s2") return "consecutive reads can return fresher then staler values";
  if (name == "s3") return "after reads of 2 and 1, a third read of 0 is impossible";
  if (name == "s4") return "tainted write reaches every replica under transient faults";
  if (name == "fig2") return "a single read-repair racing a delayed write leaves divergence";
  throw std::invalid_argument("unknown builtin '" + name + "'");
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "s1") {
    return make_builtin(name,
                        "config replicas=3 rf=3 R=1 W=2 register=lww hh=on rr=off failures=none\n"
                        "put k 0 expect=ok\n"
                        "put k 1 expect=fail\n"
                        "get k expect=ok\n"
                        "check exists-read 1\n");
  }
  if (name == "s2") {
    return make_builtin(name,
                        "config replicas=3 rf=3 R=1 W=2 register=lww hh=on rr=off failures=none\n"
                        "put k 0 expect=ok\n"
                        "put k 1 expect=ok\n"
                        "get k expect=ok\n"
                        "get k expect=ok\n"
                        "check exists-read 1 0\n");
  }
  if (name == "s3") {
    return make_builtin(name,
                        "config replicas=3 rf=3 R=1 W=1 register=lww hh=on rr=off failures=none\n"
                        "put k 0 expect=ok\n"
                        "put k 1 expect=ok\n"
                        "put k 2 expect=ok\n"
                        "put k 3 expect=ok\n"
                        "get k expect=ok\n"
                        "get k expect=ok\n"
                        "get k expect=ok\n"
                        "check forall-no-read 2 1 0\n");
  }
  if (name == "s4") {
    return make_builtin(name,
                        "config replicas=3 rf=3 R=1 W=2 register=lww hh=on rr=off "
                        "failures=transient\n"
                        "put k 0 expect=ok\n"
                        "taint 1\n"
                        "quiesce delivery\n"
                        "check delivery\n");
  }
  if (name == "fig2") {
    Scenario s = make_builtin(
        name,
        "config replicas=3 rf=3 R=1 W=1 register=lww hh=off rr=on failures=permanent\n"
        "put k 0 expect=ok\n"
        "put k 1 expect=ok\n"
        "put k 2 expect=ok\n"
        "wipe 2 k\n"
        "fail 2\n"
        "get k expect=ok\n");
    s.fault_budget = FaultBudget{1, 1, 2};  // scripted fail + wipe, two lost messages
    return s;
  }
  throw std::invalid_argument("unknown builtin '" + name + "'");
}

Schedule builtin_schedule(const std::string& name) {
  if (name != "fig2") return {};
  // The figure's interleaving. Replica 0 is left one write behind, replica 1
  // holds the newest surviving value, replica 2 takes the last write and then
  // crashes. The read's repair pushes value 1 at replica 0 while the delayed
  // newer write is still in flight, so the two live replicas end up divergent.
  const char* steps[] = {
      "script",            // put k 0 (op id 1)
      "deliver r=0 id=1",
      "put-step op=0",
      "deliver r=1 id=1",
      "deliver r=2 id=1",
      "script",            // put k 1 (op id 2)
      "deliver r=1 id=2",
      "put-step op=1",
      "deliver r=2 id=2",
      "lose r=0 id=2",     // replica 0 never sees value 1 directly
      "script",            // put k 2 (op id 3)
      "deliver r=2 id=3",
      "put-step op=2",
      "lose r=1 id=3",     // replica 1 never sees value 2
      "script",            // wipe 2 k
      "script",            // fail 2
      "script",            // get k (client op 3)
      "read-ls op=3 r=0",
      "read-ls op=3 r=1",
      "get-step op=3 use=1",
      "repair op=3",       // resolves to value 1, enqueues repair (op id 4) at replica 0
      "deliver r=0 id=3",  // the delayed write lands first: replica 0 now holds 2
      "deliver r=0 id=4",  // the repair arrives stale and loses
  };
  Schedule out;
  for (const char* s : steps) out.push_back(decode_action(s));
  return out;
}

}  // namespace antientropy
