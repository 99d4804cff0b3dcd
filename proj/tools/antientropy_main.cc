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

// Command line front end. Exit codes: 0 the expected outcome held, 1 a check
// failed or a schedule did not replay, 2 the exploration budget ran out
// before anything was decided, 3 usage or parse errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "antientropy/explorer.hpp"
#include "antientropy/ghost.hpp"
#include "antientropy/trace.hpp"

namespace ae = antientropy;

namespace {

struct Opts {
  std::string scenario;
  std::string schedule_file;
  std::string out;
  std::size_t max_steps = 40;
  int toggles = 2;
  int wipes = 1;
  int losses = 1;
  bool no_dedup = false;
  bool quiet = false;
  uint64_t seed = 0;
  int runs = 1;
};

// A usage-level problem (exit 3), as opposed to a model-level failure.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

ae::Scenario load_scenario(const std::string& ref) {
  for (const std::string& n : ae::builtin_names())
    if (n == ref) return ae::builtin_scenario(ref);
  std::ifstream f(ref);
  if (!f) throw UsageError("cannot open scenario '" + ref + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  ae::Scenario s = ae::parse_scenario(buf.str());
  s.name = ref;
  return s;
}

ae::Schedule load_schedule(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open schedule '" + path + "'");
  ae::Schedule out;
  std::string raw;
  int line = 0;
  while (std::getline(f, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string stripped = hash == std::string::npos ? raw : raw.substr(0, hash);
    auto notspace = stripped.find_first_not_of(" \t\r");
    if (notspace == std::string::npos) continue;
    auto last = stripped.find_last_not_of(" \t\r");
    try {
      out.push_back(ae::decode_action(stripped.substr(notspace, last - notspace + 1)));
    } catch (const std::invalid_argument& e) {
      throw UsageError("schedule " + path + " line " + std::to_string(line) + ": " +
                       e.what());
    }
  }
  return out;
}

ae::Budget budget_from(const Opts& o) {
  ae::Budget b;
  b.max_steps = o.max_steps;
  b.dedup = !o.no_dedup;
  b.faults = ae::FaultBudget{o.toggles, o.wipes, o.losses};
  return b;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

std::string join_schedule(const ae::Schedule& sched) {
  std::string out;
  for (const ae::Action& a : sched) {
    if (!out.empty()) out += "; ";
    out += ae::encode_action(a);
  }
  return out;
}

int explore_exit(const ae::ExploreResult& r) {
  for (const ae::CheckOutcome& c : r.checks)
    if (!c.decided) return 2;
  return r.any_fail() ? 1 : 0;
}

int print_explore(const ae::Scenario& sc, const ae::ExploreResult& r, const Opts& o) {
  std::cout << "scenario: " << sc.name << "\n";
  std::cout << "states: " << r.states << " transitions: " << r.transitions
            << " truncated: " << (r.truncated ? "yes" : "no") << "\n";
  if (r.max_pump_reads > 0)
    std::cout << "max pump reads on any path: " << r.max_pump_reads << "\n";
  for (size_t i = 0; i < r.checks.size(); ++i) {
    const ae::CheckOutcome& c = r.checks[i];
    std::cout << "check " << i + 1 << " " << ae::check_kind_name(sc.checks[i].kind)
              << ": "
              << (!c.decided ? "UNDECIDED" : c.pass ? "PASS" : "FAIL");
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    if (!o.quiet && !c.schedule.empty())
      std::cout << "  schedule: " << join_schedule(c.schedule) << "\n";
  }
  switch (r.verdict) {
    case ae::Verdict::witness_found: std::cout << "verdict: witness-found\n"; break;
    case ae::Verdict::exhausted: std::cout << "verdict: exhausted\n"; break;
    case ae::Verdict::budget_exceeded: std::cout << "verdict: budget-exceeded\n"; break;
  }
  if (!o.out.empty()) write_json(o.out, ae::explore_json(sc, r));
  return explore_exit(r);
}

int cmd_explore(const Opts& o, ae::CheckKind* require_kind) {
  ae::Scenario sc = load_scenario(o.scenario);
  if (require_kind) {
    bool found = false;
    for (const ae::Check& c : sc.checks)
      if (c.kind == *require_kind) found = true;
    if (!found)
      throw UsageError("scenario '" + sc.name + "' has no " +
                       ae::check_kind_name(*require_kind) + " check");
  }
  ae::ExploreResult r = ae::explore(sc, budget_from(o));
  return print_explore(sc, r, o);
}

int cmd_replay(const Opts& o) {
  ae::Scenario sc = load_scenario(o.scenario);
  ae::Schedule sched;
  if (!o.schedule_file.empty()) {
    sched = load_schedule(o.schedule_file);
  } else {
    sched = ae::builtin_schedule(sc.name);
    if (sched.empty())
      throw UsageError("no schedule given and '" + sc.name +
                       "' ships no canonical one");
  }

  ae::ReplayResult r =
      ae::replay_schedule(sc, sched, budget_from(o).faults);
  std::cout << "scenario: " << sc.name << "\n";
  if (!o.quiet) {
    for (size_t i = 0; i < r.steps.size(); ++i) {
      const ae::StepRecord& st = r.steps[i];
      std::cout << "step " << i << ": " << ae::encode_action(st.action)
                << " fp=" << ae::fp_hex(st.fp_full) << " rank=" << st.delivery_rk
                << " crank=" << st.convergence_rk << " ghost=" << st.pending_tainted
                << "/" << st.hinted_tainted << "/" << st.store_tainted << "\n";
    }
  }
  if (!r.ok) {
    std::cout << "replay error: " << r.error << "\n";
    if (!o.out.empty()) write_json(o.out, ae::trace_json(sc, sched, r));
    return 1;
  }
  std::cout << "steps: " << r.steps.size()
            << " finished: " << (r.finished ? "yes" : "no") << "\n";
  for (size_t i = 0; i < sc.cfg.num_replicas && i < r.final_state.alive.size(); ++i)
    std::cout << "replica " << i << ": "
              << (r.final_state.alive[i] ? "alive" : "down") << "\n";
  for (const auto& [loc, reg] : r.final_state.local_stores) {
    std::cout << "store r=" << loc.first << " " << sc.key_name(loc.second) << " = {";
    bool first = true;
    for (ae::Value v : ae::query(reg)) {
      if (!first) std::cout << ",";
      std::cout << v;
      first = false;
    }
    std::cout << "}\n";
  }
  for (size_t k = 0; k < sc.key_names.size(); ++k) {
    ae::Key key = static_cast<ae::Key>(k);
    std::set<ae::ReplicaId> live = ae::live_replicas(sc.cfg, r.final_state, key);
    std::cout << "converged " << sc.key_names[k] << ": "
              << (ae::convergence_predicate(sc.cfg, r.final_state, key, live) ? "yes"
                                                                              : "no")
              << "\n";
  }
  std::cout << "checks: " << (r.checks_pass ? "pass" : "fail");
  if (!r.check_detail.empty()) std::cout << " (" << r.check_detail << ")";
  std::cout << "\n";
  if (!o.out.empty()) write_json(o.out, ae::trace_json(sc, sched, r));
  return r.checks_pass ? 0 : 1;
}

int cmd_fuzz(const Opts& o) {
  ae::Scenario sc = load_scenario(o.scenario);
  ae::FuzzResult r = ae::fuzz(sc, o.seed, o.runs, budget_from(o));
  std::cout << "scenario: " << sc.name << " seed: " << o.seed << " runs: " << o.runs
            << " max-steps: " << o.max_steps << "\n";
  if (!o.quiet) {
    for (size_t i = 0; i < r.run_log.size(); ++i) {
      const ae::FuzzRun& rl = r.run_log[i];
      std::cout << "run " << i << " seed=" << rl.seed << " steps=" << rl.steps
                << " finished=" << (rl.finished ? "yes" : "no")
                << " dead=" << (rl.dead ? "yes" : "no")
                << " checks=" << (rl.checks_pass ? "pass" : "fail")
                << " fp=" << ae::fp_hex(rl.final_fp) << "\n";
    }
  }
  std::cout << "digest: " << ae::fp_hex(r.digest) << "\n";
  std::cout << "violations: " << r.violations << "\n";
  return r.violations > 0 ? 1 : 0;
}

int cmd_list() {
  for (const std::string& n : ae::builtin_names()) {
    ae::Scenario sc = ae::builtin_scenario(n);
    std::cout << n << ": " << ae::builtin_summary(n) << "\n";
    if (!ae::builtin_schedule(n).empty())
      std::cout << "  (ships a canonical schedule for replay)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interleaving explorer for quorum replication with anti-entropy"};
  app.require_subcommand(1);

  Opts o;

  auto add_budget = [&o](CLI::App* cmd) {
    cmd->add_option("--max-steps", o.max_steps, "longest schedule considered");
    cmd->add_option("--max-toggles", o.toggles,
                    "default cap on fail/recover events (scenario budget wins)");
    cmd->add_option("--max-wipes", o.wipes, "default cap on wipe/destroy events");
    cmd->add_option("--max-losses", o.losses, "default cap on dropped messages");
  };

  CLI::App* ex = app.add_subcommand("explore", "walk every schedule, decide all checks");
  ex->add_option("scenario", o.scenario, "builtin name or scenario file")->required();
  add_budget(ex);
  ex->add_flag("--no-dedup", o.no_dedup, "disable seen-state pruning");
  ex->add_option("--out", o.out, "write a JSON report");
  ex->add_flag("--quiet", o.quiet, "suppress schedules on stdout");

  CLI::App* rp = app.add_subcommand("replay", "run one schedule step by step");
  rp->add_option("scenario", o.scenario, "builtin name or scenario file")->required();
  rp->add_option("schedule", o.schedule_file,
                 "schedule file, one action per line (default: the builtin's own)");
  add_budget(rp);
  rp->add_option("--out", o.out, "write a JSON trace");
  rp->add_flag("--quiet", o.quiet, "suppress per-step lines");

  CLI::App* fz = app.add_subcommand("fuzz", "random walks with a reproducible seed");
  fz->add_option("scenario", o.scenario, "builtin name or scenario file")->required();
  fz->add_option("--seed", o.seed, "base seed (default: ANTIENTROPY_SEED or 1)");
  fz->add_option("--runs", o.runs, "number of walks");
  add_budget(fz);
  fz->add_flag("--quiet", o.quiet, "suppress per-run lines");

  CLI::App* cd = app.add_subcommand("check-delivery",
                                    "explore a scenario with a delivery check");
  cd->add_option("scenario", o.scenario, "builtin name or scenario file")->required();
  add_budget(cd);
  cd->add_flag("--no-dedup", o.no_dedup, "disable seen-state pruning");
  cd->add_option("--out", o.out, "write a JSON report");
  cd->add_flag("--quiet", o.quiet, "suppress schedules on stdout");

  CLI::App* cc = app.add_subcommand("check-converge",
                                    "explore a scenario with a convergence check");
  cc->add_option("scenario", o.scenario, "builtin name or scenario file")->required();
  add_budget(cc);
  cc->add_flag("--no-dedup", o.no_dedup, "disable seen-state pruning");
  cc->add_option("--out", o.out, "write a JSON report");
  cc->add_flag("--quiet", o.quiet, "suppress schedules on stdout");

  app.add_subcommand("list-builtins", "print the builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  if (fz->count("--seed") == 0) {
    const char* env = std::getenv("ANTIENTROPY_SEED");
    if (env) {
      try {
        o.seed = std::stoull(env);
      } catch (const std::exception&) {
        std::cerr << "error: ANTIENTROPY_SEED is not a number\n";
        return 3;
      }
    } else {
      o.seed = 1;
    }
  }

  try {
    if (app.got_subcommand("list-builtins")) return cmd_list();
    if (app.got_subcommand("explore")) return cmd_explore(o, nullptr);
    if (app.got_subcommand("replay")) return cmd_replay(o);
    if (app.got_subcommand("fuzz")) return cmd_fuzz(o);
    if (app.got_subcommand("check-delivery")) {
      ae::CheckKind k = ae::CheckKind::eventual_delivery;
      return cmd_explore(o, &k);
    }
    if (app.got_subcommand("check-converge")) {
      ae::CheckKind k = ae::CheckKind::convergence;
      return cmd_explore(o, &k);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ae::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 3;
}
