// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/scenario.hpp"

#include <algorithm>
#include <sstream>

namespace tfcp::harness {

const char* role_name(Role r) {
  switch (r) {
    case Role::Donor: return "donor";
    case Role::Registrar: return "registrar";
    case Role::Witness: return "witness";
    case Role::AttackerKeyTransfer: return "attacker_keytransfer";
    case Role::AttackerWhale: return "attacker_whale";
    case Role::Observer: return "observer";
  }
  return "?";
}

std::optional<Role> role_from_name(const std::string& name) {
  for (Role r : {Role::Donor, Role::Registrar, Role::Witness, Role::AttackerKeyTransfer,
                 Role::AttackerWhale, Role::Observer}) {
    if (name == role_name(r)) return r;
  }
  return std::nullopt;
}

std::string ActorSpec::param(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::uint64_t ActorSpec::param_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : std::stoull(it->second);
}

std::string ScheduleEntry::arg(const std::string& key, const std::string& fallback) const {
  auto it = args.find(key);
  return it == args.end() ? fallback : it->second;
}

std::uint64_t ScheduleEntry::arg_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = args.find(key);
  return it == args.end() ? fallback : std::stoull(it->second);
}

const ActorSpec* Scenario::find_actor(const std::string& actor_name) const {
  for (const auto& a : actors)
    if (a.name == actor_name) return &a;
  return nullptr;
}

void Scenario::validate() const {
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].block < schedule[i - 1].block)
      throw ConfigError("schedule is not sorted by block");
  }
  for (const auto& e : schedule) {
    if (!find_actor(e.actor))
      throw ConfigError("schedule references unknown actor '" + e.actor + "'");
  }
}

// ---------------------------------------------------------------------------
// Text form

static std::string quote_if_needed(const std::string& s) {
  if (s.empty() || s.find(' ') != std::string::npos) return '"' + s + '"';
  return s;
}

std::string Scenario::to_text() const {
  std::ostringstream os;
  os << "tfcp-scenario v1\n";
  os << "name " << quote_if_needed(name) << '\n';
  os << "seed " << seed << '\n';
  os << "run_blocks " << run_blocks << '\n';
  os << "param min_bail " << network.min_bail << '\n';
  os << "param fee_num " << network.fee_fraction_num << '\n';
  os << "param fee_den " << network.fee_fraction_den << '\n';
  os << "param min_witnesses " << network.default_min_witnesses << '\n';
  os << "param min_span " << network.default_min_span << '\n';
  os << "param min_registrar_fee " << network.min_registrar_fee << '\n';
  for (const auto& a : actors) {
    os << "actor " << role_name(a.role) << ' ' << a.name << " balance=" << a.initial_balance;
    for (const auto& [k, v] : a.params) os << ' ' << k << '=' << quote_if_needed(v);
    os << '\n';
  }
  for (const auto& e : schedule) {
    os << "schedule " << e.block << ' ' << e.actor << ' ' << e.action;
    for (const auto& [k, v] : e.args) os << ' ' << k << '=' << quote_if_needed(v);
    os << '\n';
  }
  return os.str();
}

namespace {

struct Cursor {
  std::size_t line = 0;
  std::size_t col = 0;
};

[[noreturn]] void parse_fail(const Cursor& c, const std::string& what) {
  std::ostringstream os;
  os << "line " << c.line + 1 << ", column " << c.col + 1 << ": " << what;
  throw ConfigError(os.str());
}

// Whitespace-separated tokens; double quotes group a token with spaces.
std::vector<std::pair<std::string, std::size_t>> tokenize(const std::string& line, Cursor& c) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    std::string tok;
    bool in_quotes = false;
    while (i < line.size() && (in_quotes || line[i] != ' ')) {
      if (line[i] == '"') {
        in_quotes = !in_quotes;
      } else {
        tok.push_back(line[i]);
      }
      ++i;
    }
    if (in_quotes) {
      c.col = start;
      parse_fail(c, "unterminated quote");
    }
    out.emplace_back(tok, start);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& tok, Cursor c, std::size_t col) {
  c.col = col;
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(tok, &used);
    if (used != tok.size()) parse_fail(c, "expected integer, got '" + tok + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    parse_fail(c, "expected integer, got '" + tok + "'");
  }
}

std::map<std::string, std::string> parse_kv(
    const std::vector<std::pair<std::string, std::size_t>>& toks, std::size_t from, Cursor c) {
  std::map<std::string, std::string> out;
  for (std::size_t i = from; i < toks.size(); ++i) {
    const auto& [tok, col] = toks[i];
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
      c.col = col;
      parse_fail(c, "expected key=value, got '" + tok + "'");
    }
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

}  // namespace

Scenario Scenario::from_text(const std::string& text) {
  Scenario sc;
  std::istringstream is(text);
  std::string line;
  Cursor c;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') {
      ++c.line;
      continue;
    }
    if (!header_seen) {
      if (line != "tfcp-scenario v1") {
        c.col = 0;
        parse_fail(c, "expected header 'tfcp-scenario v1'");
      }
      header_seen = true;
      ++c.line;
      continue;
    }
    auto toks = tokenize(line, c);
    const std::string& kw = toks[0].first;
    if (kw == "name" && toks.size() == 2) {
      sc.name = toks[1].first;
    } else if (kw == "seed" && toks.size() == 2) {
      sc.seed = parse_u64(toks[1].first, c, toks[1].second);
    } else if (kw == "run_blocks" && toks.size() == 2) {
      sc.run_blocks = parse_u64(toks[1].first, c, toks[1].second);
    } else if (kw == "param" && toks.size() == 3) {
      const std::string& key = toks[1].first;
      std::uint64_t v = parse_u64(toks[2].first, c, toks[2].second);
      if (key == "min_bail") sc.network.min_bail = v;
      else if (key == "fee_num") sc.network.fee_fraction_num = static_cast<std::uint32_t>(v);
      else if (key == "fee_den") sc.network.fee_fraction_den = static_cast<std::uint32_t>(v);
      else if (key == "min_witnesses") sc.network.default_min_witnesses = static_cast<std::uint32_t>(v);
      else if (key == "min_span") sc.network.default_min_span = v;
      else if (key == "min_registrar_fee") sc.network.min_registrar_fee = v;
      else {
        c.col = toks[1].second;
        parse_fail(c, "unknown network parameter '" + key + "'");
      }
    } else if (kw == "actor" && toks.size() >= 3) {
      ActorSpec a;
      auto role = role_from_name(toks[1].first);
      if (!role) {
        c.col = toks[1].second;
        parse_fail(c, "unknown role '" + toks[1].first + "'");
      }
      a.role = *role;
      a.name = toks[2].first;
      a.params = parse_kv(toks, 3, c);
      if (auto it = a.params.find("balance"); it != a.params.end()) {
        a.initial_balance = std::stoull(it->second);
        a.params.erase(it);
      }
      sc.actors.push_back(std::move(a));
    } else if (kw == "schedule" && toks.size() >= 4) {
      ScheduleEntry e;
      e.block = parse_u64(toks[1].first, c, toks[1].second);
      e.actor = toks[2].first;
      e.action = toks[3].first;
      e.args = parse_kv(toks, 4, c);
      sc.schedule.push_back(std::move(e));
    } else {
      c.col = toks[0].second;
      parse_fail(c, "unrecognized directive '" + kw + "'");
    }
    ++c.line;
  }
  if (!header_seen) {
    parse_fail(c, "missing header 'tfcp-scenario v1'");
  }
  try {
    sc.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("line 1, column 1: ") + e.what());
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Built-in catalog

namespace {

void add_registrars(Scenario& sc, int n, BlockHeight bail_block, Coin amount, BlockHeight expiry) {
  for (int i = 1; i <= n; ++i) {
    std::string name = "r" + std::to_string(i);
    sc.actors.push_back({Role::Registrar, name, 1000, {}});
    sc.schedule.push_back({bail_block, name, "stake_bail",
                           {{"amount", std::to_string(amount)}, {"expiry", std::to_string(expiry)}}});
  }
}

void add_setup(Scenario& sc, const std::string& donor, BlockHeight open_block,
               std::map<std::string, std::string> open_args, int registrars) {
  sc.schedule.push_back({open_block, donor, "open", std::move(open_args)});
  for (int i = 1; i <= registrars; ++i) {
    sc.schedule.push_back({open_block + 1, "r" + std::to_string(i), "accept", {{"target", donor}}});
  }
  sc.schedule.push_back({open_block + 3, donor, "distribute", {}});
  sc.schedule.push_back({open_block + 4, donor, "finalize", {}});
}

void sort_schedule(Scenario& sc) {
  std::stable_sort(sc.schedule.begin(), sc.schedule.end(),
                   [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.block < b.block; });
}

std::map<std::string, std::string> default_open_args() {
  return {
      {"fund", "2000"},       {"t", "2"},         {"regs", "r1,r2,r3"}, {"reg_fee", "100"},
      {"wit_fee", "10"},      {"threshold", "100"}, {"deliberation", "10"}, {"x", "2"},
      {"span", "2"},          {"name", "Alice Doe"}, {"birth", "1970-01-01"}, {"place", "Paris"},
  };
}

}  // namespace

Scenario happy_path_scenario(std::uint64_t seed) {
  Scenario sc;
  sc.name = "happy_path";
  sc.seed = seed;
  sc.run_blocks = 60;
  sc.actors.push_back({Role::Donor, "alice", 1000, {{"death", "30"}}});
  add_registrars(sc, 3, 1, 200, 400);
  sc.actors.push_back({Role::Witness, "w1", 500, {}});
  sc.actors.push_back({Role::Witness, "w2", 500, {}});
  add_setup(sc, "alice", 5, default_open_args(), 3);
  sc.schedule.push_back({31, "w1", "ante", {{"target", "alice"}, {"amount", "60"}}});
  sc.schedule.push_back({33, "w2", "ante", {{"target", "alice"}, {"amount", "40"}}});
  sort_schedule(sc);
  return sc;
}

Scenario key_transfer_attack_scenario(std::uint64_t seed, BlockHeight deliberation_time,
                                      bool move_after_deadline) {
  Scenario sc = happy_path_scenario(seed);
  sc.name = "key_transfer_attack";
  sc.actors.push_back({Role::AttackerKeyTransfer, "bob", 100, {{"holds_key_of", "alice"}}});
  for (auto& e : sc.schedule) {
    if (e.action == "open") e.args["deliberation"] = std::to_string(deliberation_time);
  }
  // Threshold lands at block 33; the window is [33, 33 + deliberation_time).
  BlockHeight move_block = move_after_deadline ? 33 + deliberation_time + 2
                                               : 33 + (deliberation_time > 1 ? deliberation_time - 1 : 0);
  sc.schedule.push_back({move_block, "bob", "move", {{"target", "alice"}}});
  sc.run_blocks = std::max<BlockHeight>(sc.run_blocks, move_block + 3 * deliberation_time + 10);
  sort_schedule(sc);
  return sc;
}

Scenario whale_attack_scenario(std::uint64_t seed, std::uint32_t min_witnesses, bool donor_moves) {
  Scenario sc;
  sc.name = "whale_attack";
  sc.seed = seed;
  sc.run_blocks = 70;
  sc.actors.push_back({Role::Donor, "dave", 1000, {}});
  add_registrars(sc, 3, 1, 200, 400);
  sc.actors.push_back({Role::AttackerWhale, "whale", 10000, {}});
  auto open_args = default_open_args();
  open_args["x"] = std::to_string(min_witnesses);
  open_args["span"] = "0";
  open_args["name"] = "Dave Doe";
  add_setup(sc, "dave", 5, open_args, 3);
  sc.schedule.push_back({31, "whale", "ante", {{"target", "dave"}, {"amount", "100"}}});
  if (donor_moves) {
    sc.schedule.push_back({35, "dave", "move", {{"target", "dave"}}});
  }
  sort_schedule(sc);
  return sc;
}

Scenario anonymity_scenario(std::uint32_t donors, std::uint64_t seed, bool careless_funding,
                            bool run_to_acknowledgment) {
  if (donors < 1) throw ParamError("anonymity scenario needs at least one donor");
  Scenario sc;
  sc.name = "anonymity";
  sc.seed = seed;
  sc.run_blocks = 70;
  add_registrars(sc, 3, 1, 200, 400);
  sc.actors.push_back({Role::Witness, "w1", 100000, {}});
  sc.actors.push_back({Role::Witness, "w2", 100000, {}});
  for (std::uint32_t i = 1; i <= donors; ++i) {
    std::string name = "d" + std::to_string(i);
    sc.actors.push_back({Role::Donor, name, 5000, {{"death", "30"}}});
    auto open_args = default_open_args();
    open_args["name"] = "Donor " + std::to_string(i);
    // Window long enough that every instance is still deliberating when the
    // pre measurement runs, whatever the donor count.
    open_args["deliberation"] = std::to_string(10 + 2 * donors);
    if (careless_funding) open_args["funder"] = name;
    add_setup(sc, name, 5 + i, open_args, 3);
    if (run_to_acknowledgment) {
      sc.schedule.push_back({30 + 2 * i - 1, "w1", "ante", {{"target", name}, {"amount", "60"}}});
      sc.schedule.push_back({30 + 2 * i + 1, "w2", "ante", {{"target", name}, {"amount", "40"}}});
    }
  }
  // Every instance is deliberating at the pre measurement and acknowledged
  // by the post one.
  sc.schedule.push_back({30 + 2 * donors + 2, "w1", "analyze", {{"label", "pre"}}});
  if (run_to_acknowledgment) {
    // Last acknowledgment lands at block 41 + 4*donors.
    BlockHeight post = 44 + 4 * donors;
    sc.schedule.push_back({post, "w1", "analyze", {{"label", "post"}}});
    sc.run_blocks = std::max(sc.run_blocks, 55 + 6 * static_cast<BlockHeight>(donors));
  }
  sort_schedule(sc);
  return sc;
}

Scenario false_signal_scenario(std::uint64_t seed, BlockHeight move_offset) {
  Scenario sc = happy_path_scenario(seed);
  sc.name = "false_signal";
  // Donor is alive; witnesses signal anyway. Threshold lands at block 33
  // with a 10-block window; the donor moves strictly inside it.
  if (move_offset > 9) throw ParamError("move offset must fall inside the 10-block window");
  for (auto& a : sc.actors) {
    if (a.name == "alice") a.params.erase("death");
  }
  sc.schedule.push_back({33 + move_offset, "alice", "move", {{"target", "alice"}}});
  sort_schedule(sc);
  return sc;
}

Scenario supersession_scenario(std::uint64_t seed) {
  Scenario sc;
  sc.name = "supersession";
  sc.seed = seed;
  sc.run_blocks = 70;
  sc.actors.push_back({Role::Donor, "alice", 2000, {{"death", "40"}}});
  add_registrars(sc, 3, 1, 200, 400);
  sc.actors.push_back({Role::Witness, "w1", 500, {}});
  sc.actors.push_back({Role::Witness, "w2", 500, {}});
  add_setup(sc, "alice", 5, default_open_args(), 3);
  auto second = default_open_args();
  second["fund"] = "0";  // deposit already funded at first open
  add_setup(sc, "alice", 14, second, 3);
  add_setup(sc, "alice", 23, second, 3);
  sc.schedule.push_back({41, "w1", "ante", {{"target", "alice"}, {"amount", "60"}}});
  sc.schedule.push_back({43, "w2", "ante", {{"target", "alice"}, {"amount", "40"}}});
  sort_schedule(sc);
  return sc;
}

Scenario silent_registrar_scenario(std::uint64_t seed) {
  Scenario sc = happy_path_scenario(seed);
  sc.name = "silent_registrar";
  for (auto& a : sc.actors) {
    if (a.name == "r3") a.params["honest"] = "0";
  }
  return sc;
}

std::vector<std::pair<std::string, Scenario>> builtin_scenarios() {
  return {
      {"happy_path", happy_path_scenario()},
      {"key_transfer_attack", key_transfer_attack_scenario()},
      {"key_transfer_late", key_transfer_attack_scenario(43, 10, true)},
      {"key_transfer_null_deliberation", key_transfer_attack_scenario(43, 0)},
      {"whale_x2", whale_attack_scenario(44, 2, false)},
      {"whale_x1", whale_attack_scenario(44, 1, true)},
      {"whale_x1_unreachable", whale_attack_scenario(44, 1, false)},
      {"false_signal", false_signal_scenario()},
      {"anonymity_k5", anonymity_scenario(5, 48)},
      {"anonymity_careless", anonymity_scenario(2, 49, true)},
      {"supersession", supersession_scenario()},
      {"silent_registrar", silent_registrar_scenario()},
  };
}

}  // namespace tfcp::harness
