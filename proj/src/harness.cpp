// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/harness.hpp"

#include <algorithm>
#include <sstream>

namespace tfcp::harness {

using engine::Engine;
using incentives::Incentives;
using ledger::AccountId;
using ledger::Ledger;
using ledger::Trace;

double RunResult::guess_rate(const std::string& label) const {
  std::size_t total = 0, correct = 0;
  for (const auto& m : measurements) {
    if (m.label != label) continue;
    ++total;
    if (m.correct) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::string RunResult::trace_text() const {
  std::string out;
  for (const auto& l : trace_lines) {
    out += l;
    out += '\n';
  }
  return out;
}

namespace {

constexpr ledger::Coin kFaucetSupply = 1'000'000'000;

Bytes actor_seed(std::uint64_t scenario_seed, const std::string& name) {
  ByteWriter w;
  w.str("tfcp-actor");
  w.u64(scenario_seed);
  w.str(name);
  crypto::Digest d = crypto::hash(w.bytes());
  return Bytes(d.begin(), d.end());
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string format_rational(const analyzer::Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

// One simulated world: ledger, incentive machinery, protocol engine and the
// actor scripts from the scenario.
class World {
 public:
  explicit World(const Scenario& sc)
      : sc_(sc),
        ledger_(trace_),
        incentives_(ledger_, trace_, sc.network),
        rng_(sc.seed),
        engine_(ledger_, incentives_, rng_, trace_) {}

  RunResult run();

 private:
  struct ActorState {
    const ActorSpec* spec = nullptr;
    crypto::KeyPair keys;
    AccountId account;
  };

  ActorState& actor(const std::string& name) {
    auto it = actors_.find(name);
    if (it == actors_.end()) throw ConfigError("unknown actor '" + name + "'");
    return it->second;
  }

  InstanceId instance_of(const std::string& donor_name) {
    auto id = engine_.latest_valid_instance(actor(donor_name).account);
    if (!id) throw ConfigError("no instance open for donor '" + donor_name + "'");
    return *id;
  }

  void execute(const ScheduleEntry& e);
  void auto_reveal();
  void run_analyze(const std::string& label);

  const Scenario& sc_;
  Trace trace_;
  Ledger ledger_;
  Incentives incentives_;
  crypto::Rng rng_;
  Engine engine_;
  std::map<std::string, ActorState> actors_;
  std::map<std::string, crypto::KeyPair> deposit_keys_;  // donor name -> deposit keys
  std::map<AccountId, AccountId> ground_truth_;
  std::vector<Measurement> measurements_;
  crypto::KeyPair faucet_keys_;
  AccountId faucet_;
};

void World::execute(const ScheduleEntry& e) {
  ActorState& a = actor(e.actor);
  const std::string& act = e.action;

  if (act == "stake_bail") {
    incentives_.stake_bail(a.keys, e.arg_u64("amount", sc_.network.min_bail),
                           e.arg_u64("expiry", ledger_.height() + 1000));
  } else if (act == "open") {
    std::string dep_name = e.actor + "_sd";
    if (!deposit_keys_.count(dep_name)) {
      Bytes seed = actor_seed(sc_.seed, dep_name);
      crypto::KeyPair dk = crypto::keygen(seed);
      AccountId dep = ledger_.create_account(dk, 0);
      deposit_keys_[dep_name] = dk;
      ledger::Coin fund = e.arg_u64("fund", 500);
      if (fund > 0) {
        std::string funder = e.arg("funder", "faucet");
        if (funder == "faucet") {
          ledger_.submit_transfer(faucet_, dep, fund, faucet_keys_.secret_key);
        } else {
          ActorState& f = actor(funder);
          ledger_.submit_transfer(f.account, dep, fund, f.keys.secret_key);
        }
      }
      ground_truth_[dep] = a.account;
    } else if (e.arg_u64("fund", 0) > 0 && e.arg("funder", "faucet") == "faucet") {
      ledger_.submit_transfer(faucet_, ledger::account_id_for(deposit_keys_[dep_name].public_key),
                              e.arg_u64("fund", 0), faucet_keys_.secret_key);
    }

    engine::InstanceParams p;
    p.threshold_t = static_cast<std::uint32_t>(e.arg_u64("t", 2));
    std::string regs = e.arg("regs", "any");
    if (regs != "any") {
      std::vector<AccountId> list;
      for (const auto& r : split_csv(regs)) list.push_back(actor(r).account);
      p.acceptable_registrars = std::move(list);
    }
    p.registrar_fee = e.arg_u64("reg_fee", 0);
    p.witness_fees = e.arg_u64("wit_fee", 0);
    p.threshold_amount = e.arg_u64("threshold", 100);
    p.deliberation_time = e.arg_u64("deliberation", 10);
    p.min_distinct_witnesses =
        static_cast<std::uint32_t>(e.arg_u64("x", sc_.network.default_min_witnesses));
    p.min_signaling_span = e.arg_u64("span", sc_.network.default_min_span);
    p.civil_identity.name = e.arg("name", e.actor);
    p.civil_identity.birth_date = e.arg("birth", "");
    p.civil_identity.birth_place = e.arg("place", "");
    p.heritage = to_bytes(e.arg("heritage", "all coins to my heirs"));
    engine_.open_instance(a.keys, deposit_keys_[dep_name], std::move(p));
  } else if (act == "accept") {
    engine_.registrar_accept(instance_of(e.arg("target")), a.keys);
  } else if (act == "distribute") {
    engine_.distribute_shares(instance_of(e.actor));
  } else if (act == "finalize") {
    engine_.finalize_setup(instance_of(e.actor));
  } else if (act == "ante") {
    engine_.record_ante(instance_of(e.arg("target")), a.keys, e.arg_u64("amount", 0));
  } else if (act == "move") {
    // A raw donor-signed ledger move; whoever holds the key can make it.
    ActorState& target = actor(e.arg("target", e.actor));
    ledger_.submit_transfer(target.account, target.account, 0, target.keys.secret_key);
  } else if (act == "reveal") {
    InstanceId id = instance_of(e.arg("target"));
    engine_.submit_share_reveal(id, a.keys, engine_.delivered_share(id, a.account));
  } else if (act == "analyze") {
    run_analyze(e.arg("label", "default"));
  } else {
    throw ConfigError("unknown schedule action '" + act + "'");
  }
}

void World::auto_reveal() {
  for (const InstanceId& id : engine_.instance_ids()) {
    const engine::Instance& inst = engine_.get(id);
    bool open = inst.reveal_open &&
                (inst.phase == Phase::Deliberating || inst.phase == Phase::Acknowledged);
    if (!open) continue;
    for (const auto& spec : sc_.actors) {
      if (spec.role != Role::Registrar || spec.param("honest", "1") == "0") continue;
      ActorState& reg = actor(spec.name);
      const engine::Instance& cur = engine_.get(id);
      if (!cur.reveal_open) break;
      if (!cur.shares_delivered.count(reg.account) || cur.reveals.count(reg.account)) continue;
      engine_.submit_share_reveal(id, reg.keys, engine_.delivered_share(id, reg.account));
    }
  }
}

void World::run_analyze(const std::string& label) {
  analyzer::LedgerView view(ledger_);
  auto guesses = analyzer::linkage_analyzer(view, sc_.seed);
  for (const auto& g : guesses) {
    Measurement m;
    m.label = label;
    m.block = ledger_.height();
    m.deposit = g.security_deposit;
    m.guess = g.guessed_donor;
    m.confidence = g.confidence;
    auto truth = ground_truth_.find(g.security_deposit);
    m.correct = truth != ground_truth_.end() && g.guessed_donor && *g.guessed_donor == truth->second;
    measurements_.push_back(m);
    std::ostringstream os;
    os << "ANALYZE " << label << ' ' << m.block << ' ' << m.deposit.hex().substr(0, 16) << ' '
       << (m.guess ? m.guess->hex().substr(0, 16) : std::string("none")) << ' '
       << format_rational(m.confidence) << ' ' << (m.correct ? "correct" : "wrong");
    trace_.emit(os.str());
  }
}

RunResult World::run() {
  trace_.emit("META scenario " + sc_.name);
  trace_.emit("META seed " + std::to_string(sc_.seed));
  sc_.validate();

  faucet_keys_ = crypto::keygen(actor_seed(sc_.seed, "faucet"));
  faucet_ = ledger_.create_account(faucet_keys_, kFaucetSupply);
  for (const auto& spec : sc_.actors) {
    if (spec.role == Role::Observer) continue;  // observers hold no account
    ActorState st;
    st.spec = &spec;
    st.keys = crypto::keygen(actor_seed(sc_.seed, spec.name));
    st.account = ledger_.create_account(st.keys, 0);
    if (spec.initial_balance > 0)
      ledger_.submit_transfer(faucet_, st.account, spec.initial_balance, faucet_keys_.secret_key);
    actors_[spec.name] = std::move(st);
  }
  ledger::Coin initial_supply = ledger_.total_supply();

  std::size_t next = 0;
  for (;;) {
    while (next < sc_.schedule.size() && sc_.schedule[next].block == ledger_.height()) {
      execute(sc_.schedule[next++]);
    }
    auto_reveal();
    if (ledger_.height() >= sc_.run_blocks) break;
    ledger_.advance_block(1);
  }

  RunResult res;
  res.scenario_name = sc_.name;
  res.seed = sc_.seed;
  res.trace_lines = trace_.lines();
  for (const InstanceId& id : engine_.instance_ids()) {
    const engine::Instance& inst = engine_.get(id);
    res.instances.push_back({id, inst.phase, inst.abort_reason, inst.donor, inst.deposit,
                             inst.params.registrar_fee});
  }
  res.acknowledgments = engine_.acknowledgments();
  res.transitions = engine_.transitions();
  res.payouts = incentives_.entries();
  res.measurements = measurements_;
  res.ground_truth = ground_truth_;
  res.initial_supply = initial_supply;
  res.final_supply = ledger_.total_supply();
  res.final_ledger_state = ledger_.serialize_state();
  return res;
}

}  // namespace

RunResult run_scenario(const Scenario& scenario) {
  World world(scenario);
  return world.run();
}

std::vector<std::string> check_invariants(const RunResult& result) {
  std::vector<std::string> violations;
  if (result.initial_supply != result.final_supply) {
    violations.push_back("coin conservation: supply changed from " +
                         std::to_string(result.initial_supply) + " to " +
                         std::to_string(result.final_supply));
  }

  using incentives::PayoutKind;
  for (const auto& inst : result.instances) {
    ledger::Coin escrow = 0, refund = 0, forfeit = 0, imm = 0, fin = 0;
    for (const auto& e : result.payouts) {
      if (e.instance != inst.id) continue;
      switch (e.kind) {
        case PayoutKind::AnteEscrow: escrow += e.amount; break;
        case PayoutKind::AnteRefund: refund += e.amount; break;
        case PayoutKind::AnteForfeit: forfeit += e.amount; break;
        case PayoutKind::RegistrarFeeImmediate: imm += e.amount; break;
        case PayoutKind::RegistrarFeeFinal: fin += e.amount; break;
        default: break;
      }
    }
    bool completed = inst.phase == Phase::Acknowledged || inst.phase == Phase::Aborted;
    if (completed && escrow != refund + forfeit) {
      violations.push_back("ante reconciliation: escrow " + std::to_string(escrow) +
                           " != refund " + std::to_string(refund) + " + forfeit " +
                           std::to_string(forfeit));
    }
    if (imm + fin > inst.registrar_fee) {
      violations.push_back("registrar fee overpayment: " + std::to_string(imm) + " + " +
                           std::to_string(fin) + " > " + std::to_string(inst.registrar_fee));
    }
  }

  ledger::Coin staked = 0, released = 0, slashed = 0;
  for (const auto& e : result.payouts) {
    if (e.kind == PayoutKind::BailStake) staked += e.amount;
    if (e.kind == PayoutKind::BailRelease) released += e.amount;
    if (e.kind == PayoutKind::BailSlash) slashed += e.amount;
  }
  if (released + slashed > staked) {
    violations.push_back("bail reconciliation: released " + std::to_string(released) +
                         " + slashed " + std::to_string(slashed) + " > staked " +
                         std::to_string(staked));
  }

  // Phase-graph safety over the recorded transitions.
  auto allowed = [](Phase from, Phase to) {
    if (to == Phase::Superseded) return from != Phase::Acknowledged && from != Phase::Aborted;
    switch (from) {
      case Phase::Recruiting: return to == Phase::SharesDistributed;
      case Phase::SharesDistributed: return to == Phase::Active;
      case Phase::Active: return to == Phase::Deliberating;
      case Phase::Deliberating: return to == Phase::Acknowledged || to == Phase::Aborted;
      default: return false;
    }
  };
  for (const auto& t : result.transitions) {
    if (!allowed(t.from, t.to)) {
      violations.push_back(std::string("illegal phase transition ") + engine::phase_name(t.from) +
                           " -> " + engine::phase_name(t.to));
    }
  }
  return violations;
}

}  // namespace tfcp::harness
