// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/analyzer.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace tfcp::analyzer {

using ledger::DocKind;
using ledger::PublishedDocument;
using ledger::Transfer;

namespace {

bool contains_bytes(ByteSpan haystack, ByteSpan needle) {
  if (needle.empty() || haystack.size() < needle.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

std::uint64_t seed_for(std::uint64_t base, const AccountId& deposit) {
  std::uint64_t x = base;
  for (int i = 0; i < 8; ++i) x ^= static_cast<std::uint64_t>(deposit.value[i]) << (8 * i);
  return x;
}

}  // namespace

std::vector<LinkageGuess> linkage_analyzer(const LedgerView& view, std::uint64_t seed) {
  // Deposits, in order of first pre-Wills publication.
  std::vector<AccountId> deposits;
  std::map<AccountId, BlockHeight> announcement_block;
  for (const auto& d : view.documents()) {
    if (d.kind == DocKind::PreWills &&
        std::find(deposits.begin(), deposits.end(), d.publisher) == deposits.end()) {
      deposits.push_back(d.publisher);
    }
    if (d.kind == DocKind::Announcement && !announcement_block.count(d.publisher)) {
      announcement_block[d.publisher] = d.block;
    }
  }

  // Registrars identify themselves by staking bails and publishing
  // acceptances.
  std::set<AccountId> registrars;
  std::map<AccountId, BlockHeight> bail_block;
  for (const auto& d : view.documents()) {
    if (d.kind == DocKind::BailCommitment || d.kind == DocKind::RegistrarAcceptance) {
      registrars.insert(d.publisher);
      if (d.kind == DocKind::BailCommitment && !bail_block.count(d.publisher))
        bail_block[d.publisher] = d.block;
    }
  }

  std::set<AccountId> deposit_set(deposits.begin(), deposits.end());

  // Transfer-graph features.
  std::map<AccountId, std::set<AccountId>> out_edges;
  std::map<AccountId, std::set<AccountId>> deposits_funded;
  std::set<AccountId> ante_senders;
  std::set<AccountId> bail_vaults;
  for (const auto& t : view.transfers()) {
    if (t.protocol) continue;
    out_edges[t.from].insert(t.to);
    if (deposit_set.count(t.to)) {
      auto ann = announcement_block.find(t.to);
      bool post_announcement = ann != announcement_block.end() && t.block >= ann->second;
      if (post_announcement) {
        ante_senders.insert(t.from);
      } else {
        deposits_funded[t.from].insert(t.to);
      }
    }
    // The stake destination of a bail-publishing registrar, in the block of
    // its commitment, is protocol plumbing, not a donor.
    auto bb = bail_block.find(t.from);
    if (bb != bail_block.end() && t.block == bb->second) bail_vaults.insert(t.to);
  }

  auto is_hub = [&](const AccountId& a) {
    auto it = out_edges.find(a);
    if (it != out_edges.end() && it->second.size() >= 3) return true;
    auto df = deposits_funded.find(a);
    return df != deposits_funded.end() && df->second.size() >= 2;
  };

  // PublicWills reveal the link outright once published. Map each deposit to
  // its revealed donor via the Wills block reference.
  std::map<AccountId, AccountId> revealed;
  std::map<BlockHeight, std::set<AccountId>> wills_publishers_by_block;
  for (const auto& d : view.documents()) {
    if (d.kind == DocKind::Wills) wills_publishers_by_block[d.block].insert(d.publisher);
  }
  for (const auto& d : view.documents()) {
    if (d.kind != DocKind::PublicWills) continue;
    try {
      docs::PublicWills pw = docs::PublicWills::parse(d.payload);
      auto it = wills_publishers_by_block.find(pw.original_wills_block);
      if (it == wills_publishers_by_block.end()) continue;
      for (const AccountId& dep : it->second) revealed[dep] = pw.donor;
    } catch (const Error&) {
      continue;
    }
  }

  std::vector<AccountId> all_accounts = view.account_ids();

  // Fallback candidate pool: accounts the public record does not explain.
  std::vector<AccountId> candidates;
  for (const AccountId& a : all_accounts) {
    if (deposit_set.count(a) || registrars.count(a) || ante_senders.count(a) ||
        bail_vaults.count(a) || is_hub(a))
      continue;
    candidates.push_back(a);
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<LinkageGuess> out;
  for (const AccountId& dep : deposits) {
    LinkageGuess g;
    g.security_deposit = dep;

    if (auto it = revealed.find(dep); it != revealed.end()) {
      g.guessed_donor = it->second;
      g.confidence = {1, 1};
      out.push_back(g);
      continue;
    }

    // Plaintext scan over this deposit's published documents.
    bool found = false;
    for (const auto& d : view.documents()) {
      if (d.publisher != dep) continue;
      for (const AccountId& a : all_accounts) {
        // Accounts the public record already classifies as something other
        // than a donor are not linkage candidates even in plaintext.
        if (a == dep || deposit_set.count(a) || registrars.count(a) || ante_senders.count(a) ||
            bail_vaults.count(a) || is_hub(a))
          continue;
        if (contains_bytes(d.payload, a.span())) {
          g.guessed_donor = a;
          g.confidence = {1, 1};
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (found) {
      out.push_back(g);
      continue;
    }

    // Funding correlation: a lone non-hub, non-registrar account that funded
    // the deposit before the announcement is almost certainly the donor.
    std::vector<AccountId> funders;
    for (const auto& [from, deps] : deposits_funded) {
      if (!deps.count(dep)) continue;
      if (registrars.count(from) || deposit_set.count(from) || is_hub(from)) continue;
      funders.push_back(from);
    }
    if (funders.size() == 1) {
      g.guessed_donor = funders.front();
      g.confidence = {1, 1};
      out.push_back(g);
      continue;
    }

    // Nothing in the public record singles anyone out: uniform guess.
    if (candidates.empty()) {
      g.guessed_donor = std::nullopt;
      g.confidence = {0, 1};
    } else {
      std::mt19937_64 rng(seed_for(seed, dep));
      g.guessed_donor = candidates[rng() % candidates.size()];
      g.confidence = {1, candidates.size()};
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace tfcp::analyzer
