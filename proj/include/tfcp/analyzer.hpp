// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "tfcp/documents.hpp"
#include "tfcp/ledger.hpp"

namespace tfcp::analyzer {

using ledger::AccountId;
using ledger::BlockHeight;

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  bool operator==(const Rational&) const = default;
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
};

struct LinkageGuess {
  AccountId security_deposit;
  std::optional<AccountId> guessed_donor;
  Rational confidence;
};

// The honest-but-curious observer's window: published documents, transfers,
// balances. Nothing off-ledger is reachable through this type, which is the
// whole point of it.
class LedgerView {
 public:
  explicit LedgerView(const ledger::Ledger& ledger) : ledger_(ledger) {}

  const std::vector<ledger::PublishedDocument>& documents() const { return ledger_.documents(); }
  const std::vector<ledger::Transfer>& transfers() const { return ledger_.transfers(); }
  std::vector<AccountId> account_ids() const { return ledger_.account_ids(); }
  ledger::Coin balance_of(const AccountId& a) const { return ledger_.balance_of(a); }
  BlockHeight height() const { return ledger_.height(); }

 private:
  const ledger::Ledger& ledger_;
};

// The strongest cheap attacks: plaintext scan of published documents,
// funding-graph correlation, and the post-reveal PublicWills read. Falls
// back to a uniform seeded guess over the unexplained accounts.
std::vector<LinkageGuess> linkage_analyzer(const LedgerView& view, std::uint64_t seed);

}  // namespace tfcp::analyzer
