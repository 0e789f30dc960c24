// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#include "tfcp/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tfcp/bytes.hpp"

namespace tfcp::report {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_pipes(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '|') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

RunReport RunReport::from_trace(const std::vector<std::string>& lines) {
  RunReport rep;
  std::map<std::string, std::string> phase;  // keeps latest
  std::vector<std::string> order;
  for (const auto& line : lines) {
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "META" && toks.size() >= 3) {
      if (toks[1] == "scenario") rep.scenario_name = toks[2];
      if (toks[1] == "seed") rep.seed = std::stoull(toks[2]);
    } else if (toks[0] == "OPEN" && toks.size() >= 2) {
      if (!phase.count(toks[1])) {
        phase[toks[1]] = "Recruiting";
        order.push_back(toks[1]);
      }
    } else if (toks[0] == "PHASE" && toks.size() >= 4) {
      phase[toks[1]] = toks[3];
    } else if (toks[0] == "ACK" && toks.size() >= 4) {
      rep.acknowledgments.push_back(toks[1] + " " + toks[2] + " " + toks[3]);
    } else if (toks[0] == "ANALYZE" && toks.size() >= 7) {
      auto& st = rep.analyzer[toks[1]];
      st.guesses += 1;
      if (toks[6] == "correct") st.correct += 1;
    } else {
      auto fields = split_pipes(line);
      if (fields.size() == 6 && fields[1] == "payout") {
        rep.payout_totals[fields[2]] += std::stoull(fields[5]);
      }
    }
  }
  for (const auto& id : order) rep.final_phase.emplace_back(id, phase[id]);
  return rep;
}

std::string RunReport::render_human() const {
  std::ostringstream os;
  os << "scenario: " << scenario_name << "  (seed " << seed << ")\n";
  os << "instances:\n";
  for (const auto& [id, ph] : final_phase) os << "  " << id << "  " << ph << '\n';
  os << "acknowledgments: " << acknowledgments.size() << '\n';
  for (const auto& a : acknowledgments) os << "  " << a << '\n';
  if (!payout_totals.empty()) {
    os << "payouts:\n";
    for (const auto& [kind, total] : payout_totals) os << "  " << kind << "  " << total << '\n';
  }
  for (const auto& [label, st] : analyzer) {
    os << "analyzer[" << label << "]: " << st.correct << '/' << st.guesses << " correct\n";
  }
  return os.str();
}

std::string RunReport::render_machine() const {
  std::ostringstream os;
  os << "scenario|" << scenario_name << '\n';
  os << "seed|" << seed << '\n';
  for (const auto& [id, ph] : final_phase) os << "phase|" << id << '|' << ph << '\n';
  for (const auto& a : acknowledgments) {
    std::string joined = a;
    std::replace(joined.begin(), joined.end(), ' ', '|');
    os << "ack|" << joined << '\n';
  }
  for (const auto& [kind, total] : payout_totals) os << "payout|" << kind << '|' << total << '\n';
  for (const auto& [label, st] : analyzer)
    os << "analyzer|" << label << '|' << st.correct << '|' << st.guesses << '\n';
  return os.str();
}

SchemeSteps scheme_steps(const std::vector<std::string>& lines) {
  SchemeSteps s;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    auto set_once = [&](std::optional<std::size_t>& slot) {
      if (!slot) slot = i;
    };
    auto fields = split_pipes(line);
    if (fields.size() == 5) {
      if (fields[1] == "prewills") set_once(s.pre_wills);
      if (fields[1] == "wills") set_once(s.wills);
      if (fields[1] == "announcement") set_once(s.announcement);
      continue;
    }
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "ACCEPT") set_once(s.acceptance);
    if (toks[0] == "SHARES") set_once(s.shares);
    if (toks[0] == "ANTE") set_once(s.ante);
    if (toks[0] == "DELIBERATE") set_once(s.deliberation);
    if (toks[0] == "ACK") set_once(s.acknowledgment);
  }
  return s;
}

bool SchemeSteps::complete_and_ordered() const {
  const std::optional<std::size_t>* seq[] = {&pre_wills, &acceptance,   &shares, &wills,
                                             &announcement, &ante, &deliberation, &acknowledgment};
  std::size_t prev = 0;
  for (const auto* slot : seq) {
    if (!slot->has_value()) return false;
    if (slot->value() < prev) return false;
    prev = slot->value();
  }
  return true;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace tfcp::report
