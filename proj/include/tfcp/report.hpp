// Copyright (c) the TFCP simulator authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tfcp::report {

// Everything in a report is recomputed from trace lines alone, so a report
// regenerated from a written trace file is byte-identical to the original.
struct RunReport {
  std::string scenario_name;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> final_phase;  // instance short id -> phase
  std::vector<std::string> acknowledgments;  // "short-id donor-prefix block"
  std::map<std::string, std::uint64_t> payout_totals;
  struct AnalyzerStats {
    std::size_t guesses = 0;
    std::size_t correct = 0;
  };
  std::map<std::string, AnalyzerStats> analyzer;  // by label

  static RunReport from_trace(const std::vector<std::string>& lines);
  std::string render_human() const;
  std::string render_machine() const;
};

// Block of the first trace event for each of the scheme's eight stages, in
// protocol order; empty optional where the stage never happened.
struct SchemeSteps {
  std::optional<std::size_t> pre_wills, acceptance, shares, wills, announcement, ante,
      deliberation, acknowledgment;  // trace line indices

  bool complete_and_ordered() const;
};

SchemeSteps scheme_steps(const std::vector<std::string>& lines);

std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

}  // namespace tfcp::report
