// Copyright 2026 The FMECA Workbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FMECA_RISK_H_
#define FMECA_RISK_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fmeca/campaign.h"
#include "fmeca/scales.h"

namespace fmeca {

inline constexpr int kMinRpn = 1;
inline constexpr int kMaxRpn = 125;

int rpn(OccurrenceScore o, SeverityScore s, DetectabilityScore d);

// Strict majority of `reviewer_count`.
int majority_consensus(std::size_t reviewer_count);

// Summaries where at least `consensus` reviewers flagged the mode, over the
// number of summaries in the round. Unset consensus means strict majority.
// kWorkflow on an open round, kNotFound for an unknown mode.
Ratio occurrence_ratio(const Campaign& campaign, std::string_view round_id,
                       std::string_view failure_mode_id, std::optional<int> consensus = {});

struct RiskSupport {
  std::size_t summaries_flagged = 0;  // consensus-flagged summaries
  std::size_t summaries_total = 0;
  std::size_t instances = 0;          // scored instances on those summaries
  std::size_t reviewers = 0;          // distinct reviewers contributing scores
};

struct RiskEntry {
  std::string failure_mode_id;
  Ratio occurrence_ratio;
  OccurrenceScore occurrence{1};
  std::optional<SeverityScore> severity;
  std::optional<DetectabilityScore> detectability;
  std::optional<int> rpn;  // unset: not assessable (mode never consensus-flagged)
  RiskSupport support;

  bool assessable() const { return rpn.has_value(); }
};

struct RiskOptions {
  ScoreAggregation aggregation = ScoreAggregation::kMedian;
  std::optional<int> consensus;
};

// One entry per failure mode, ranked by descending RPN, then severity,
// detectability and occurrence (all descending), then id ascending.
// Entries that are not assessable follow all assessable ones.
struct RiskRegister {
  std::string round_id;
  int taxonomy_version = 0;
  RiskOptions options;
  int consensus = 0;
  std::vector<RiskEntry> entries;
};

// Ordering used by risk_register; true when `a` ranks above `b`.
bool ranks_before(const RiskEntry& a, const RiskEntry& b);

RiskRegister risk_register(const Campaign& campaign, std::string_view round_id,
                           const RiskOptions& options = {});

// Caveat printed with every register export.
std::string_view rpn_caveat();

// Columns: rank,failure_mode_id,occurrence_ratio,summaries_flagged,
// summaries_total,occurrence,severity,detectability,rpn,instances,reviewers
std::string risk_csv(const RiskRegister& r);
// Occurrence x severity grid of failure-mode counts, severity 5 on top.
std::string risk_matrix_text(const RiskRegister& r);
std::string risk_json(const RiskRegister& r);

}  // namespace fmeca

#endif  // FMECA_RISK_H_
