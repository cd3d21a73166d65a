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

#ifndef FMECA_AGREEMENT_REPORT_H_
#define FMECA_AGREEMENT_REPORT_H_

#include <string>
#include <string_view>
#include <vector>

#include "fmeca/agreement.h"
#include "fmeca/campaign.h"

namespace fmeca {

struct PairwiseEntry {
  std::string rater_a;
  std::string rater_b;
  std::vector<AgreementEstimate> estimates;
};

// Stage 1 (subcategory) or Stage 2 (failure mode) presence agreement.
struct BinaryStageReport {
  int stage = 0;
  std::size_t n_units = 0;
  std::size_t n_complete_units = 0;
  std::vector<PairwiseEntry> pairwise;  // cohen_kappa, gwet_ac1 per pair
  AgreementEstimate fleiss;
  AgreementEstimate ac1;
  AgreementEstimate alpha;
  AgreementEstimate unanimity;
  // Set when some cells were missing: Fleiss, AC1 and unanimity then use
  // complete units only while alpha uses every pairable unit.
  bool complete_case_only = false;
};

// Stage 3 agreement on one scoring dimension.
struct ScoreStageReport {
  Dimension dimension = Dimension::kSeverity;
  Stage3Policy policy;
  int min_raters = 0;
  std::size_t n_units = 0;
  std::vector<PairwiseEntry> pairwise;  // pearson_r, spearman_rho per pair
  AgreementEstimate icc;
  AgreementEstimate exact;
  AgreementEstimate within1;
  AgreementEstimate within2;
  std::vector<RaterSummary> raters;
};

struct AgreementReport {
  std::string round_id;
  int taxonomy_version = 0;
  std::vector<std::string> raters;
  BinaryStageReport stage1;
  BinaryStageReport stage2;
  ScoreStageReport severity;
  ScoreStageReport detectability;
};

RatingTable to_rating_table(const AnnotationMatrix& m);

BinaryStageReport binary_stage_report(const AnnotationMatrix& m);
ScoreStageReport score_stage_report(const AnnotationMatrix& m, Dimension dimension,
                                    const Stage3Policy& policy);

// kWorkflow while the round is open.
AgreementReport agreement_report(const Campaign& campaign, std::string_view round_id,
                                 const Stage3Policy& stage3 = {});

// Fixed three decimals. Ties on the exact binary value round half to even
// (the C library's default rounding mode); "-0.000" prints as "0.000".
std::string format_fixed3(double v);

// "0.424" or "undefined (p_e = 1)".
std::string format_estimate(const AgreementEstimate& e);

// Delimiter-separated tables, one per stage. Header:
// stage,dimension,section,rater_a,rater_b,metric,value,n_units,note
std::string agreement_csv(const BinaryStageReport& r);
std::string agreement_csv(const ScoreStageReport& r);
std::string agreement_csv(const AgreementReport& r, int stage);

// Structured document with the pairwise table, multi-rater values and
// tolerance rows for each stage. `stage` 0 renders every stage.
std::string agreement_json(const AgreementReport& r, int stage = 0);

// Plain-text rendering of the same panels.
std::string agreement_text(const AgreementReport& r);

}  // namespace fmeca

#endif  // FMECA_AGREEMENT_REPORT_H_
