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

#ifndef FMECA_SUS_H_
#define FMECA_SUS_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fmeca {

inline constexpr std::size_t kSusItemCount = 10;

struct SusResponse {
  std::string evaluator_id;
  std::vector<int> items;  // exactly 10 values in 1-5, questionnaire order
};

struct SusResult {
  std::string evaluator_id;
  double score = 0.0;  // multiple of 2.5 in [0, 100]
  std::string grade;
  std::string label;
};

// One grade band; each bound is open or closed as flagged.
struct SusBand {
  double lower;
  bool lower_inclusive;
  double upper;
  bool upper_inclusive;
  std::string grade;
  std::string label;
};

// F/Poor below 51, C/Average on [51, 68], B/Good on (68, 74), B+/Good on
// [74, 80.3), A/Excellent from 80.3.
const std::vector<SusBand>& default_sus_bands();

bool band_contains(const SusBand& b, double score);

// Odd items contribute (response - 1), even items (5 - response); the sum is
// scaled by 2.5. Throws kValidation naming the item index.
SusResult sus_score(const SusResponse& r, const std::vector<SusBand>& bands = default_sus_bands());

struct SusGrade {
  std::string grade;
  std::string label;
};

// Throws kDomain outside [0, 100].
SusGrade sus_grade(double score, const std::vector<SusBand>& bands = default_sus_bands());

enum class SdKind { kPopulation, kSample };

struct SusAggregate {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  SdKind sd_kind = SdKind::kPopulation;
  SusGrade mean_grade;
  std::map<std::string, std::size_t> grade_counts;
};

// Throws kDomain for an empty list (and for sample SD with fewer than two).
SusAggregate sus_aggregate(std::span<const SusResult> results, SdKind sd = SdKind::kPopulation,
                           const std::vector<SusBand>& bands = default_sus_bands());

// Rows "evaluator_id,i1,...,i10"; an optional header row starting with
// "evaluator" is skipped. Throws kParse / kValidation with line numbers.
std::vector<SusResponse> parse_sus_csv(std::string_view text);

// Per-evaluator rows followed by the aggregate block.
std::string sus_report_text(std::span<const SusResult> results, const SusAggregate& agg);

}  // namespace fmeca

#endif  // FMECA_SUS_H_
