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

#ifndef FMECA_SCALES_H_
#define FMECA_SCALES_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fmeca/error.h"

namespace fmeca {

enum class Dimension { kSeverity, kDetectability, kOccurrence };

std::string_view dimension_name(Dimension d);
std::optional<Dimension> parse_dimension(std::string_view name);

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;

// Throws kDomain naming the dimension unless 1 <= raw <= 5.
int validate_score(Dimension d, int raw);

// A 1-5 ordinal score tied to one dimension at compile time.
template <Dimension D>
class Score {
 public:
  static constexpr Dimension kDimension = D;

  explicit Score(int value) : value_(validate_score(D, value)) {}

  int value() const { return value_; }

  friend auto operator<=>(const Score&, const Score&) = default;

 private:
  int value_;
};

using SeverityScore = Score<Dimension::kSeverity>;
using DetectabilityScore = Score<Dimension::kDetectability>;
using OccurrenceScore = Score<Dimension::kOccurrence>;

template <Dimension D>
Score<D> validate_score(int raw) {
  return Score<D>(raw);
}

// Exact non-negative fraction; comparisons cross-multiply.
struct Ratio {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return a.numerator * b.denominator == b.numerator * a.denominator;
  }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    return a.numerator * b.denominator <=> b.numerator * a.denominator;
  }
};

// Throws kDomain when denominator <= 0 or numerator < 0.
Ratio make_ratio(std::int64_t numerator, std::int64_t denominator);

// Maps a proportion of summaries onto the occurrence scale. Buckets are
// half-open on the left: [0,1%) [1%,10%) [10%,60%) [60%,90%) [90%,100%].
// Throws kDomain outside [0, 1].
OccurrenceScore occurrence_score(const Ratio& ratio);
OccurrenceScore occurrence_score(double ratio);

struct ScaleAnchor {
  Dimension dimension;
  int score;
  std::string label;
  std::string definition;

  friend bool operator==(const ScaleAnchor&, const ScaleAnchor&) = default;
};

// All 15 anchors, ordered by dimension then score.
std::span<const ScaleAnchor> scale_anchors();

// Throws kDomain for a score outside 1-5.
const ScaleAnchor& scale_anchor(Dimension d, int score);

// Reference document for reviewer handouts. The JSON form round-trips
// through parse_scales_document byte-identically.
std::string scales_document_json();
std::string scales_document_text();
std::vector<ScaleAnchor> parse_scales_document(std::string_view json_text);

}  // namespace fmeca

#endif  // FMECA_SCALES_H_
