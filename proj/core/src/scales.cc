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

#include "fmeca/scales.h"

#include <array>
#include <sstream>

#include "json_util.h"

namespace fmeca {
namespace {

const std::vector<ScaleAnchor>& anchor_table() {
  static const std::vector<ScaleAnchor> kAnchors = {
      {Dimension::kSeverity, 1, "None",
       "The failure mode has no plausible clinical impact on the patient or the care process, "
       "even if used in practice."},
      {Dimension::kSeverity, 2, "Minor",
       "The failure mode could affect the patient but would not cause physical or psychological "
       "harm and would not require any medical intervention."},
      {Dimension::kSeverity, 3, "Considerable",
       "The failure mode could cause reversible physical or psychological harm, requiring "
       "additional care or treatment, without major medical intervention."},
      {Dimension::kSeverity, 4, "Major",
       "The failure mode could cause irreversible harm (permanent injury) or reversible harm "
       "requiring a major medical intervention (e.g., surgery, transfer to intensive care), "
       "without being immediately life-threatening."},
      {Dimension::kSeverity, 5, "Catastrophic",
       "The failure mode could directly or indirectly contribute to the patient's death, whether "
       "immediate or delayed."},
      {Dimension::kDetectability, 1, "Very easily detectable",
       "The error is immediately and universally obvious upon reading the summary (<10 seconds), "
       "without requiring clinical expertise."},
      {Dimension::kDetectability, 2, "Easily detectable",
       "The error is detectable from the summary alone after brief attention or reflection "
       "(≤ 1 minute), without consulting the source document or performing in-depth "
       "analysis."},
      {Dimension::kDetectability, 3, "Detectable but not immediate",
       "The error is detectable from the summary alone, but only after careful reading, "
       "contextual reasoning, or prolonged examination (>1 minute); detection is not systematic "
       "and does not require consulting the source document."},
      {Dimension::kDetectability, 4, "Poorly detectable",
       "The error is unlikely to be detected from the summary alone and can only be identified "
       "through a systematic review of the source document(s)."},
      {Dimension::kDetectability, 5, "Very poorly detectable",
       "The error is very unlikely to be detected before influencing clinical reasoning or "
       "patient care, even if the source document is available."},
      {Dimension::kOccurrence, 1, "Very low", "< 1%"},
      {Dimension::kOccurrence, 2, "Low", "1-10 %"},
      {Dimension::kOccurrence, 3, "Medium", "10 - 60 %"},
      {Dimension::kOccurrence, 4, "High", "60 - 90 %"},
      {Dimension::kOccurrence, 5, "Very high", "> 90 %"},
  };
  return kAnchors;
}

// Lower bounds (inclusive) of occurrence scores 2..5, in percent.
constexpr std::array<std::int64_t, 4> kOccurrenceLowerPercent = {1, 10, 60, 90};

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::kSeverity: return "severity";
    case Dimension::kDetectability: return "detectability";
    case Dimension::kOccurrence: return "occurrence";
  }
  return "unknown";
}

std::optional<Dimension> parse_dimension(std::string_view name) {
  for (Dimension d : {Dimension::kSeverity, Dimension::kDetectability, Dimension::kOccurrence}) {
    if (dimension_name(d) == name) return d;
  }
  return std::nullopt;
}

int validate_score(Dimension d, int raw) {
  if (raw < kMinScore || raw > kMaxScore) {
    throw Error(ErrorClass::kDomain, std::string(dimension_name(d)) + " score " +
                                         std::to_string(raw) + " outside 1-5");
  }
  return raw;
}

Ratio make_ratio(std::int64_t numerator, std::int64_t denominator) {
  if (denominator <= 0 || numerator < 0) {
    throw Error(ErrorClass::kDomain, "invalid ratio " + std::to_string(numerator) + "/" +
                                         std::to_string(denominator));
  }
  return Ratio{numerator, denominator};
}

OccurrenceScore occurrence_score(const Ratio& ratio) {
  if (ratio.denominator <= 0 || ratio.numerator < 0 || ratio.numerator > ratio.denominator) {
    throw Error(ErrorClass::kDomain, "occurrence ratio " + std::to_string(ratio.numerator) +
                                         "/" + std::to_string(ratio.denominator) +
                                         " outside [0, 1]");
  }
  int score = 1;
  for (std::int64_t lower : kOccurrenceLowerPercent) {
    if (ratio >= Ratio{lower, 100}) ++score;
  }
  return OccurrenceScore(score);
}

OccurrenceScore occurrence_score(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(ErrorClass::kDomain, "occurrence ratio " + std::to_string(ratio) +
                                         " outside [0, 1]");
  }
  int score = 1;
  for (std::int64_t lower : kOccurrenceLowerPercent) {
    if (ratio >= static_cast<double>(lower) / 100.0) ++score;
  }
  return OccurrenceScore(score);
}

std::span<const ScaleAnchor> scale_anchors() { return anchor_table(); }

const ScaleAnchor& scale_anchor(Dimension d, int score) {
  validate_score(d, score);
  for (const auto& a : anchor_table()) {
    if (a.dimension == d && a.score == score) return a;
  }
  throw Error(ErrorClass::kNotFound, "no anchor");
}

std::string scales_document_json() {
  detail::Json doc;
  doc["schema"] = "fmeca.scales";
  doc["anchors"] = detail::Json::array();
  for (const auto& a : anchor_table()) {
    doc["anchors"].push_back({{"dimension", dimension_name(a.dimension)},
                              {"score", a.score},
                              {"label", a.label},
                              {"definition", a.definition}});
  }
  return detail::dump_json(doc);
}

std::string scales_document_text() {
  std::ostringstream out;
  std::optional<Dimension> current;
  for (const auto& a : anchor_table()) {
    if (current != a.dimension) {
      if (current) out << "\n";
      std::string title(dimension_name(a.dimension));
      title[0] = static_cast<char>(title[0] - 'a' + 'A');
      out << title << "\n" << std::string(title.size(), '=') << "\n";
      current = a.dimension;
    }
    out << a.score << "  " << a.label << "\n   " << a.definition << "\n";
  }
  return out.str();
}

std::vector<ScaleAnchor> parse_scales_document(std::string_view json_text) {
  using namespace detail;
  Json doc = parse_json(json_text, "scales document");
  reject_unknown_keys(doc, {"schema", "anchors"}, "");
  const Json& anchors = field(doc, "anchors", "");
  expect_array(anchors, "/anchors");
  std::vector<ScaleAnchor> out;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    std::string p = child("/anchors", i);
    reject_unknown_keys(anchors[i], {"dimension", "score", "label", "definition"}, p);
    auto dim = parse_dimension(string_field(anchors[i], "dimension", p));
    if (!dim) throw Error(ErrorClass::kSchema, child(p, "dimension") + ": unknown dimension");
    int score = static_cast<int>(int_field(anchors[i], "score", p));
    out.push_back({*dim, validate_score(*dim, score), string_field(anchors[i], "label", p),
                   string_field(anchors[i], "definition", p)});
  }
  return out;
}

}  // namespace fmeca
