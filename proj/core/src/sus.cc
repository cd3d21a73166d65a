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

#include "fmeca/sus.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fmeca/error.h"

namespace fmeca {
namespace {

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

const std::vector<SusBand>& default_sus_bands() {
  static const std::vector<SusBand> kBands = {
      {0.0, true, 51.0, false, "F", "Poor"},
      {51.0, true, 68.0, true, "C", "Average"},
      {68.0, false, 74.0, false, "B", "Good"},
      {74.0, true, 80.3, false, "B+", "Good"},
      {80.3, true, 100.0, true, "A", "Excellent"},
  };
  return kBands;
}

bool band_contains(const SusBand& b, double score) {
  bool above = b.lower_inclusive ? score >= b.lower : score > b.lower;
  bool below = b.upper_inclusive ? score <= b.upper : score < b.upper;
  return above && below;
}

SusGrade sus_grade(double score, const std::vector<SusBand>& bands) {
  if (!(score >= 0.0 && score <= 100.0)) {
    throw Error(ErrorClass::kDomain, "SUS score " + fixed(score, 2) + " outside [0, 100]");
  }
  for (const auto& b : bands) {
    if (band_contains(b, score)) return {b.grade, b.label};
  }
  throw Error(ErrorClass::kDomain, "SUS band table does not cover " + fixed(score, 2));
}

SusResult sus_score(const SusResponse& r, const std::vector<SusBand>& bands) {
  if (r.items.size() != kSusItemCount) {
    throw Error(ErrorClass::kValidation, "SUS response for '" + r.evaluator_id + "' has " +
                                             std::to_string(r.items.size()) +
                                             " items, expected 10");
  }
  int total = 0;
  for (std::size_t i = 0; i < kSusItemCount; ++i) {
    const int v = r.items[i];
    if (v < 1 || v > 5) {
      throw Error(ErrorClass::kValidation, "SUS item " + std::to_string(i + 1) + " = " +
                                               std::to_string(v) + " outside 1-5");
    }
    // Item numbers are 1-based: index 0 is item 1 (odd).
    total += (i % 2 == 0) ? v - 1 : 5 - v;
  }
  SusResult out;
  out.evaluator_id = r.evaluator_id;
  out.score = total * 2.5;
  SusGrade g = sus_grade(out.score, bands);
  out.grade = g.grade;
  out.label = g.label;
  return out;
}

SusAggregate sus_aggregate(std::span<const SusResult> results, SdKind sd,
                           const std::vector<SusBand>& bands) {
  if (results.empty()) throw Error(ErrorClass::kDomain, "SUS aggregate of zero results");
  if (sd == SdKind::kSample && results.size() < 2) {
    throw Error(ErrorClass::kDomain, "sample SD needs at least two results");
  }
  SusAggregate agg;
  agg.n = results.size();
  agg.sd_kind = sd;
  double sum = 0.0;
  for (const auto& r : results) {
    sum += r.score;
    ++agg.grade_counts[r.grade];
  }
  agg.mean = sum / static_cast<double>(agg.n);
  double ss = 0.0;
  for (const auto& r : results) ss += (r.score - agg.mean) * (r.score - agg.mean);
  const double divisor = static_cast<double>(sd == SdKind::kPopulation ? agg.n : agg.n - 1);
  agg.sd = std::sqrt(ss / divisor);
  agg.mean_grade = sus_grade(agg.mean, bands);
  return agg;
}

std::vector<SusResponse> parse_sus_csv(std::string_view text) {
  std::vector<SusResponse> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("evaluator")) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != kSusItemCount + 1) {
      throw Error(ErrorClass::kSchema, "line " + std::to_string(line_no) + ": expected 11 fields, got " +
                                           std::to_string(fields.size()));
    }
    SusResponse r;
    r.evaluator_id = std::string(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
      if (ec != std::errc() || ptr != fields[i].data() + fields[i].size()) {
        throw Error(ErrorClass::kParse, "line " + std::to_string(line_no) + ": item " +
                                            std::to_string(i) + " is not an integer");
      }
      r.items.push_back(v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string sus_report_text(std::span<const SusResult> results, const SusAggregate& agg) {
  std::ostringstream out;
  out << "evaluator_id,score,grade,label\n";
  for (const auto& r : results) {
    out << r.evaluator_id << ',' << fixed(r.score, 1) << ',' << r.grade << ',' << r.label << '\n';
  }
  out << "\nn: " << agg.n << "\n";
  out << "mean: " << fixed(agg.mean, 1) << "\n";
  out << "sd (" << (agg.sd_kind == SdKind::kPopulation ? "population" : "sample")
      << "): " << fixed(agg.sd, 2) << "\n";
  out << "grade of mean: " << agg.mean_grade.grade << " (" << agg.mean_grade.label << ")\n";
  out << "grade counts:";
  for (const auto& [grade, count] : agg.grade_counts) out << " " << grade << "=" << count;
  out << "\n";
  return out.str();
}

}  // namespace fmeca
