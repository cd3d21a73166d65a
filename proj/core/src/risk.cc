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

#include "fmeca/risk.h"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "fmeca/agreement_report.h"
#include "json_util.h"

namespace fmeca {
namespace {

const Round& closed_round(const Campaign& campaign, std::string_view round_id) {
  const Round& r = campaign.round(round_id);
  if (r.status != RoundStatus::kClosed) {
    throw Error(ErrorClass::kWorkflow, "round " + r.id + " is open; close it before analysis");
  }
  return r;
}

int resolve_consensus(const Round& r, std::optional<int> consensus) {
  int value = consensus.value_or(majority_consensus(r.reviewer_ids.size()));
  if (value < 1 || value > static_cast<int>(r.reviewer_ids.size())) {
    throw Error(ErrorClass::kDomain, "consensus " + std::to_string(value) + " outside 1.." +
                                         std::to_string(r.reviewer_ids.size()));
  }
  return value;
}

// Reviewers (records) that flagged `fm` on `summary_id`.
std::vector<const AnnotationRecord*> flaggers(const Campaign& c, const Round& r,
                                              std::string_view summary_id,
                                              std::string_view fm) {
  std::vector<const AnnotationRecord*> out;
  for (const auto& reviewer_id : r.reviewer_ids) {
    const AnnotationRecord* rec = c.submitted_record(r, reviewer_id, summary_id);
    if (rec == nullptr) continue;
    auto it = rec->flags.find(std::string(fm));
    if (it != rec->flags.end() && it->second) out.push_back(rec);
  }
  return out;
}

}  // namespace

int rpn(OccurrenceScore o, SeverityScore s, DetectabilityScore d) {
  return o.value() * s.value() * d.value();
}

int majority_consensus(std::size_t reviewer_count) {
  return static_cast<int>(reviewer_count / 2 + 1);
}

Ratio occurrence_ratio(const Campaign& campaign, std::string_view round_id,
                       std::string_view failure_mode_id, std::optional<int> consensus) {
  const Round& r = closed_round(campaign, round_id);
  const Taxonomy& t = campaign.taxonomy(r.taxonomy_version);
  if (t.find_failure_mode(failure_mode_id) == nullptr) {
    throw Error(ErrorClass::kNotFound,
                "unknown failure mode '" + std::string(failure_mode_id) + "'");
  }
  const int need = resolve_consensus(r, consensus);
  std::int64_t hits = 0;
  for (const auto& summary_id : r.summary_ids) {
    if (static_cast<int>(flaggers(campaign, r, summary_id, failure_mode_id).size()) >= need) ++hits;
  }
  return make_ratio(hits, static_cast<std::int64_t>(r.summary_ids.size()));
}

bool ranks_before(const RiskEntry& a, const RiskEntry& b) {
  if (a.assessable() != b.assessable()) return a.assessable();
  if (a.assessable()) {
    if (*a.rpn != *b.rpn) return *a.rpn > *b.rpn;
    if (*a.severity != *b.severity) return *a.severity > *b.severity;
    if (*a.detectability != *b.detectability) return *a.detectability > *b.detectability;
  }
  if (a.occurrence != b.occurrence) return a.occurrence > b.occurrence;
  return a.failure_mode_id < b.failure_mode_id;
}

RiskRegister risk_register(const Campaign& campaign, std::string_view round_id,
                           const RiskOptions& options) {
  const Round& r = closed_round(campaign, round_id);
  const Taxonomy& t = campaign.taxonomy(r.taxonomy_version);
  RiskRegister reg;
  reg.round_id = r.id;
  reg.taxonomy_version = r.taxonomy_version;
  reg.options = options;
  reg.consensus = resolve_consensus(r, options.consensus);

  for (const auto& fm : t.failure_modes) {
    RiskEntry e;
    e.failure_mode_id = fm.id;
    e.support.summaries_total = r.summary_ids.size();
    std::vector<int> severities, detectabilities;
    std::set<std::string> contributors;
    for (const auto& summary_id : r.summary_ids) {
      auto recs = flaggers(campaign, r, summary_id, fm.id);
      if (static_cast<int>(recs.size()) < reg.consensus) continue;
      ++e.support.summaries_flagged;
      for (const AnnotationRecord* rec : recs) {
        for (const auto& inst : rec->instances) {
          if (inst.failure_mode_id != fm.id) continue;
          severities.push_back(inst.severity.value());
          detectabilities.push_back(inst.detectability.value());
          contributors.insert(rec->reviewer_id);
          ++e.support.instances;
        }
      }
    }
    e.support.reviewers = contributors.size();
    e.occurrence_ratio = make_ratio(static_cast<std::int64_t>(e.support.summaries_flagged),
                                    static_cast<std::int64_t>(e.support.summaries_total));
    e.occurrence = occurrence_score(e.occurrence_ratio);
    if (!severities.empty()) {
      e.severity = SeverityScore(aggregate_scores(severities, options.aggregation));
      e.detectability = DetectabilityScore(aggregate_scores(detectabilities, options.aggregation));
      e.rpn = rpn(e.occurrence, *e.severity, *e.detectability);
    }
    reg.entries.push_back(std::move(e));
  }
  std::sort(reg.entries.begin(), reg.entries.end(), ranks_before);
  return reg;
}

std::string_view rpn_caveat() {
  return "RPN ranks failure modes by the product O x S x D. The product weights the three "
         "scores equally and treats them as independent; equal RPNs can hide very different "
         "risk profiles. Use the ranking to prioritise review, not as a measure of risk.";
}

std::string risk_csv(const RiskRegister& r) {
  std::ostringstream out;
  out << "rank,failure_mode_id,occurrence_ratio,summaries_flagged,summaries_total,occurrence,"
         "severity,detectability,rpn,instances,reviewers\n";
  int rank = 0;
  for (const auto& e : r.entries) {
    out << ++rank << ',' << e.failure_mode_id << ',' << format_fixed3(e.occurrence_ratio.value())
        << ',' << e.support.summaries_flagged << ',' << e.support.summaries_total << ','
        << e.occurrence.value() << ',';
    out << (e.severity ? std::to_string(e.severity->value()) : "NA") << ','
        << (e.detectability ? std::to_string(e.detectability->value()) : "NA") << ','
        << (e.rpn ? std::to_string(*e.rpn) : "NA") << ',' << e.support.instances << ','
        << e.support.reviewers << '\n';
  }
  return out.str();
}

std::string risk_matrix_text(const RiskRegister& r) {
  std::array<std::array<int, 5>, 5> grid{};  // [severity-1][occurrence-1]
  std::size_t not_assessable = 0;
  for (const auto& e : r.entries) {
    if (!e.severity) {
      ++not_assessable;
      continue;
    }
    ++grid[e.severity->value() - 1][e.occurrence.value() - 1];
  }
  std::ostringstream out;
  out << "Risk matrix: round " << r.round_id << " (failure modes per cell)\n";
  out << "severity \\ occurrence    O1   O2   O3   O4   O5\n";
  for (int s = 5; s >= 1; --s) {
    out << "S" << s << "                    ";
    for (int o = 1; o <= 5; ++o) {
      std::string cell = std::to_string(grid[s - 1][o - 1]);
      out << std::string(5 - cell.size(), ' ') << cell;
    }
    out << "\n";
  }
  out << "not assessable: " << not_assessable << "\n";
  out << "\nNote: " << rpn_caveat() << "\n";
  return out.str();
}

std::string risk_json(const RiskRegister& r) {
  detail::Json j;
  j["schema"] = "fmeca.risk_register";
  j["round_id"] = r.round_id;
  j["taxonomy_version"] = r.taxonomy_version;
  j["consensus"] = r.consensus;
  j["aggregation"] = aggregation_name(r.options.aggregation);
  j["caveat"] = rpn_caveat();
  j["entries"] = detail::Json::array();
  int rank = 0;
  for (const auto& e : r.entries) {
    detail::Json row;
    row["rank"] = ++rank;
    row["failure_mode_id"] = e.failure_mode_id;
    row["occurrence_ratio"] = {{"numerator", e.occurrence_ratio.numerator},
                               {"denominator", e.occurrence_ratio.denominator}};
    row["occurrence"] = e.occurrence.value();
    row["severity"] = e.severity ? detail::Json(e.severity->value()) : detail::Json(nullptr);
    row["detectability"] =
        e.detectability ? detail::Json(e.detectability->value()) : detail::Json(nullptr);
    row["rpn"] = e.rpn ? detail::Json(*e.rpn) : detail::Json(nullptr);
    if (!e.rpn) row["status"] = "not assessable";
    row["support"] = {{"summaries_flagged", e.support.summaries_flagged},
                      {"summaries_total", e.support.summaries_total},
                      {"instances", e.support.instances},
                      {"reviewers", e.support.reviewers}};
    j["entries"].push_back(row);
  }
  return detail::dump_json(j);
}

}  // namespace fmeca
