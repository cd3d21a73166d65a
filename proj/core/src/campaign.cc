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

#include "fmeca/campaign.h"

#include <algorithm>
#include <set>

namespace fmeca {
namespace {

template <typename Map>
auto find_or_throw(const Map& m, std::string_view id, std::string_view kind) -> const
    typename Map::mapped_type& {
  auto it = m.find(id);
  if (it == m.end()) {
    throw Error(ErrorClass::kNotFound, "unknown " + std::string(kind) + " '" + std::string(id) + "'");
  }
  return it->second;
}

bool contains(const std::vector<std::string>& v, std::string_view id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

void require_unique(const std::vector<std::string>& ids, std::string_view what) {
  std::set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(ErrorClass::kValidation, "duplicate " + std::string(what) + " '" + id + "'");
    }
  }
}

}  // namespace

std::string_view round_status_name(RoundStatus s) {
  return s == RoundStatus::kOpen ? "open" : "closed";
}

bool Round::has_reviewer(std::string_view id) const { return contains(reviewer_ids, id); }
bool Round::has_summary(std::string_view id) const { return contains(summary_ids, id); }

bool is_slug(std::string_view id) {
  if (id.empty()) return false;
  auto lower_or_digit = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!lower_or_digit(id.front())) return false;
  return std::all_of(id.begin(), id.end(), [&](char c) {
    return lower_or_digit(c) || c == '_' || c == '-' || c == '.';
  });
}

void validate_record(const AnnotationRecord& record, const Taxonomy& t) {
  for (const auto& fm : t.failure_modes) {
    if (!record.flags.contains(fm.id)) {
      throw Error(ErrorClass::kValidation, "flags." + fm.id + ": missing flag");
    }
  }
  for (const auto& [id, value] : record.flags) {
    if (t.find_failure_mode(id) == nullptr) {
      throw Error(ErrorClass::kValidation,
                  "flags." + id + ": unknown failure mode for taxonomy v" +
                      std::to_string(t.version));
    }
  }
  std::set<std::string> with_instance;
  for (std::size_t i = 0; i < record.instances.size(); ++i) {
    const auto& inst = record.instances[i];
    std::string path = "instances[" + std::to_string(i) + "]";
    auto it = record.flags.find(inst.failure_mode_id);
    if (it == record.flags.end()) {
      throw Error(ErrorClass::kValidation,
                  path + ".failure_mode_id: unknown failure mode '" + inst.failure_mode_id + "'");
    }
    if (!it->second) {
      throw Error(ErrorClass::kValidation,
                  path + ": instance without flag on '" + inst.failure_mode_id + "'");
    }
    with_instance.insert(inst.failure_mode_id);
  }
  for (const auto& [id, value] : record.flags) {
    if (value && !with_instance.contains(id)) {
      throw Error(ErrorClass::kValidation, "flags." + id + ": flagged mode without instance");
    }
  }
}

AnnotationRecord blank_record(const Taxonomy& t) {
  AnnotationRecord r;
  for (const auto& fm : t.failure_modes) r.flags[fm.id] = false;
  return r;
}

bool AnnotationMatrix::has_missing() const {
  for (const auto& row : cells) {
    for (const auto& c : row) {
      if (!c) return true;
    }
  }
  return false;
}

std::string_view aggregation_name(ScoreAggregation a) {
  return a == ScoreAggregation::kMaximum ? "max" : "median";
}

std::optional<ScoreAggregation> parse_aggregation(std::string_view name) {
  if (name == "max" || name == "maximum") return ScoreAggregation::kMaximum;
  if (name == "median") return ScoreAggregation::kMedian;
  return std::nullopt;
}

int aggregate_scores(std::span<const int> scores, ScoreAggregation how) {
  if (scores.empty()) throw Error(ErrorClass::kDomain, "cannot aggregate zero scores");
  if (how == ScoreAggregation::kMaximum) return *std::max_element(scores.begin(), scores.end());
  std::vector<int> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  int sum = sorted[n / 2 - 1] + sorted[n / 2];
  return (sum + 1) / 2;  // half up
}

Campaign::Campaign(std::string id) : id_(std::move(id)) {}

void Campaign::add_taxonomy(Taxonomy t) {
  ValidationReport report = validate_taxonomy(t);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorClass::kValidation, "taxonomy v" + std::to_string(t.version) + ": " +
                                             v.message + (v.node_id.empty() ? "" : " (" + v.node_id + ")"));
  }
  int version = t.version;
  taxonomies_[version] = std::move(t);
}

const Taxonomy& Campaign::taxonomy(int version) const {
  auto it = taxonomies_.find(version);
  if (it == taxonomies_.end()) {
    throw Error(ErrorClass::kNotFound,
                "taxonomy v" + std::to_string(version) + " is not loaded in this campaign");
  }
  return it->second;
}

void Campaign::add_merge_map(MergeMap m) {
  auto v = validate_merge_map(m, taxonomy(m.from_version), taxonomy(m.to_version));
  if (!v.empty()) {
    throw Error(ErrorClass::kValidation, "merge map v" + std::to_string(m.from_version) + "->v" +
                                             std::to_string(m.to_version) + ": " +
                                             v.front().message + " (" + v.front().node_id + ")");
  }
  std::erase_if(merge_maps_, [&](const MergeMap& e) {
    return e.from_version == m.from_version && e.to_version == m.to_version;
  });
  merge_maps_.push_back(std::move(m));
}

void Campaign::add_summary(SummaryDocument s) {
  if (!is_slug(s.id)) throw Error(ErrorClass::kValidation, "summary id '" + s.id + "' is not a slug");
  if (s.source_text.empty()) throw Error(ErrorClass::kValidation, "summary " + s.id + ": empty source_text");
  if (s.generated_summary.empty()) {
    throw Error(ErrorClass::kValidation, "summary " + s.id + ": empty generated_summary");
  }
  if (summaries_.contains(s.id)) {
    throw Error(ErrorClass::kValidation, "duplicate summary id '" + s.id + "'");
  }
  std::string id = s.id;
  summaries_.emplace(std::move(id), std::move(s));
}

const SummaryDocument& Campaign::summary(std::string_view id) const {
  return find_or_throw(summaries_, id, "summary");
}

void Campaign::add_reviewer(Reviewer r) {
  if (!is_slug(r.id)) throw Error(ErrorClass::kValidation, "reviewer id '" + r.id + "' is not a slug");
  if (reviewers_.contains(r.id)) {
    throw Error(ErrorClass::kValidation, "duplicate reviewer id '" + r.id + "'");
  }
  std::string id = r.id;
  reviewers_.emplace(std::move(id), std::move(r));
}

const Reviewer& Campaign::reviewer(std::string_view id) const {
  return find_or_throw(reviewers_, id, "reviewer");
}

void Campaign::validate_round(const Round& r) const {
  if (!is_slug(r.id)) throw Error(ErrorClass::kValidation, "round id '" + r.id + "' is not a slug");
  for (const auto& existing : rounds_) {
    if (existing.id == r.id) throw Error(ErrorClass::kValidation, "duplicate round id '" + r.id + "'");
  }
  taxonomy(r.taxonomy_version);
  if (r.reviewer_ids.size() < 2) {
    throw Error(ErrorClass::kValidation, "round " + r.id + ": at least two reviewers required");
  }
  if (r.summary_ids.empty()) {
    throw Error(ErrorClass::kValidation, "round " + r.id + ": no summaries");
  }
  require_unique(r.reviewer_ids, "reviewer");
  require_unique(r.summary_ids, "summary");
  for (const auto& id : r.reviewer_ids) {
    if (!reviewers_.contains(id)) {
      throw Error(ErrorClass::kReferential, "round " + r.id + ": unknown reviewer '" + id + "'");
    }
  }
  for (const auto& id : r.summary_ids) {
    if (!summaries_.contains(id)) {
      throw Error(ErrorClass::kReferential, "round " + r.id + ": unknown summary '" + id + "'");
    }
  }
}

const Round& Campaign::open_round(Round r) {
  r.status = RoundStatus::kOpen;
  r.force_closed = false;
  validate_round(r);
  rounds_.push_back(std::move(r));
  return rounds_.back();
}

void Campaign::restore_round(Round r) {
  validate_round(r);
  rounds_.push_back(std::move(r));
}

const Round& Campaign::round(std::string_view id) const {
  for (const auto& r : rounds_) {
    if (r.id == id) return r;
  }
  throw Error(ErrorClass::kNotFound, "unknown round '" + std::string(id) + "'");
}

Round& Campaign::mutable_round(std::string_view id) {
  return const_cast<Round&>(std::as_const(*this).round(id));
}

void Campaign::check_record_refs(const AnnotationRecord& record, const Round& round) const {
  if (!reviewers_.contains(record.reviewer_id)) {
    throw Error(ErrorClass::kReferential, "unknown reviewer '" + record.reviewer_id + "'");
  }
  if (!summaries_.contains(record.summary_id)) {
    throw Error(ErrorClass::kReferential, "unknown summary '" + record.summary_id + "'");
  }
  if (!round.has_reviewer(record.reviewer_id)) {
    throw Error(ErrorClass::kForbidden, "reviewer '" + record.reviewer_id +
                                            "' is not assigned to round " + round.id);
  }
  if (!round.has_summary(record.summary_id)) {
    throw Error(ErrorClass::kReferential,
                "summary '" + record.summary_id + "' is not part of round " + round.id);
  }
  validate_record(record, taxonomy(round.taxonomy_version));
}

void Campaign::append(const AnnotationRecord& record) {
  RecordKey key{record.round_id, record.reviewer_id, record.summary_id};
  auto& history = records_[key];
  history.push_back(record);
  append_order_.emplace_back(key, history.size() - 1);
}

int Campaign::record_annotation(const AnnotationRecord& record, int expected_version) {
  AnnotationRecord stored = prepare_record(record, expected_version);
  append(stored);
  return stored.record_version;
}

AnnotationRecord Campaign::prepare_record(const AnnotationRecord& record,
                                          int expected_version) const {
  const Round& r = round(record.round_id);
  if (r.status != RoundStatus::kOpen) {
    throw Error(ErrorClass::kWorkflow, "round " + r.id + " is closed");
  }
  check_record_refs(record, r);
  int current = current_version(record.round_id, record.reviewer_id, record.summary_id);
  if (expected_version != current) {
    throw Error(ErrorClass::kConflict, "record " + record.round_id + "/" + record.reviewer_id +
                                           "/" + record.summary_id + " is at version " +
                                           std::to_string(current) + ", expected " +
                                           std::to_string(expected_version));
  }
  AnnotationRecord stored = record;
  stored.record_version = current + 1;
  return stored;
}

void Campaign::restore_record(const AnnotationRecord& record) {
  const Round& r = round(record.round_id);
  check_record_refs(record, r);
  int current = current_version(record.round_id, record.reviewer_id, record.summary_id);
  if (record.record_version != current + 1) {
    throw Error(ErrorClass::kIntegrity,
                "record " + record.round_id + "/" + record.reviewer_id + "/" + record.summary_id +
                    ": version " + std::to_string(record.record_version) + " follows " +
                    std::to_string(current));
  }
  append(record);
}

const AnnotationRecord* Campaign::latest_record(std::string_view round_id,
                                                std::string_view reviewer_id,
                                                std::string_view summary_id) const {
  auto h = record_history(round_id, reviewer_id, summary_id);
  return h.empty() ? nullptr : &h.back();
}

int Campaign::current_version(std::string_view round_id, std::string_view reviewer_id,
                              std::string_view summary_id) const {
  const AnnotationRecord* r = latest_record(round_id, reviewer_id, summary_id);
  return r == nullptr ? 0 : r->record_version;
}

std::span<const AnnotationRecord> Campaign::record_history(std::string_view round_id,
                                                           std::string_view reviewer_id,
                                                           std::string_view summary_id) const {
  auto it = records_.find(RecordKey{round_id, reviewer_id, summary_id});
  if (it == records_.end()) return {};
  return it->second;
}

std::vector<AnnotationRecord> Campaign::reviewer_log(std::string_view round_id,
                                                     std::string_view reviewer_id) const {
  std::vector<AnnotationRecord> out;
  for (const auto& [key, index] : append_order_) {
    if (std::get<0>(key) == round_id && std::get<1>(key) == reviewer_id) {
      out.push_back(records_.at(key)[index]);
    }
  }
  return out;
}

const AnnotationRecord* Campaign::submitted_record(const Round& round, std::string_view reviewer_id,
                                                   std::string_view summary_id) const {
  const AnnotationRecord* r = latest_record(round.id, reviewer_id, summary_id);
  return (r != nullptr && r->submitted) ? r : nullptr;
}

CompletenessReport Campaign::completeness(std::string_view round_id) const {
  const Round& r = round(round_id);
  CompletenessReport report;
  for (const auto& reviewer_id : r.reviewer_ids) {
    ReviewerProgress& p = report.progress[reviewer_id];
    p.expected = r.summary_ids.size();
    for (const auto& summary_id : r.summary_ids) {
      if (submitted_record(r, reviewer_id, summary_id) != nullptr) {
        ++p.submitted;
      } else {
        report.missing.emplace_back(reviewer_id, summary_id);
      }
    }
  }
  return report;
}

const Round& Campaign::close_round(std::string_view round_id, bool force) {
  Round& r = mutable_round(round_id);
  if (r.status != RoundStatus::kOpen) {
    throw Error(ErrorClass::kWorkflow, "round " + r.id + " is already closed");
  }
  CompletenessReport c = completeness(round_id);
  if (!c.complete() && !force) {
    std::string list;
    for (const auto& [reviewer_id, summary_id] : c.missing) {
      if (!list.empty()) list += ", ";
      list += "(" + reviewer_id + ", " + summary_id + ")";
    }
    throw Error(ErrorClass::kCompleteness,
                "round " + r.id + " has " + std::to_string(c.missing.size()) +
                    " missing record(s): " + list);
  }
  r.status = RoundStatus::kClosed;
  r.force_closed = !c.complete();
  return r;
}

void Campaign::require_closed(const Round& r) const {
  if (r.status != RoundStatus::kClosed) {
    throw Error(ErrorClass::kWorkflow, "round " + r.id + " is open; close it before analysis");
  }
}

AnnotationMatrix Campaign::stage1_matrix(std::string_view round_id) const {
  const Round& r = round(round_id);
  require_closed(r);
  const Taxonomy& t = taxonomy(r.taxonomy_version);
  AnnotationMatrix m;
  m.stage = 1;
  m.raters = r.reviewer_ids;
  for (const auto& summary_id : r.summary_ids) {
    std::vector<const AnnotationRecord*> recs;
    for (const auto& reviewer_id : r.reviewer_ids) {
      recs.push_back(submitted_record(r, reviewer_id, summary_id));
    }
    for (const auto& sc : t.subcategories) {
      auto members = t.modes_of(sc.id);
      m.units.push_back({summary_id, sc.id});
      std::vector<MatrixCell> row;
      for (const AnnotationRecord* rec : recs) {
        if (rec == nullptr) {
          row.emplace_back();
          continue;
        }
        bool any = std::any_of(members.begin(), members.end(),
                               [&](const FailureMode* fm) { return rec->flags.at(fm->id); });
        row.emplace_back(any ? 1 : 0);
      }
      m.cells.push_back(std::move(row));
    }
  }
  return m;
}

AnnotationMatrix Campaign::stage2_matrix(std::string_view round_id) const {
  const Round& r = round(round_id);
  require_closed(r);
  const Taxonomy& t = taxonomy(r.taxonomy_version);
  AnnotationMatrix m;
  m.stage = 2;
  m.raters = r.reviewer_ids;
  for (const auto& summary_id : r.summary_ids) {
    std::vector<const AnnotationRecord*> recs;
    for (const auto& reviewer_id : r.reviewer_ids) {
      recs.push_back(submitted_record(r, reviewer_id, summary_id));
    }
    for (const auto& fm : t.failure_modes) {
      m.units.push_back({summary_id, fm.id});
      std::vector<MatrixCell> row;
      for (const AnnotationRecord* rec : recs) {
        if (rec == nullptr) {
          row.emplace_back();
        } else {
          row.emplace_back(rec->flags.at(fm.id) ? 1 : 0);
        }
      }
      m.cells.push_back(std::move(row));
    }
  }
  return m;
}

AnnotationMatrix Campaign::stage3_matrix(std::string_view round_id, Dimension dimension,
                                         const Stage3Policy& policy) const {
  if (dimension == Dimension::kOccurrence) {
    throw Error(ErrorClass::kDomain, "stage 3 covers severity and detectability only");
  }
  const Round& r = round(round_id);
  require_closed(r);
  const Taxonomy& t = taxonomy(r.taxonomy_version);
  const int rater_count = static_cast<int>(r.reviewer_ids.size());
  const int min_raters = policy.min_raters.value_or(rater_count);
  if (min_raters < 1 || min_raters > rater_count) {
    throw Error(ErrorClass::kDomain, "min_raters " + std::to_string(min_raters) +
                                         " outside 1.." + std::to_string(rater_count));
  }
  AnnotationMatrix m;
  m.stage = 3;
  m.raters = r.reviewer_ids;
  for (const auto& summary_id : r.summary_ids) {
    std::vector<const AnnotationRecord*> recs;
    for (const auto& reviewer_id : r.reviewer_ids) {
      recs.push_back(submitted_record(r, reviewer_id, summary_id));
    }
    for (const auto& fm : t.failure_modes) {
      std::vector<MatrixCell> row;
      int flagged = 0;
      for (const AnnotationRecord* rec : recs) {
        if (rec == nullptr || !rec->flags.at(fm.id)) {
          row.emplace_back();
          continue;
        }
        ++flagged;
        std::vector<int> scores;
        for (const auto& inst : rec->instances) {
          if (inst.failure_mode_id != fm.id) continue;
          scores.push_back(dimension == Dimension::kSeverity ? inst.severity.value()
                                                             : inst.detectability.value());
        }
        row.emplace_back(aggregate_scores(scores, policy.aggregation));
      }
      if (flagged >= min_raters) {
        m.units.push_back({summary_id, fm.id});
        m.cells.push_back(std::move(row));
      }
    }
  }
  return m;
}

}  // namespace fmeca
