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

#ifndef FMECA_CAMPAIGN_H_
#define FMECA_CAMPAIGN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fmeca/scales.h"
#include "fmeca/taxonomy.h"

namespace fmeca {

struct SummaryDocument {
  std::string id;
  std::string source_text;        // opaque bytes, never transformed
  std::string generated_summary;  // opaque bytes, never transformed
  std::map<std::string, std::string> metadata;
};

struct Reviewer {
  std::string id;
  std::string display_name;
  std::string role;
};

enum class RoundStatus { kOpen, kClosed };

std::string_view round_status_name(RoundStatus s);

struct Round {
  std::string id;
  int taxonomy_version = 0;
  std::vector<std::string> reviewer_ids;  // declared order is the rater axis order
  std::vector<std::string> summary_ids;   // declared order is the unit axis order
  RoundStatus status = RoundStatus::kOpen;
  bool force_closed = false;

  bool has_reviewer(std::string_view id) const;
  bool has_summary(std::string_view id) const;
};

struct FailureInstance {
  std::string failure_mode_id;
  std::string comment;
  SeverityScore severity;
  DetectabilityScore detectability;
};

// One reviewer's judgment of one summary in one round.
struct AnnotationRecord {
  std::string round_id;
  std::string reviewer_id;
  std::string summary_id;
  FlagMap flags;  // one entry per failure mode of the round's taxonomy
  std::vector<FailureInstance> instances;
  int record_version = 0;
  bool submitted = false;
};

// Throws kValidation naming the offending field when `record` breaks the
// flag/instance invariants against `t`.
void validate_record(const AnnotationRecord& record, const Taxonomy& t);

// Empty record for `t`: every flag false, no instances.
AnnotationRecord blank_record(const Taxonomy& t);

struct MatrixUnit {
  std::string summary_id;
  std::string unit_id;

  friend bool operator==(const MatrixUnit&, const MatrixUnit&) = default;
};

using MatrixCell = std::optional<int>;

// Rater x unit table. Stage 1 units are subcategories, Stage 2 units are
// failure modes (cells 0/1); Stage 3 units are failure modes scored on one
// dimension (cells 1-5, missing where the rater did not flag).
struct AnnotationMatrix {
  int stage = 0;
  std::vector<MatrixUnit> units;
  std::vector<std::string> raters;
  std::vector<std::vector<MatrixCell>> cells;  // [unit][rater]

  std::size_t unit_count() const { return units.size(); }
  std::size_t rater_count() const { return raters.size(); }
  bool has_missing() const;
  const MatrixCell& at(std::size_t unit, std::size_t rater) const { return cells[unit][rater]; }

  friend bool operator==(const AnnotationMatrix&, const AnnotationMatrix&) = default;
};

enum class ScoreAggregation { kMaximum, kMedian };

std::string_view aggregation_name(ScoreAggregation a);
std::optional<ScoreAggregation> parse_aggregation(std::string_view name);

// Maximum, or median with halves rounded up. Requires a non-empty input.
int aggregate_scores(std::span<const int> scores, ScoreAggregation how);

struct Stage3Policy {
  // Minimum number of raters that must flag a cell for it to become a unit.
  // Unset means every rater in the round (complete case).
  std::optional<int> min_raters;
  ScoreAggregation aggregation = ScoreAggregation::kMaximum;
};

struct ReviewerProgress {
  std::size_t submitted = 0;
  std::size_t expected = 0;
  double fraction() const {
    return expected == 0 ? 1.0 : static_cast<double>(submitted) / static_cast<double>(expected);
  }
};

struct CompletenessReport {
  std::vector<std::pair<std::string, std::string>> missing;  // (reviewer, summary)
  std::map<std::string, ReviewerProgress> progress;

  bool complete() const { return missing.empty(); }
};

// In-memory campaign state. Not internally synchronized; the service wraps
// it with a lock and the persistence store mirrors every mutation to disk.
class Campaign {
 public:
  explicit Campaign(std::string id = "campaign");

  const std::string& id() const { return id_; }
  const std::string& created_at() const { return created_at_; }
  void set_created_at(std::string ts) { created_at_ = std::move(ts); }

  // Throws kValidation when validate_taxonomy reports violations.
  void add_taxonomy(Taxonomy t);
  const Taxonomy& taxonomy(int version) const;
  const std::map<int, Taxonomy>& taxonomies() const { return taxonomies_; }
  void add_merge_map(MergeMap m);
  const std::vector<MergeMap>& merge_maps() const { return merge_maps_; }

  void add_summary(SummaryDocument s);
  const SummaryDocument& summary(std::string_view id) const;
  const std::map<std::string, SummaryDocument, std::less<>>& summaries() const {
    return summaries_;
  }

  void add_reviewer(Reviewer r);
  const Reviewer& reviewer(std::string_view id) const;
  const std::map<std::string, Reviewer, std::less<>>& reviewers() const { return reviewers_; }

  // New rounds always start open.
  const Round& open_round(Round r);
  const Round& round(std::string_view id) const;
  const std::vector<Round>& rounds() const { return rounds_; }

  // Compare-and-swap write. Returns the stored record_version.
  // kWorkflow: round closed; kForbidden: reviewer not assigned;
  // kConflict: stale expected_version; kValidation: invariant breach.
  int record_annotation(const AnnotationRecord& record, int expected_version);

  // Runs every record_annotation check without mutating; returns the record
  // as it would be stored (record_version assigned).
  AnnotationRecord prepare_record(const AnnotationRecord& record, int expected_version) const;

  // Latest stored entry, or nullptr.
  const AnnotationRecord* latest_record(std::string_view round_id, std::string_view reviewer_id,
                                        std::string_view summary_id) const;
  int current_version(std::string_view round_id, std::string_view reviewer_id,
                      std::string_view summary_id) const;
  std::span<const AnnotationRecord> record_history(std::string_view round_id,
                                                   std::string_view reviewer_id,
                                                   std::string_view summary_id) const;
  // Every entry for (round, reviewer) in append order.
  std::vector<AnnotationRecord> reviewer_log(std::string_view round_id,
                                             std::string_view reviewer_id) const;

  // kCompleteness lists missing (reviewer, summary) pairs unless `force`.
  const Round& close_round(std::string_view round_id, bool force);
  CompletenessReport completeness(std::string_view round_id) const;

  // Matrix derivations; kWorkflow while the round is open.
  AnnotationMatrix stage1_matrix(std::string_view round_id) const;
  AnnotationMatrix stage2_matrix(std::string_view round_id) const;
  AnnotationMatrix stage3_matrix(std::string_view round_id, Dimension dimension,
                                 const Stage3Policy& policy = {}) const;

  // Submitted record serving (reviewer, summary), or nullptr.
  const AnnotationRecord* submitted_record(const Round& round, std::string_view reviewer_id,
                                           std::string_view summary_id) const;

  // Loader hooks: re-create a round in any status and re-append a logged
  // record without the open-round precondition. Version continuity and
  // record invariants are still enforced.
  void restore_round(Round r);
  void restore_record(const AnnotationRecord& record);

 private:
  using RecordKey = std::tuple<std::string, std::string, std::string>;

  Round& mutable_round(std::string_view id);
  void validate_round(const Round& r) const;
  void check_record_refs(const AnnotationRecord& record, const Round& round) const;
  void append(const AnnotationRecord& record);
  void require_closed(const Round& r) const;

  std::string id_;
  std::string created_at_;
  std::map<int, Taxonomy> taxonomies_;
  std::vector<MergeMap> merge_maps_;
  std::map<std::string, SummaryDocument, std::less<>> summaries_;
  std::map<std::string, Reviewer, std::less<>> reviewers_;
  std::vector<Round> rounds_;
  std::map<RecordKey, std::vector<AnnotationRecord>> records_;
  std::vector<std::pair<RecordKey, std::size_t>> append_order_;  // (key, history index)
};

// Ids are lowercase slugs: [a-z0-9][a-z0-9_.-]*.
bool is_slug(std::string_view id);

}  // namespace fmeca

#endif  // FMECA_CAMPAIGN_H_
