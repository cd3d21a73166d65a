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

#include <gtest/gtest.h>

#include "fmeca/error.h"
#include "test_util.h"

namespace fmeca {
namespace {

using testing::base_campaign;
using testing::reviewer_id;
using testing::round_spec;
using testing::summary_id;

ErrorClass class_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.error_class();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorClass::kIo;
}

AnnotationRecord record_for(const Campaign& c, const std::string& reviewer, const std::string& summary,
                            const std::vector<std::pair<std::string, std::pair<int, int>>>& instances,
                            bool submitted = true) {
  AnnotationRecord r = blank_record(c.taxonomy(3));
  r.round_id = "round-1";
  r.reviewer_id = reviewer;
  r.summary_id = summary;
  for (const auto& [fm, scores] : instances) {
    r.flags[fm] = true;
    r.instances.push_back({fm, "", SeverityScore(scores.first), DetectabilityScore(scores.second)});
  }
  r.submitted = submitted;
  return r;
}

class CampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    c_ = base_campaign(3, 3);
    c_.open_round(round_spec(c_, "round-1", 3));
  }
  Campaign c_;
};

TEST(SlugTest, Accepts) {
  EXPECT_TRUE(is_slug("rev1"));
  EXPECT_TRUE(is_slug("a.b-c_d"));
  EXPECT_FALSE(is_slug(""));
  EXPECT_FALSE(is_slug("-x"));
  EXPECT_FALSE(is_slug("Upper"));
  EXPECT_FALSE(is_slug("a/b"));
}

TEST(AggregateScoresTest, MaxAndMedian) {
  std::vector<int> v = {2, 5, 3};
  EXPECT_EQ(aggregate_scores(v, ScoreAggregation::kMaximum), 5);
  EXPECT_EQ(aggregate_scores(v, ScoreAggregation::kMedian), 3);
  std::vector<int> even = {2, 3};
  EXPECT_EQ(aggregate_scores(even, ScoreAggregation::kMedian), 3);
  std::vector<int> even2 = {1, 2, 4, 5};
  EXPECT_EQ(aggregate_scores(even2, ScoreAggregation::kMedian), 3);
  EXPECT_THROW(aggregate_scores(std::vector<int>{}, ScoreAggregation::kMedian), Error);
}

TEST(RoundTest, OpenRequiresTwoReviewers) {
  Campaign c = base_campaign(2, 2);
  Round r = round_spec(c, "r", 1);
  EXPECT_EQ(class_of([&] { c.open_round(r); }), ErrorClass::kValidation);
}

TEST(RoundTest, OpenRejectsUnknownReferences) {
  Campaign c = base_campaign(2, 2);
  Round r = round_spec(c, "r", 2);
  r.reviewer_ids.push_back("ghost");
  EXPECT_EQ(class_of([&] { c.open_round(r); }), ErrorClass::kReferential);
  Round r2 = round_spec(c, "r", 2, 7);
  EXPECT_EQ(class_of([&] { c.open_round(r2); }), ErrorClass::kNotFound);
}

TEST(RoundTest, DuplicateIdsRejected) {
  Campaign c = base_campaign(2, 2);
  Round r = round_spec(c, "r", 2);
  r.summary_ids.push_back(r.summary_ids.front());
  EXPECT_EQ(class_of([&] { c.open_round(r); }), ErrorClass::kValidation);
}

TEST_F(CampaignTest, RecordVersionsIncrement) {
  auto rec = record_for(c_, "rev1", "s01", {{"omission", {3, 4}}});
  EXPECT_EQ(c_.record_annotation(rec, 0), 1);
  EXPECT_EQ(c_.record_annotation(rec, 1), 2);
  EXPECT_EQ(c_.current_version("round-1", "rev1", "s01"), 2);
  EXPECT_EQ(c_.record_history("round-1", "rev1", "s01").size(), 2u);
}

TEST_F(CampaignTest, StaleVersionConflicts) {
  auto rec = record_for(c_, "rev1", "s01", {});
  c_.record_annotation(rec, 0);
  EXPECT_EQ(class_of([&] { c_.record_annotation(rec, 0); }), ErrorClass::kConflict);
}

TEST_F(CampaignTest, PrepareDoesNotMutate) {
  auto rec = record_for(c_, "rev1", "s01", {});
  AnnotationRecord prepared = c_.prepare_record(rec, 0);
  EXPECT_EQ(prepared.record_version, 1);
  EXPECT_EQ(c_.current_version("round-1", "rev1", "s01"), 0);
}

TEST_F(CampaignTest, InvariantViolations) {
  auto missing_instance = record_for(c_, "rev1", "s01", {});
  missing_instance.flags["omission"] = true;
  EXPECT_EQ(class_of([&] { c_.record_annotation(missing_instance, 0); }), ErrorClass::kValidation);

  auto unflagged = record_for(c_, "rev1", "s01", {});
  unflagged.instances.push_back({"omission", "", SeverityScore(2), DetectabilityScore(2)});
  EXPECT_EQ(class_of([&] { c_.record_annotation(unflagged, 0); }), ErrorClass::kValidation);

  auto missing_flag = record_for(c_, "rev1", "s01", {});
  missing_flag.flags.erase("omission");
  EXPECT_EQ(class_of([&] { c_.record_annotation(missing_flag, 0); }), ErrorClass::kValidation);

  auto v1_mode = record_for(c_, "rev1", "s01", {});
  v1_mode.flags["date_errors"] = false;
  EXPECT_EQ(class_of([&] { c_.record_annotation(v1_mode, 0); }), ErrorClass::kValidation);
}

TEST_F(CampaignTest, MultipleInstancesPerMode) {
  auto rec = record_for(c_, "rev1", "s01", {{"omission", {2, 3}}, {"omission", {4, 5}}});
  EXPECT_EQ(c_.record_annotation(rec, 0), 1);
  EXPECT_EQ(c_.latest_record("round-1", "rev1", "s01")->instances.size(), 2u);
}

TEST_F(CampaignTest, UnassignedReviewerForbidden) {
  Campaign c = base_campaign(2, 3);
  c.open_round(round_spec(c, "round-1", 2));
  auto rec = record_for(c, "rev3", "s01", {});
  EXPECT_EQ(class_of([&] { c.record_annotation(rec, 0); }), ErrorClass::kForbidden);
}

TEST_F(CampaignTest, CloseIncompleteListsMissing) {
  c_.record_annotation(record_for(c_, "rev1", "s01", {}), 0);
  try {
    c_.close_round("round-1", false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::kCompleteness);
    EXPECT_NE(std::string(e.what()).find("(rev2, s01)"), std::string::npos);
    EXPECT_EQ(std::string(e.what()).find("(rev1, s01)"), std::string::npos);
  }
  CompletenessReport rep = c_.completeness("round-1");
  EXPECT_EQ(rep.missing.size(), 8u);
  EXPECT_EQ(rep.progress.at("rev1").submitted, 1u);
  EXPECT_DOUBLE_EQ(rep.progress.at("rev1").fraction(), 1.0 / 3.0);
}

TEST_F(CampaignTest, DraftsDoNotCountAsSubmitted) {
  c_.record_annotation(record_for(c_, "rev1", "s01", {}, false), 0);
  EXPECT_EQ(c_.completeness("round-1").progress.at("rev1").submitted, 0u);
}

TEST_F(CampaignTest, ForceCloseMarksRound) {
  const Round& r = c_.close_round("round-1", true);
  EXPECT_EQ(r.status, RoundStatus::kClosed);
  EXPECT_TRUE(r.force_closed);
  auto rec = record_for(c_, "rev1", "s01", {});
  EXPECT_EQ(class_of([&] { c_.record_annotation(rec, 0); }), ErrorClass::kWorkflow);
  EXPECT_EQ(class_of([&] { c_.close_round("round-1", false); }), ErrorClass::kWorkflow);
}

TEST_F(CampaignTest, MatricesRequireClosedRound) {
  EXPECT_EQ(class_of([&] { c_.stage2_matrix("round-1"); }), ErrorClass::kWorkflow);
}

TEST_F(CampaignTest, ForcedCloseLeavesMissingCells) {
  c_.record_annotation(record_for(c_, "rev1", "s01", {{"omission", {3, 3}}}), 0);
  c_.close_round("round-1", true);
  AnnotationMatrix m = c_.stage2_matrix("round-1");
  EXPECT_TRUE(m.has_missing());
  EXPECT_EQ(m.units.size(), 3u * 14u);
  EXPECT_EQ(m.at(12, 0), 1);  // s01 omission, rev1
  EXPECT_FALSE(m.at(12, 1).has_value());
}

TEST_F(CampaignTest, StageMatrixShapes) {
  for (int r = 0; r < 3; ++r) {
    for (int s = 0; s < 3; ++s) {
      c_.record_annotation(record_for(c_, reviewer_id(r), summary_id(s), {}), 0);
    }
  }
  c_.close_round("round-1", false);
  EXPECT_EQ(c_.stage1_matrix("round-1").units.size(), 3u * 10u);
  EXPECT_EQ(c_.stage2_matrix("round-1").units.size(), 3u * 14u);
  EXPECT_EQ(c_.stage2_matrix("round-1").raters, (std::vector<std::string>{"rev1", "rev2", "rev3"}));
  EXPECT_TRUE(c_.stage3_matrix("round-1", Dimension::kSeverity).units.empty());
}

TEST_F(CampaignTest, StageThreePolicies) {
  c_.record_annotation(record_for(c_, "rev1", "s01", {{"omission", {2, 1}}, {"omission", {4, 5}}}), 0);
  c_.record_annotation(record_for(c_, "rev2", "s01", {{"omission", {3, 2}}}), 0);
  c_.record_annotation(record_for(c_, "rev3", "s01", {}), 0);
  for (int r = 0; r < 3; ++r) {
    for (int s = 1; s < 3; ++s) c_.record_annotation(record_for(c_, reviewer_id(r), summary_id(s), {}), 0);
  }
  c_.close_round("round-1", false);

  EXPECT_TRUE(c_.stage3_matrix("round-1", Dimension::kSeverity).units.empty());

  Stage3Policy two;
  two.min_raters = 2;
  AnnotationMatrix m = c_.stage3_matrix("round-1", Dimension::kSeverity, two);
  ASSERT_EQ(m.units.size(), 1u);
  EXPECT_EQ(m.units[0], (MatrixUnit{"s01", "omission"}));
  EXPECT_EQ(m.at(0, 0), 4);
  EXPECT_EQ(m.at(0, 1), 3);
  EXPECT_FALSE(m.at(0, 2).has_value());

  two.aggregation = ScoreAggregation::kMedian;
  EXPECT_EQ(c_.stage3_matrix("round-1", Dimension::kDetectability, two).at(0, 0), 3);

  Stage3Policy bad;
  bad.min_raters = 4;
  EXPECT_EQ(class_of([&] { c_.stage3_matrix("round-1", Dimension::kSeverity, bad); }),
            ErrorClass::kDomain);
  EXPECT_EQ(class_of([&] { c_.stage3_matrix("round-1", Dimension::kOccurrence); }),
            ErrorClass::kDomain);
}

TEST(StageOneTest, SubcategoryIsOrOfMembers) {
  Campaign c = testing::synthetic_campaign({.summaries = 8, .reviewers = 3, .flag_prob = 0.3, .seed = 5});
  const Taxonomy& t = c.taxonomy(3);
  AnnotationMatrix s1 = c.stage1_matrix("round-1");
  AnnotationMatrix s2 = c.stage2_matrix("round-1");
  for (std::size_t u = 0; u < s1.units.size(); ++u) {
    for (std::size_t r = 0; r < s1.raters.size(); ++r) {
      int expected = 0;
      for (std::size_t v = 0; v < s2.units.size(); ++v) {
        if (s2.units[v].summary_id != s1.units[u].summary_id) continue;
        if (t.find_failure_mode(s2.units[v].unit_id)->subcategory_id != s1.units[u].unit_id) continue;
        expected |= *s2.at(v, r);
      }
      EXPECT_EQ(*s1.at(u, r), expected);
    }
  }
}

TEST(ReviewerLogTest, AppendOrder) {
  Campaign c = base_campaign(2, 2);
  c.open_round(round_spec(c, "round-1", 2));
  c.record_annotation(record_for(c, "rev1", "s02", {}), 0);
  c.record_annotation(record_for(c, "rev1", "s01", {}), 0);
  c.record_annotation(record_for(c, "rev1", "s02", {}), 1);
  auto log = c.reviewer_log("round-1", "rev1");
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0].summary_id, "s02");
  EXPECT_EQ(log[1].summary_id, "s01");
  EXPECT_EQ(log[2].record_version, 2);
}

TEST(RestoreTest, VersionGapIsIntegrityError) {
  Campaign c = base_campaign(2, 2);
  c.open_round(round_spec(c, "round-1", 2));
  auto rec = record_for(c, "rev1", "s01", {});
  rec.record_version = 2;
  EXPECT_EQ(class_of([&] { c.restore_record(rec); }), ErrorClass::kIntegrity);
}

}  // namespace
}  // namespace fmeca
