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

#include "fmeca/persistence.h"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "fmeca/agreement_report.h"
#include "fmeca/error.h"
#include "fmeca/risk.h"
#include "json.hpp"
#include "test_util.h"

namespace fmeca {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

ErrorClass class_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message != nullptr) *message = e.what();
    return e.error_class();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorClass::kIo;
}

std::string exports(const Campaign& c) {
  AgreementReport a = agreement_report(c, "round-1");
  RiskRegister r = risk_register(c, "round-1");
  return agreement_json(a) + agreement_csv(a, 1) + agreement_csv(a, 2) + agreement_csv(a, 3) +
         agreement_text(a) + risk_json(r) + risk_csv(r) + risk_matrix_text(r);
}

TEST(DigestTest, KnownVector) {
  EXPECT_EQ(content_digest("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(MatrixFormatTest, RoundTrip) {
  Campaign c = testing::synthetic_campaign({.summaries = 4, .reviewers = 3, .flag_prob = 0.4, .seed = 2});
  for (const AnnotationMatrix& m :
       {c.stage1_matrix("round-1"), c.stage2_matrix("round-1"),
        c.stage3_matrix("round-1", Dimension::kSeverity, {.min_raters = 1})}) {
    std::string text = format_matrix(m);
    EXPECT_EQ(text.substr(0, text.find('\n')), "summary_id,unit_id,rev1,rev2,rev3");
    AnnotationMatrix back = parse_matrix(text, m.stage);
    EXPECT_EQ(back, m);
    EXPECT_EQ(format_matrix(back), text);
  }
}

TEST(MatrixFormatTest, BadValueNamesLine) {
  std::string msg;
  EXPECT_EQ(class_of([] { parse_matrix("summary_id,unit_id,a,b\ns01,omission,1,0\ns02,omission,2,0\n", 2); },
                     &msg),
            ErrorClass::kParse);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_EQ(class_of([] { parse_matrix("summary_id,unit_id,a\ns01,omission,6\n", 3); }), ErrorClass::kParse);
  EXPECT_EQ(class_of([] { parse_matrix("summary_id,unit_id,a\ns01,omission,x\n", 2); }), ErrorClass::kParse);
}

TEST(MatrixFormatTest, BadShapeIsSchemaError) {
  EXPECT_EQ(class_of([] { parse_matrix("unit,summary_id,a\n", 2); }), ErrorClass::kSchema);
  EXPECT_EQ(class_of([] { parse_matrix("summary_id,unit_id,a,b\ns01,omission,1\n", 2); }),
            ErrorClass::kSchema);
}

TEST(MatrixFormatTest, EmptyCellIsMissing) {
  AnnotationMatrix m = parse_matrix("summary_id,unit_id,a,b\ns01,omission,3,\n", 3);
  ASSERT_EQ(m.unit_count(), 1u);
  EXPECT_EQ(m.at(0, 0), 3);
  EXPECT_FALSE(m.at(0, 1).has_value());
}

TEST(RecordFormatTest, RoundTrip) {
  Campaign c = testing::synthetic_campaign({.summaries = 2, .reviewers = 2, .flag_prob = 0.5, .seed = 8});
  const AnnotationRecord* rec = c.latest_record("round-1", "rev1", "s01");
  ASSERT_NE(rec, nullptr);
  std::string line = serialize_record(*rec);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(serialize_record(parse_record(line)), line);
}

class BundleTest : public ::testing::Test {
 protected:
  testing::TempDir tmp_;
  fs::path dir() const { return tmp_ / "bundle"; }
};

TEST_F(BundleTest, RoundTripGivesByteIdenticalExports) {
  Campaign c = testing::synthetic_campaign({.summaries = 36, .reviewers = 3, .seed = 21});
  save_campaign(c, dir());
  Campaign back = load_campaign(dir());
  EXPECT_EQ(exports(back), exports(c));
  EXPECT_EQ(back.id(), c.id());
  EXPECT_EQ(back.created_at(), c.created_at());
  EXPECT_EQ(back.summary("s07").source_text, c.summary("s07").source_text);
  EXPECT_EQ(back.summary("s07").metadata, c.summary("s07").metadata);
  EXPECT_EQ(back.rounds()[0].status, RoundStatus::kClosed);
}

TEST_F(BundleTest, SaveRefusesExistingBundle) {
  Campaign c = testing::base_campaign(1, 1);
  save_campaign(c, dir());
  EXPECT_THROW(save_campaign(c, dir()), Error);
}

TEST_F(BundleTest, ManifestListsDigests) {
  save_campaign(testing::base_campaign(2, 1), dir());
  Json m = Json::parse(slurp(dir() / "manifest.json"));
  EXPECT_EQ(m["schema"], "fmeca.bundle");
  EXPECT_EQ(m["format_version"], 1);
  const Json& f = m["files"]["summaries/s01/source.txt"];
  std::string bytes = slurp(dir() / "summaries/s01/source.txt");
  EXPECT_EQ(f["sha256"], content_digest(bytes));
  EXPECT_EQ(f["size"], bytes.size());
}

TEST_F(BundleTest, TamperedFileIsIntegrityError) {
  save_campaign(testing::base_campaign(2, 1), dir());
  spit(dir() / "summaries/s02/summary.txt", "edited\n");
  std::string msg;
  EXPECT_EQ(class_of([&] { load_campaign(dir()); }, &msg), ErrorClass::kIntegrity);
  EXPECT_NE(msg.find("summaries/s02/summary.txt"), std::string::npos);
}

TEST_F(BundleTest, MissingFileIsIntegrityError) {
  save_campaign(testing::base_campaign(2, 1), dir());
  fs::remove(dir() / "reviewers.json");
  EXPECT_EQ(class_of([&] { load_campaign(dir()); }), ErrorClass::kIntegrity);
}

TEST_F(BundleTest, FutureFormatVersionRejected) {
  save_campaign(testing::base_campaign(1, 1), dir());
  Json m = Json::parse(slurp(dir() / "manifest.json"));
  m["format_version"] = 2;
  spit(dir() / "manifest.json", m.dump(2));
  std::string msg;
  EXPECT_EQ(class_of([&] { load_campaign(dir()); }, &msg), ErrorClass::kVersion);
  EXPECT_EQ(msg, "manifest.json: bundle format version 2 unsupported; supported range 1..1");
}

TEST_F(BundleTest, UnknownKeyIsSchemaErrorNamingFile) {
  save_campaign(testing::base_campaign(1, 1), dir());
  Json r = Json::parse(slurp(dir() / "reviewers.json"));
  r[0]["extra"] = true;
  std::string bytes = r.dump(2);
  spit(dir() / "reviewers.json", bytes);
  Json m = Json::parse(slurp(dir() / "manifest.json"));
  m["files"]["reviewers.json"] = {{"sha256", content_digest(bytes)}, {"size", bytes.size()}};
  spit(dir() / "manifest.json", m.dump(2));
  std::string msg;
  EXPECT_EQ(class_of([&] { load_campaign(dir()); }, &msg), ErrorClass::kSchema);
  EXPECT_NE(msg.find("reviewers.json"), std::string::npos) << msg;
}

TEST_F(BundleTest, NotABundle) {
  fs::create_directories(dir());
  EXPECT_EQ(class_of([&] { load_campaign(dir()); }), ErrorClass::kIo);
}

TEST_F(BundleTest, TokensStoreDigestsOnly) {
  save_campaign(testing::base_campaign(1, 1), dir(), {{"operator", content_digest("secret"), 0}});
  std::string bytes = slurp(dir() / "tokens.json");
  EXPECT_EQ(bytes.find("\"secret\""), std::string::npos);
  auto tokens = load_tokens(dir());
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_TRUE(tokens[0].is_operator());
  EXPECT_EQ(tokens[0].token_digest, content_digest("secret"));
}

TEST_F(BundleTest, SecondWriterIsLockedOut) {
  auto store = BundleStore::create(dir(), testing::base_campaign(1, 1));
  EXPECT_EQ(class_of([&] { BundleStore::open(dir()); }), ErrorClass::kLocked);
  store.reset();
  EXPECT_NO_THROW(BundleStore::open(dir()));
}

TEST_F(BundleTest, StoreMirrorsEveryMutation) {
  Campaign seed = testing::synthetic_campaign({.summaries = 3, .reviewers = 2, .seed = 4, .close = false});
  {
    auto store = BundleStore::create(dir(), testing::base_campaign(3, 2));
    store->open_round(testing::round_spec(store->campaign(), "round-1", 2));
    for (int r = 0; r < 2; ++r) {
      for (int s = 0; s < 3; ++s) {
        AnnotationRecord rec = *seed.latest_record("round-1", testing::reviewer_id(r), testing::summary_id(s));
        rec.record_version = 0;
        EXPECT_EQ(store->record_annotation(rec, 0), 1);
      }
    }
    AnnotationRecord again = *seed.latest_record("round-1", "rev1", "s01");
    again.flags["omission"] = !again.flags["omission"];
    if (!again.flags["omission"]) {
      std::erase_if(again.instances, [](const FailureInstance& i) { return i.failure_mode_id == "omission"; });
    } else {
      again.instances.push_back({"omission", "", SeverityScore(3), DetectabilityScore(2)});
    }
    EXPECT_EQ(store->record_annotation(again, 1), 2);
    EXPECT_EQ(class_of([&] { store->record_annotation(again, 1); }), ErrorClass::kConflict);
    store->close_round("round-1", false);
    store->add_reviewer({"late", "Late", "physician"});
    store->save_report("risk.csv", risk_csv(risk_register(store->campaign(), "round-1")));
    EXPECT_THROW(store->save_report("../escape", "x"), Error);
  }
  Campaign back = load_campaign(dir());
  EXPECT_EQ(back.current_version("round-1", "rev1", "s01"), 2);
  EXPECT_EQ(back.record_history("round-1", "rev1", "s01").size(), 2u);
  EXPECT_EQ(back.round("round-1").status, RoundStatus::kClosed);
  EXPECT_NO_THROW(back.reviewer("late"));
  EXPECT_TRUE(fs::exists(dir() / "reports/risk.csv"));
  EXPECT_EQ(slurp(dir() / "reports/risk.csv"), risk_csv(risk_register(back, "round-1")));
}

TEST_F(BundleTest, UnacknowledgedLogTailIsDropped) {
  Campaign seed = testing::synthetic_campaign({.summaries = 2, .reviewers = 2, .seed = 6, .close = false});
  {
    auto store = BundleStore::create(dir(), testing::base_campaign(2, 2));
    store->open_round(testing::round_spec(store->campaign(), "round-1", 2));
    AnnotationRecord rec = *seed.latest_record("round-1", "rev1", "s01");
    store->record_annotation(rec, 0);
  }
  fs::path log = dir() / "annotations/round-1/rev1.jsonl";
  const auto acknowledged = fs::file_size(log);
  {
    std::ofstream out(log, std::ios::binary | std::ios::app);
    out << "{\"partial\":";
  }
  Campaign loaded = load_campaign(dir());
  EXPECT_EQ(loaded.current_version("round-1", "rev1", "s01"), 1);
  auto store = BundleStore::open(dir());
  EXPECT_EQ(fs::file_size(log), acknowledged);
  AnnotationRecord next = *seed.latest_record("round-1", "rev1", "s02");
  EXPECT_EQ(store->record_annotation(next, 0), 1);
  store.reset();
  EXPECT_EQ(load_campaign(dir()).current_version("round-1", "rev1", "s02"), 1);
}

TEST_F(BundleTest, CorruptedAcknowledgedLogIsIntegrityError) {
  Campaign seed = testing::synthetic_campaign({.summaries = 1, .reviewers = 2, .seed = 6, .close = false});
  {
    auto store = BundleStore::create(dir(), testing::base_campaign(1, 2));
    store->open_round(testing::round_spec(store->campaign(), "round-1", 2));
    store->record_annotation(*seed.latest_record("round-1", "rev1", "s01"), 0);
  }
  fs::path log = dir() / "annotations/round-1/rev1.jsonl";
  std::string bytes = slurp(log);
  bytes[bytes.size() / 2] ^= 0x20;
  spit(log, bytes);
  EXPECT_EQ(class_of([&] { load_campaign(dir()); }), ErrorClass::kIntegrity);
}

TEST_F(BundleTest, PendingCommitRollsForward) {
  {
    auto store = BundleStore::create(dir(), testing::base_campaign(1, 2));
    store->add_reviewer({"rev9", "Nine", "physician"});
  }
  // Simulate a crash after the manifest switch but before the rename.
  fs::path reviewers = dir() / "reviewers.json";
  fs::path pending = reviewers;
  pending += ".pending";
  fs::rename(reviewers, pending);
  spit(reviewers, "stale");
  EXPECT_NO_THROW(load_campaign(dir()).reviewer("rev9"));
  { auto store = BundleStore::open(dir()); }
  EXPECT_FALSE(fs::exists(pending));
  EXPECT_NO_THROW(load_campaign(dir()).reviewer("rev9"));
}

TEST_F(BundleTest, StalePendingBeforeManifestSwitchIsDiscarded) {
  { auto store = BundleStore::create(dir(), testing::base_campaign(1, 2)); }
  fs::path pending = dir() / "reviewers.json.pending";
  spit(pending, "[]");
  { auto store = BundleStore::open(dir()); }
  EXPECT_FALSE(fs::exists(pending));
  EXPECT_EQ(load_campaign(dir()).reviewers().size(), 2u);
}

TEST_F(BundleTest, DanglingReferenceIsReferentialError) {
  Campaign c = testing::synthetic_campaign({.summaries = 2, .reviewers = 2, .seed = 3});
  save_campaign(c, dir());
  // Drop rev2 from reviewers.json while its round assignment remains.
  Json r = Json::parse(slurp(dir() / "reviewers.json"));
  Json kept = Json::array();
  for (const auto& x : r) {
    if (x["id"] != "rev2") kept.push_back(x);
  }
  std::string bytes = kept.dump(2);
  spit(dir() / "reviewers.json", bytes);
  Json m = Json::parse(slurp(dir() / "manifest.json"));
  m["files"]["reviewers.json"] = {{"sha256", content_digest(bytes)}, {"size", bytes.size()}};
  spit(dir() / "manifest.json", m.dump(2));
  EXPECT_EQ(class_of([&] { load_campaign(dir()); }), ErrorClass::kReferential);
}

TEST_F(BundleTest, RandomRoundTripsPreserveExports) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    testing::TempDir t;
    Campaign c = testing::synthetic_campaign(
        {.summaries = 3 + static_cast<int>(rng() % 8), .reviewers = 2 + static_cast<int>(rng() % 3),
         .flag_prob = 0.1 + 0.1 * static_cast<double>(rng() % 5), .seed = rng()});
    save_campaign(c, t / "b");
    EXPECT_EQ(exports(load_campaign(t / "b")), exports(c)) << trial;
  }
}

}  // namespace
}  // namespace fmeca
