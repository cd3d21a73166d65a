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

#ifndef FMECA_TESTS_TEST_UTIL_H_
#define FMECA_TESTS_TEST_UTIL_H_

#include <stdlib.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fmeca/campaign.h"
#include "fmeca/taxonomy.h"

namespace fmeca::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "fmeca-test-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) std::abort();
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string summary_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%02d", i + 1);
  return buf;
}

inline std::string reviewer_id(int i) { return "rev" + std::to_string(i + 1); }

// Taxonomies v1 and v3, the merge map, `n_summaries` summaries and
// `n_reviewers` reviewers; no rounds.
inline Campaign base_campaign(int n_summaries, int n_reviewers, const std::string& id = "test") {
  Campaign c(id);
  c.set_created_at("2026-01-01T00:00:00Z");
  c.add_taxonomy(default_taxonomy(1));
  c.add_taxonomy(default_taxonomy(3));
  c.add_merge_map(default_merge_map());
  for (int i = 0; i < n_summaries; ++i) {
    std::string sid = summary_id(i);
    c.add_summary({sid, "Source document " + sid + "\nline two\n",
                   "Generated summary " + sid + "\n", {{"specialty", i % 2 ? "cardiology" : "oncology"}}});
  }
  for (int i = 0; i < n_reviewers; ++i) {
    c.add_reviewer({reviewer_id(i), "Reviewer " + std::to_string(i + 1), "physician"});
  }
  return c;
}

inline Round round_spec(const Campaign& c, const std::string& id, int n_reviewers, int taxonomy_version = 3) {
  Round r;
  r.id = id;
  r.taxonomy_version = taxonomy_version;
  for (int i = 0; i < n_reviewers; ++i) r.reviewer_ids.push_back(reviewer_id(i));
  for (const auto& [sid, s] : c.summaries()) r.summary_ids.push_back(sid);
  return r;
}

// Valid record for `t`: each mode flagged with probability `flag_prob`,
// each flagged mode carrying 1..max_instances scored instances.
inline AnnotationRecord random_record(std::mt19937_64& rng, const Taxonomy& t, double flag_prob,
                                      int max_instances = 2) {
  std::bernoulli_distribution flag(flag_prob);
  std::uniform_int_distribution<int> score(1, 5);
  std::uniform_int_distribution<int> count(1, max_instances);
  AnnotationRecord rec = blank_record(t);
  for (const auto& fm : t.failure_modes) {
    if (!flag(rng)) continue;
    rec.flags[fm.id] = true;
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
      rec.instances.push_back({fm.id, "note " + std::to_string(i), SeverityScore(score(rng)),
                               DetectabilityScore(score(rng))});
    }
  }
  rec.submitted = true;
  return rec;
}

struct SyntheticOptions {
  int summaries = 36;
  int reviewers = 3;
  double flag_prob = 0.2;
  int max_instances = 2;
  std::uint64_t seed = 1;
  bool close = true;
};

// A round "round-1" on taxonomy v3 in which every reviewer has submitted a
// random record for every summary.
inline Campaign synthetic_campaign(const SyntheticOptions& o) {
  Campaign c = base_campaign(o.summaries, o.reviewers);
  c.open_round(round_spec(c, "round-1", o.reviewers));
  std::mt19937_64 rng(o.seed);
  const Taxonomy& t = c.taxonomy(3);
  for (int r = 0; r < o.reviewers; ++r) {
    for (int s = 0; s < o.summaries; ++s) {
      AnnotationRecord rec = random_record(rng, t, o.flag_prob, o.max_instances);
      rec.round_id = "round-1";
      rec.reviewer_id = reviewer_id(r);
      rec.summary_id = summary_id(s);
      c.record_annotation(rec, 0);
    }
  }
  if (o.close) c.close_round("round-1", false);
  return c;
}

}  // namespace fmeca::testing

#endif  // FMECA_TESTS_TEST_UTIL_H_
