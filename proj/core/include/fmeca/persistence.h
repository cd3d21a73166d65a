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

#ifndef FMECA_PERSISTENCE_H_
#define FMECA_PERSISTENCE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fmeca/campaign.h"

namespace fmeca {

inline constexpr int kMinBundleFormat = 1;
inline constexpr int kMaxBundleFormat = 1;

// Lowercase hex SHA-256.
std::string content_digest(std::string_view bytes);

// --- Matrix interchange ----------------------------------------------------
//
// Header "summary_id,unit_id,<rater>..."; one row per unit; Stage 1/2 cells
// are 0/1, Stage 3 cells 1-5; an empty cell is a missing rating. UTF-8, LF.

std::string format_matrix(const AnnotationMatrix& m);
// kParse for a bad value (with line number), kSchema for a bad header or a
// row with the wrong column count.
AnnotationMatrix parse_matrix(std::string_view text, int stage);
void export_matrix(const AnnotationMatrix& m, const std::filesystem::path& path);
AnnotationMatrix import_ratings(const std::filesystem::path& path, int stage);

// --- Records ---------------------------------------------------------------

// Single-line JSON, as stored in the annotation logs.
std::string serialize_record(const AnnotationRecord& r);
AnnotationRecord parse_record(std::string_view text, const std::string& where = "record");

// --- Credentials -----------------------------------------------------------

// Token material is never stored; only its digest.
struct TokenEntry {
  std::string principal;  // "operator" or a reviewer id
  std::string token_digest;
  std::int64_t expires_at = 0;  // unix seconds, 0 = never

  bool is_operator() const { return principal == "operator"; }
};

// --- Bundles ---------------------------------------------------------------

// Writes a fresh bundle directory (created if absent; must not already hold
// a bundle). Tokens are optional.
void save_campaign(const Campaign& campaign, const std::filesystem::path& dir,
                   const std::vector<TokenEntry>& tokens = {});

// Reads and fully verifies a bundle: format version, per-file digests,
// schemas and references. Bytes appended to a log after its last recorded
// size were never acknowledged and are ignored.
// kVersion, kIntegrity, kSchema/kParse (with file and field path),
// kReferential.
Campaign load_campaign(const std::filesystem::path& dir);
std::vector<TokenEntry> load_tokens(const std::filesystem::path& dir);

// Exclusive writer lock on a bundle directory (flock on ".lock").
class BundleLock {
 public:
  // kLocked when another writer holds it.
  explicit BundleLock(const std::filesystem::path& dir);
  ~BundleLock();
  BundleLock(const BundleLock&) = delete;
  BundleLock& operator=(const BundleLock&) = delete;

 private:
  int fd_ = -1;
};

// Single-writer handle: holds the bundle lock and mirrors every mutation to
// disk before returning, so a returned call is durable.
class BundleStore {
 public:
  // Creates a new bundle from `initial` and opens it.
  static std::unique_ptr<BundleStore> create(const std::filesystem::path& dir,
                                             const Campaign& initial,
                                             const std::vector<TokenEntry>& tokens = {});
  // Locks, recovers interrupted commits, and loads.
  static std::unique_ptr<BundleStore> open(const std::filesystem::path& dir);

  ~BundleStore();

  const Campaign& campaign() const { return campaign_; }
  const std::vector<TokenEntry>& tokens() const { return tokens_; }
  const std::filesystem::path& dir() const { return dir_; }

  void add_taxonomy(Taxonomy t);
  void add_merge_map(MergeMap m);
  void add_summary(SummaryDocument s);
  void add_reviewer(Reviewer r);
  const Round& open_round(Round r);
  const Round& close_round(std::string_view round_id, bool force);
  int record_annotation(const AnnotationRecord& record, int expected_version);
  void add_token(TokenEntry entry);
  // Stores an export under reports/<name>.
  void save_report(std::string_view name, std::string_view content);

 private:
  BundleStore(std::filesystem::path dir, std::unique_ptr<BundleLock> lock);
  void commit(const std::vector<std::pair<std::string, std::string>>& files);
  void write_manifest();

  std::filesystem::path dir_;
  std::unique_ptr<BundleLock> lock_;
  Campaign campaign_;
  std::vector<TokenEntry> tokens_;
  struct FileState {
    std::string digest;
    std::uint64_t size = 0;
  };
  std::map<std::string, FileState> files_;
};

}  // namespace fmeca

#endif  // FMECA_PERSISTENCE_H_
