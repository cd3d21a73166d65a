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

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <set>
#include <sstream>

#include "file_util.h"
#include "fmeca/error.h"
#include "json_util.h"

namespace fmeca {

namespace fs = std::filesystem;
using detail::Json;

namespace {

constexpr std::string_view kManifest = "manifest.json";
constexpr std::string_view kPendingSuffix = ".pending";

std::string log_path(std::string_view round_id, std::string_view reviewer_id) {
  return "annotations/" + std::string(round_id) + "/" + std::string(reviewer_id) + ".jsonl";
}

bool is_log(std::string_view rel) { return rel.ends_with(".jsonl"); }

// Errors raised while reading a bundle file carry the file name.
template <typename Fn>
auto in_file(std::string_view rel, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    ErrorClass cls = e.error_class();
    if (cls == ErrorClass::kNotFound) cls = ErrorClass::kReferential;
    throw Error(cls, std::string(rel) + ": " + e.what());
  }
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(delim, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// --- entity codecs ---

Json summary_index(const Campaign& c) {
  Json arr = Json::array();
  for (const auto& [id, s] : c.summaries()) {
    arr.push_back({{"id", id}, {"metadata", s.metadata}});
  }
  return arr;
}

Json reviewers_json(const Campaign& c) {
  Json arr = Json::array();
  for (const auto& [id, r] : c.reviewers()) {
    arr.push_back({{"id", r.id}, {"display_name", r.display_name}, {"role", r.role}});
  }
  return arr;
}

Json rounds_json(const std::vector<Round>& rounds) {
  Json arr = Json::array();
  for (const auto& r : rounds) {
    arr.push_back({{"id", r.id},
                   {"taxonomy_version", r.taxonomy_version},
                   {"reviewer_ids", r.reviewer_ids},
                   {"summary_ids", r.summary_ids},
                   {"status", round_status_name(r.status)},
                   {"force_closed", r.force_closed}});
  }
  return arr;
}

Json tokens_json(const std::vector<TokenEntry>& tokens) {
  Json arr = Json::array();
  for (const auto& t : tokens) {
    arr.push_back({{"principal", t.principal},
                   {"token_sha256", t.token_digest},
                   {"expires_at", t.expires_at}});
  }
  return arr;
}

std::vector<std::string> string_list(const Json& j, const std::string& path) {
  detail::expect_array(j, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw Error(ErrorClass::kSchema, detail::child(path, i) + ": expected string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::map<std::string, std::string> string_map(const Json& j, const std::string& path) {
  detail::expect_object(j, path);
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw Error(ErrorClass::kSchema, detail::child(path, k) + ": expected string");
    out[k] = v.get<std::string>();
  }
  return out;
}

Round parse_round(const Json& j, const std::string& p) {
  using namespace detail;
  reject_unknown_keys(j, {"id", "taxonomy_version", "reviewer_ids", "summary_ids", "status",
                          "force_closed"},
                      p);
  Round r;
  r.id = string_field(j, "id", p);
  r.taxonomy_version = static_cast<int>(int_field(j, "taxonomy_version", p));
  r.reviewer_ids = string_list(field(j, "reviewer_ids", p), child(p, "reviewer_ids"));
  r.summary_ids = string_list(field(j, "summary_ids", p), child(p, "summary_ids"));
  std::string status = string_field(j, "status", p);
  if (status == "open") {
    r.status = RoundStatus::kOpen;
  } else if (status == "closed") {
    r.status = RoundStatus::kClosed;
  } else {
    throw Error(ErrorClass::kSchema, child(p, "status") + ": expected \"open\" or \"closed\"");
  }
  r.force_closed = bool_field(j, "force_closed", p);
  return r;
}

std::vector<TokenEntry> parse_tokens(std::string_view text) {
  using namespace detail;
  Json j = parse_json(text, "tokens.json");
  expect_array(j, "");
  std::vector<TokenEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = child("", i);
    reject_unknown_keys(j[i], {"principal", "token_sha256", "expires_at"}, p);
    out.push_back({string_field(j[i], "principal", p), string_field(j[i], "token_sha256", p),
                   int_field(j[i], "expires_at", p)});
  }
  return out;
}

// --- manifest ---

struct ManifestFile {
  std::string digest;
  std::uint64_t size = 0;
};

struct Manifest {
  int format_version = kMaxBundleFormat;
  std::string campaign_id;
  std::string created_at;
  std::map<std::string, ManifestFile> files;
};

std::string serialize_manifest(const Manifest& m) {
  Json j;
  j["schema"] = "fmeca.bundle";
  j["format_version"] = m.format_version;
  j["campaign_id"] = m.campaign_id;
  j["created_at"] = m.created_at;
  j["files"] = Json::object();
  for (const auto& [rel, f] : m.files) {
    j["files"][rel] = {{"sha256", f.digest}, {"size", f.size}};
  }
  return detail::dump_json(j);
}

Manifest parse_manifest(std::string_view text) {
  using namespace detail;
  Json j = parse_json(text, kManifest);
  expect_object(j, "");
  long long version = int_field(j, "format_version", "");
  if (version < kMinBundleFormat || version > kMaxBundleFormat) {
    throw Error(ErrorClass::kVersion, "bundle format version " + std::to_string(version) +
                                          " unsupported; supported range " +
                                          std::to_string(kMinBundleFormat) + ".." +
                                          std::to_string(kMaxBundleFormat));
  }
  reject_unknown_keys(j, {"schema", "format_version", "campaign_id", "created_at", "files"}, "");
  if (string_field(j, "schema", "") != "fmeca.bundle") {
    throw Error(ErrorClass::kSchema, "/schema: expected \"fmeca.bundle\"");
  }
  Manifest m;
  m.format_version = static_cast<int>(version);
  m.campaign_id = string_field(j, "campaign_id", "");
  m.created_at = string_field(j, "created_at", "");
  const Json& files = field(j, "files", "");
  expect_object(files, "/files");
  for (const auto& [rel, f] : files.items()) {
    std::string p = child("/files", rel);
    reject_unknown_keys(f, {"sha256", "size"}, p);
    long long size = int_field(f, "size", p);
    if (size < 0) throw Error(ErrorClass::kSchema, child(p, "size") + ": negative");
    if (rel.find("..") != std::string::npos || (!rel.empty() && rel.front() == '/')) {
      throw Error(ErrorClass::kSchema, p + ": path escapes the bundle");
    }
    m.files[rel] = {string_field(f, "sha256", p), static_cast<std::uint64_t>(size)};
  }
  return m;
}

// Contents of every file a campaign is made of, keyed by bundle-relative path.
std::map<std::string, std::string> render_bundle(const Campaign& c,
                                                 const std::vector<TokenEntry>& tokens) {
  std::map<std::string, std::string> files;
  for (const auto& [version, t] : c.taxonomies()) {
    files["taxonomies/v" + std::to_string(version) + ".json"] = serialize_taxonomy(t);
  }
  for (const auto& m : c.merge_maps()) {
    files["merge_maps/v" + std::to_string(m.from_version) + "_v" + std::to_string(m.to_version) +
          ".json"] = serialize_merge_map(m);
  }
  files["summaries/index.json"] = detail::dump_json(summary_index(c));
  for (const auto& [id, s] : c.summaries()) {
    files["summaries/" + id + "/source.txt"] = s.source_text;
    files["summaries/" + id + "/summary.txt"] = s.generated_summary;
  }
  files["reviewers.json"] = detail::dump_json(reviewers_json(c));
  files["rounds.json"] = detail::dump_json(rounds_json(c.rounds()));
  files["tokens.json"] = detail::dump_json(tokens_json(tokens));
  for (const auto& r : c.rounds()) {
    for (const auto& reviewer_id : r.reviewer_ids) {
      std::string log;
      for (const auto& rec : c.reviewer_log(r.id, reviewer_id)) log += serialize_record(rec) + "\n";
      if (!log.empty()) files[log_path(r.id, reviewer_id)] = log;
    }
  }
  return files;
}

std::string now_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Verified file contents; logs are cut to their recorded size.
std::map<std::string, std::string> read_verified(const fs::path& dir, const Manifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& [rel, f] : m.files) {
    fs::path path = dir / rel;
    std::string bytes;
    if (fs::exists(path)) {
      bytes = detail::read_file(path);
    }
    bool ok = false;
    if (is_log(rel)) {
      ok = bytes.size() >= f.size && content_digest(std::string_view(bytes).substr(0, f.size)) == f.digest;
      if (ok) bytes.resize(f.size);
    } else {
      ok = bytes.size() == f.size && content_digest(bytes) == f.digest;
      if (!ok) {
        // Interrupted commit: the manifest already names the pending bytes.
        fs::path pending = path;
        pending += kPendingSuffix;
        if (fs::exists(pending)) {
          std::string staged = detail::read_file(pending);
          if (staged.size() == f.size && content_digest(staged) == f.digest) {
            bytes = std::move(staged);
            ok = true;
          }
        }
      }
    }
    if (!ok) {
      throw Error(ErrorClass::kIntegrity,
                  rel + ": content digest does not match the manifest" +
                      (fs::exists(path) ? "" : " (file missing)"));
    }
    out[rel] = std::move(bytes);
  }
  return out;
}

Campaign build_campaign(const Manifest& manifest, const std::map<std::string, std::string>& files) {
  using namespace detail;
  auto get = [&](const std::string& rel) -> const std::string& {
    auto it = files.find(rel);
    if (it == files.end()) throw Error(ErrorClass::kIntegrity, rel + ": not listed in the manifest");
    return it->second;
  };

  Campaign c(manifest.campaign_id);
  c.set_created_at(manifest.created_at);

  for (const auto& [rel, bytes] : files) {
    if (rel.starts_with("taxonomies/")) {
      in_file(rel, [&] { c.add_taxonomy(parse_taxonomy(bytes)); });
    }
  }
  for (const auto& [rel, bytes] : files) {
    if (rel.starts_with("merge_maps/")) {
      in_file(rel, [&] { c.add_merge_map(parse_merge_map(bytes)); });
    }
  }

  const std::string index_rel = "summaries/index.json";
  in_file(index_rel, [&] {
    Json idx = parse_json(get(index_rel), index_rel);
    expect_array(idx, "");
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::string p = child("", i);
      reject_unknown_keys(idx[i], {"id", "metadata"}, p);
      SummaryDocument s;
      s.id = string_field(idx[i], "id", p);
      if (!is_slug(s.id)) throw Error(ErrorClass::kSchema, child(p, "id") + ": not a slug");
      s.metadata = string_map(field(idx[i], "metadata", p), child(p, "metadata"));
      s.source_text = get("summaries/" + s.id + "/source.txt");
      s.generated_summary = get("summaries/" + s.id + "/summary.txt");
      c.add_summary(std::move(s));
    }
  });

  in_file("reviewers.json", [&] {
    Json arr = parse_json(get("reviewers.json"), "reviewers.json");
    expect_array(arr, "");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = child("", i);
      reject_unknown_keys(arr[i], {"id", "display_name", "role"}, p);
      c.add_reviewer({string_field(arr[i], "id", p), string_field(arr[i], "display_name", p),
                      string_field(arr[i], "role", p)});
    }
  });

  in_file("rounds.json", [&] {
    Json arr = parse_json(get("rounds.json"), "rounds.json");
    expect_array(arr, "");
    for (std::size_t i = 0; i < arr.size(); ++i) c.restore_round(parse_round(arr[i], child("", i)));
  });

  for (const auto& [rel, bytes] : files) {
    if (!rel.starts_with("annotations/")) continue;
    in_file(rel, [&] {
      std::size_t line_no = 0;
      for (std::string_view line : split(bytes, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        AnnotationRecord rec = parse_record(line, "line " + std::to_string(line_no));
        std::string expected = log_path(rec.round_id, rec.reviewer_id);
        if (expected != rel) {
          throw Error(ErrorClass::kReferential,
                      "line " + std::to_string(line_no) + ": record belongs in " + expected);
        }
        c.restore_record(rec);
      }
    });
  }
  return c;
}

Manifest read_manifest(const fs::path& dir) {
  fs::path path = dir / kManifest;
  if (!fs::exists(path)) {
    throw Error(ErrorClass::kIo, dir.string() + ": not a campaign bundle (no manifest.json)");
  }
  return in_file(kManifest, [&] { return parse_manifest(detail::read_file(path)); });
}

}  // namespace

std::string content_digest(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorClass::kIo, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

// --- matrices ---

std::string format_matrix(const AnnotationMatrix& m) {
  std::ostringstream out;
  out << "summary_id,unit_id";
  for (const auto& r : m.raters) out << ',' << r;
  out << '\n';
  for (std::size_t u = 0; u < m.units.size(); ++u) {
    out << m.units[u].summary_id << ',' << m.units[u].unit_id;
    for (const auto& c : m.cells[u]) {
      out << ',';
      if (c) out << *c;
    }
    out << '\n';
  }
  return out.str();
}

AnnotationMatrix parse_matrix(std::string_view text, int stage) {
  if (stage < 1 || stage > 3) throw Error(ErrorClass::kDomain, "stage must be 1, 2 or 3");
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorClass::kSchema, "line 1: missing header row");

  AnnotationMatrix m;
  m.stage = stage;
  auto header = split(lines[0], ',');
  if (header.size() < 3 || header[0] != "summary_id" || header[1] != "unit_id") {
    throw Error(ErrorClass::kSchema,
                "line 1: header must be summary_id,unit_id followed by at least one rater");
  }
  for (std::size_t i = 2; i < header.size(); ++i) {
    if (!is_slug(header[i])) {
      throw Error(ErrorClass::kSchema, "line 1: rater id '" + std::string(header[i]) + "' is not a slug");
    }
    m.raters.emplace_back(header[i]);
  }
  const int lo = stage == 3 ? 1 : 0;
  const int hi = stage == 3 ? 5 : 1;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::string where = "line " + std::to_string(ln + 1);
    if (lines[ln].ends_with('\r')) throw Error(ErrorClass::kParse, where + ": CR line ending");
    auto fields = split(lines[ln], ',');
    if (fields.size() != header.size()) {
      throw Error(ErrorClass::kSchema, where + ": expected " + std::to_string(header.size()) +
                                           " columns, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorClass::kParse, where + ": empty summary_id or unit_id");
    }
    m.units.push_back({std::string(fields[0]), std::string(fields[1])});
    std::vector<MatrixCell> row;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      std::string_view f = fields[i];
      if (f.empty()) {
        row.emplace_back();
        continue;
      }
      int v = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || v < lo || v > hi) {
        throw Error(ErrorClass::kParse, where + ": invalid value '" + std::string(f) +
                                            "' for rater " + m.raters[i - 2] + " (stage " +
                                            std::to_string(stage) + " allows " +
                                            std::to_string(lo) + "-" + std::to_string(hi) + ")");
      }
      row.emplace_back(v);
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

void export_matrix(const AnnotationMatrix& m, const fs::path& path) {
  detail::write_file_atomic(path, format_matrix(m));
}

AnnotationMatrix import_ratings(const fs::path& path, int stage) {
  std::string text = detail::read_file(path);
  try {
    return parse_matrix(text, stage);
  } catch (const Error& e) {
    throw Error(e.error_class(), path.string() + ": " + e.what());
  }
}

// --- records ---

std::string serialize_record(const AnnotationRecord& r) {
  Json j;
  j["round_id"] = r.round_id;
  j["reviewer_id"] = r.reviewer_id;
  j["summary_id"] = r.summary_id;
  j["record_version"] = r.record_version;
  j["submitted"] = r.submitted;
  j["flags"] = r.flags;
  j["instances"] = Json::array();
  for (const auto& inst : r.instances) {
    j["instances"].push_back({{"failure_mode_id", inst.failure_mode_id},
                              {"comment", inst.comment},
                              {"severity", inst.severity.value()},
                              {"detectability", inst.detectability.value()}});
  }
  return j.dump(-1, ' ', false, Json::error_handler_t::strict);
}

AnnotationRecord parse_record(std::string_view text, const std::string& where) {
  using namespace detail;
  Json j = parse_json(text, where);
  const std::string p = where;
  reject_unknown_keys(j, {"round_id", "reviewer_id", "summary_id", "record_version", "submitted",
                          "flags", "instances"},
                      p);
  AnnotationRecord r;
  r.round_id = string_field(j, "round_id", p);
  r.reviewer_id = string_field(j, "reviewer_id", p);
  r.summary_id = string_field(j, "summary_id", p);
  r.record_version = static_cast<int>(int_field(j, "record_version", p));
  r.submitted = bool_field(j, "submitted", p);
  const Json& flags = field(j, "flags", p);
  expect_object(flags, child(p, "flags"));
  for (const auto& [id, v] : flags.items()) {
    if (!v.is_boolean()) throw Error(ErrorClass::kSchema, child(child(p, "flags"), id) + ": expected boolean");
    r.flags[id] = v.get<bool>();
  }
  const Json& inst = field(j, "instances", p);
  expect_array(inst, child(p, "instances"));
  for (std::size_t i = 0; i < inst.size(); ++i) {
    std::string ip = child(child(p, "instances"), i);
    reject_unknown_keys(inst[i], {"failure_mode_id", "comment", "severity", "detectability"}, ip);
    auto score = [&](std::string_view key, Dimension d) {
      long long v = int_field(inst[i], key, ip);
      if (v < kMinScore || v > kMaxScore) {
        throw Error(ErrorClass::kValidation, child(ip, key) + ": " + std::string(dimension_name(d)) +
                                                 " score " + std::to_string(v) + " outside 1-5");
      }
      return static_cast<int>(v);
    };
    r.instances.push_back({string_field(inst[i], "failure_mode_id", ip),
                           inst[i].contains("comment") ? string_field(inst[i], "comment", ip) : "",
                           SeverityScore(score("severity", Dimension::kSeverity)),
                           DetectabilityScore(score("detectability", Dimension::kDetectability))});
  }
  return r;
}

// --- bundles ---

void save_campaign(const Campaign& campaign, const fs::path& dir,
                   const std::vector<TokenEntry>& tokens) {
  fs::create_directories(dir);
  if (fs::exists(dir / kManifest)) {
    throw Error(ErrorClass::kIo, dir.string() + ": already holds a campaign bundle");
  }
  BundleLock lock(dir);
  Manifest manifest;
  manifest.campaign_id = campaign.id();
  manifest.created_at = campaign.created_at().empty() ? now_utc() : campaign.created_at();
  for (const auto& [rel, bytes] : render_bundle(campaign, tokens)) {
    fs::path path = dir / rel;
    fs::create_directories(path.parent_path());
    detail::write_file_atomic(path, bytes);
    manifest.files[rel] = {content_digest(bytes), bytes.size()};
  }
  detail::write_file_atomic(dir / kManifest, serialize_manifest(manifest));
}

Campaign load_campaign(const fs::path& dir) {
  Manifest manifest = read_manifest(dir);
  return build_campaign(manifest, read_verified(dir, manifest));
}

std::vector<TokenEntry> load_tokens(const fs::path& dir) {
  Manifest manifest = read_manifest(dir);
  auto files = read_verified(dir, manifest);
  auto it = files.find("tokens.json");
  if (it == files.end()) return {};
  return in_file("tokens.json", [&] { return parse_tokens(it->second); });
}

BundleLock::BundleLock(const fs::path& dir) {
  fs::path path = dir / ".lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorClass::kIo, path.string() + ": cannot open lock file");
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorClass::kLocked, dir.string() + ": bundle is locked by another writer");
  }
}

BundleLock::~BundleLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

BundleStore::BundleStore(fs::path dir, std::unique_ptr<BundleLock> lock)
    : dir_(std::move(dir)), lock_(std::move(lock)) {}

BundleStore::~BundleStore() = default;

std::unique_ptr<BundleStore> BundleStore::create(const fs::path& dir, const Campaign& initial,
                                                 const std::vector<TokenEntry>& tokens) {
  Campaign stamped = initial;
  if (stamped.created_at().empty()) stamped.set_created_at(now_utc());
  save_campaign(stamped, dir, tokens);
  return open(dir);
}

std::unique_ptr<BundleStore> BundleStore::open(const fs::path& dir) {
  auto lock = std::make_unique<BundleLock>(dir);
  std::unique_ptr<BundleStore> store(new BundleStore(dir, std::move(lock)));
  Manifest manifest = read_manifest(dir);
  auto files = read_verified(dir, manifest);

  // Recovery: finish interrupted commits and drop unacknowledged log tails.
  for (const auto& [rel, f] : manifest.files) {
    fs::path path = dir / rel;
    fs::path pending = path;
    pending += kPendingSuffix;
    if (is_log(rel)) {
      if (fs::file_size(path) > f.size) detail::truncate_file(path, f.size);
    } else if (fs::exists(pending)) {
      if (detail::read_file(pending) == files[rel]) {
        fs::rename(pending, path);
      } else {
        fs::remove(pending);
      }
    }
    store->files_[rel] = {f.digest, f.size};
  }
  store->campaign_ = build_campaign(manifest, files);
  auto tok = files.find("tokens.json");
  if (tok != files.end()) {
    store->tokens_ = in_file("tokens.json", [&] { return parse_tokens(tok->second); });
  }
  return store;
}

void BundleStore::write_manifest() {
  Manifest m;
  m.campaign_id = campaign_.id();
  m.created_at = campaign_.created_at();
  for (const auto& [rel, f] : files_) m.files[rel] = {f.digest, f.size};
  detail::write_file_atomic(dir_ / kManifest, serialize_manifest(m));
}

// Two-phase commit: stage every file as a pending sibling, switch the
// manifest, then move the staged files into place.
void BundleStore::commit(const std::vector<std::pair<std::string, std::string>>& files) {
  for (const auto& [rel, bytes] : files) {
    fs::path path = dir_ / rel;
    fs::create_directories(path.parent_path());
    fs::path pending = path;
    pending += kPendingSuffix;
    detail::write_file_atomic(pending, bytes);
  }
  for (const auto& [rel, bytes] : files) files_[rel] = {content_digest(bytes), bytes.size()};
  write_manifest();
  for (const auto& [rel, bytes] : files) {
    fs::path path = dir_ / rel;
    fs::path pending = path;
    pending += kPendingSuffix;
    fs::rename(pending, path);
  }
}

void BundleStore::add_taxonomy(Taxonomy t) {
  Campaign next = campaign_;
  next.add_taxonomy(t);
  commit({{"taxonomies/v" + std::to_string(t.version) + ".json", serialize_taxonomy(t)}});
  campaign_ = std::move(next);
}

void BundleStore::add_merge_map(MergeMap m) {
  Campaign next = campaign_;
  next.add_merge_map(m);
  commit({{"merge_maps/v" + std::to_string(m.from_version) + "_v" + std::to_string(m.to_version) +
               ".json",
           serialize_merge_map(m)}});
  campaign_ = std::move(next);
}

void BundleStore::add_summary(SummaryDocument s) {
  Campaign next = campaign_;
  next.add_summary(s);
  commit({{"summaries/" + s.id + "/source.txt", s.source_text},
          {"summaries/" + s.id + "/summary.txt", s.generated_summary},
          {"summaries/index.json", detail::dump_json(summary_index(next))}});
  campaign_ = std::move(next);
}

void BundleStore::add_reviewer(Reviewer r) {
  Campaign next = campaign_;
  next.add_reviewer(std::move(r));
  commit({{"reviewers.json", detail::dump_json(reviewers_json(next))}});
  campaign_ = std::move(next);
}

const Round& BundleStore::open_round(Round r) {
  Campaign next = campaign_;
  next.open_round(std::move(r));
  commit({{"rounds.json", detail::dump_json(rounds_json(next.rounds()))}});
  campaign_ = std::move(next);
  return campaign_.rounds().back();
}

const Round& BundleStore::close_round(std::string_view round_id, bool force) {
  Campaign next = campaign_;
  next.close_round(round_id, force);
  commit({{"rounds.json", detail::dump_json(rounds_json(next.rounds()))}});
  campaign_ = std::move(next);
  return campaign_.round(round_id);
}

int BundleStore::record_annotation(const AnnotationRecord& record, int expected_version) {
  AnnotationRecord stored = campaign_.prepare_record(record, expected_version);
  const std::string rel = log_path(stored.round_id, stored.reviewer_id);
  fs::path path = dir_ / rel;
  fs::create_directories(path.parent_path());
  // Drop any tail left by a failed earlier append before extending the log.
  auto known = files_.find(rel);
  std::uint64_t committed = known == files_.end() ? 0 : known->second.size;
  if (fs::exists(path) && fs::file_size(path) != committed) detail::truncate_file(path, committed);

  detail::append_durable(path, serialize_record(stored) + "\n");
  std::string bytes = detail::read_file(path);
  files_[rel] = {content_digest(bytes), bytes.size()};
  write_manifest();
  campaign_.restore_record(stored);
  return stored.record_version;
}

void BundleStore::add_token(TokenEntry entry) {
  std::vector<TokenEntry> next = tokens_;
  next.push_back(std::move(entry));
  commit({{"tokens.json", detail::dump_json(tokens_json(next))}});
  tokens_ = std::move(next);
}

void BundleStore::save_report(std::string_view name, std::string_view content) {
  std::string n(name);
  if (n.empty() || n.find('/') != std::string::npos || n.find("..") != std::string::npos) {
    throw Error(ErrorClass::kDomain, "invalid report name '" + n + "'");
  }
  commit({{"reports/" + n, std::string(content)}});
}

}  // namespace fmeca
