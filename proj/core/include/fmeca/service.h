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

#ifndef FMECA_SERVICE_H_
#define FMECA_SERVICE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fmeca/campaign.h"
#include "fmeca/error.h"
#include "fmeca/persistence.h"

namespace fmeca {

// --- Sessions ----------------------------------------------------------------

inline constexpr std::string_view kOperatorPrincipal = "operator";

struct Session {
  std::string principal;
  std::int64_t expires_at = 0;  // unix seconds, 0 = never

  bool is_operator() const { return principal == kOperatorPrincipal; }
  bool expired(std::int64_t now) const { return expires_at != 0 && now >= expires_at; }
};

// 32 random bytes, hex encoded.
std::string issue_token();

// Token digest -> session. Holds no token material.
class SessionRegistry {
 public:
  SessionRegistry() = default;
  explicit SessionRegistry(const std::vector<TokenEntry>& entries);

  void add(const TokenEntry& entry);
  // Unknown tokens yield nullopt; expiry is left to the caller.
  std::optional<Session> lookup(std::string_view token) const;

 private:
  std::map<std::string, Session, std::less<>> by_digest_;
};

// --- Authorization -----------------------------------------------------------

enum class Action {
  kReadTaxonomy,
  kReadScales,
  kListRounds,
  kReadAssignments,
  kReadSummary,
  kReadRecord,
  kWriteRecord,
  kCloseRound,
  kReadReport,
  kSubmitSus,
};

std::string_view action_name(Action a);

// Fields not relevant to an action are left empty.
struct Resource {
  std::string round_id;
  std::string reviewer_id;  // record owner or assignment subject
  std::string summary_id;
};

struct Decision {
  bool allowed = false;
  std::string reason;  // empty when allowed

  static Decision allow() { return {true, {}}; }
  static Decision deny(std::string reason) { return {false, std::move(reason)}; }
};

// Deny reasons: "unauthenticated", "expired token", "blinded round",
// "round open", "not record owner", "operator only".
Decision authorize(const SessionRegistry& sessions, const Campaign& campaign,
                   std::string_view token, Action action, const Resource& resource,
                   std::int64_t now);

// --- Request handling ---------------------------------------------------------

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string bearer_token;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// 400 for malformed or invalid input, 401/403/404/409 as named, 422 for
// workflow and completeness failures, 500 otherwise.
int http_status_for(ErrorClass cls);

// {"error":{"class":...,"message":...}}
std::string error_body(std::string_view class_name, std::string_view message);

// Transport-independent API. Every call is serialized on one mutex; a
// mutation is durable in the bundle before the response is produced.
class CampaignService {
 public:
  using Clock = std::function<std::int64_t()>;

  explicit CampaignService(std::unique_ptr<BundleStore> store, Clock clock = {});
  ~CampaignService();

  ApiResponse handle(const ApiRequest& request);

  // Snapshot of the in-memory campaign, taken under the lock.
  Campaign snapshot() const;

 private:
  ApiResponse dispatch(const ApiRequest& request);

  mutable std::mutex mu_;
  std::unique_ptr<BundleStore> store_;
  SessionRegistry sessions_;
  Clock clock_;
};

// HTTP front end over a CampaignService.
class CampaignServer {
 public:
  explicit CampaignServer(CampaignService& service);
  ~CampaignServer();
  CampaignServer(const CampaignServer&) = delete;
  CampaignServer& operator=(const CampaignServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; kIo on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  // Returns once listen() accepts connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fmeca

#endif  // FMECA_SERVICE_H_
