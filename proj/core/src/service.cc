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

#include "fmeca/service.h"

#include <openssl/rand.h>

#include <chrono>
#include <charconv>

#include "fmeca/agreement_report.h"
#include "fmeca/risk.h"
#include "fmeca/scales.h"
#include "fmeca/sus.h"
#include "httplib.h"
#include "json_util.h"

namespace fmeca {

using detail::Json;

// --- Sessions ----------------------------------------------------------------

std::string issue_token() {
  unsigned char buf[32];
  if (RAND_bytes(buf, sizeof(buf)) != 1) {
    throw Error(ErrorClass::kIo, "random source unavailable");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : buf) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

SessionRegistry::SessionRegistry(const std::vector<TokenEntry>& entries) {
  for (const auto& e : entries) add(e);
}

void SessionRegistry::add(const TokenEntry& entry) {
  by_digest_[entry.token_digest] = {entry.principal, entry.expires_at};
}

std::optional<Session> SessionRegistry::lookup(std::string_view token) const {
  if (token.empty()) return std::nullopt;
  auto it = by_digest_.find(content_digest(token));
  if (it == by_digest_.end()) return std::nullopt;
  return it->second;
}

// --- Authorization -----------------------------------------------------------

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kReadTaxonomy: return "read_taxonomy";
    case Action::kReadScales: return "read_scales";
    case Action::kListRounds: return "list_rounds";
    case Action::kReadAssignments: return "read_assignments";
    case Action::kReadSummary: return "read_summary";
    case Action::kReadRecord: return "read_record";
    case Action::kWriteRecord: return "write_record";
    case Action::kCloseRound: return "close_round";
    case Action::kReadReport: return "read_report";
    case Action::kSubmitSus: return "submit_sus";
  }
  return "unknown";
}

namespace {

// Unknown rounds count as open so that no cross-reviewer read slips through.
bool round_closed(const Campaign& c, std::string_view round_id) {
  for (const auto& r : c.rounds()) {
    if (r.id == round_id) return r.status == RoundStatus::kClosed;
  }
  return false;
}

bool round_known(const Campaign& c, std::string_view round_id) {
  for (const auto& r : c.rounds()) {
    if (r.id == round_id) return true;
  }
  return false;
}

}  // namespace

Decision authorize(const SessionRegistry& sessions, const Campaign& campaign,
                   std::string_view token, Action action, const Resource& resource,
                   std::int64_t now) {
  std::optional<Session> s = sessions.lookup(token);
  if (!s) return Decision::deny("unauthenticated");
  if (s->expired(now)) return Decision::deny("expired token");

  if (action == Action::kReadReport && round_known(campaign, resource.round_id) &&
      !round_closed(campaign, resource.round_id)) {
    return Decision::deny("round open");
  }
  if (s->is_operator()) return Decision::allow();

  switch (action) {
    case Action::kReadTaxonomy:
    case Action::kReadScales:
    case Action::kListRounds:
    case Action::kReadSummary:
    case Action::kReadReport:
    case Action::kSubmitSus:
      return Decision::allow();
    case Action::kReadAssignments:
      return resource.reviewer_id == s->principal ? Decision::allow()
                                                  : Decision::deny("not record owner");
    case Action::kReadRecord:
      if (resource.reviewer_id == s->principal) return Decision::allow();
      return round_closed(campaign, resource.round_id) ? Decision::allow()
                                                       : Decision::deny("blinded round");
    case Action::kWriteRecord:
      return resource.reviewer_id == s->principal ? Decision::allow()
                                                  : Decision::deny("not record owner");
    case Action::kCloseRound:
      return Decision::deny("operator only");
  }
  return Decision::deny("unknown action");
}

// --- Request handling ---------------------------------------------------------

int http_status_for(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::kDomain:
    case ErrorClass::kMapping:
    case ErrorClass::kValidation:
    case ErrorClass::kParse:
    case ErrorClass::kSchema:
    case ErrorClass::kReferential:
      return 400;
    case ErrorClass::kUnauthenticated: return 401;
    case ErrorClass::kForbidden: return 403;
    case ErrorClass::kNotFound: return 404;
    case ErrorClass::kConflict: return 409;
    case ErrorClass::kWorkflow:
    case ErrorClass::kCompleteness:
      return 422;
    case ErrorClass::kVersion:
    case ErrorClass::kIntegrity:
    case ErrorClass::kIo:
    case ErrorClass::kLocked:
      return 500;
  }
  return 500;
}

std::string error_body(std::string_view class_name, std::string_view message) {
  Json j = {{"error", {{"class", class_name}, {"message", message}}}};
  return j.dump();
}

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) out.emplace_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

ApiResponse json_response(const Json& j, int status = 200) {
  return {status, j.dump(), "application/json"};
}

ApiResponse raw_json(std::string body) { return {200, std::move(body), "application/json"}; }

ApiResponse deny_response(const Decision& d) {
  bool auth = d.reason == "unauthenticated" || d.reason == "expired token";
  ErrorClass cls = auth ? ErrorClass::kUnauthenticated : ErrorClass::kForbidden;
  return {auth ? 401 : 403, error_body(error_class_name(cls), d.reason), "application/json"};
}

Json record_json(const AnnotationRecord& r) { return Json::parse(serialize_record(r)); }

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorClass::kDomain, std::string(what) + " '" + std::string(s) + "' is not an integer");
  }
  return v;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = detail::parse_json(body, "request body");
  detail::expect_object(j, "");
  return j;
}

AnnotationRecord record_from_body(const Json& j, const Resource& res, int* expected_version) {
  using namespace detail;
  reject_unknown_keys(j, {"expected_version", "flags", "instances", "submitted"}, "");
  *expected_version = static_cast<int>(int_field(j, "expected_version", ""));
  // The body omits identity fields; they come from the path.
  Json full = j;
  full.erase("expected_version");
  full["round_id"] = res.round_id;
  full["reviewer_id"] = res.reviewer_id;
  full["summary_id"] = res.summary_id;
  full["record_version"] = 0;
  if (!full.contains("submitted")) full["submitted"] = false;
  return parse_record(full.dump(), "");
}

Json sus_json(const Json& body) {
  using namespace detail;
  reject_unknown_keys(body, {"responses", "sd"}, "");
  SdKind sd = SdKind::kPopulation;
  if (body.contains("sd")) {
    std::string kind = string_field(body, "sd", "");
    if (kind == "sample") {
      sd = SdKind::kSample;
    } else if (kind != "population") {
      throw Error(ErrorClass::kSchema, "/sd: expected \"population\" or \"sample\"");
    }
  }
  const Json& arr = field(body, "responses", "");
  expect_array(arr, "/responses");
  std::vector<SusResult> results;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string p = child("/responses", i);
    reject_unknown_keys(arr[i], {"evaluator_id", "items"}, p);
    SusResponse r;
    r.evaluator_id = string_field(arr[i], "evaluator_id", p);
    const Json& items = field(arr[i], "items", p);
    expect_array(items, child(p, "items"));
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (!items[k].is_number_integer()) {
        throw Error(ErrorClass::kSchema, child(child(p, "items"), k) + ": expected integer");
      }
      r.items.push_back(items[k].get<int>());
    }
    results.push_back(sus_score(r));
  }
  SusAggregate agg = sus_aggregate(results, sd);
  Json out;
  out["results"] = Json::array();
  for (const auto& r : results) {
    out["results"].push_back(
        {{"evaluator_id", r.evaluator_id}, {"score", r.score}, {"grade", r.grade}, {"label", r.label}});
  }
  out["aggregate"] = {{"n", agg.n},
                      {"mean", agg.mean},
                      {"sd", agg.sd},
                      {"sd_kind", sd == SdKind::kPopulation ? "population" : "sample"},
                      {"grade", agg.mean_grade.grade},
                      {"label", agg.mean_grade.label},
                      {"grade_counts", agg.grade_counts}};
  return out;
}

Json assignment_json(const Campaign& c, const Round& r, const std::string& reviewer_id) {
  Json items = Json::array();
  std::size_t submitted = 0;
  for (const auto& sid : r.summary_ids) {
    const AnnotationRecord* rec = c.latest_record(r.id, reviewer_id, sid);
    bool done = rec != nullptr && rec->submitted;
    submitted += done ? 1 : 0;
    items.push_back({{"summary_id", sid},
                     {"record_version", rec == nullptr ? 0 : rec->record_version},
                     {"submitted", done}});
  }
  return {{"reviewer_id", reviewer_id},
          {"summaries", items},
          {"submitted", submitted},
          {"expected", r.summary_ids.size()}};
}

std::int64_t system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

CampaignService::CampaignService(std::unique_ptr<BundleStore> store, Clock clock)
    : store_(std::move(store)),
      sessions_(store_->tokens()),
      clock_(clock ? std::move(clock) : Clock(system_now)) {}

CampaignService::~CampaignService() = default;

Campaign CampaignService::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return store_->campaign();
}

ApiResponse CampaignService::handle(const ApiRequest& request) {
  std::lock_guard<std::mutex> lock(mu_);
  try {
    return dispatch(request);
  } catch (const Error& e) {
    return {http_status_for(e.error_class()), error_body(error_class_name(e.error_class()), e.what()),
            "application/json"};
  } catch (const std::exception& e) {
    return {500, error_body("internal", e.what()), "application/json"};
  }
}

ApiResponse CampaignService::dispatch(const ApiRequest& req) {
  const Campaign& c = store_->campaign();
  const std::vector<std::string> seg = split_path(req.path);
  const std::string& m = req.method;
  const std::int64_t now = clock_();

  auto check = [&](Action a, const Resource& res) -> std::optional<ApiResponse> {
    Decision d = authorize(sessions_, c, req.bearer_token, a, res, now);
    if (d.allowed) return std::nullopt;
    return deny_response(d);
  };
  auto not_found = [&]() -> ApiResponse {
    return {404, error_body("not_found", "no route for " + m + " " + req.path), "application/json"};
  };

  if (seg.size() < 2 || seg[0] != "api") return not_found();
  const std::string& head = seg[1];

  if (head == "taxonomy" && seg.size() == 3 && m == "GET") {
    if (auto deny = check(Action::kReadTaxonomy, {})) return *deny;
    return raw_json(serialize_taxonomy(c.taxonomy(parse_int(seg[2], "taxonomy version"))));
  }
  if (head == "scales" && seg.size() == 2 && m == "GET") {
    if (auto deny = check(Action::kReadScales, {})) return *deny;
    return raw_json(scales_document_json());
  }
  if (head == "summaries" && seg.size() == 3 && m == "GET") {
    if (auto deny = check(Action::kReadSummary, {"", "", seg[2]})) return *deny;
    const SummaryDocument& s = c.summary(seg[2]);
    return json_response({{"id", s.id},
                          {"source_text", s.source_text},
                          {"generated_summary", s.generated_summary},
                          {"metadata", s.metadata}});
  }
  if (head == "sus" && seg.size() == 2 && m == "POST") {
    if (auto deny = check(Action::kSubmitSus, {})) return *deny;
    return json_response(sus_json(parse_body(req.body)));
  }
  if (head != "rounds") return not_found();

  if (seg.size() == 2 && m == "GET") {
    if (auto deny = check(Action::kListRounds, {})) return *deny;
    std::optional<Session> s = sessions_.lookup(req.bearer_token);
    Json arr = Json::array();
    for (const auto& r : c.rounds()) {
      if (!s->is_operator() && !r.has_reviewer(s->principal)) continue;
      arr.push_back({{"id", r.id},
                     {"taxonomy_version", r.taxonomy_version},
                     {"status", round_status_name(r.status)},
                     {"force_closed", r.force_closed},
                     {"reviewer_ids", r.reviewer_ids},
                     {"summary_ids", r.summary_ids}});
    }
    return json_response({{"rounds", arr}});
  }
  if (seg.size() < 4) return not_found();
  const std::string& round_id = seg[2];
  const std::string& sub = seg[3];

  if (sub == "assignments" && seg.size() == 4 && m == "GET") {
    std::optional<Session> s = sessions_.lookup(req.bearer_token);
    std::string subject = s && !s->is_operator() ? s->principal : "";
    auto it = req.query.find("reviewer");
    if (it != req.query.end()) subject = it->second;
    if (auto deny = check(Action::kReadAssignments, {round_id, subject, ""})) return *deny;
    const Round& r = c.round(round_id);
    Json list = Json::array();
    for (const auto& rid : r.reviewer_ids) {
      if (subject.empty() || rid == subject) list.push_back(assignment_json(c, r, rid));
    }
    if (!subject.empty() && list.empty()) {
      throw Error(ErrorClass::kNotFound, "reviewer '" + subject + "' is not assigned to round '" + round_id + "'");
    }
    return json_response({{"round_id", r.id}, {"status", round_status_name(r.status)}, {"assignments", list}});
  }
  if (sub == "annotations" && seg.size() == 6) {
    Resource res{round_id, seg[4], seg[5]};
    if (m == "GET") {
      if (auto deny = check(Action::kReadRecord, res)) return *deny;
      const Round& r = c.round(round_id);
      if (!r.has_reviewer(res.reviewer_id)) {
        throw Error(ErrorClass::kNotFound, "reviewer '" + res.reviewer_id + "' is not assigned to round '" + round_id + "'");
      }
      if (!r.has_summary(res.summary_id)) {
        throw Error(ErrorClass::kNotFound, "summary '" + res.summary_id + "' is not part of round '" + round_id + "'");
      }
      const AnnotationRecord* rec = c.latest_record(round_id, res.reviewer_id, res.summary_id);
      AnnotationRecord shown;
      if (rec != nullptr) {
        shown = *rec;
      } else {
        shown = blank_record(c.taxonomy(r.taxonomy_version));
        shown.round_id = round_id;
        shown.reviewer_id = res.reviewer_id;
        shown.summary_id = res.summary_id;
      }
      return json_response(record_json(shown));
    }
    if (m == "PUT") {
      if (auto deny = check(Action::kWriteRecord, res)) return *deny;
      int expected = 0;
      AnnotationRecord rec = record_from_body(parse_body(req.body), res, &expected);
      int version = store_->record_annotation(rec, expected);
      return json_response({{"record_version", version}});
    }
    return not_found();
  }
  if (sub == "close" && seg.size() == 4 && m == "POST") {
    if (auto deny = check(Action::kCloseRound, {round_id, "", ""})) return *deny;
    Json body = parse_body(req.body);
    detail::reject_unknown_keys(body, {"force"}, "");
    bool force = body.contains("force") && detail::bool_field(body, "force", "");
    const Round& r = store_->close_round(round_id, force);
    return json_response({{"id", r.id}, {"status", round_status_name(r.status)}, {"force_closed", r.force_closed}});
  }
  if (sub == "reports" && seg.size() == 5 && m == "GET") {
    if (auto deny = check(Action::kReadReport, {round_id, "", ""})) return *deny;
    if (seg[4] == "agreement") {
      int stage = 0;
      auto it = req.query.find("stage");
      if (it != req.query.end()) {
        stage = parse_int(it->second, "stage");
        if (stage < 1 || stage > 3) throw Error(ErrorClass::kDomain, "stage must be 1, 2 or 3");
      }
      return raw_json(agreement_json(agreement_report(c, round_id), stage));
    }
    if (seg[4] == "risk") return raw_json(risk_json(risk_register(c, round_id)));
  }
  return not_found();
}

// --- HTTP ---------------------------------------------------------------------

struct CampaignServer::Impl {
  explicit Impl(CampaignService& s) : service(s) {}

  void route(const httplib::Request& hreq, httplib::Response& hres) {
    ApiRequest req;
    req.method = hreq.method;
    req.path = hreq.path;
    for (const auto& [k, v] : hreq.params) req.query[k] = v;
    std::string auth = hreq.get_header_value("Authorization");
    if (auth.rfind("Bearer ", 0) == 0) req.bearer_token = auth.substr(7);
    req.body = hreq.body;
    ApiResponse res = service.handle(req);
    hres.status = res.status;
    hres.set_content(res.body, res.content_type.c_str());
  }

  CampaignService& service;
  httplib::Server server;
};

CampaignServer::CampaignServer(CampaignService& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->route(req, res); };
  impl_->server.Get(R"(/api/.*)", handler);
  impl_->server.Put(R"(/api/.*)", handler);
  impl_->server.Post(R"(/api/.*)", handler);
}

CampaignServer::~CampaignServer() { stop(); }

int CampaignServer::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw Error(ErrorClass::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void CampaignServer::listen() { impl_->server.listen_after_bind(); }

void CampaignServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void CampaignServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace fmeca
