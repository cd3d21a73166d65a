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

// fmeca: operator command line for campaign bundles.

#include <pthread.h>
#include <signal.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fmeca/agreement_report.h"
#include "fmeca/campaign.h"
#include "fmeca/error.h"
#include "fmeca/persistence.h"
#include "fmeca/risk.h"
#include "fmeca/scales.h"
#include "fmeca/service.h"
#include "fmeca/sus.h"
#include "fmeca/taxonomy.h"
#include "json.hpp"

namespace fs = std::filesystem;
using fmeca::Error;
using fmeca::ErrorClass;
using Json = nlohmann::json;

namespace {

constexpr int kUsageExit = 2;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorClass::kIo, path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& content, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorClass::kIo, output + ": cannot write");
  out << content;
  if (!out.flush()) throw Error(ErrorClass::kIo, output + ": write failed");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::int64_t expiry_from_days(int days) {
  if (days <= 0) return 0;
  auto now = std::chrono::system_clock::now();
  return std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count() +
         static_cast<std::int64_t>(days) * 86400;
}

fmeca::ScoreAggregation aggregation_option(const std::string& name) {
  auto a = fmeca::parse_aggregation(name);
  if (!a) throw Error(ErrorClass::kDomain, "unknown aggregation '" + name + "' (max or median)");
  return *a;
}

bool is_bundle(const fs::path& dir) { return fs::exists(dir / "manifest.json"); }

struct Options {
  std::string bundle = ".";

  std::string campaign_id = "campaign";
  int expires_days = 0;

  std::string taxonomy_file;
  int taxonomy_version = 3;
  std::string format = "text";

  std::string summaries_dir;

  std::string reviewer_id;
  std::string display_name;
  std::string role = "reviewer";

  std::string round_id;
  std::string reviewers;
  std::string summaries;
  bool force = false;

  std::string stage = "all";
  std::string dimension = "severity";
  std::optional<int> min_raters;
  std::string stage3_aggregation = "max";
  std::string risk_aggregation = "median";
  std::optional<int> consensus;
  std::string output;
  std::string save_as;

  std::string sus_file;
  std::string sd = "population";

  std::string bind = "127.0.0.1:8080";

  std::string summary_id;
  std::string body_file;
  int expected_version = 0;
};

// --- verbs ---

int cmd_init(const Options& o) {
  fmeca::Campaign c(o.campaign_id);
  for (int v : fmeca::shipped_taxonomy_versions()) c.add_taxonomy(fmeca::default_taxonomy(v));
  c.add_merge_map(fmeca::default_merge_map());
  std::string token = fmeca::issue_token();
  fmeca::TokenEntry op{std::string(fmeca::kOperatorPrincipal), fmeca::content_digest(token),
                       expiry_from_days(o.expires_days)};
  fmeca::BundleStore::create(o.bundle, c, {op});
  std::cout << "initialized " << o.bundle << "\n";
  std::cout << "operator token: " << token << "\n";
  return 0;
}

int cmd_taxonomy_validate(const Options& o) {
  fmeca::Taxonomy t = o.taxonomy_file.empty() ? fmeca::default_taxonomy(o.taxonomy_version)
                                              : fmeca::load_taxonomy_file(o.taxonomy_file);
  fmeca::ValidationReport r = fmeca::validate_taxonomy(t);
  std::cout << "taxonomy v" << t.version << ": " << r.category_count << " categories, "
            << r.subcategory_count << " subcategories, " << r.failure_mode_count
            << " failure modes\n";
  for (const auto& v : r.violations) std::cout << "  " << v.node_id << ": " << v.message << "\n";
  if (!r.ok()) {
    throw Error(ErrorClass::kValidation,
                std::to_string(r.violations.size()) + " taxonomy violation(s)");
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_taxonomy_show(const Options& o) {
  fmeca::Taxonomy t = is_bundle(o.bundle)
                          ? fmeca::load_campaign(o.bundle).taxonomy(o.taxonomy_version)
                          : fmeca::default_taxonomy(o.taxonomy_version);
  if (o.format == "json") {
    std::cout << fmeca::serialize_taxonomy(t);
    return 0;
  }
  std::cout << "Taxonomy v" << t.version << "\n";
  for (const auto& cat : t.categories) {
    std::cout << cat.label << "\n";
    for (const auto& sub : t.subcategories) {
      if (sub.category_id != cat.id) continue;
      if (!sub.implicit) std::cout << "  " << sub.label << "\n";
      for (const auto& fm : t.failure_modes) {
        if (fm.subcategory_id != sub.id) continue;
        std::cout << (sub.implicit ? "  " : "    ") << fm.id << "  " << fm.label << "\n";
      }
    }
  }
  return 0;
}

int cmd_import_summaries(const Options& o) {
  auto store = fmeca::BundleStore::open(o.bundle);
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(o.summaries_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  int imported = 0;
  for (const auto& d : dirs) {
    fmeca::SummaryDocument s;
    s.id = d.filename().string();
    s.source_text = read_text(d / "source.txt");
    s.generated_summary = read_text(d / "summary.txt");
    if (fs::exists(d / "metadata.json")) {
      Json meta;
      try {
        meta = Json::parse(read_text(d / "metadata.json"));
      } catch (const Json::parse_error& e) {
        throw Error(ErrorClass::kParse, (d / "metadata.json").string() + ": " + e.what());
      }
      if (!meta.is_object()) {
        throw Error(ErrorClass::kSchema, (d / "metadata.json").string() + ": expected object");
      }
      for (const auto& [k, v] : meta.items()) {
        if (!v.is_string()) {
          throw Error(ErrorClass::kSchema,
                      (d / "metadata.json").string() + ": /" + k + ": expected string");
        }
        s.metadata[k] = v.get<std::string>();
      }
    }
    store->add_summary(std::move(s));
    ++imported;
  }
  std::cout << "imported " << imported << " summaries\n";
  return 0;
}

int cmd_add_reviewer(const Options& o) {
  auto store = fmeca::BundleStore::open(o.bundle);
  store->add_reviewer({o.reviewer_id, o.display_name.empty() ? o.reviewer_id : o.display_name, o.role});
  std::string token = fmeca::issue_token();
  store->add_token({o.reviewer_id, fmeca::content_digest(token), expiry_from_days(o.expires_days)});
  std::cout << "reviewer " << o.reviewer_id << " token: " << token << "\n";
  return 0;
}

int cmd_open_round(const Options& o) {
  auto store = fmeca::BundleStore::open(o.bundle);
  fmeca::Round r;
  r.id = o.round_id;
  r.taxonomy_version = o.taxonomy_version;
  r.reviewer_ids = split_list(o.reviewers);
  if (o.summaries.empty() || o.summaries == "all") {
    for (const auto& [id, s] : store->campaign().summaries()) r.summary_ids.push_back(id);
  } else {
    r.summary_ids = split_list(o.summaries);
  }
  const fmeca::Round& opened = store->open_round(std::move(r));
  std::cout << "opened round " << opened.id << ": " << opened.reviewer_ids.size()
            << " reviewers, " << opened.summary_ids.size() << " summaries\n";
  return 0;
}

int cmd_close_round(const Options& o) {
  auto store = fmeca::BundleStore::open(o.bundle);
  const fmeca::Round& r = store->close_round(o.round_id, o.force);
  std::cout << "closed round " << r.id << (r.force_closed ? " (forced)" : "") << "\n";
  return 0;
}

int parse_stage(const std::string& s, bool allow_all) {
  if (allow_all && s == "all") return 0;
  if (s == "1" || s == "2" || s == "3") return s[0] - '0';
  throw Error(ErrorClass::kDomain, "stage must be 1, 2 or 3" + std::string(allow_all ? " or all" : ""));
}

void maybe_save(const Options& o, const std::string& content) {
  if (o.save_as.empty()) return;
  auto store = fmeca::BundleStore::open(o.bundle);
  store->save_report(o.save_as, content);
}

int cmd_report_agreement(const Options& o) {
  fmeca::Campaign c = fmeca::load_campaign(o.bundle);
  fmeca::Stage3Policy policy;
  policy.min_raters = o.min_raters;
  policy.aggregation = aggregation_option(o.stage3_aggregation);
  fmeca::AgreementReport r = fmeca::agreement_report(c, o.round_id, policy);
  int stage = parse_stage(o.stage, true);
  std::string out;
  if (o.format == "json") {
    out = fmeca::agreement_json(r, stage);
  } else if (o.format == "csv") {
    if (stage == 0) {
      out = fmeca::agreement_csv(r, 1);
      for (int s : {2, 3}) {
        std::string more = fmeca::agreement_csv(r, s);
        out += more.substr(more.find('\n') + 1);
      }
    } else {
      out = fmeca::agreement_csv(r, stage);
    }
  } else if (o.format == "text") {
    out = fmeca::agreement_text(r);
  } else {
    throw Error(ErrorClass::kDomain, "unknown format '" + o.format + "' (text, csv or json)");
  }
  write_output(out, o.output);
  maybe_save(o, out);
  return 0;
}

int cmd_report_risk(const Options& o) {
  fmeca::Campaign c = fmeca::load_campaign(o.bundle);
  fmeca::RiskOptions opts;
  opts.aggregation = aggregation_option(o.risk_aggregation);
  opts.consensus = o.consensus;
  fmeca::RiskRegister r = fmeca::risk_register(c, o.round_id, opts);
  std::string out;
  if (o.format == "json") {
    out = fmeca::risk_json(r);
  } else if (o.format == "csv") {
    out = fmeca::risk_csv(r);
  } else if (o.format == "text") {
    out = fmeca::risk_matrix_text(r);
  } else {
    throw Error(ErrorClass::kDomain, "unknown format '" + o.format + "' (text, csv or json)");
  }
  write_output(out, o.output);
  maybe_save(o, out);
  return 0;
}

int cmd_sus_score(const Options& o) {
  std::vector<fmeca::SusResponse> responses = fmeca::parse_sus_csv(read_text(o.sus_file));
  std::vector<fmeca::SusResult> results;
  for (const auto& r : responses) results.push_back(fmeca::sus_score(r));
  fmeca::SdKind sd = fmeca::SdKind::kPopulation;
  if (o.sd == "sample") {
    sd = fmeca::SdKind::kSample;
  } else if (o.sd != "population") {
    throw Error(ErrorClass::kDomain, "unknown sd kind '" + o.sd + "' (population or sample)");
  }
  std::cout << fmeca::sus_report_text(results, fmeca::sus_aggregate(results, sd));
  return 0;
}

int cmd_export_matrix(const Options& o) {
  fmeca::Campaign c = fmeca::load_campaign(o.bundle);
  int stage = parse_stage(o.stage, false);
  fmeca::AnnotationMatrix m;
  if (stage == 1) {
    m = c.stage1_matrix(o.round_id);
  } else if (stage == 2) {
    m = c.stage2_matrix(o.round_id);
  } else {
    auto dim = fmeca::parse_dimension(o.dimension);
    if (!dim || *dim == fmeca::Dimension::kOccurrence) {
      throw Error(ErrorClass::kDomain, "dimension must be severity or detectability");
    }
    fmeca::Stage3Policy policy;
    policy.min_raters = o.min_raters;
    policy.aggregation = aggregation_option(o.stage3_aggregation);
    m = c.stage3_matrix(o.round_id, *dim, policy);
  }
  write_output(fmeca::format_matrix(m), o.output);
  return 0;
}

int cmd_scales(const Options& o) {
  std::cout << (o.format == "json" ? fmeca::scales_document_json() : fmeca::scales_document_text());
  return 0;
}

int cmd_record(const Options& o) {
  auto store = fmeca::BundleStore::open(o.bundle);
  Json body;
  try {
    body = Json::parse(read_text(o.body_file));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorClass::kParse, o.body_file + ": " + e.what());
  }
  if (!body.is_object()) throw Error(ErrorClass::kSchema, o.body_file + ": expected object");
  body["round_id"] = o.round_id;
  body["reviewer_id"] = o.reviewer_id;
  body["summary_id"] = o.summary_id;
  body["record_version"] = 0;
  if (!body.contains("submitted")) body["submitted"] = true;
  fmeca::AnnotationRecord rec = fmeca::parse_record(body.dump(), o.body_file);
  int version = store->record_annotation(rec, o.expected_version);
  std::cout << "record_version " << version << "\n";
  return 0;
}

int cmd_serve(const Options& o) {
  std::size_t colon = o.bind.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorClass::kDomain, "--bind expects host:port");
  std::string host = o.bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorClass::kDomain, "--bind port is not a number");
  }

  // Termination signals are taken by a dedicated thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  fmeca::CampaignService service(fmeca::BundleStore::open(o.bundle));
  fmeca::CampaignServer server(service);
  int bound = server.bind(host, port);
  std::cout << "listening on " << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FMECA campaign workbench"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-C,--bundle", o.bundle, "Campaign bundle directory")->capture_default_str();

  auto* init = app.add_subcommand("init", "Create a campaign bundle and print the operator token");
  init->add_option("--id", o.campaign_id, "Campaign id")->capture_default_str();
  init->add_option("--expires-days", o.expires_days, "Operator token lifetime (0 = never)");

  auto* taxonomy = app.add_subcommand("taxonomy", "Inspect failure-mode taxonomies");
  taxonomy->require_subcommand(1);
  auto* tax_validate = taxonomy->add_subcommand("validate", "Check hierarchy integrity");
  tax_validate->add_option("file", o.taxonomy_file, "Taxonomy JSON (default: shipped version)");
  tax_validate->add_option("--version", o.taxonomy_version, "Shipped version to check");
  auto* tax_show = taxonomy->add_subcommand("show", "Print a taxonomy");
  tax_show->add_option("--version", o.taxonomy_version)->capture_default_str();
  tax_show->add_option("--format", o.format, "text or json")->capture_default_str();

  auto* import = app.add_subcommand("import-summaries",
                                    "Import <id>/source.txt and <id>/summary.txt directories");
  import->add_option("dir", o.summaries_dir)->required();

  auto* add_reviewer = app.add_subcommand("add-reviewer", "Register a reviewer and print a token");
  add_reviewer->add_option("id", o.reviewer_id)->required();
  add_reviewer->add_option("--name", o.display_name);
  add_reviewer->add_option("--role", o.role)->capture_default_str();
  add_reviewer->add_option("--expires-days", o.expires_days, "Token lifetime (0 = never)");

  auto* open_round = app.add_subcommand("open-round", "Open an annotation round");
  open_round->add_option("id", o.round_id)->required();
  open_round->add_option("--reviewers", o.reviewers, "Comma-separated reviewer ids")->required();
  open_round->add_option("--summaries", o.summaries, "Comma-separated summary ids or all");
  open_round->add_option("--taxonomy-version", o.taxonomy_version)->capture_default_str();

  auto* close_round = app.add_subcommand("close-round", "Close an annotation round");
  close_round->add_option("id", o.round_id)->required();
  close_round->add_flag("--force", o.force, "Close despite missing records");

  auto* report = app.add_subcommand("report", "Agreement and risk reports for a closed round");
  report->require_subcommand(1);
  auto* rep_agree = report->add_subcommand("agreement", "Inter-rater agreement");
  auto* rep_risk = report->add_subcommand("risk", "Risk priority register");
  for (auto* sub : {rep_agree, rep_risk}) {
    sub->add_option("--round", o.round_id)->required();
    sub->add_option("--format", o.format, "text, csv or json")->capture_default_str();
    sub->add_option("-o,--output", o.output, "Output file (default stdout)");
    sub->add_option("--save-as", o.save_as, "Also store under reports/<name> in the bundle");
  }
  rep_agree->add_option("--stage", o.stage, "1, 2, 3 or all")->capture_default_str();
  rep_agree->add_option("--min-raters", o.min_raters, "Stage 3 unit threshold");
  rep_agree->add_option("--aggregation", o.stage3_aggregation, "Stage 3 instance aggregation")
      ->capture_default_str();
  rep_risk->add_option("--aggregation", o.risk_aggregation, "max or median")->capture_default_str();
  rep_risk->add_option("--consensus", o.consensus, "Reviewers needed to count a summary");

  auto* sus = app.add_subcommand("sus", "System Usability Scale");
  sus->require_subcommand(1);
  auto* sus_score = sus->add_subcommand("score", "Score questionnaire responses");
  sus_score->add_option("file", o.sus_file, "Rows: evaluator_id,i1,...,i10")->required();
  sus_score->add_option("--sd", o.sd, "population or sample")->capture_default_str();

  auto* exp = app.add_subcommand("export", "Export derived data");
  exp->require_subcommand(1);
  auto* exp_matrix = exp->add_subcommand("matrix", "Rater x unit matrix");
  exp_matrix->add_option("--round", o.round_id)->required();
  exp_matrix->add_option("--stage", o.stage, "1, 2 or 3")->required();
  exp_matrix->add_option("--dimension", o.dimension, "Stage 3: severity or detectability")
      ->capture_default_str();
  exp_matrix->add_option("--min-raters", o.min_raters);
  exp_matrix->add_option("--aggregation", o.stage3_aggregation)->capture_default_str();
  exp_matrix->add_option("-o,--output", o.output);

  auto* scales = app.add_subcommand("scales", "Print the scoring scale anchors");
  scales->add_option("--format", o.format, "text or json")->capture_default_str();

  auto* record = app.add_subcommand("record", "Write one annotation record");
  record->add_option("round", o.round_id)->required();
  record->add_option("reviewer", o.reviewer_id)->required();
  record->add_option("summary", o.summary_id)->required();
  record->add_option("--body", o.body_file, "JSON with flags, instances, submitted")->required();
  record->add_option("--expected-version", o.expected_version)->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Run the campaign HTTP API");
  serve->add_option("--bind", o.bind, "host:port (port 0 picks a free one)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << fmeca::error_body("usage", e.what()) << "\n";
    return kUsageExit;
  }

  try {
    if (*init) return cmd_init(o);
    if (*tax_validate) return cmd_taxonomy_validate(o);
    if (*tax_show) return cmd_taxonomy_show(o);
    if (*import) return cmd_import_summaries(o);
    if (*add_reviewer) return cmd_add_reviewer(o);
    if (*open_round) return cmd_open_round(o);
    if (*close_round) return cmd_close_round(o);
    if (*rep_agree) return cmd_report_agreement(o);
    if (*rep_risk) return cmd_report_risk(o);
    if (*sus_score) return cmd_sus_score(o);
    if (*exp_matrix) return cmd_export_matrix(o);
    if (*scales) return cmd_scales(o);
    if (*record) return cmd_record(o);
    if (*serve) return cmd_serve(o);
  } catch (const Error& e) {
    std::cerr << fmeca::error_body(fmeca::error_class_name(e.error_class()), e.what()) << "\n";
    return fmeca::exit_code_for(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << fmeca::error_body("io", e.what()) << "\n";
    return fmeca::exit_code_for(ErrorClass::kIo);
  }
  return kUsageExit;
}
