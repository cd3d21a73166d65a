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

#include "fmeca/agreement_report.h"

#include <cstdio>
#include <functional>
#include <sstream>

#include "fmeca/error.h"
#include "json_util.h"

namespace fmeca {
namespace {

using detail::Json;

// Degenerate-size inputs (fewer than two co-rated units, empty Stage-3
// matrices) become undefined estimates carrying the error text.
AgreementEstimate guarded(Metric metric, const std::function<AgreementEstimate()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.error_class() != ErrorClass::kDomain) throw;
    AgreementEstimate out;
    out.metric = metric;
    out.undefined_reason = e.what();
    return out;
  }
}

AgreementEstimate empty_estimate(Metric metric, std::string reason) {
  AgreementEstimate out;
  out.metric = metric;
  out.undefined_reason = std::move(reason);
  return out;
}

template <typename Fn>
void for_each_pair(const AnnotationMatrix& m, Fn&& fn) {
  for (std::size_t a = 0; a < m.rater_count(); ++a) {
    for (std::size_t b = a + 1; b < m.rater_count(); ++b) {
      std::vector<int> x, y;
      for (const auto& row : m.cells) {
        if (row[a] && row[b]) {
          x.push_back(*row[a]);
          y.push_back(*row[b]);
        }
      }
      fn(a, b, x, y);
    }
  }
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

void stamp(AgreementEstimate& e, std::vector<std::string> raters) { e.rater_ids = std::move(raters); }

std::string csv_value(const AgreementEstimate& e) {
  return e.value ? format_fixed3(*e.value) : "NA";
}

std::string csv_note(const AgreementEstimate& e) {
  std::string note;
  if (!e.value) note = "undefined: " + e.undefined_reason;
  for (const auto& n : e.notes) {
    if (!note.empty()) note += "; ";
    note += n;
  }
  // Keep the table single-delimiter.
  for (char& c : note) {
    if (c == ',' || c == '\n') c = ';';
  }
  return note;
}

void csv_row(std::ostringstream& out, std::string_view stage, std::string_view dimension,
             std::string_view section, std::string_view a, std::string_view b,
             std::string_view metric, const AgreementEstimate& e) {
  out << stage << ',' << dimension << ',' << section << ',' << a << ',' << b << ',' << metric
      << ',' << csv_value(e) << ',' << e.n_units << ',' << csv_note(e) << '\n';
}

constexpr std::string_view kCsvHeader =
    "stage,dimension,section,rater_a,rater_b,metric,value,n_units,note\n";

Json rounded(double v) { return std::stod(format_fixed3(v)); }

Json estimate_json(const AgreementEstimate& e) {
  Json j;
  j["metric"] = metric_name(e.metric);
  j["n_units"] = e.n_units;
  if (e.value) {
    j["value"] = rounded(*e.value);
  } else {
    j["value"] = nullptr;
    j["undefined_reason"] = e.undefined_reason;
  }
  if (!e.rater_ids.empty()) j["raters"] = e.rater_ids;
  if (!e.notes.empty()) j["notes"] = e.notes;
  Json diag = Json::object();
  for (const auto& [k, v] : e.diagnostics) diag[k] = rounded(v);
  j["diagnostics"] = diag;
  return j;
}

Json pairwise_json(const std::vector<PairwiseEntry>& entries) {
  Json arr = Json::array();
  for (const auto& p : entries) {
    Json row;
    row["raters"] = {p.rater_a, p.rater_b};
    for (const auto& e : p.estimates) row[std::string(metric_name(e.metric))] = estimate_json(e);
    arr.push_back(row);
  }
  return arr;
}

Json binary_json(const BinaryStageReport& r) {
  Json j;
  j["stage"] = r.stage;
  j["unit"] = r.stage == 1 ? "subcategory" : "failure_mode";
  j["n_units"] = r.n_units;
  j["n_complete_units"] = r.n_complete_units;
  j["complete_case_only"] = r.complete_case_only;
  j["pairwise"] = pairwise_json(r.pairwise);
  j["multi_rater"] = {{"fleiss_kappa", estimate_json(r.fleiss)},
                      {"gwet_ac1", estimate_json(r.ac1)},
                      {"krippendorff_alpha", estimate_json(r.alpha)},
                      {"unanimity", estimate_json(r.unanimity)}};
  return j;
}

Json score_json(const ScoreStageReport& r) {
  Json j;
  j["dimension"] = dimension_name(r.dimension);
  j["n_units"] = r.n_units;
  j["inclusion_policy"] = {{"min_raters", r.min_raters},
                           {"instance_aggregation", aggregation_name(r.policy.aggregation)}};
  j["pairwise"] = pairwise_json(r.pairwise);
  j["multi_rater"] = {{"icc_2_1", estimate_json(r.icc)}};
  j["tolerance"] = Json::array({{{"label", "exact"}, {"estimate", estimate_json(r.exact)}},
                                {{"label", "within_1"}, {"estimate", estimate_json(r.within1)}},
                                {{"label", "within_2"}, {"estimate", estimate_json(r.within2)}}});
  Json raters = Json::array();
  for (const auto& s : r.raters) {
    Json row;
    row["rater"] = s.rater_id;
    row["n"] = s.n;
    row["mean"] = s.mean ? rounded(*s.mean) : Json(nullptr);
    row["sd"] = s.sd ? rounded(*s.sd) : Json(nullptr);
    raters.push_back(row);
  }
  j["rater_means"] = raters;
  return j;
}

void text_estimate(std::ostringstream& out, std::string_view label, const AgreementEstimate& e) {
  out << "    " << label << ": " << format_estimate(e) << "  (n=" << e.n_units << ")\n";
}

void text_binary(std::ostringstream& out, const BinaryStageReport& r, std::string_view title) {
  out << title << "\n";
  out << "  units: " << r.n_units;
  if (r.complete_case_only) out << " (complete-case units: " << r.n_complete_units << ")";
  out << "\n  pairwise\n";
  for (const auto& p : r.pairwise) {
    out << "    " << p.rater_a << " x " << p.rater_b << ":";
    for (const auto& e : p.estimates) out << "  " << metric_name(e.metric) << "=" << format_estimate(e);
    out << "\n";
  }
  out << "  multi-rater\n";
  text_estimate(out, "fleiss_kappa", r.fleiss);
  text_estimate(out, "gwet_ac1", r.ac1);
  text_estimate(out, "krippendorff_alpha", r.alpha);
  text_estimate(out, "unanimity", r.unanimity);
}

void text_score(std::ostringstream& out, const ScoreStageReport& r) {
  out << "  " << dimension_name(r.dimension) << " (units: " << r.n_units
      << ", min_raters: " << r.min_raters
      << ", instances: " << aggregation_name(r.policy.aggregation) << ")\n";
  out << "    rater means\n";
  for (const auto& s : r.raters) {
    out << "      " << s.rater_id << ": "
        << (s.mean ? format_fixed3(*s.mean) : std::string("NA")) << " +/- "
        << (s.sd ? format_fixed3(*s.sd) : std::string("NA")) << " (n=" << s.n << ")\n";
  }
  out << "    pairwise\n";
  for (const auto& p : r.pairwise) {
    out << "      " << p.rater_a << " x " << p.rater_b << ":";
    for (const auto& e : p.estimates) out << "  " << metric_name(e.metric) << "=" << format_estimate(e);
    out << "\n";
  }
  out << "    icc_2_1: " << format_estimate(r.icc) << "\n";
  out << "    exact: " << format_estimate(r.exact) << "\n";
  out << "    within_1: " << format_estimate(r.within1) << "\n";
  out << "    within_2: " << format_estimate(r.within2) << "\n";
}

}  // namespace

RatingTable to_rating_table(const AnnotationMatrix& m) { return m.cells; }

BinaryStageReport binary_stage_report(const AnnotationMatrix& m) {
  static constexpr int kBinary[] = {0, 1};
  BinaryStageReport r;
  r.stage = m.stage;
  r.n_units = m.unit_count();
  const RatingTable table = to_rating_table(m);
  const RatingTable complete = complete_rows(table);
  r.n_complete_units = complete.size();
  r.complete_case_only = complete.size() != table.size();

  for_each_pair(m, [&](std::size_t a, std::size_t b, const std::vector<int>& x,
                       const std::vector<int>& y) {
    PairwiseEntry entry{m.raters[a], m.raters[b], {}};
    entry.estimates.push_back(guarded(Metric::kCohenKappa, [&] { return cohen_kappa(x, y); }));
    entry.estimates.push_back(guarded(Metric::kGwetAc1, [&] {
      RatingTable pair;
      for (std::size_t i = 0; i < x.size(); ++i) pair.push_back({x[i], y[i]});
      return gwet_ac1(pair, kBinary);
    }));
    for (auto& e : entry.estimates) stamp(e, {m.raters[a], m.raters[b]});
    r.pairwise.push_back(std::move(entry));
  });

  r.fleiss = guarded(Metric::kFleissKappa, [&] { return fleiss_kappa(complete); });
  r.ac1 = guarded(Metric::kGwetAc1, [&] { return gwet_ac1(complete, kBinary); });
  r.unanimity = guarded(Metric::kUnanimity, [&] { return unanimity_rate(complete); });
  r.alpha = guarded(Metric::kKrippendorffAlpha, [&] { return krippendorff_alpha(table); });
  for (AgreementEstimate* e : {&r.fleiss, &r.ac1, &r.unanimity, &r.alpha}) stamp(*e, m.raters);
  if (r.complete_case_only) {
    for (AgreementEstimate* e : {&r.fleiss, &r.ac1, &r.unanimity}) {
      e->notes.push_back("complete-case only");
    }
  }
  return r;
}

ScoreStageReport score_stage_report(const AnnotationMatrix& m, Dimension dimension,
                                    const Stage3Policy& policy) {
  ScoreStageReport r;
  r.dimension = dimension;
  r.policy = policy;
  r.min_raters = policy.min_raters.value_or(static_cast<int>(m.rater_count()));
  r.n_units = m.unit_count();
  const RatingTable table = to_rating_table(m);
  r.raters = rater_summaries(table, m.raters);

  if (table.empty()) {
    const std::string reason = "empty stage-3 matrix";
    for_each_pair(m, [&](std::size_t a, std::size_t b, const auto&, const auto&) {
      r.pairwise.push_back({m.raters[a], m.raters[b],
                            {empty_estimate(Metric::kPearsonR, reason),
                             empty_estimate(Metric::kSpearmanRho, reason)}});
    });
    r.icc = empty_estimate(Metric::kIcc21, reason);
    r.exact = empty_estimate(Metric::kTolerance, reason);
    r.within1 = empty_estimate(Metric::kTolerance, reason);
    r.within2 = empty_estimate(Metric::kTolerance, reason);
    return r;
  }

  for_each_pair(m, [&](std::size_t a, std::size_t b, const std::vector<int>& x,
                       const std::vector<int>& y) {
    std::vector<double> dx = as_doubles(x), dy = as_doubles(y);
    PairwiseEntry entry{m.raters[a], m.raters[b], {}};
    entry.estimates.push_back(guarded(Metric::kPearsonR, [&] { return pearson_r(dx, dy); }));
    entry.estimates.push_back(guarded(Metric::kSpearmanRho, [&] { return spearman_rho(dx, dy); }));
    for (auto& e : entry.estimates) stamp(e, {m.raters[a], m.raters[b]});
    r.pairwise.push_back(std::move(entry));
  });
  const RatingTable complete = complete_rows(table);
  r.icc = guarded(Metric::kIcc21, [&] { return icc_2_1(complete); });
  if (complete.size() != table.size()) r.icc.notes.push_back("complete-case only");
  r.exact = guarded(Metric::kTolerance, [&] { return tolerance_agreement(table, 0); });
  r.within1 = guarded(Metric::kTolerance, [&] { return tolerance_agreement(table, 1); });
  r.within2 = guarded(Metric::kTolerance, [&] { return tolerance_agreement(table, 2); });
  for (AgreementEstimate* e : {&r.icc, &r.exact, &r.within1, &r.within2}) stamp(*e, m.raters);
  return r;
}

AgreementReport agreement_report(const Campaign& campaign, std::string_view round_id,
                                 const Stage3Policy& stage3) {
  const Round& round = campaign.round(round_id);
  AgreementReport r;
  r.round_id = round.id;
  r.taxonomy_version = round.taxonomy_version;
  r.raters = round.reviewer_ids;
  r.stage1 = binary_stage_report(campaign.stage1_matrix(round_id));
  r.stage2 = binary_stage_report(campaign.stage2_matrix(round_id));
  r.severity = score_stage_report(campaign.stage3_matrix(round_id, Dimension::kSeverity, stage3),
                                  Dimension::kSeverity, stage3);
  r.detectability =
      score_stage_report(campaign.stage3_matrix(round_id, Dimension::kDetectability, stage3),
                         Dimension::kDetectability, stage3);
  return r;
}

std::string format_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string format_estimate(const AgreementEstimate& e) {
  if (e.value) return format_fixed3(*e.value);
  return "undefined (" + e.undefined_reason + ")";
}

std::string agreement_csv(const BinaryStageReport& r) {
  std::ostringstream out;
  out << kCsvHeader;
  const std::string stage = std::to_string(r.stage);
  for (const auto& p : r.pairwise) {
    for (const auto& e : p.estimates) {
      csv_row(out, stage, "", "pairwise", p.rater_a, p.rater_b, metric_name(e.metric), e);
    }
  }
  csv_row(out, stage, "", "multi", "", "", "fleiss_kappa", r.fleiss);
  csv_row(out, stage, "", "multi", "", "", "gwet_ac1", r.ac1);
  csv_row(out, stage, "", "multi", "", "", "krippendorff_alpha", r.alpha);
  csv_row(out, stage, "", "multi", "", "", "unanimity", r.unanimity);
  return out.str();
}

std::string agreement_csv(const ScoreStageReport& r) {
  std::ostringstream out;
  out << kCsvHeader;
  const std::string_view dim = dimension_name(r.dimension);
  for (const auto& p : r.pairwise) {
    for (const auto& e : p.estimates) {
      csv_row(out, "3", dim, "pairwise", p.rater_a, p.rater_b, metric_name(e.metric), e);
    }
  }
  csv_row(out, "3", dim, "multi", "", "", "icc_2_1", r.icc);
  csv_row(out, "3", dim, "tolerance", "", "", "exact", r.exact);
  csv_row(out, "3", dim, "tolerance", "", "", "within_1", r.within1);
  csv_row(out, "3", dim, "tolerance", "", "", "within_2", r.within2);
  for (const auto& s : r.raters) {
    out << "3," << dim << ",rater," << s.rater_id << ",,mean,"
        << (s.mean ? format_fixed3(*s.mean) : std::string("NA")) << ',' << s.n << ",\n";
    out << "3," << dim << ",rater," << s.rater_id << ",,sd,"
        << (s.sd ? format_fixed3(*s.sd) : std::string("NA")) << ',' << s.n << ",\n";
  }
  return out.str();
}

std::string agreement_csv(const AgreementReport& r, int stage) {
  switch (stage) {
    case 1: return agreement_csv(r.stage1);
    case 2: return agreement_csv(r.stage2);
    case 3: {
      std::string sev = agreement_csv(r.severity);
      std::string det = agreement_csv(r.detectability);
      return sev + det.substr(kCsvHeader.size());
    }
    default:
      throw Error(ErrorClass::kDomain, "stage must be 1, 2 or 3");
  }
}

std::string agreement_json(const AgreementReport& r, int stage) {
  if (stage < 0 || stage > 3) throw Error(ErrorClass::kDomain, "stage must be 1, 2 or 3");
  Json j;
  j["schema"] = "fmeca.agreement_report";
  j["round_id"] = r.round_id;
  j["taxonomy_version"] = r.taxonomy_version;
  j["raters"] = r.raters;
  if (stage == 0 || stage == 1) j["stage1"] = binary_json(r.stage1);
  if (stage == 0 || stage == 2) j["stage2"] = binary_json(r.stage2);
  if (stage == 0 || stage == 3) {
    j["stage3"] = {{"severity", score_json(r.severity)},
                   {"detectability", score_json(r.detectability)}};
  }
  return detail::dump_json(j);
}

std::string agreement_text(const AgreementReport& r) {
  std::ostringstream out;
  out << "Agreement report: round " << r.round_id << " (taxonomy v" << r.taxonomy_version
      << ", raters:";
  for (const auto& id : r.raters) out << " " << id;
  out << ")\n\n";
  text_binary(out, r.stage1, "Stage 1 - subcategory presence");
  out << "\n";
  text_binary(out, r.stage2, "Stage 2 - failure mode presence");
  out << "\nStage 3 - scoring scales\n";
  text_score(out, r.severity);
  text_score(out, r.detectability);
  return out.str();
}

}  // namespace fmeca
