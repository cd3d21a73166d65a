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

#ifndef FMECA_AGREEMENT_H_
#define FMECA_AGREEMENT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fmeca {

enum class Metric {
  kCohenKappa,
  kGwetAc1,
  kFleissKappa,
  kKrippendorffAlpha,
  kPearsonR,
  kSpearmanRho,
  kIcc21,
  kTolerance,
  kUnanimity,
};

std::string_view metric_name(Metric m);

// A coefficient, or "undefined" with a reason. Degenerate inputs (constant
// raters, zero variance) produce undefined estimates rather than errors;
// malformed inputs (length mismatch, missing cells where none are allowed)
// throw kDomain.
struct AgreementEstimate {
  Metric metric = Metric::kCohenKappa;
  std::optional<double> value;
  std::string undefined_reason;
  std::size_t n_units = 0;
  std::vector<std::string> rater_ids;
  // p_o, p_e, pi_<category>, t, d_o, d_e, ms_rows, ms_cols, ms_error, ...
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;

  bool defined() const { return value.has_value(); }
};

// Units x raters. std::nullopt marks a missing rating.
using RatingRow = std::vector<std::optional<int>>;
using RatingTable = std::vector<RatingRow>;

// Rows where every rater is present.
RatingTable complete_rows(const RatingTable& table);

// Cohen's kappa for two raters over the same units.
AgreementEstimate cohen_kappa(std::span<const int> a, std::span<const int> b);

// Gwet's AC1 for any number of raters; two raters use the same formula.
// `categories` fixes the category set (and q); when empty, the observed
// categories are used. Units may have missing ratings but each needs >= 2.
AgreementEstimate gwet_ac1(const RatingTable& ratings, std::span<const int> categories = {});

// Fleiss' kappa; every unit must be rated by the same raters (no missing).
AgreementEstimate fleiss_kappa(const RatingTable& ratings);

// Krippendorff's alpha, nominal metric. Tolerates missing ratings; units
// with fewer than two ratings are not pairable and are skipped.
AgreementEstimate krippendorff_alpha(const RatingTable& ratings);

AgreementEstimate pearson_r(std::span<const double> x, std::span<const double> y);

// Pearson on average ranks (ties share the mean rank).
AgreementEstimate spearman_rho(std::span<const double> x, std::span<const double> y);

// Mid-ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

// ICC(2,1): two-way random effects, absolute agreement, single measure.
// Rows are subjects, columns raters; the matrix must be complete.
AgreementEstimate icc_2_1(const std::vector<std::vector<double>>& ratings);
AgreementEstimate icc_2_1(const RatingTable& ratings);

// Fraction of positions with |x - y| <= t. Scores must lie in 1-5.
AgreementEstimate tolerance_agreement(std::span<const int> x, std::span<const int> y, int t);
// Mean over unordered rater pairs, each pair restricted to units both rated.
AgreementEstimate tolerance_agreement(const RatingTable& ratings, int t);

// Fraction of units on which every rater gave the same value.
AgreementEstimate unanimity_rate(const RatingTable& ratings);

struct RaterSummary {
  std::string rater_id;
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> sd;  // sample standard deviation (n - 1)
};

// Per-column descriptive statistics over present cells.
std::vector<RaterSummary> rater_summaries(const RatingTable& ratings,
                                          const std::vector<std::string>& rater_ids);

}  // namespace fmeca

#endif  // FMECA_AGREEMENT_H_
