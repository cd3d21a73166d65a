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

#include "fmeca/agreement.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fmeca/error.h"

namespace fmeca {
namespace {

AgreementEstimate undefined(AgreementEstimate e, std::string reason) {
  e.value.reset();
  e.undefined_reason = std::move(reason);
  return e;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

std::string category_key(int c) { return "pi_" + std::to_string(c); }

// Throws unless every row has the same length (>= min_raters).
std::size_t check_rectangular(const RatingTable& t, std::size_t min_raters, std::string_view what) {
  if (t.empty()) throw Error(ErrorClass::kDomain, std::string(what) + ": no units");
  std::size_t k = t.front().size();
  for (const auto& row : t) {
    if (row.size() != k) {
      throw Error(ErrorClass::kDomain, std::string(what) + ": ragged rating table");
    }
  }
  if (k < min_raters) {
    throw Error(ErrorClass::kDomain, std::string(what) + ": needs at least " +
                                         std::to_string(min_raters) + " raters");
  }
  return k;
}

void require_complete(const RatingTable& t, std::string_view what) {
  for (const auto& row : t) {
    for (const auto& c : row) {
      if (!c) {
        throw Error(ErrorClass::kDomain, std::string(what) +
                                             ": missing rating; filter to complete cases first");
      }
    }
  }
}

void check_pair(std::size_t a, std::size_t b, std::size_t min_len, std::string_view what) {
  if (a != b) {
    throw Error(ErrorClass::kDomain, std::string(what) + ": length mismatch (" +
                                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a < min_len) {
    throw Error(ErrorClass::kDomain, std::string(what) + ": needs at least " +
                                         std::to_string(min_len) + " observations");
  }
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kCohenKappa: return "cohen_kappa";
    case Metric::kGwetAc1: return "gwet_ac1";
    case Metric::kFleissKappa: return "fleiss_kappa";
    case Metric::kKrippendorffAlpha: return "krippendorff_alpha";
    case Metric::kPearsonR: return "pearson_r";
    case Metric::kSpearmanRho: return "spearman_rho";
    case Metric::kIcc21: return "icc_2_1";
    case Metric::kTolerance: return "tolerance";
    case Metric::kUnanimity: return "unanimity";
  }
  return "unknown";
}

RatingTable complete_rows(const RatingTable& table) {
  RatingTable out;
  for (const auto& row : table) {
    if (std::all_of(row.begin(), row.end(), [](const auto& c) { return c.has_value(); })) {
      out.push_back(row);
    }
  }
  return out;
}

AgreementEstimate cohen_kappa(std::span<const int> a, std::span<const int> b) {
  check_pair(a.size(), b.size(), 1, "cohen_kappa");
  AgreementEstimate e;
  e.metric = Metric::kCohenKappa;
  const std::size_t n = a.size();
  e.n_units = n;

  std::map<int, std::size_t> count_a, count_b;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++matches;
  }
  std::set<int> categories;
  for (const auto& [c, _] : count_a) categories.insert(c);
  for (const auto& [c, _] : count_b) categories.insert(c);

  const double dn = static_cast<double>(n);
  const double p_o = static_cast<double>(matches) / dn;
  double p_e = 0.0;
  for (int c : categories) {
    double pa = count_a.contains(c) ? static_cast<double>(count_a[c]) / dn : 0.0;
    double pb = count_b.contains(c) ? static_cast<double>(count_b[c]) / dn : 0.0;
    p_e += pa * pb;
    e.diagnostics[category_key(c)] = (pa + pb) / 2.0;
  }
  e.diagnostics["p_o"] = p_o;
  e.diagnostics["p_e"] = categories.size() == 1 ? 1.0 : p_e;
  if (categories.size() == 1) return undefined(std::move(e), "p_e = 1");
  e.value = clamp_unit((p_o - p_e) / (1.0 - p_e));
  return e;
}

AgreementEstimate gwet_ac1(const RatingTable& ratings, std::span<const int> categories) {
  const std::size_t k = check_rectangular(ratings, 2, "gwet_ac1");
  AgreementEstimate e;
  e.metric = Metric::kGwetAc1;
  e.n_units = ratings.size();

  std::set<int> category_set(categories.begin(), categories.end());
  const bool fixed = !categories.empty();
  for (const auto& row : ratings) {
    std::size_t present = 0;
    for (const auto& c : row) {
      if (!c) continue;
      ++present;
      if (fixed && !category_set.contains(*c)) {
        throw Error(ErrorClass::kDomain,
                    "gwet_ac1: rating " + std::to_string(*c) + " outside the category set");
      }
      category_set.insert(*c);
    }
    if (present < 2) {
      throw Error(ErrorClass::kDomain, "gwet_ac1: every unit needs at least two ratings");
    }
  }
  (void)k;

  const double n = static_cast<double>(ratings.size());
  std::map<int, double> pi;
  for (int c : category_set) pi[c] = 0.0;
  double p_o_sum = 0.0;
  for (const auto& row : ratings) {
    std::map<int, double> counts;
    double r = 0.0;
    for (const auto& c : row) {
      if (!c) continue;
      counts[*c] += 1.0;
      r += 1.0;
    }
    double agree = 0.0;
    for (const auto& [c, cnt] : counts) {
      agree += cnt * (cnt - 1.0);
      pi[c] += cnt / r;
    }
    p_o_sum += agree / (r * (r - 1.0));
  }
  const double p_o = p_o_sum / n;
  const double q = static_cast<double>(category_set.size());
  double spread = 0.0;
  for (auto& [c, p] : pi) {
    p /= n;
    spread += p * (1.0 - p);
    e.diagnostics[category_key(c)] = p;
  }
  e.diagnostics["p_o"] = p_o;
  e.diagnostics["q"] = q;
  if (category_set.size() < 2) return undefined(std::move(e), "single category");
  const double p_e = spread / (q - 1.0);
  e.diagnostics["p_e"] = p_e;
  e.value = clamp_unit((p_o - p_e) / (1.0 - p_e));
  return e;
}

AgreementEstimate fleiss_kappa(const RatingTable& ratings) {
  const std::size_t k = check_rectangular(ratings, 2, "fleiss_kappa");
  require_complete(ratings, "fleiss_kappa");
  AgreementEstimate e;
  e.metric = Metric::kFleissKappa;
  e.n_units = ratings.size();
  if (ratings.size() == 1) e.notes.push_back("n_units = 1");

  const double n = static_cast<double>(k);
  const double units = static_cast<double>(ratings.size());
  std::map<int, double> totals;
  double p_bar = 0.0;
  for (const auto& row : ratings) {
    std::map<int, double> counts;
    for (const auto& c : row) counts[*c] += 1.0;
    double s = 0.0;
    for (const auto& [c, nij] : counts) {
      s += nij * (nij - 1.0);
      totals[c] += nij;
    }
    p_bar += s / (n * (n - 1.0));
  }
  p_bar /= units;
  double p_e = 0.0;
  for (const auto& [c, total] : totals) {
    double p = total / (units * n);
    p_e += p * p;
    e.diagnostics[category_key(c)] = p;
  }
  e.diagnostics["p_o"] = p_bar;
  e.diagnostics["p_e"] = totals.size() == 1 ? 1.0 : p_e;
  if (totals.size() == 1) return undefined(std::move(e), "p_e = 1");
  e.value = clamp_unit((p_bar - p_e) / (1.0 - p_e));
  return e;
}

AgreementEstimate krippendorff_alpha(const RatingTable& ratings) {
  AgreementEstimate e;
  e.metric = Metric::kKrippendorffAlpha;

  std::map<int, double> n_c;
  double disagreement = 0.0;  // sum over units of off-diagonal coincidences
  std::size_t pairable = 0;
  for (const auto& row : ratings) {
    std::map<int, double> counts;
    double m = 0.0;
    for (const auto& c : row) {
      if (!c) continue;
      counts[*c] += 1.0;
      m += 1.0;
    }
    if (m < 2.0) continue;
    ++pairable;
    double same = 0.0;
    for (const auto& [c, cnt] : counts) {
      same += cnt * cnt;
      n_c[c] += cnt;
    }
    // sum_{c != k} n_uc n_uk = m^2 - sum_c n_uc^2
    disagreement += (m * m - same) / (m - 1.0);
  }
  if (pairable == 0) {
    throw Error(ErrorClass::kDomain, "krippendorff_alpha: no unit with two or more ratings");
  }
  e.n_units = pairable;
  double n = 0.0;
  double same_total = 0.0;
  for (const auto& [c, cnt] : n_c) {
    n += cnt;
    same_total += cnt * cnt;
  }
  const double d_o = disagreement / n;
  const double d_e = (n * n - same_total) / (n * (n - 1.0));
  e.diagnostics["d_o"] = d_o;
  e.diagnostics["d_e"] = d_e;
  e.diagnostics["n_values"] = n;
  for (const auto& [c, cnt] : n_c) e.diagnostics[category_key(c)] = cnt / n;
  if (n_c.size() < 2) return undefined(std::move(e), "no variation (D_e = 0)");
  e.value = 1.0 - d_o / d_e;
  return e;
}

AgreementEstimate pearson_r(std::span<const double> x, std::span<const double> y) {
  check_pair(x.size(), y.size(), 2, "pearson_r");
  AgreementEstimate e;
  e.metric = Metric::kPearsonR;
  e.n_units = x.size();
  if (is_constant(x) || is_constant(y)) return undefined(std::move(e), "zero variance");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  e.value = clamp_unit(sxy / std::sqrt(sxx * syy));
  return e;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

AgreementEstimate spearman_rho(std::span<const double> x, std::span<const double> y) {
  check_pair(x.size(), y.size(), 2, "spearman_rho");
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  AgreementEstimate e = pearson_r(rx, ry);
  e.metric = Metric::kSpearmanRho;
  return e;
}

AgreementEstimate icc_2_1(const std::vector<std::vector<double>>& ratings) {
  if (ratings.size() < 2) throw Error(ErrorClass::kDomain, "icc_2_1: needs at least 2 subjects");
  const std::size_t k = ratings.front().size();
  for (const auto& row : ratings) {
    if (row.size() != k) throw Error(ErrorClass::kDomain, "icc_2_1: ragged rating matrix");
  }
  if (k < 2) throw Error(ErrorClass::kDomain, "icc_2_1: needs at least 2 raters");

  AgreementEstimate e;
  e.metric = Metric::kIcc21;
  e.n_units = ratings.size();
  const double n = static_cast<double>(ratings.size());
  const double kk = static_cast<double>(k);

  double grand = 0.0;
  std::vector<double> col_mean(k, 0.0);
  std::vector<double> row_mean;
  row_mean.reserve(ratings.size());
  for (const auto& row : ratings) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      s += row[j];
      col_mean[j] += row[j];
    }
    grand += s;
    row_mean.push_back(s / kk);
  }
  grand /= n * kk;
  for (double& c : col_mean) c /= n;

  double ss_total = 0.0;
  for (const auto& row : ratings) {
    for (double v : row) ss_total += (v - grand) * (v - grand);
  }
  double ss_rows = 0.0;
  for (double m : row_mean) ss_rows += (m - grand) * (m - grand);
  ss_rows *= kk;
  double ss_cols = 0.0;
  for (double m : col_mean) ss_cols += (m - grand) * (m - grand);
  ss_cols *= n;
  const double ss_error = std::max(0.0, ss_total - ss_rows - ss_cols);

  const double ms_rows = ss_rows / (n - 1.0);
  const double ms_cols = ss_cols / (kk - 1.0);
  const double ms_error = ss_error / ((n - 1.0) * (kk - 1.0));
  e.diagnostics["ms_rows"] = ms_rows;
  e.diagnostics["ms_cols"] = ms_cols;
  e.diagnostics["ms_error"] = ms_error;

  if (ss_total == 0.0) return undefined(std::move(e), "zero variance");
  const double denom = ms_rows + (kk - 1.0) * ms_error + kk * (ms_cols - ms_error) / n;
  const double scale = ss_total / (n * kk - 1.0);
  if (denom <= 1e-9 * scale) return undefined(std::move(e), "degenerate variance components");
  e.value = std::clamp((ms_rows - ms_error) / denom, -1.0, 1.0);
  return e;
}

AgreementEstimate icc_2_1(const RatingTable& ratings) {
  require_complete(ratings, "icc_2_1");
  std::vector<std::vector<double>> values;
  values.reserve(ratings.size());
  for (const auto& row : ratings) {
    std::vector<double> r;
    for (const auto& c : row) r.push_back(static_cast<double>(*c));
    values.push_back(std::move(r));
  }
  return icc_2_1(values);
}

AgreementEstimate tolerance_agreement(std::span<const int> x, std::span<const int> y, int t) {
  check_pair(x.size(), y.size(), 1, "tolerance_agreement");
  if (t < 0) throw Error(ErrorClass::kDomain, "tolerance_agreement: t must be >= 0");
  AgreementEstimate e;
  e.metric = Metric::kTolerance;
  e.n_units = x.size();
  e.diagnostics["t"] = t;
  std::size_t within = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int v : {x[i], y[i]}) {
      if (v < 1 || v > 5) {
        throw Error(ErrorClass::kDomain,
                    "tolerance_agreement: score " + std::to_string(v) + " outside 1-5");
      }
    }
    if (std::abs(x[i] - y[i]) <= t) ++within;
  }
  e.value = static_cast<double>(within) / static_cast<double>(x.size());
  return e;
}

AgreementEstimate tolerance_agreement(const RatingTable& ratings, int t) {
  const std::size_t k = check_rectangular(ratings, 2, "tolerance_agreement");
  if (t < 0) throw Error(ErrorClass::kDomain, "tolerance_agreement: t must be >= 0");
  AgreementEstimate e;
  e.metric = Metric::kTolerance;
  e.n_units = ratings.size();
  e.diagnostics["t"] = t;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      std::vector<int> x, y;
      for (const auto& row : ratings) {
        if (row[a] && row[b]) {
          x.push_back(*row[a]);
          y.push_back(*row[b]);
        }
      }
      if (x.empty()) continue;
      sum += *tolerance_agreement(x, y, t).value;
      ++pairs;
    }
  }
  e.diagnostics["pairs"] = static_cast<double>(pairs);
  if (pairs == 0) return undefined(std::move(e), "no co-rated units");
  e.value = sum / static_cast<double>(pairs);
  return e;
}

AgreementEstimate unanimity_rate(const RatingTable& ratings) {
  check_rectangular(ratings, 1, "unanimity_rate");
  require_complete(ratings, "unanimity_rate");
  AgreementEstimate e;
  e.metric = Metric::kUnanimity;
  e.n_units = ratings.size();
  std::size_t unanimous = 0;
  for (const auto& row : ratings) {
    if (std::all_of(row.begin(), row.end(), [&](const auto& c) { return *c == *row.front(); })) {
      ++unanimous;
    }
  }
  e.value = static_cast<double>(unanimous) / static_cast<double>(ratings.size());
  return e;
}

std::vector<RaterSummary> rater_summaries(const RatingTable& ratings,
                                          const std::vector<std::string>& rater_ids) {
  std::vector<RaterSummary> out;
  for (std::size_t j = 0; j < rater_ids.size(); ++j) {
    RaterSummary s;
    s.rater_id = rater_ids[j];
    std::vector<double> v;
    for (const auto& row : ratings) {
      if (j < row.size() && row[j]) v.push_back(*row[j]);
    }
    s.n = v.size();
    if (!v.empty()) {
      double m = mean_of(v);
      s.mean = m;
      if (v.size() >= 2) {
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fmeca
