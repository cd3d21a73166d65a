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

#ifndef FMECA_TAXONOMY_H_
#define FMECA_TAXONOMY_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fmeca {

struct Category {
  std::string id;
  std::string label;
};

// `implicit` marks a subcategory that exists only to keep the hierarchy
// three levels deep; it carries its category's label.
struct Subcategory {
  std::string id;
  std::string label;
  std::string category_id;
  bool implicit = false;
};

struct FailureMode {
  std::string id;
  std::string label;
  std::string description;
  std::vector<std::string> illustrative_examples;
  std::string subcategory_id;
};

// A frozen failure-mode catalog. Collections keep their declared order,
// which is the order used for matrix rows and report tables.
struct Taxonomy {
  int version = 0;
  std::string provenance;
  std::vector<Category> categories;
  std::vector<Subcategory> subcategories;
  std::vector<FailureMode> failure_modes;

  const Category* find_category(std::string_view id) const;
  const Subcategory* find_subcategory(std::string_view id) const;
  const FailureMode* find_failure_mode(std::string_view id) const;

  // Failure modes of `subcategory_id` in declared order.
  std::vector<const FailureMode*> modes_of(std::string_view subcategory_id) const;
  std::vector<std::string> failure_mode_ids() const;
};

struct Violation {
  std::string node_id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t failure_mode_count = 0;
  std::size_t subcategory_count = 0;
  std::size_t category_count = 0;

  bool ok() const { return violations.empty(); }
};

// Every structural problem in `t`; violations are data, never thrown.
ValidationReport validate_taxonomy(const Taxonomy& t);

// Shipped datasets: versions 1 and 3. Throws kNotFound for anything else.
Taxonomy default_taxonomy(int version);
std::vector<int> shipped_taxonomy_versions();

// Failure-mode flags keyed by failure-mode id.
using FlagMap = std::map<std::string, bool>;

struct MergeMap {
  int from_version = 0;
  int to_version = 0;
  std::map<std::string, std::string> mapping;  // source id -> target id
  std::vector<std::string> inferred;           // source ids with inferred targets
  std::string note;

  // Source ids mapping onto `target_id`.
  std::vector<std::string> sources_of(std::string_view target_id) const;
};

// Shipped v1 -> v3 consolidation map.
MergeMap default_merge_map();

MergeMap identity_merge_map(const Taxonomy& t);

// `second` applied after `first`. Throws kMapping when a target of `first`
// is not a source of `second`.
MergeMap compose(const MergeMap& first, const MergeMap& second);

// Checks totality over `from` and that every target exists in `to`.
std::vector<Violation> validate_merge_map(const MergeMap& m, const Taxonomy& from,
                                          const Taxonomy& to);

// Re-expresses flags in the target version. A target is set when any of its
// sources present in `flags` is set; only targets reached from keys of
// `flags` appear in the result. Unknown source ids throw kMapping.
FlagMap migrate_flags(const FlagMap& flags, const MergeMap& m);

// Throws kNotFound for an unknown failure-mode id.
const Subcategory& subcategory_of(std::string_view failure_mode_id, const Taxonomy& t);
const Category& category_of(std::string_view failure_mode_id, const Taxonomy& t);

// Structured-text (JSON) forms, schema in docs/file_formats.md.
Taxonomy parse_taxonomy(std::string_view text);
std::string serialize_taxonomy(const Taxonomy& t);
Taxonomy load_taxonomy_file(const std::string& path);
MergeMap parse_merge_map(std::string_view text);
std::string serialize_merge_map(const MergeMap& m);
MergeMap load_merge_map_file(const std::string& path);

}  // namespace fmeca

#endif  // FMECA_TAXONOMY_H_
