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

#include "fmeca/taxonomy.h"

#include <algorithm>
#include <set>

#include "embedded_data.h"
#include "file_util.h"
#include "fmeca/error.h"
#include "json_util.h"

namespace fmeca {

using detail::Json;

namespace {

template <typename Node>
const Node* find_by_id(const std::vector<Node>& nodes, std::string_view id) {
  auto it = std::find_if(nodes.begin(), nodes.end(),
                         [&](const Node& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

template <typename Node>
void check_ids(const std::vector<Node>& nodes, std::string_view kind,
               std::vector<Violation>& out) {
  std::set<std::string> seen;
  for (const auto& n : nodes) {
    if (n.id.empty()) {
      out.push_back({n.id, std::string(kind) + " with empty id"});
    } else if (!seen.insert(n.id).second) {
      out.push_back({n.id, "duplicate " + std::string(kind) + " id"});
    }
    if (n.label.empty()) {
      out.push_back({n.id, std::string(kind) + " with empty label"});
    }
  }
}

}  // namespace

const Category* Taxonomy::find_category(std::string_view id) const {
  return find_by_id(categories, id);
}

const Subcategory* Taxonomy::find_subcategory(std::string_view id) const {
  return find_by_id(subcategories, id);
}

const FailureMode* Taxonomy::find_failure_mode(std::string_view id) const {
  return find_by_id(failure_modes, id);
}

std::vector<const FailureMode*> Taxonomy::modes_of(std::string_view subcategory_id) const {
  std::vector<const FailureMode*> out;
  for (const auto& fm : failure_modes) {
    if (fm.subcategory_id == subcategory_id) out.push_back(&fm);
  }
  return out;
}

std::vector<std::string> Taxonomy::failure_mode_ids() const {
  std::vector<std::string> ids;
  ids.reserve(failure_modes.size());
  for (const auto& fm : failure_modes) ids.push_back(fm.id);
  return ids;
}

ValidationReport validate_taxonomy(const Taxonomy& t) {
  ValidationReport report;
  report.failure_mode_count = t.failure_modes.size();
  report.subcategory_count = t.subcategories.size();
  report.category_count = t.categories.size();
  auto& v = report.violations;

  if (t.version < 1) {
    v.push_back({"", "taxonomy version must be >= 1"});
  }
  if (t.failure_modes.empty()) {
    v.push_back({"", "no failure modes"});
  }
  check_ids(t.categories, "category", v);
  check_ids(t.subcategories, "subcategory", v);
  check_ids(t.failure_modes, "failure mode", v);

  for (const auto& sc : t.subcategories) {
    if (t.find_category(sc.category_id) == nullptr) {
      v.push_back({sc.id, "orphan subcategory"});
    } else if (t.modes_of(sc.id).empty()) {
      v.push_back({sc.id, "subcategory without failure modes"});
    }
  }
  for (const auto& c : t.categories) {
    bool has_child = std::any_of(t.subcategories.begin(), t.subcategories.end(),
                                 [&](const Subcategory& sc) { return sc.category_id == c.id; });
    if (!has_child) v.push_back({c.id, "category without subcategories"});
  }
  for (const auto& fm : t.failure_modes) {
    if (t.find_subcategory(fm.subcategory_id) == nullptr) {
      v.push_back({fm.id, "orphan failure mode"});
    }
  }
  return report;
}

Taxonomy default_taxonomy(int version) {
  switch (version) {
    case 1: return parse_taxonomy(detail::embedded_taxonomy_v1());
    case 3: return parse_taxonomy(detail::embedded_taxonomy_v3());
    default:
      throw Error(ErrorClass::kNotFound, "taxonomy version " + std::to_string(version) +
                                             " is not shipped; available versions: 1, 3");
  }
}

std::vector<int> shipped_taxonomy_versions() { return {1, 3}; }

std::vector<std::string> MergeMap::sources_of(std::string_view target_id) const {
  std::vector<std::string> out;
  for (const auto& [src, dst] : mapping) {
    if (dst == target_id) out.push_back(src);
  }
  return out;
}

MergeMap default_merge_map() { return parse_merge_map(detail::embedded_merge_v1_v3()); }

MergeMap identity_merge_map(const Taxonomy& t) {
  MergeMap m;
  m.from_version = t.version;
  m.to_version = t.version;
  for (const auto& fm : t.failure_modes) m.mapping[fm.id] = fm.id;
  return m;
}

MergeMap compose(const MergeMap& first, const MergeMap& second) {
  if (first.to_version != second.from_version) {
    throw Error(ErrorClass::kMapping, "cannot compose v" + std::to_string(first.from_version) +
                                          "->v" + std::to_string(first.to_version) + " with v" +
                                          std::to_string(second.from_version) + "->v" +
                                          std::to_string(second.to_version));
  }
  MergeMap out;
  out.from_version = first.from_version;
  out.to_version = second.to_version;
  for (const auto& [src, mid] : first.mapping) {
    auto it = second.mapping.find(mid);
    if (it == second.mapping.end()) {
      throw Error(ErrorClass::kMapping, "intermediate id '" + mid + "' has no mapping");
    }
    out.mapping[src] = it->second;
  }
  out.inferred = first.inferred;
  for (const auto& id : second.inferred) {
    for (const auto& src : first.mapping) {
      if (src.second == id) out.inferred.push_back(src.first);
    }
  }
  std::sort(out.inferred.begin(), out.inferred.end());
  out.inferred.erase(std::unique(out.inferred.begin(), out.inferred.end()), out.inferred.end());
  return out;
}

std::vector<Violation> validate_merge_map(const MergeMap& m, const Taxonomy& from,
                                          const Taxonomy& to) {
  std::vector<Violation> v;
  if (m.from_version != from.version || m.to_version != to.version) {
    v.push_back({"", "merge map versions do not match the supplied taxonomies"});
  }
  for (const auto& fm : from.failure_modes) {
    if (!m.mapping.contains(fm.id)) v.push_back({fm.id, "source failure mode not mapped"});
  }
  for (const auto& [src, dst] : m.mapping) {
    if (from.find_failure_mode(src) == nullptr) {
      v.push_back({src, "mapped id absent from source taxonomy"});
    }
    if (to.find_failure_mode(dst) == nullptr) {
      v.push_back({dst, "target id absent from target taxonomy"});
    }
  }
  return v;
}

FlagMap migrate_flags(const FlagMap& flags, const MergeMap& m) {
  FlagMap out;
  for (const auto& [src, value] : flags) {
    auto it = m.mapping.find(src);
    if (it == m.mapping.end()) {
      throw Error(ErrorClass::kMapping, "failure mode '" + src + "' is not in the v" +
                                            std::to_string(m.from_version) + " merge map");
    }
    out[it->second] = out[it->second] || value;
  }
  return out;
}

const Subcategory& subcategory_of(std::string_view failure_mode_id, const Taxonomy& t) {
  const FailureMode* fm = t.find_failure_mode(failure_mode_id);
  if (fm == nullptr) {
    throw Error(ErrorClass::kNotFound, "unknown failure mode '" + std::string(failure_mode_id) +
                                           "' in taxonomy v" + std::to_string(t.version));
  }
  const Subcategory* sc = t.find_subcategory(fm->subcategory_id);
  if (sc == nullptr) {
    throw Error(ErrorClass::kNotFound, "failure mode '" + fm->id + "' has no subcategory");
  }
  return *sc;
}

const Category& category_of(std::string_view failure_mode_id, const Taxonomy& t) {
  const Subcategory& sc = subcategory_of(failure_mode_id, t);
  const Category* c = t.find_category(sc.category_id);
  if (c == nullptr) {
    throw Error(ErrorClass::kNotFound, "subcategory '" + sc.id + "' has no category");
  }
  return *c;
}

Taxonomy parse_taxonomy(std::string_view text) {
  using namespace detail;
  Json j = parse_json(text, "taxonomy");
  reject_unknown_keys(j, {"schema", "version", "provenance", "categories", "subcategories",
                          "failure_modes"},
                      "");
  if (string_field(j, "schema", "") != "fmeca.taxonomy") {
    throw Error(ErrorClass::kSchema, "/schema: expected \"fmeca.taxonomy\"");
  }
  Taxonomy t;
  t.version = static_cast<int>(int_field(j, "version", ""));
  t.provenance = string_field(j, "provenance", "");

  const Json& cats = field(j, "categories", "");
  expect_array(cats, "/categories");
  for (std::size_t i = 0; i < cats.size(); ++i) {
    std::string p = child("/categories", i);
    reject_unknown_keys(cats[i], {"id", "label"}, p);
    t.categories.push_back({string_field(cats[i], "id", p), string_field(cats[i], "label", p)});
  }
  const Json& subs = field(j, "subcategories", "");
  expect_array(subs, "/subcategories");
  for (std::size_t i = 0; i < subs.size(); ++i) {
    std::string p = child("/subcategories", i);
    reject_unknown_keys(subs[i], {"id", "label", "category_id", "implicit"}, p);
    Subcategory sc{string_field(subs[i], "id", p), string_field(subs[i], "label", p),
                   string_field(subs[i], "category_id", p), false};
    if (subs[i].contains("implicit")) sc.implicit = bool_field(subs[i], "implicit", p);
    t.subcategories.push_back(std::move(sc));
  }
  const Json& modes = field(j, "failure_modes", "");
  expect_array(modes, "/failure_modes");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    std::string p = child("/failure_modes", i);
    const Json& m = modes[i];
    reject_unknown_keys(m, {"id", "label", "description", "illustrative_examples",
                            "subcategory_id"},
                        p);
    FailureMode fm;
    fm.id = string_field(m, "id", p);
    fm.label = string_field(m, "label", p);
    fm.description = m.contains("description") ? string_field(m, "description", p) : "";
    fm.subcategory_id = string_field(m, "subcategory_id", p);
    if (m.contains("illustrative_examples")) {
      const Json& ex = m["illustrative_examples"];
      expect_array(ex, child(p, "illustrative_examples"));
      for (std::size_t k = 0; k < ex.size(); ++k) {
        if (!ex[k].is_string()) {
          throw Error(ErrorClass::kSchema,
                      child(child(p, "illustrative_examples"), k) + ": expected string");
        }
        fm.illustrative_examples.push_back(ex[k].get<std::string>());
      }
    }
    t.failure_modes.push_back(std::move(fm));
  }
  return t;
}

std::string serialize_taxonomy(const Taxonomy& t) {
  Json j;
  j["schema"] = "fmeca.taxonomy";
  j["version"] = t.version;
  j["provenance"] = t.provenance;
  j["categories"] = Json::array();
  for (const auto& c : t.categories) j["categories"].push_back({{"id", c.id}, {"label", c.label}});
  j["subcategories"] = Json::array();
  for (const auto& sc : t.subcategories) {
    j["subcategories"].push_back({{"id", sc.id},
                                  {"label", sc.label},
                                  {"category_id", sc.category_id},
                                  {"implicit", sc.implicit}});
  }
  j["failure_modes"] = Json::array();
  for (const auto& fm : t.failure_modes) {
    j["failure_modes"].push_back({{"id", fm.id},
                                  {"label", fm.label},
                                  {"description", fm.description},
                                  {"illustrative_examples", fm.illustrative_examples},
                                  {"subcategory_id", fm.subcategory_id}});
  }
  return detail::dump_json(j);
}

Taxonomy load_taxonomy_file(const std::string& path) {
  return parse_taxonomy(detail::read_file(path));
}

MergeMap parse_merge_map(std::string_view text) {
  using namespace detail;
  Json j = parse_json(text, "merge map");
  reject_unknown_keys(j, {"schema", "from_version", "to_version", "mapping", "inferred", "note"},
                      "");
  if (string_field(j, "schema", "") != "fmeca.merge_map") {
    throw Error(ErrorClass::kSchema, "/schema: expected \"fmeca.merge_map\"");
  }
  MergeMap m;
  m.from_version = static_cast<int>(int_field(j, "from_version", ""));
  m.to_version = static_cast<int>(int_field(j, "to_version", ""));
  const Json& mapping = field(j, "mapping", "");
  expect_object(mapping, "/mapping");
  for (const auto& [src, dst] : mapping.items()) {
    if (!dst.is_string()) {
      throw Error(ErrorClass::kSchema, child("/mapping", src) + ": expected string");
    }
    m.mapping[src] = dst.get<std::string>();
  }
  if (j.contains("inferred")) {
    expect_array(j["inferred"], "/inferred");
    for (const auto& id : j["inferred"]) m.inferred.push_back(id.get<std::string>());
  }
  if (j.contains("note")) m.note = string_field(j, "note", "");
  return m;
}

std::string serialize_merge_map(const MergeMap& m) {
  Json j;
  j["schema"] = "fmeca.merge_map";
  j["from_version"] = m.from_version;
  j["to_version"] = m.to_version;
  j["mapping"] = m.mapping;
  j["inferred"] = m.inferred;
  j["note"] = m.note;
  return detail::dump_json(j);
}

MergeMap load_merge_map_file(const std::string& path) {
  return parse_merge_map(detail::read_file(path));
}

}  // namespace fmeca
