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

#ifndef FMECA_SRC_JSON_UTIL_H_
#define FMECA_SRC_JSON_UTIL_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "fmeca/error.h"
#include "json.hpp"

namespace fmeca::detail {

using Json = nlohmann::json;

// Parses `text`; syntax errors become kParse naming `source`.
Json parse_json(std::string_view text, std::string_view source);

// Canonical form: sorted keys, two-space indent, trailing newline.
std::string dump_json(const Json& j);

// Schema helpers. Every failure throws kSchema with a JSON-pointer-ish path.
void expect_object(const Json& j, const std::string& path);
void expect_array(const Json& j, const std::string& path);
void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path);
const Json& field(const Json& obj, std::string_view key, const std::string& path);
std::string string_field(const Json& obj, std::string_view key, const std::string& path);
long long int_field(const Json& obj, std::string_view key, const std::string& path);
bool bool_field(const Json& obj, std::string_view key, const std::string& path);

inline std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}
inline std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

}  // namespace fmeca::detail

#endif  // FMECA_SRC_JSON_UTIL_H_
