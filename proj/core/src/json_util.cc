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

#include "json_util.h"

#include <algorithm>

namespace fmeca::detail {

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorClass::kParse, std::string(source) + ": " + e.what());
  }
}

std::string dump_json(const Json& j) {
  return j.dump(2, ' ', false, Json::error_handler_t::strict) + "\n";
}

void expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) {
    throw Error(ErrorClass::kSchema, (path.empty() ? "/" : path) + ": expected object");
  }
}

void expect_array(const Json& j, const std::string& path) {
  if (!j.is_array()) {
    throw Error(ErrorClass::kSchema, (path.empty() ? "/" : path) + ": expected array");
  }
}

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path) {
  expect_object(obj, path);
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorClass::kSchema, child(path, key) + ": unknown field");
    }
  }
}

const Json& field(const Json& obj, std::string_view key, const std::string& path) {
  expect_object(obj, path);
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    throw Error(ErrorClass::kSchema, child(path, key) + ": missing field");
  }
  return *it;
}

std::string string_field(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_string()) {
    throw Error(ErrorClass::kSchema, child(path, key) + ": expected string");
  }
  return v.get<std::string>();
}

long long int_field(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number_integer()) {
    throw Error(ErrorClass::kSchema, child(path, key) + ": expected integer");
  }
  return v.get<long long>();
}

bool bool_field(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_boolean()) {
    throw Error(ErrorClass::kSchema, child(path, key) + ": expected boolean");
  }
  return v.get<bool>();
}

}  // namespace fmeca::detail
