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

#ifndef FMECA_SRC_EMBEDDED_DATA_H_
#define FMECA_SRC_EMBEDDED_DATA_H_

#include <string_view>

// Generated at configure time from core/data/*.json.
namespace fmeca::detail {

std::string_view embedded_taxonomy_v1();
std::string_view embedded_taxonomy_v3();
std::string_view embedded_merge_v1_v3();

}  // namespace fmeca::detail

#endif  // FMECA_SRC_EMBEDDED_DATA_H_
