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

#ifndef FMECA_SRC_FILE_UTIL_H_
#define FMECA_SRC_FILE_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace fmeca::detail {

// Whole-file read as raw bytes. Throws kIo.
std::string read_file(const std::filesystem::path& path);

// Writes via a temporary sibling, fsyncs it, renames over `path` and fsyncs
// the directory.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Appends and fsyncs before returning.
void append_durable(const std::filesystem::path& path, std::string_view bytes);

void truncate_file(const std::filesystem::path& path, std::uintmax_t size);

}  // namespace fmeca::detail

#endif  // FMECA_SRC_FILE_UTIL_H_
