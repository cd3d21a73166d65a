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

#ifndef FMECA_ERROR_H_
#define FMECA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fmeca {

// Machine-readable error classes. The CLI prints the class name and maps
// each class to a distinct exit code; the HTTP service maps them to status
// codes.
enum class ErrorClass {
  kDomain,
  kNotFound,
  kMapping,
  kValidation,
  kWorkflow,
  kConflict,
  kCompleteness,
  kParse,
  kSchema,
  kReferential,
  kVersion,
  kIntegrity,
  kIo,
  kLocked,
  kUnauthenticated,
  kForbidden,
};

std::string_view error_class_name(ErrorClass cls);

// Process exit code used by the CLI for `cls`. Never 0.
int exit_code_for(ErrorClass cls);

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& message)
      : std::runtime_error(message), class_(cls) {}

  ErrorClass error_class() const { return class_; }

 private:
  ErrorClass class_;
};

}  // namespace fmeca

#endif  // FMECA_ERROR_H_
