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

#include "fmeca/error.h"

namespace fmeca {

std::string_view error_class_name(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::kDomain: return "domain";
    case ErrorClass::kNotFound: return "not_found";
    case ErrorClass::kMapping: return "mapping";
    case ErrorClass::kValidation: return "validation";
    case ErrorClass::kWorkflow: return "workflow";
    case ErrorClass::kConflict: return "conflict";
    case ErrorClass::kCompleteness: return "completeness";
    case ErrorClass::kParse: return "parse";
    case ErrorClass::kSchema: return "schema";
    case ErrorClass::kReferential: return "referential";
    case ErrorClass::kVersion: return "version";
    case ErrorClass::kIntegrity: return "integrity";
    case ErrorClass::kIo: return "io";
    case ErrorClass::kLocked: return "locked";
    case ErrorClass::kUnauthenticated: return "unauthenticated";
    case ErrorClass::kForbidden: return "forbidden";
  }
  return "unknown";
}

int exit_code_for(ErrorClass cls) {
  return 10 + static_cast<int>(cls);
}

}  // namespace fmeca
