// Copyright 2026 The NFCLM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nfclm/error.h"

namespace nfclm {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kEmptyInput: return "empty input";
    case ErrorKind::kDuplicateSymbol: return "duplicate symbol";
    case ErrorKind::kUnknownSymbol: return "unknown symbol";
    case ErrorKind::kUntokenizable: return "untokenizable";
    case ErrorKind::kEmptyEntity: return "empty entity";
    case ErrorKind::kUnknownState: return "unknown state";
    case ErrorKind::kMalformedData: return "malformed data";
    case ErrorKind::kVersionMismatch: return "version mismatch";
    case ErrorKind::kInvariantViolation: return "invariant violation";
    case ErrorKind::kMissingComponent: return "missing component";
    case ErrorKind::kMissingEntities: return "missing entities";
    case ErrorKind::kEmptyPattern: return "empty pattern";
    case ErrorKind::kHistoryTooLong: return "history too long";
    case ErrorKind::kDeadHistory: return "dead history";
    case ErrorKind::kIo: return "io";
  }
  return "error";
}

}  // namespace nfclm
