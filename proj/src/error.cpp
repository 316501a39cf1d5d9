// Copyright 2026 The rankone Authors.
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

#include "rankone/error.hpp"

namespace rankone {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::kBasepointOutside: return "BasepointOutside";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kUnknownCase: return "UnknownCase";
    case ErrorCode::kNodeNotInGraph: return "NodeNotInGraph";
    case ErrorCode::kEmptySourceSet: return "EmptySourceSet";
    case ErrorCode::kInconsistentClass: return "InconsistentClass";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kOrderingViolation: return "OrderingViolation";
    case ErrorCode::kOffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::kDeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::kCannotMeetTolerance: return "CannotMeetTolerance";
    case ErrorCode::kSamplesNotLipschitz: return "SamplesNotLipschitz";
    case ErrorCode::kHypothesisViolated: return "HypothesisViolated";
    case ErrorCode::kNotATree: return "NotATree";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFormat: return "Format";
  }
  return "Unknown";
}

}  // namespace rankone
