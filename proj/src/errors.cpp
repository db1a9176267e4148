// Copyright 2026 The Fidelity Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fidelity_forge/errors.hpp"

namespace ff {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::SingularOverlap: return "SingularOverlap";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::InvalidQubitIndex: return "InvalidQubitIndex";
    case ErrorCode::WrongParameterCount: return "WrongParameterCount";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::InvalidProbabilities: return "InvalidProbabilities";
    case ErrorCode::ShotsNotDivisible: return "ShotsNotDivisible";
    case ErrorCode::IllConditionedKernel: return "IllConditionedKernel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidFixture: return "InvalidFixture";
  }
  return "Unknown";
}

}  // namespace ff
