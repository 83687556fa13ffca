// Copyright 2026 The router_sim Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace router_sim {

enum class ErrorCode {
    DuplicateMode,
    UnknownMode,
    PhotonBudget,
    NotUnitary,
    NotPhase,
    ModeMismatch,
    BadPartition,
    BadParam,
    UnsupportedSector,
    UndefinedConditioning,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateMode: return "DuplicateMode";
        case ErrorCode::UnknownMode: return "UnknownMode";
        case ErrorCode::PhotonBudget: return "PhotonBudget";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::NotPhase: return "NotPhase";
        case ErrorCode::ModeMismatch: return "ModeMismatch";
        case ErrorCode::BadPartition: return "BadPartition";
        case ErrorCode::BadParam: return "BadParam";
        case ErrorCode::UnsupportedSector: return "UnsupportedSector";
        case ErrorCode::UndefinedConditioning: return "UndefinedConditioning";
    }
    return "Unknown";
}

/// Raised by every simulator operation on a contract violation.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {
    }

    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace router_sim
