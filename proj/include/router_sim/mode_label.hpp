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

#include <optional>
#include <string>
#include <string_view>

namespace router_sim {

enum class Box { A, B, C, Aux };
enum class TimeSlot { T1, T2, T3, TF, None };
enum class Role { Shutter, ProbeIn, ProbeR, ProbeT, Detector, Internal };

/// A named optical mode. The name is the identity used by the simulator;
/// box, time slot and role are bookkeeping for scenarios and reports.
struct ModeLabel {
    std::string name;
    Box box = Box::Aux;
    int aux_index = 0;
    TimeSlot time = TimeSlot::None;
    Role role = Role::Internal;

    bool operator==(const ModeLabel &) const = default;
};

inline ModeLabel mode(std::string name, Box box = Box::Aux, TimeSlot time = TimeSlot::None,
                      Role role = Role::Internal, int aux_index = 0) {
    return ModeLabel{std::move(name), box, aux_index, time, role};
}

inline std::string to_string(Box box) {
    switch (box) {
        case Box::A: return "A";
        case Box::B: return "B";
        case Box::C: return "C";
        case Box::Aux: return "aux";
    }
    return "aux";
}

inline std::string to_string(TimeSlot t) {
    switch (t) {
        case TimeSlot::T1: return "t1";
        case TimeSlot::T2: return "t2";
        case TimeSlot::T3: return "t3";
        case TimeSlot::TF: return "tf";
        case TimeSlot::None: return "none";
    }
    return "none";
}

inline std::string to_string(Role r) {
    switch (r) {
        case Role::Shutter: return "shutter";
        case Role::ProbeIn: return "probe_in";
        case Role::ProbeR: return "probe_r";
        case Role::ProbeT: return "probe_t";
        case Role::Detector: return "detector";
        case Role::Internal: return "internal";
    }
    return "internal";
}

inline std::optional<TimeSlot> parse_time_slot(std::string_view s) {
    if (s == "t1") return TimeSlot::T1;
    if (s == "t2") return TimeSlot::T2;
    if (s == "t3") return TimeSlot::T3;
    if (s == "tf") return TimeSlot::TF;
    if (s == "none") return TimeSlot::None;
    return std::nullopt;
}

inline std::optional<Role> parse_role(std::string_view s) {
    if (s == "shutter") return Role::Shutter;
    if (s == "probe_in") return Role::ProbeIn;
    if (s == "probe_r") return Role::ProbeR;
    if (s == "probe_t") return Role::ProbeT;
    if (s == "detector") return Role::Detector;
    if (s == "internal") return Role::Internal;
    return std::nullopt;
}

}  // namespace router_sim
