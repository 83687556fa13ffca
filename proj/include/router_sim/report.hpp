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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "router_sim/circuit.hpp"
#include "router_sim/scenarios.hpp"

namespace router_sim {

// Serialization of scenario and circuit results. Numbers carry at most 12
// significant digits and magnitudes below kReportZero print as 0, so equal
// inputs give byte-identical output.

inline constexpr int kReportDigits = 12;
inline constexpr double kReportZero = 1e-14;

inline double report_round(double x) {
    if (!std::isfinite(x)) return x;
    if (std::abs(x) < kReportZero) return 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", kReportDigits, x);
    return std::strtod(buf, nullptr);
}

inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", kReportDigits, report_round(x));
    return buf;
}

using Json = nlohmann::ordered_json;

inline Json to_json(const ScenarioResult &r) {
    Json j;
    j["name"] = r.name;
    Json params = Json::object();
    for (const auto &[k, v] : r.parameters) params[k] = report_round(v);
    j["parameters"] = params;
    Json outcomes = Json::array();
    for (const auto &[label, p] : r.outcomes) outcomes.push_back({{"label", label}, {"probability", report_round(p)}});
    j["outcomes"] = outcomes;
    j["conditioned_fidelity"] = r.fidelity_to_target ? Json(report_round(*r.fidelity_to_target)) : Json(nullptr);
    Json weak = Json::array();
    for (const auto &[proj, w] : r.weak_values) {
        weak.push_back({{"box", to_string(proj.box)},
                        {"time", proj.time},
                        {"re", report_round(w.real())},
                        {"im", report_round(w.imag())}});
    }
    j["weak_values"] = weak;
    Json abl = Json::array();
    for (const auto &[proj, p] : r.abl_values) {
        abl.push_back({{"box", to_string(proj.box)}, {"time", proj.time}, {"p", report_round(p)}});
    }
    j["abl"] = abl;
    Json schmidt = Json::array();
    if (r.schmidt_spectrum) {
        for (double v : *r.schmidt_spectrum) schmidt.push_back(report_round(v));
    }
    j["schmidt"] = schmidt;
    return j;
}

/// Result of a plain circuit in the scenario shape: the joint post-selection
/// probability and every detector conditioned on it.
inline ScenarioResult circuit_result(std::string name, const Circuit &c) {
    const SimulationResult sim = simulate(c);
    ScenarioResult r;
    r.name = std::move(name);
    r.outcomes.emplace_back("post", sim.postselection_probability);
    for (const auto &[label, p] : sim.detector_probabilities) r.outcomes.emplace_back(label + "|post", p);
    return r;
}

namespace detail {

inline void dump_fixed(const Json &j, int depth, std::ostringstream &out) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_object() || j.is_array()) {
        const bool obj = j.is_object();
        if (j.empty()) {
            out << (obj ? "{}" : "[]");
            return;
        }
        out << (obj ? "{\n" : "[\n");
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out << ",\n";
            first = false;
            out << pad;
            if (obj) out << Json(it.key()).dump() << ": ";
            dump_fixed(*it, depth + 1, out);
        }
        out << "\n" << close << (obj ? "}" : "]");
    } else if (j.is_number_float()) {
        out << format_number(j.get<double>());
    } else {
        out << j.dump();
    }
}

}  // namespace detail

/// Indented JSON whose numbers print with at most kReportDigits significant digits.
inline std::string dump_json(const Json &j) {
    std::ostringstream out;
    detail::dump_fixed(j, 0, out);
    out << "\n";
    return out.str();
}

inline std::string render_json(const ScenarioResult &r) {
    return dump_json(to_json(r));
}

/// One row per outcome.
inline std::string render_csv(const ScenarioResult &r) {
    std::ostringstream out;
    out << "label,probability\n";
    for (const auto &[label, p] : r.outcomes) out << label << "," << format_number(p) << "\n";
    return out.str();
}

/// One record per grid point.
inline std::string render_sweep_json(const std::vector<ScenarioResult> &rs) {
    Json arr = Json::array();
    for (const auto &r : rs) arr.push_back(to_json(r));
    return dump_json(arr);
}

/// Wide table: one row per grid point; parameter, outcome and Schmidt columns.
inline std::string render_sweep_csv(const std::vector<ScenarioResult> &rs) {
    std::vector<std::string> params, labels;
    std::size_t schmidt = 0;
    auto add = [](std::vector<std::string> &cols, const std::string &c) {
        if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    };
    for (const auto &r : rs) {
        for (const auto &p : r.parameters) add(params, p.first);
        for (const auto &o : r.outcomes) add(labels, o.first);
        if (r.schmidt_spectrum) schmidt = std::max(schmidt, r.schmidt_spectrum->size());
    }
    std::ostringstream out;
    out << "point";
    for (const auto &p : params) out << "," << p;
    for (const auto &l : labels) out << "," << l;
    out << ",conditioned_fidelity";
    for (std::size_t k = 0; k < schmidt; ++k) out << ",schmidt" << k + 1;
    out << "\n";
    auto lookup = [](const std::vector<std::pair<std::string, double>> &kv, const std::string &key) -> std::string {
        for (const auto &[k, v] : kv) {
            if (k == key) return format_number(v);
        }
        return "";
    };
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto &r = rs[i];
        out << i;
        for (const auto &p : params) out << "," << lookup(r.parameters, p);
        for (const auto &l : labels) out << "," << lookup(r.outcomes, l);
        out << "," << (r.fidelity_to_target ? format_number(*r.fidelity_to_target) : "");
        for (std::size_t k = 0; k < schmidt; ++k) {
            out << ",";
            if (r.schmidt_spectrum && k < r.schmidt_spectrum->size()) out << format_number((*r.schmidt_spectrum)[k]);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace router_sim
