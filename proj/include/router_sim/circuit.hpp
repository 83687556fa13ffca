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

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "router_sim/elements.hpp"
#include "router_sim/fock_state.hpp"

namespace router_sim {

/// One photon created by sum_k weight_k a_k^dagger (normalized on injection).
struct Source {
    std::vector<std::pair<std::string, Complex>> weights;
};

struct PatternPostselection {
    PhotonPattern pattern;
};

/// Projection of the listed modes onto a one-photon superposition.
struct StatePostselection {
    std::vector<std::pair<std::string, Complex>> weights;
};

using Postselection = std::variant<PatternPostselection, StatePostselection>;

struct Detector {
    std::string name;
    PhotonPattern pattern;
};

/// Ordered element schedule over a declared mode set, with photon sources,
/// post-selections (applied jointly) and named detector outcomes.
struct Circuit {
    std::vector<ModeLabel> modes;
    std::vector<Source> sources;
    std::vector<Element> schedule;
    std::vector<Postselection> postselections;
    std::vector<Detector> detectors;
    int max_photons = kDefaultMaxPhotons;

    const ModeLabel &mode_named(const std::string &name) const {
        for (const auto &m : modes) {
            if (m.name == name) return m;
        }
        throw Error(ErrorCode::UnknownMode, name);
    }
};

inline FockState initial_state(const Circuit &c) {
    FockState s = register_modes(c.modes, c.max_photons);
    for (const auto &src : c.sources) s = inject_superposition(s, src.weights);
    return s;
}

/// Normalized one-photon state over the named modes of `state`, as a FockState
/// on just those modes.
inline FockState single_photon_state(const FockState &state, const std::vector<std::pair<std::string, Complex>> &weights) {
    std::vector<ModeLabel> sub;
    for (const auto &[name, w] : weights) {
        ModeLabel m = state.mode_named(name);
        if (std::find(sub.begin(), sub.end(), m) != sub.end()) throw Error(ErrorCode::DuplicateMode, name);
        sub.push_back(std::move(m));
    }
    FockState vac = register_modes(sub, 1);
    return inject_superposition(vac, weights);
}

inline ProjectionOutcome apply_postselection(const FockState &state, const Postselection &post) {
    if (const auto *p = std::get_if<PatternPostselection>(&post)) return project_pattern(state, p->pattern);
    const auto &sp = std::get<StatePostselection>(post);
    return project_subsystem(state, single_photon_state(state, sp.weights));
}

struct SimulationResult {
    FockState final_state;       // after the whole schedule, before post-selection
    FockState conditioned_state; // renormalized after every post-selection
    double postselection_probability = 0.0;
    std::vector<std::pair<std::string, double>> detector_probabilities;  // conditional on post-selection
};

inline SimulationResult simulate(const Circuit &c) {
    SimulationResult r;
    r.final_state = apply_sequence(c.schedule, initial_state(c));
    r.conditioned_state = r.final_state;
    r.postselection_probability = 1.0;
    for (const auto &post : c.postselections) {
        auto outcome = apply_postselection(r.conditioned_state, post);
        r.postselection_probability *= outcome.probability;
        r.conditioned_state = outcome.state;
    }
    for (const auto &d : c.detectors) {
        double p = r.conditioned_state.is_zero() ? 0.0 : project_pattern(r.conditioned_state, d.pattern).probability;
        r.detector_probabilities.emplace_back(d.name, p);
    }
    return r;
}

}  // namespace router_sim
