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

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "router_sim/elements.hpp"
#include "router_sim/fock_state.hpp"

namespace router_sim {

// Pre/post-selection analysis on the single-shutter-photon subspace.

/// A named instant at a segment boundary (0 = before the first segment).
struct Checkpoint {
    std::string name;
    std::size_t boundary = 0;
};

struct TwoStateSpec {
    FockState pre;   // at the start of the first segment
    FockState post;  // at the end of the last segment
    std::vector<std::vector<Element>> segments;
    std::vector<Checkpoint> checkpoints;
};

struct ProjectorSpec {
    Box box = Box::A;
    std::string time;

    bool operator==(const ProjectorSpec &) const = default;
};

namespace detail {

inline constexpr double kConditioningFloor = 1e-12;

inline std::size_t boundary_of(const TwoStateSpec &spec, const std::string &name) {
    for (const auto &c : spec.checkpoints) {
        if (c.name == name) {
            if (c.boundary > spec.segments.size()) throw Error(ErrorCode::BadParam, "checkpoint past the last segment");
            return c.boundary;
        }
    }
    throw Error(ErrorCode::BadParam, "unknown checkpoint " + name);
}

inline const ModeLabel &box_mode(const FockState &s, Box box) {
    const ModeLabel *found = nullptr;
    for (const auto &m : s.modes()) {
        if (m.box != box) continue;
        if (found) throw Error(ErrorCode::BadParam, "box " + to_string(box) + " maps to several modes");
        found = &m;
    }
    if (!found) throw Error(ErrorCode::UnknownMode, "no mode for box " + to_string(box));
    return *found;
}

inline FockState evolve(const TwoStateSpec &spec, std::size_t from, std::size_t to, FockState s) {
    for (std::size_t k = from; k < to; ++k) s = apply_sequence(spec.segments[k], s);
    return s;
}

/// Pi_box (one photon in the box's mode) without renormalization.
inline FockState apply_box_projector(const FockState &s, Box box, bool complement) {
    const std::size_t i = s.require_index(box_mode(s, box).name);
    FockState::AmplitudeMap kept;
    for (const auto &[cfg, a] : s.amplitudes()) {
        if ((cfg[i] == 1) != complement) kept[cfg] = a;
    }
    return s.with_amplitudes(std::move(kept));
}

inline void validate(const TwoStateSpec &spec) {
    if (!spec.pre.same_modes(spec.post)) throw Error(ErrorCode::ModeMismatch, "pre and post use different modes");
    if (!spec.pre.is_normalized() || !spec.post.is_normalized()) {
        throw Error(ErrorCode::BadParam, "pre- and post-selected states must be normalized");
    }
}

/// <post| U(tf,t) X U(t,0) |pre> with X = Pi, 1 - Pi, or the identity.
inline Complex transition_amplitude(const TwoStateSpec &spec, const std::optional<ProjectorSpec> &proj,
                                    bool complement) {
    validate(spec);
    if (!proj) return inner_product(spec.post, evolve(spec, 0, spec.segments.size(), spec.pre));
    const std::size_t t = boundary_of(spec, proj->time);
    FockState mid = apply_box_projector(evolve(spec, 0, t, spec.pre), proj->box, complement);
    return inner_product(spec.post, evolve(spec, t, spec.segments.size(), mid));
}

}  // namespace detail

/// <post|U(tf,0)|pre>.
inline Complex two_state_overlap(const TwoStateSpec &spec) {
    return detail::transition_amplitude(spec, std::nullopt, false);
}

/// Probability of the Pi = 1 outcome of the dichotomic measurement {Pi, 1 - Pi}
/// at the checkpoint, given both the pre- and the post-selection.
inline double abl_probability(const TwoStateSpec &spec, const ProjectorSpec &proj) {
    if (std::abs(two_state_overlap(spec)) < detail::kConditioningFloor) {
        throw Error(ErrorCode::UndefinedConditioning, "pre- and post-selected states are orthogonal");
    }
    const double yes = std::norm(detail::transition_amplitude(spec, proj, false));
    const double no = std::norm(detail::transition_amplitude(spec, proj, true));
    if (yes + no < detail::kConditioningFloor * detail::kConditioningFloor) {
        throw Error(ErrorCode::UndefinedConditioning, "both measurement outcomes are incompatible with the post-selection");
    }
    return yes / (yes + no);
}

inline Complex weak_value(const TwoStateSpec &spec, const ProjectorSpec &proj) {
    const Complex overlap = two_state_overlap(spec);
    if (std::abs(overlap) < detail::kConditioningFloor) {
        throw Error(ErrorCode::UndefinedConditioning, "weak value denominator vanishes");
    }
    return detail::transition_amplitude(spec, proj, false) / overlap;
}

/// ||Pi U(t,0)|pre>||^2, the unconditioned Born probability.
inline double born_probability(const TwoStateSpec &spec, const ProjectorSpec &proj) {
    detail::validate(spec);
    const std::size_t t = detail::boundary_of(spec, proj.time);
    return detail::apply_box_projector(detail::evolve(spec, 0, t, spec.pre), proj.box, false).norm_squared();
}

/// Probability of the post-selection; with `given`, conditioned on the Pi = 1
/// outcome of an intermediate measurement.
inline double postselection_success(const TwoStateSpec &spec, const std::optional<ProjectorSpec> &given = std::nullopt) {
    if (!given) return std::norm(two_state_overlap(spec));
    const double p_given = born_probability(spec, *given);
    if (p_given < detail::kConditioningFloor * detail::kConditioningFloor) {
        throw Error(ErrorCode::UndefinedConditioning, "intermediate outcome has zero probability");
    }
    return std::norm(detail::transition_amplitude(spec, *given, false)) / p_given;
}

/// Shutter modes A, B, C used by the analytic specs.
inline std::vector<ModeLabel> shutter_box_modes() {
    return {mode("S_A", Box::A, TimeSlot::None, Role::Shutter), mode("S_B", Box::B, TimeSlot::None, Role::Shutter),
            mode("S_C", Box::C, TimeSlot::None, Role::Shutter)};
}

/// One shutter photon over S_A, S_B, S_C with the given (unnormalized) weights.
inline FockState shutter_state(Complex a, Complex b, Complex c) {
    const FockState vac = register_modes(shutter_box_modes(), 1);
    const std::pair<std::string, Complex> w[] = {{"S_A", a}, {"S_B", b}, {"S_C", c}};
    return inject_superposition(vac, w);
}

inline double three_box_retrodiction(const FockState &pre, const FockState &post, Box box) {
    if (box != Box::A && box != Box::B) throw Error(ErrorCode::BadParam, "retrodiction is asked for box A or B");
    TwoStateSpec spec{pre, post, {}, {{"t", 0}}};
    return abl_probability(spec, {box, "t"});
}

/// Where the post-selected state is imposed in the disappearing-particle spec.
enum class PostselectionFrame {
    Final,     // (-A + iB + C)/sqrt3 after the full evolution to tf
    AtLastCheckpoint,  // (-A - iB + C)/sqrt3 right after t3; the t3 -> tf evolution is absorbed
};

/// Disappearing/reappearing shutter: pre (A + iB + C)/sqrt3 at t1 = 0, A<->B
/// tunneling with t2 at theta = pi/4 and t3 at theta = pi/2 (epsilon = 1).
inline TwoStateSpec disappearing_particle_spec(PostselectionFrame frame = PostselectionFrame::Final) {
    constexpr double pi = std::numbers::pi;
    const Complex i{0.0, 1.0};
    const auto modes = shutter_box_modes();
    TwoStateSpec spec;
    spec.pre = shutter_state(1.0, i, 1.0);
    spec.segments = {{tunneling(pi / 4, modes[0], modes[1])}, {tunneling(pi / 4, modes[0], modes[1])}};
    if (frame == PostselectionFrame::Final) {
        spec.segments.push_back({tunneling(pi / 2, modes[0], modes[1])});
        spec.post = shutter_state(-1.0, i, 1.0);
    } else {
        spec.post = shutter_state(-1.0, -i, 1.0);
    }
    spec.checkpoints = {{"t1", 0}, {"t2", 1}, {"t3", 2}};
    return spec;
}

/// Static three-box pair: pre (A + B + C)/sqrt3, post (A + B - C)/sqrt3.
inline TwoStateSpec three_box_spec() {
    return {shutter_state(1.0, 1.0, 1.0), shutter_state(1.0, 1.0, -1.0), {}, {{"t", 0}}};
}

}  // namespace router_sim
