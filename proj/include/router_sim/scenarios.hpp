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

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "router_sim/circuit.hpp"
#include "router_sim/elements.hpp"
#include "router_sim/fock_state.hpp"
#include "router_sim/tsvf.hpp"

namespace router_sim {

/// One spatio-temporal probe beam interrogating box `box` at `time`.
struct ProbeBeam {
    Box box = Box::A;
    TimeSlot time = TimeSlot::T1;
    RouterOrientation orientation = RouterOrientation::ReflectOnMatch;
    Complex amplitude = 1.0;
    bool router = true;
};

/// Shutter photon over boxes A, B, C plus a probe photon split into beams, each
/// routed by the shutter's presence and (optionally) re-merged by the exact
/// adjoint of the split network.
struct InterrogationSpec {
    std::string name;
    std::array<Complex, 3> pre{1.0, Complex{0.0, 1.0}, 1.0};
    std::array<Complex, 3> post{-1.0, Complex{0.0, -1.0}, 1.0};  // imposed right after t3
    bool evolving = true;  // A<->B tunneling between t1, t2 and t3
    double theta12 = std::numbers::pi / 4;
    double theta23 = std::numbers::pi / 4;
    std::vector<ProbeBeam> beams;
    std::optional<std::pair<Box, TimeSlot>> parked;  // shutter support withheld from this box and slot
    bool merge = true;
    bool probe_photon = true;
    RouterModel model = RouterModel::Ideal;
};

/// A value the scenario asserts, checked against `tol` by failed_claims.
struct Claim {
    std::string label;
    double value = 0.0;
    double expected = 0.0;
};

/// Circuit plus the bookkeeping needed to read scenario results from it.
struct ScenarioCircuit {
    std::string name;
    InterrogationSpec spec;
    Circuit circuit;
    std::size_t interaction_end = 0;  // schedule prefix length up to the last router
    std::vector<ModeLabel> shutter_modes;
    std::vector<Complex> shutter_post;  // post-selected weights over shutter_modes
    std::vector<ModeLabel> probe_modes;
    std::vector<ModeLabel> kept_modes;     // one per beam
    std::vector<ModeLabel> discard_modes;  // one per beam
    std::string spd2;
    std::optional<FockState> target;  // ideal conditioned probe state over probe_modes
    TwoStateSpec tsvf;
    std::vector<ProjectorSpec> projectors;
    std::vector<std::pair<std::string, double>> parameters;
    bool asserts_unity = false;
};

struct ScenarioResult {
    std::string name;
    std::vector<std::pair<std::string, double>> outcomes;
    std::optional<FockState> conditioned_probe_state;
    std::optional<double> fidelity_to_target;
    std::vector<std::pair<ProjectorSpec, Complex>> weak_values;
    std::vector<std::pair<ProjectorSpec, double>> abl_values;
    std::optional<std::vector<double>> schmidt_spectrum;
    std::vector<std::pair<std::string, double>> parameters;
    std::optional<FockState> joint_state;  // after the last router, before merge and post-selection
    std::vector<Claim> claims;

    double outcome(std::string_view label) const {
        for (const auto &[l, p] : outcomes) {
            if (l == label) return p;
        }
        throw Error(ErrorCode::BadParam, "no outcome " + std::string(label));
    }
};

inline std::vector<std::string> failed_claims(const ScenarioResult &r, double tol) {
    std::vector<std::string> failed;
    for (const auto &c : r.claims) {
        if (!(std::abs(c.value - c.expected) <= tol)) failed.push_back(c.label);
    }
    return failed;
}

inline std::vector<Complex> equal_alphas(std::size_t n) {
    return std::vector<Complex>(n, Complex{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
}

/// Haar-uniform random unit vector in C^n.
inline std::vector<Complex> random_alphas(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> v(n);
    double norm = 0.0;
    for (auto &x : v) {
        x = {g(rng), g(rng)};
        norm += std::norm(x);
    }
    for (auto &x : v) x /= std::sqrt(norm);
    return v;
}

namespace detail {

inline constexpr double kNormalizationTol = 1e-9;

inline void require_normalized(std::span<const Complex> alphas, std::size_t count) {
    if (alphas.size() != count) {
        throw Error(ErrorCode::BadParam, "expected " + std::to_string(count) + " coefficients");
    }
    double n = 0.0;
    for (auto a : alphas) n += std::norm(a);
    if (std::abs(n - 1.0) > kNormalizationTol) throw Error(ErrorCode::BadParam, "coefficients are not normalized");
}

inline std::string slot_suffix(TimeSlot t) {
    switch (t) {
        case TimeSlot::T1: return "1";
        case TimeSlot::T2: return "2";
        case TimeSlot::T3: return "3";
        default: return "";
    }
}

inline double wrap_angle(double a) {
    return std::remainder(a, 2.0 * std::numbers::pi);
}

inline std::vector<std::pair<std::string, double>> alpha_parameters(std::span<const Complex> alphas) {
    std::vector<std::pair<std::string, double>> p;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        const std::string key = "alpha" + std::to_string(k + 1);
        p.emplace_back(key + ".re", alphas[k].real());
        p.emplace_back(key + ".im", alphas[k].imag());
    }
    return p;
}

}  // namespace detail

/// Lowers an interrogation spec to a circuit: split, per-slot routers with
/// shutter tunneling between slots, merge, shutter post-selection, detectors.
inline ScenarioCircuit build_interrogation(const InterrogationSpec &spec) {
    constexpr double pi = std::numbers::pi;
    const std::size_t n = spec.beams.size();
    if (n == 0) throw Error(ErrorCode::BadParam, "no probe beams");
    {
        std::vector<Complex> a;
        for (const auto &b : spec.beams) a.push_back(b.amplitude);
        detail::require_normalized(a, n);
    }

    ScenarioCircuit sc;
    sc.name = spec.name;
    sc.spec = spec;
    sc.shutter_modes = shutter_box_modes();
    sc.shutter_post = {spec.post.begin(), spec.post.end()};
    if (spec.parked) {
        sc.shutter_modes.push_back(mode("S_park", Box::Aux, TimeSlot::None, Role::Shutter));
        sc.shutter_post.push_back(0.0);
    }
    const std::vector<TimeSlot> slots =
        spec.evolving ? std::vector{TimeSlot::T1, TimeSlot::T2, TimeSlot::T3} : std::vector{TimeSlot::None};

    std::vector<ModeLabel> inputs;
    for (const auto &b : spec.beams) {
        if (std::find(slots.begin(), slots.end(), b.time) == slots.end()) {
            throw Error(ErrorCode::BadParam, "beam time slot does not exist in this scenario");
        }
        if (b.box == Box::Aux) throw Error(ErrorCode::BadParam, "beams interrogate box A, B or C");
        const std::string tag = to_string(b.box) + detail::slot_suffix(b.time);
        const bool reflect = b.orientation == RouterOrientation::ReflectOnMatch;
        inputs.push_back(mode("P_" + tag, b.box, b.time, Role::ProbeIn));
        sc.kept_modes.push_back(mode((reflect ? "R_" : "T_") + tag, b.box, b.time, reflect ? Role::ProbeR : Role::ProbeT));
        sc.probe_modes.push_back(inputs.back());
        sc.probe_modes.push_back(sc.kept_modes.back());
    }
    sc.discard_modes = inputs;
    sc.spd2 = sc.kept_modes.front().name;

    Circuit &c = sc.circuit;
    c.modes = sc.shutter_modes;
    c.modes.insert(c.modes.end(), sc.probe_modes.begin(), sc.probe_modes.end());
    c.max_photons = 2;
    c.sources.push_back({{{"S_A", spec.pre[0]}, {"S_B", spec.pre[1]}, {"S_C", spec.pre[2]}}});
    if (spec.probe_photon) c.sources.push_back({{{inputs.front().name, 1.0}}});

    // Split chain: beam k keeps |alpha_k|^2 of the remaining weight.
    std::vector<double> refl(n, 1.0);
    std::vector<double> phase(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double remaining = 0.0;
        for (std::size_t j = n; j-- > k;) remaining += std::norm(spec.beams[j].amplitude);
        const double w = std::norm(spec.beams[k].amplitude);
        if (k + 1 < n) refl[k] = remaining > 1e-15 ? std::clamp(w / remaining, 0.0, 1.0) : 1.0;
        phase[k] = detail::wrap_angle(std::arg(spec.beams[k].amplitude) - static_cast<double>(k) * pi / 2);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) c.schedule.push_back(beamsplitter(refl[k], inputs[k], inputs[k + 1]));
    for (std::size_t k = 0; k < n; ++k) {
        if (phase[k] != 0.0) c.schedule.push_back(phase_shifter(phase[k], inputs[k]));
    }

    const ModeLabel &sa = sc.shutter_modes[0], &sb = sc.shutter_modes[1];
    for (TimeSlot slot : slots) {
        std::optional<ModeLabel> parked_box;
        if (spec.parked && spec.parked->second == slot) {
            parked_box = sc.shutter_modes[static_cast<std::size_t>(spec.parked->first)];
            c.schedule.push_back(swap_modes(*parked_box, sc.shutter_modes.back()));
        }
        for (std::size_t k = 0; k < n; ++k) {
            const auto &b = spec.beams[k];
            if (b.time != slot || !b.router) continue;
            c.schedule.push_back(pqr(inputs[k], sc.kept_modes[k], sc.shutter_modes[static_cast<std::size_t>(b.box)],
                                     b.orientation, spec.model));
        }
        if (parked_box) c.schedule.push_back(swap_modes(*parked_box, sc.shutter_modes.back()));
        if (slot == TimeSlot::T1) c.schedule.push_back(tunneling(spec.theta12, sa, sb));
        if (slot == TimeSlot::T2) c.schedule.push_back(tunneling(spec.theta23, sa, sb));
    }
    sc.interaction_end = c.schedule.size();

    if (spec.merge) {
        for (std::size_t k = 0; k < n; ++k) {
            if (phase[k] != 0.0) c.schedule.push_back(phase_shifter(-phase[k], sc.kept_modes[k]));
        }
        for (std::size_t k = n - 1; k-- > 0;) {
            c.schedule.push_back(phase_shifter(pi, sc.kept_modes[k + 1]));
            c.schedule.push_back(beamsplitter(refl[k], sc.kept_modes[k], sc.kept_modes[k + 1]));
            c.schedule.push_back(phase_shifter(pi, sc.kept_modes[k + 1]));
        }
    }

    c.postselections.push_back(StatePostselection{{{"S_A", spec.post[0]}, {"S_B", spec.post[1]}, {"S_C", spec.post[2]}}});
    c.detectors.push_back({"spd2", {{sc.spd2, 1}}});
    PhotonPattern none;
    for (const auto &m : sc.probe_modes) {
        c.detectors.push_back({m.name, {{m.name, 1}}});
        none[m.name] = 0;
    }
    c.detectors.push_back({"none", none});

    if (spec.probe_photon) {
        FockState vac = register_modes(sc.probe_modes, 1);
        std::vector<std::pair<std::string, Complex>> w;
        if (spec.merge) {
            w.emplace_back(sc.spd2, 1.0);
        } else {
            for (std::size_t k = 0; k < n; ++k) w.emplace_back(sc.kept_modes[k].name, spec.beams[k].amplitude);
        }
        sc.target = inject_superposition(vac, w);
    }

    if (spec.evolving) {
        sc.tsvf.pre = shutter_state(spec.pre[0], spec.pre[1], spec.pre[2]);
        sc.tsvf.post = shutter_state(spec.post[0], spec.post[1], spec.post[2]);
        sc.tsvf.segments = {{tunneling(spec.theta12, sa, sb)}, {tunneling(spec.theta23, sa, sb)}};
        sc.tsvf.checkpoints = {{"t1", 0}, {"t2", 1}, {"t3", 2}};
    } else {
        sc.tsvf = {shutter_state(spec.pre[0], spec.pre[1], spec.pre[2]),
                   shutter_state(spec.post[0], spec.post[1], spec.post[2]),
                   {},
                   {{"t", 0}}};
    }
    for (const auto &cp : sc.tsvf.checkpoints) {
        for (Box b : {Box::A, Box::B, Box::C}) sc.projectors.push_back({b, cp.name});
    }

    std::vector<Complex> alphas;
    for (const auto &b : spec.beams) alphas.push_back(b.amplitude);
    sc.parameters = detail::alpha_parameters(alphas);
    if (spec.evolving) {
        sc.parameters.emplace_back("theta12", spec.theta12);
        sc.parameters.emplace_back("theta23", spec.theta23);
    }
    return sc;
}

/// Runs a scenario circuit and collects conditional outcomes, the conditioned
/// probe state, two-state-vector quantities and the interaction-time Schmidt spectrum.
inline ScenarioResult evaluate(const ScenarioCircuit &sc) {
    ScenarioResult r;
    r.name = sc.name;
    r.parameters = sc.parameters;

    const SimulationResult sim = simulate(sc.circuit);
    r.outcomes.emplace_back("post", sim.postselection_probability);
    for (const auto &[label, p] : sim.detector_probabilities) r.outcomes.emplace_back(label + "|post", p);

    if (sim.postselection_probability > detail::kConditioningFloor) {
        const FockState vac = register_modes(sc.shutter_modes, 1);
        FockState::AmplitudeMap post;
        for (std::size_t k = 0; k < sc.shutter_modes.size(); ++k) {
            OccupationConfig cfg(sc.shutter_modes.size(), 0);
            cfg[k] = 1;
            post[cfg] = sc.shutter_post[k];
        }
        const FockState target_shutter = FockState::from_amplitudes(vac, post).normalized();
        FockState probe = partial_overlap(target_shutter, sim.conditioned_state).normalized();
        r.conditioned_probe_state = probe;
        if (sc.target) r.fidelity_to_target = std::min(1.0, fidelity(*sc.target, probe));
    }

    for (const auto &proj : sc.projectors) {
        r.weak_values.emplace_back(proj, weak_value(sc.tsvf, proj));
        r.abl_values.emplace_back(proj, abl_probability(sc.tsvf, proj));
    }

    const std::span<const Element> prefix(sc.circuit.schedule.data(), sc.interaction_end);
    FockState joint = apply_sequence(prefix, initial_state(sc.circuit));
    r.schmidt_spectrum = schmidt_spectrum(joint, sc.shutter_modes);
    r.joint_state = std::move(joint);

    if (sc.asserts_unity) r.claims.push_back({"spd2|post", r.outcome("spd2|post"), 1.0});
    return r;
}

// Built-in scenarios. Each builder accepts a named perturbation ("" = the
// undisturbed scheme); only undisturbed schemes assert their claims.

struct ScenarioOptions {
    std::vector<Complex> alphas;  // empty: equal coefficients
    std::string perturbation;
    RouterModel model = RouterModel::Ideal;
    double theta12 = std::numbers::pi / 4;
    double theta23 = std::numbers::pi / 4;
};

namespace detail {

inline std::vector<Complex> alphas_or_equal(const ScenarioOptions &o, std::size_t n) {
    std::vector<Complex> a = o.alphas.empty() ? equal_alphas(n) : o.alphas;
    require_normalized(a, n);
    return a;
}

/// The designed schedule: no perturbation and the nominal tunneling angles.
inline bool undisturbed(const ScenarioOptions &o) {
    return o.perturbation.empty() && o.theta12 == std::numbers::pi / 4 && o.theta23 == std::numbers::pi / 4;
}

[[noreturn]] inline void unknown_perturbation(const std::string &scenario, const std::string &p) {
    throw Error(ErrorCode::BadParam, "scenario " + scenario + " has no perturbation " + p);
}

inline InterrogationSpec base_spec(std::string name, const ScenarioOptions &o) {
    InterrogationSpec s;
    s.name = std::move(name);
    s.model = o.model;
    s.theta12 = o.theta12;
    s.theta23 = o.theta23;
    return s;
}

inline std::vector<ProbeBeam> beams(std::initializer_list<std::pair<Box, TimeSlot>> at, std::span<const Complex> alphas,
                                    RouterOrientation orientation = RouterOrientation::ReflectOnMatch) {
    std::vector<ProbeBeam> out;
    std::size_t k = 0;
    for (const auto &[box, time] : at) out.push_back({box, time, orientation, alphas[k++], true});
    return out;
}

}  // namespace detail

/// Probe alpha1 A + alpha2 B against a static shutter (A + B + C)/sqrt3,
/// post-selected on (A + B - C)/sqrt3.
inline ScenarioCircuit three_box_shutter_circuit(const ScenarioOptions &o) {
    const auto a = detail::alphas_or_equal(o, 2);
    if (!o.perturbation.empty()) detail::unknown_perturbation("three_box_shutter", o.perturbation);
    InterrogationSpec s = detail::base_spec("three_box_shutter", o);
    s.pre = {1.0, 1.0, 1.0};
    s.post = {1.0, 1.0, -1.0};
    s.evolving = false;
    s.merge = false;
    s.beams = detail::beams({{Box::A, TimeSlot::None}, {Box::B, TimeSlot::None}}, a);
    return build_interrogation(s);
}

/// The entangled shutter-probe state expected right after the routers of the
/// three-box scheme, built directly on the circuit's modes.
inline FockState three_box_entangled_state(const ScenarioCircuit &sc, Complex alpha1, Complex alpha2) {
    const FockState vac = register_modes(sc.circuit.modes, 2);
    const Complex s = 1.0 / std::sqrt(3.0);
    auto cfg = [&](const std::string &shutter, const std::string &probe) {
        OccupationConfig c(vac.mode_count(), 0);
        c[vac.require_index(shutter)] = 1;
        c[vac.require_index(probe)] = 1;
        return c;
    };
    const std::string ra = sc.kept_modes[0].name, rb = sc.kept_modes[1].name;
    const std::string ta = sc.discard_modes[0].name, tb = sc.discard_modes[1].name;
    FockState::AmplitudeMap m;
    m[cfg("S_A", ra)] += s * alpha1;
    m[cfg("S_A", tb)] += s * alpha2;
    m[cfg("S_B", ta)] += s * alpha1;
    m[cfg("S_B", rb)] += s * alpha2;
    m[cfg("S_C", ta)] += s * alpha1;
    m[cfg("S_C", tb)] += s * alpha2;
    return FockState::from_amplitudes(vac, m);
}

inline ScenarioResult three_box_shutter(Complex alpha1, Complex alpha2, RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.alphas = {alpha1, alpha2};
    o.model = model;
    const ScenarioCircuit sc = three_box_shutter_circuit(o);
    ScenarioResult r = evaluate(sc);
    const double dev = max_amplitude_deviation(*r.joint_state, three_box_entangled_state(sc, alpha1, alpha2));
    r.claims.push_back({"fidelity", r.fidelity_to_target.value_or(0.0), 1.0});
    r.claims.push_back({"joint-state-deviation", dev, 0.0});
    return r;
}

/// Five beams A(t1), C(t1), C(t2), B(t3), C(t3) reflected by the shutter.
inline ScenarioCircuit disappearing_full_circuit(const ScenarioOptions &o) {
    auto a = detail::alphas_or_equal(o, 5);
    InterrogationSpec s = detail::base_spec("disappearing_full", o);
    s.beams = detail::beams({{Box::A, TimeSlot::T1},
                             {Box::C, TimeSlot::T1},
                             {Box::C, TimeSlot::T2},
                             {Box::B, TimeSlot::T3},
                             {Box::C, TimeSlot::T3}},
                            a);
    const std::string &p = o.perturbation;
    if (p == "remove-shutter-C-t2") {
        s.parked = {Box::C, TimeSlot::T2};
    } else if (p == "no-routers") {
        for (auto &b : s.beams) b.router = false;
    } else if (p == "extra-reflect-A-t2" || p == "extra-reflect-B-t2") {
        for (auto &b : s.beams) b.amplitude *= std::sqrt(5.0 / 6.0);
        s.beams.push_back({p == "extra-reflect-A-t2" ? Box::A : Box::B, TimeSlot::T2,
                           RouterOrientation::ReflectOnMatch, 1.0 / std::sqrt(6.0), true});
    } else if (!p.empty()) {
        detail::unknown_perturbation(s.name, p);
    }
    ScenarioCircuit sc = build_interrogation(s);
    sc.asserts_unity = detail::undisturbed(o);
    return sc;
}

inline ScenarioResult disappearing_full(std::span<const Complex> alphas, std::string perturbation = "",
                                        RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.alphas.assign(alphas.begin(), alphas.end());
    o.perturbation = std::move(perturbation);
    o.model = model;
    return evaluate(disappearing_full_circuit(o));
}

/// Three beams A(t1), C(t2), B(t3).
inline ScenarioCircuit simplified_3path_circuit(const ScenarioOptions &o) {
    auto a = detail::alphas_or_equal(o, 3);
    InterrogationSpec s = detail::base_spec("simplified_3path", o);
    s.beams = detail::beams({{Box::A, TimeSlot::T1}, {Box::C, TimeSlot::T2}, {Box::B, TimeSlot::T3}}, a);
    const std::string &p = o.perturbation;
    if (p == "no-routers") {
        for (auto &b : s.beams) b.router = false;
    } else if (p == "wrong-box-t2") {
        s.beams[1].box = Box::A;
    } else if (p == "switched-router-C-t2") {
        s.beams[1].orientation = RouterOrientation::TransmitOnMatch;
    } else if (!p.empty()) {
        detail::unknown_perturbation(s.name, p);
    }
    ScenarioCircuit sc = build_interrogation(s);
    sc.asserts_unity = detail::undisturbed(o);
    return sc;
}

inline ScenarioResult simplified_3path(std::string perturbation = "", RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.perturbation = std::move(perturbation);
    o.model = model;
    return evaluate(simplified_3path_circuit(o));
}

/// Two beams A(t1), C(t2).
inline ScenarioCircuit simplest_2path_circuit(const ScenarioOptions &o) {
    auto a = detail::alphas_or_equal(o, 2);
    InterrogationSpec s = detail::base_spec("simplest_2path", o);
    s.beams = detail::beams({{Box::A, TimeSlot::T1}, {Box::C, TimeSlot::T2}}, a);
    const std::string &p = o.perturbation;
    if (p == "wrong-time") {
        s.beams = detail::beams({{Box::A, TimeSlot::T2}, {Box::C, TimeSlot::T1}}, a);
    } else if (p == "wrong-box") {
        s.beams[1].box = Box::B;
    } else if (p == "vacuum-probe") {
        s.probe_photon = false;
    } else if (!p.empty()) {
        detail::unknown_perturbation(s.name, p);
    }
    ScenarioCircuit sc = build_interrogation(s);
    sc.asserts_unity = detail::undisturbed(o);
    return sc;
}

inline ScenarioResult simplest_2path(std::string perturbation = "", RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.perturbation = std::move(perturbation);
    o.model = model;
    return evaluate(simplest_2path_circuit(o));
}

/// Two beams A(t2), B(t2) transmitted only where the shutter is absent.
inline ScenarioCircuit absence_test_circuit(const ScenarioOptions &o) {
    auto a = detail::alphas_or_equal(o, 2);
    InterrogationSpec s = detail::base_spec("absence_test", o);
    TimeSlot t = TimeSlot::T2;
    RouterOrientation orientation = RouterOrientation::TransmitOnMatch;
    const std::string &p = o.perturbation;
    if (p == "at-t1") {
        t = TimeSlot::T1;
    } else if (p == "at-t3") {
        t = TimeSlot::T3;
    } else if (p == "switched-router") {
        orientation = RouterOrientation::ReflectOnMatch;
    } else if (!p.empty()) {
        detail::unknown_perturbation(s.name, p);
    }
    s.beams = detail::beams({{Box::A, t}, {Box::B, t}}, a, orientation);
    ScenarioCircuit sc = build_interrogation(s);
    sc.asserts_unity = detail::undisturbed(o);
    return sc;
}

inline ScenarioResult absence_test(std::string perturbation = "", RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.perturbation = std::move(perturbation);
    o.model = model;
    return evaluate(absence_test_circuit(o));
}

/// Six beams in the order A(t1), C(t1), A(t2), B(t2), B(t3), C(t3); the t2
/// beams are transmitted only where the shutter is absent.
inline ScenarioCircuit stricter_6beam_circuit(const ScenarioOptions &o) {
    auto a = detail::alphas_or_equal(o, 6);
    InterrogationSpec s = detail::base_spec("stricter_6beam", o);
    s.beams = detail::beams({{Box::A, TimeSlot::T1},
                             {Box::C, TimeSlot::T1},
                             {Box::A, TimeSlot::T2},
                             {Box::B, TimeSlot::T2},
                             {Box::B, TimeSlot::T3},
                             {Box::C, TimeSlot::T3}},
                            a);
    s.beams[2].orientation = RouterOrientation::TransmitOnMatch;
    s.beams[3].orientation = RouterOrientation::TransmitOnMatch;
    const std::string &p = o.perturbation;
    if (p == "reflect-A-t2") {
        s.beams[2].orientation = RouterOrientation::ReflectOnMatch;
    } else if (p == "reflect-B-t2") {
        s.beams[3].orientation = RouterOrientation::ReflectOnMatch;
    } else if (!p.empty()) {
        detail::unknown_perturbation(s.name, p);
    }
    ScenarioCircuit sc = build_interrogation(s);
    sc.asserts_unity = detail::undisturbed(o);
    return sc;
}

inline ScenarioResult stricter_6beam(std::span<const Complex> alphas, std::string perturbation = "",
                                     RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.alphas.assign(alphas.begin(), alphas.end());
    o.perturbation = std::move(perturbation);
    o.model = model;
    return evaluate(stricter_6beam_circuit(o));
}

// Bell-type correlations between the shutter (Alice) and the probe (Bob) on
// the joint state right after the last router.

enum class AliceSetting { OpenBoxes, Superpose };
enum class BobSetting { OpenCavities, Superpose };

inline std::string to_string(AliceSetting s) {
    return s == AliceSetting::OpenBoxes ? "open_boxes" : "superpose";
}
inline std::string to_string(BobSetting s) {
    return s == BobSetting::OpenCavities ? "open_cavities" : "superpose";
}

struct BellTable {
    AliceSetting alice = AliceSetting::OpenBoxes;
    BobSetting bob = BobSetting::OpenCavities;
    std::vector<std::string> alice_labels;
    std::vector<std::string> bob_labels;
    Eigen::MatrixXd p;  // p(a, b)

    Eigen::VectorXd alice_marginal() const {
        return p.rowwise().sum();
    }
    Eigen::VectorXd bob_marginal() const {
        return p.colwise().sum().transpose();
    }
};

/// One shutter photon over three boxes and one probe photon over cavity and
/// discard modes, stored as the amplitude matrix psi(box, probe mode).
class BellExperiment {
   public:
    BellExperiment(const FockState &joint, const std::vector<ModeLabel> &boxes, std::vector<ModeLabel> cavities,
                   std::vector<ModeLabel> discards)
        : cavities_(std::move(cavities)), discards_(std::move(discards)) {
        if (boxes.size() != 3) throw Error(ErrorCode::BadParam, "Alice measures three boxes");
        std::vector<std::size_t> rows, cols;
        for (const auto &m : boxes) rows.push_back(joint.require_index(m.name));
        for (const auto &m : cavities_) cols.push_back(joint.require_index(m.name));
        for (const auto &m : discards_) cols.push_back(joint.require_index(m.name));
        psi_ = Eigen::MatrixXcd::Zero(3, static_cast<Eigen::Index>(cols.size()));
        for (const auto &[cfg, a] : joint.amplitudes()) {
            auto find_one = [&](const std::vector<std::size_t> &idx) -> Eigen::Index {
                Eigen::Index hit = -1;
                int total = 0;
                for (std::size_t j = 0; j < idx.size(); ++j) {
                    total += cfg[idx[j]];
                    if (cfg[idx[j]] == 1) hit = static_cast<Eigen::Index>(j);
                }
                return total == 1 ? hit : -1;
            };
            const Eigen::Index r = find_one(rows), c = find_one(cols);
            if (r < 0 || c < 0 || detail::total_photons(cfg) != 2) {
                throw Error(ErrorCode::BadParam, "joint state leaves the one-shutter, one-probe sector");
            }
            psi_(r, c) += a;
        }
    }

    BellTable table(AliceSetting alice, BobSetting bob) const {
        BellTable t;
        t.alice = alice;
        t.bob = bob;
        const auto pa = alice_projectors(alice, t.alice_labels);
        const auto pb = bob_projectors(bob, t.bob_labels);
        t.p.resize(static_cast<Eigen::Index>(pa.size()), static_cast<Eigen::Index>(pb.size()));
        for (std::size_t i = 0; i < pa.size(); ++i) {
            for (std::size_t j = 0; j < pb.size(); ++j) {
                t.p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (pa[i] * psi_ * pb[j].transpose()).squaredNorm();
            }
        }
        return t;
    }

    const Eigen::MatrixXcd &amplitudes() const {
        return psi_;
    }

   private:
    std::vector<Eigen::MatrixXcd> alice_projectors(AliceSetting s, std::vector<std::string> &labels) const {
        std::vector<Eigen::MatrixXcd> out;
        if (s == AliceSetting::OpenBoxes) {
            labels = {"A", "B", "C"};
            for (Eigen::Index k = 0; k < 3; ++k) {
                Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(3, 3);
                p(k, k) = 1.0;
                out.push_back(p);
            }
        } else {
            labels = {"+", "-"};
            const Eigen::VectorXcd v = Eigen::VectorXcd::Constant(3, 1.0 / std::sqrt(3.0));
            out.push_back(v * v.adjoint());
            out.push_back(Eigen::MatrixXcd::Identity(3, 3) - out.back());
        }
        return out;
    }

    std::vector<Eigen::MatrixXcd> bob_projectors(BobSetting s, std::vector<std::string> &labels) const {
        static const char *roman[] = {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"};
        const auto m = psi_.cols();
        const auto nc = static_cast<Eigen::Index>(cavities_.size());
        std::vector<Eigen::MatrixXcd> out;
        if (s == BobSetting::OpenCavities) {
            for (Eigen::Index k = 0; k < nc; ++k) {
                labels.push_back(k < 10 ? roman[k] : cavities_[static_cast<std::size_t>(k)].name);
                Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m, m);
                p(k, k) = 1.0;
                out.push_back(p);
            }
            labels.push_back("x");
            Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m, m);
            for (Eigen::Index k = nc; k < m; ++k) p(k, k) = 1.0;
            out.push_back(p);
        } else {
            labels = {"+", "-"};
            Eigen::VectorXcd u = Eigen::VectorXcd::Zero(m);
            u.head(nc).setConstant(1.0 / std::sqrt(static_cast<double>(nc)));
            out.push_back(u * u.adjoint());
            out.push_back(Eigen::MatrixXcd::Identity(m, m) - out.back());
        }
        return out;
    }

    std::vector<ModeLabel> cavities_;
    std::vector<ModeLabel> discards_;
    Eigen::MatrixXcd psi_;
};

inline BellExperiment bell_experiment(std::span<const Complex> alphas, RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.alphas.assign(alphas.begin(), alphas.end());
    o.model = model;
    const ScenarioCircuit sc = disappearing_full_circuit(o);
    const std::span<const Element> prefix(sc.circuit.schedule.data(), sc.interaction_end);
    const FockState joint = apply_sequence(prefix, initial_state(sc.circuit));
    return BellExperiment(joint, shutter_box_modes(), sc.kept_modes, sc.discard_modes);
}

inline BellTable bell_test(std::span<const Complex> alphas, AliceSetting alice, BobSetting bob) {
    return bell_experiment(alphas).table(alice, bob);
}

/// Largest change of either party's marginal when the other party switches setting.
inline double no_signaling_deviation(const BellExperiment &e) {
    double dev = 0.0;
    for (AliceSetting a : {AliceSetting::OpenBoxes, AliceSetting::Superpose}) {
        const auto ref = e.table(a, BobSetting::OpenCavities).alice_marginal();
        dev = std::max(dev, (e.table(a, BobSetting::Superpose).alice_marginal() - ref).cwiseAbs().maxCoeff());
    }
    for (BobSetting b : {BobSetting::OpenCavities, BobSetting::Superpose}) {
        const auto ref = e.table(AliceSetting::OpenBoxes, b).bob_marginal();
        dev = std::max(dev, (e.table(AliceSetting::Superpose, b).bob_marginal() - ref).cwiseAbs().maxCoeff());
    }
    return dev;
}

/// Assigns +1 to the listed outcome labels of a setting and -1 to the rest.
template <typename Setting>
struct Dichotomy {
    Setting setting;
    std::vector<std::string> plus;

    double sign(const std::string &label) const {
        return std::find(plus.begin(), plus.end(), label) != plus.end() ? 1.0 : -1.0;
    }
};

inline double correlator(const BellTable &t, const Dichotomy<AliceSetting> &a, const Dichotomy<BobSetting> &b) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < t.p.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.p.cols(); ++j) {
            e += a.sign(t.alice_labels[static_cast<std::size_t>(i)]) * b.sign(t.bob_labels[static_cast<std::size_t>(j)]) *
                 t.p(i, j);
        }
    }
    return e;
}

/// S = E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1).
inline double chsh(const BellExperiment &e, const std::array<Dichotomy<AliceSetting>, 2> &a,
                   const std::array<Dichotomy<BobSetting>, 2> &b) {
    auto E = [&](int i, int j) { return correlator(e.table(a[i].setting, b[j].setting), a[i], b[j]); };
    return E(0, 0) + E(0, 1) + E(1, 0) - E(1, 1);
}

/// Bell scenario: all four setting-pair tables as outcomes "alice/bob:a,b".
inline ScenarioResult bell_scenario(std::span<const Complex> alphas, RouterModel model = RouterModel::Ideal) {
    ScenarioOptions o;
    o.alphas.assign(alphas.begin(), alphas.end());
    o.model = model;
    ScenarioCircuit sc = disappearing_full_circuit(o);
    sc.asserts_unity = false;
    ScenarioResult r = evaluate(sc);
    r.name = "bell_test";
    r.outcomes.clear();
    r.conditioned_probe_state.reset();
    r.fidelity_to_target.reset();
    const BellExperiment e(*r.joint_state, shutter_box_modes(), sc.kept_modes, sc.discard_modes);
    for (AliceSetting a : {AliceSetting::OpenBoxes, AliceSetting::Superpose}) {
        for (BobSetting b : {BobSetting::OpenCavities, BobSetting::Superpose}) {
            const BellTable t = e.table(a, b);
            for (Eigen::Index i = 0; i < t.p.rows(); ++i) {
                for (Eigen::Index j = 0; j < t.p.cols(); ++j) {
                    r.outcomes.emplace_back(to_string(a) + "/" + to_string(b) + ":" +
                                                t.alice_labels[static_cast<std::size_t>(i)] + "," +
                                                t.bob_labels[static_cast<std::size_t>(j)],
                                            t.p(i, j));
                }
            }
        }
    }
    r.claims.push_back({"no-signaling", no_signaling_deviation(e), 0.0});
    return r;
}

/// Named entry point used by the command line.
struct ScenarioEntry {
    std::string name;
    std::size_t alpha_count = 0;
    std::vector<std::string> perturbations;
    std::function<ScenarioCircuit(const ScenarioOptions &)> build;
    std::function<ScenarioResult(const ScenarioOptions &)> run;
};

inline const std::vector<ScenarioEntry> &scenario_registry() {
    static const std::vector<ScenarioEntry> registry = [] {
        auto plain = [](auto build) {
            return [build](const ScenarioOptions &o) { return evaluate(build(o)); };
        };
        std::vector<ScenarioEntry> r;
        r.push_back({"three_box_shutter", 2, {}, three_box_shutter_circuit, [](const ScenarioOptions &o) {
                         const auto a = detail::alphas_or_equal(o, 2);
                         if (!o.perturbation.empty()) detail::unknown_perturbation("three_box_shutter", o.perturbation);
                         return three_box_shutter(a[0], a[1], o.model);
                     }});
        r.push_back({"disappearing_full",
                     5,
                     {"remove-shutter-C-t2", "no-routers", "extra-reflect-A-t2", "extra-reflect-B-t2"},
                     disappearing_full_circuit,
                     plain(disappearing_full_circuit)});
        r.push_back({"simplified_3path",
                     3,
                     {"no-routers", "wrong-box-t2", "switched-router-C-t2"},
                     simplified_3path_circuit,
                     plain(simplified_3path_circuit)});
        r.push_back({"simplest_2path",
                     2,
                     {"wrong-time", "wrong-box", "vacuum-probe"},
                     simplest_2path_circuit,
                     plain(simplest_2path_circuit)});
        r.push_back({"absence_test",
                     2,
                     {"at-t1", "at-t3", "switched-router"},
                     absence_test_circuit,
                     plain(absence_test_circuit)});
        r.push_back({"stricter_6beam",
                     6,
                     {"reflect-A-t2", "reflect-B-t2"},
                     stricter_6beam_circuit,
                     plain(stricter_6beam_circuit)});
        r.push_back({"bell_test", 5, {}, disappearing_full_circuit, [](const ScenarioOptions &o) {
                         if (!o.perturbation.empty()) detail::unknown_perturbation("bell_test", o.perturbation);
                         const auto a = detail::alphas_or_equal(o, 5);
                         return bell_scenario(a, o.model);
                     }});
        return r;
    }();
    return registry;
}

inline const ScenarioEntry *find_scenario(std::string_view name) {
    for (const auto &e : scenario_registry()) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

}  // namespace router_sim
