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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "router_sim/error.hpp"
#include "router_sim/fock_state.hpp"
#include "router_sim/mode_label.hpp"

namespace router_sim {

// Beamsplitter convention: [[sqrt(r), i sqrt(1-r)], [i sqrt(1-r), sqrt(r)]].
struct Beamsplitter {
    double reflectivity;
    ModeLabel first, second;
};

struct PhaseShift {
    double angle;
    ModeLabel target;
};

/// Idealized single-mode nonlinear sign shift: |0>,|1>,|2> -> |0>,|1>,-|2>.
struct NsSingle {
    ModeLabel target;
};

/// Two single-mode NS gates inside a balanced interferometer; flips the sign of |1,1>.
struct NsTwoMode {
    ModeLabel first, second;
};

enum class RouterOrientation {
    ReflectOnMatch,   // kept port receives the probe when the control is occupied
    TransmitOnMatch,  // kept port receives the probe when the control is empty
};

enum class RouterModel { Ideal, Decomposed };

/// Photonic quantum router. The probe enters `probe_in`; `probe_out` is the
/// kept port and `probe_in` doubles as the discarded port after the router.
struct Router {
    ModeLabel probe_in, probe_out, control;
    RouterOrientation orientation = RouterOrientation::ReflectOnMatch;
    RouterModel model = RouterModel::Ideal;
};

/// Permutes occupations: the content of `from` moves to `to` for each pair.
struct Relabel {
    std::vector<std::pair<ModeLabel, ModeLabel>> mapping;
};

/// exp(-i theta sigma_x) on a single excitation shared by two modes.
struct Tunnel {
    double theta;
    ModeLabel first, second;
};

using Element = std::variant<Beamsplitter, PhaseShift, NsSingle, NsTwoMode, Router, Relabel, Tunnel>;

inline Element beamsplitter(double r, ModeLabel first, ModeLabel second) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::BadParam, "beamsplitter reflectivity outside [0,1]");
    if (first.name == second.name) throw Error(ErrorCode::BadParam, "beamsplitter needs two distinct modes");
    return Beamsplitter{r, std::move(first), std::move(second)};
}

inline Element phase_shifter(double angle, ModeLabel target) {
    return PhaseShift{angle, std::move(target)};
}

inline Element ns_single(ModeLabel target) {
    return NsSingle{std::move(target)};
}

inline Element ns_two_mode(ModeLabel first, ModeLabel second) {
    if (first.name == second.name) throw Error(ErrorCode::BadParam, "ns2 needs two distinct modes");
    return NsTwoMode{std::move(first), std::move(second)};
}

inline Element tunneling(double theta, ModeLabel first, ModeLabel second) {
    if (first.name == second.name) throw Error(ErrorCode::BadParam, "tunnel needs two distinct modes");
    return Tunnel{theta, std::move(first), std::move(second)};
}

inline Element pqr(ModeLabel probe_in, ModeLabel probe_out, ModeLabel control, RouterOrientation orientation,
                   RouterModel model) {
    std::set<std::string> names{probe_in.name, probe_out.name, control.name};
    if (names.size() != 3) throw Error(ErrorCode::BadParam, "router needs three distinct modes");
    return Router{std::move(probe_in), std::move(probe_out), std::move(control), orientation, model};
}

inline Element pqr_ideal(ModeLabel probe_in, ModeLabel probe_out, ModeLabel control,
                         RouterOrientation orientation = RouterOrientation::ReflectOnMatch) {
    return pqr(std::move(probe_in), std::move(probe_out), std::move(control), orientation, RouterModel::Ideal);
}

inline Element pqr_decomposed(ModeLabel probe_in, ModeLabel probe_out, ModeLabel control,
                              RouterOrientation orientation = RouterOrientation::ReflectOnMatch) {
    return pqr(std::move(probe_in), std::move(probe_out), std::move(control), orientation,
               RouterModel::Decomposed);
}

inline Element relabel(std::vector<std::pair<ModeLabel, ModeLabel>> mapping) {
    std::multiset<std::string> from, to;
    for (const auto &[f, t] : mapping) {
        from.insert(f.name);
        to.insert(t.name);
    }
    if (from != to || std::set<std::string>(from.begin(), from.end()).size() != from.size()) {
        throw Error(ErrorCode::BadParam, "relabel mapping is not a bijection");
    }
    return Relabel{std::move(mapping)};
}

/// Exchanges the contents of two modes.
inline Element swap_modes(const ModeLabel &a, const ModeLabel &b) {
    return relabel({{a, b}, {b, a}});
}

inline Eigen::MatrixXcd beamsplitter_matrix(double r) {
    const Complex i{0.0, 1.0};
    Eigen::MatrixXcd m(2, 2);
    m << std::sqrt(r), i * std::sqrt(1.0 - r), i * std::sqrt(1.0 - r), std::sqrt(r);
    return m;
}

inline Eigen::MatrixXcd tunneling_matrix(double theta) {
    const Complex i{0.0, 1.0};
    Eigen::MatrixXcd m(2, 2);
    m << std::cos(theta), -i * std::sin(theta), -i * std::sin(theta), std::cos(theta);
    return m;
}

inline Eigen::MatrixXcd phase_matrix(double angle) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::polar(1.0, angle);
    return m;
}

inline std::string kind_name(const Element &e) {
    struct {
        std::string operator()(const Beamsplitter &) const { return "bs"; }
        std::string operator()(const PhaseShift &) const { return "ps"; }
        std::string operator()(const NsSingle &) const { return "ns"; }
        std::string operator()(const NsTwoMode &) const { return "ns2"; }
        std::string operator()(const Router &r) const {
            return r.model == RouterModel::Ideal ? "pqr" : "pqr_decomposed";
        }
        std::string operator()(const Relabel &) const { return "relabel"; }
        std::string operator()(const Tunnel &) const { return "tunnel"; }
    } v;
    return std::visit(v, e);
}

inline std::vector<ModeLabel> bound_modes(const Element &e) {
    struct {
        std::vector<ModeLabel> operator()(const Beamsplitter &x) const { return {x.first, x.second}; }
        std::vector<ModeLabel> operator()(const PhaseShift &x) const { return {x.target}; }
        std::vector<ModeLabel> operator()(const NsSingle &x) const { return {x.target}; }
        std::vector<ModeLabel> operator()(const NsTwoMode &x) const { return {x.first, x.second}; }
        std::vector<ModeLabel> operator()(const Router &x) const { return {x.probe_in, x.probe_out, x.control}; }
        std::vector<ModeLabel> operator()(const Relabel &x) const {
            std::vector<ModeLabel> out;
            for (const auto &[f, t] : x.mapping) out.push_back(f);
            return out;
        }
        std::vector<ModeLabel> operator()(const Tunnel &x) const { return {x.first, x.second}; }
    } v;
    return std::visit(v, e);
}

/// Primitive sequence realizing a composite element. Primitives lower to themselves.
inline std::vector<Element> lower(const Element &e) {
    constexpr double pi = std::numbers::pi;
    if (const auto *ns2 = std::get_if<NsTwoMode>(&e)) {
        // BS, NS on both arms, then the inverse BS written as P.BS.P with P = diag(1,-1).
        return {Beamsplitter{0.5, ns2->first, ns2->second}, NsSingle{ns2->first}, NsSingle{ns2->second},
                PhaseShift{pi, ns2->second},                 Beamsplitter{0.5, ns2->first, ns2->second},
                PhaseShift{pi, ns2->second}};
    }
    if (const auto *r = std::get_if<Router>(&e); r && r->model == RouterModel::Decomposed) {
        // MZI on (probe_in, probe_out) with the NS pair between the probe_out arm and
        // the control. Outer phase shifters make the control-present branch an
        // exact swap with the same global phase as the control-absent identity.
        std::vector<Element> seq{PhaseShift{-pi / 2, r->probe_out},
                                 Beamsplitter{0.5, r->probe_in, r->probe_out},
                                 NsTwoMode{r->probe_out, r->control},
                                 PhaseShift{pi, r->probe_out},
                                 Beamsplitter{0.5, r->probe_in, r->probe_out},
                                 PhaseShift{pi, r->probe_out},
                                 PhaseShift{pi / 2, r->probe_out}};
        if (r->orientation == RouterOrientation::TransmitOnMatch) seq.push_back(swap_modes(r->probe_in, r->probe_out));
        return seq;
    }
    return {e};
}

namespace detail {

inline void check_router_sector(const FockState &state, const Router &r) {
    const std::size_t a = state.require_index(r.probe_in.name);
    const std::size_t b = state.require_index(r.probe_out.name);
    const std::size_t c = state.require_index(r.control.name);
    for (const auto &[cfg, amp] : state.amplitudes()) {
        if (cfg[a] + cfg[b] > 1 || cfg[c] > 1) {
            throw Error(ErrorCode::UnsupportedSector, "router acts on at most one probe and one control photon");
        }
    }
}

inline FockState apply_ideal_router(const FockState &state, const Router &r) {
    const std::size_t a = state.require_index(r.probe_in.name);
    const std::size_t b = state.require_index(r.probe_out.name);
    const std::size_t c = state.require_index(r.control.name);
    FockState::AmplitudeMap out;
    for (const auto &[cfg, amp] : state.amplitudes()) {
        const bool occupied = cfg[c] == 1;
        const bool route = r.orientation == RouterOrientation::ReflectOnMatch ? occupied : !occupied;
        OccupationConfig next = cfg;
        if (route) std::swap(next[a], next[b]);
        out[next] += amp;
    }
    return state.with_amplitudes(std::move(out));
}

inline FockState apply_relabel(const FockState &state, const Relabel &r) {
    std::vector<std::pair<std::size_t, std::size_t>> moves;
    for (const auto &[f, t] : r.mapping) moves.emplace_back(state.require_index(f.name), state.require_index(t.name));
    FockState::AmplitudeMap out;
    for (const auto &[cfg, amp] : state.amplitudes()) {
        OccupationConfig next = cfg;
        for (const auto &[f, t] : moves) next[t] = cfg[f];
        out[next] += amp;
    }
    return state.with_amplitudes(std::move(out));
}

}  // namespace detail

inline FockState apply_element(const Element &e, const FockState &state);

inline FockState apply_sequence(std::span<const Element> elements, FockState state) {
    for (const auto &e : elements) state = apply_element(e, state);
    return state;
}

inline FockState apply_element(const Element &e, const FockState &state) {
    static const Complex ns_phases[] = {1.0, 1.0, -1.0};
    struct Visitor {
        const FockState &s;
        FockState operator()(const Beamsplitter &x) const {
            const ModeLabel m[] = {x.first, x.second};
            return apply_mode_unitary(s, m, beamsplitter_matrix(x.reflectivity));
        }
        FockState operator()(const PhaseShift &x) const {
            return apply_mode_unitary(s, std::span(&x.target, 1), phase_matrix(x.angle));
        }
        FockState operator()(const NsSingle &x) const {
            return apply_fock_phase(s, x.target, ns_phases);
        }
        FockState operator()(const NsTwoMode &x) const {
            return apply_sequence(lower(x), s);
        }
        FockState operator()(const Router &x) const {
            detail::check_router_sector(s, x);
            if (x.model == RouterModel::Ideal) return detail::apply_ideal_router(s, x);
            return apply_sequence(lower(x), s);
        }
        FockState operator()(const Relabel &x) const {
            return detail::apply_relabel(s, x);
        }
        FockState operator()(const Tunnel &x) const {
            const ModeLabel m[] = {x.first, x.second};
            return apply_mode_unitary(s, m, tunneling_matrix(x.theta));
        }
    };
    return std::visit(Visitor{state}, e);
}

}  // namespace router_sim
