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
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "router_sim/error.hpp"
#include "router_sim/mode_label.hpp"

namespace router_sim {

using Complex = std::complex<double>;

/// Occupation numbers, one per registered mode, in registration order.
using OccupationConfig = std::vector<int>;

inline constexpr double kPruneEpsilon = 1e-14;
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr int kDefaultMaxPhotons = 2;

namespace detail {

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline int total_photons(const OccupationConfig &c) {
    return std::accumulate(c.begin(), c.end(), 0);
}

}  // namespace detail

/// Pure state over a fixed list of modes, stored sparsely by occupation
/// configuration. Values are immutable; every operation returns a new state.
class FockState {
   public:
    using AmplitudeMap = std::map<OccupationConfig, Complex>;

    FockState() = default;

    static FockState vacuum(std::vector<ModeLabel> modes, int max_photons = kDefaultMaxPhotons) {
        if (modes.empty()) throw Error(ErrorCode::BadParam, "mode list is empty");
        if (max_photons < 0) throw Error(ErrorCode::BadParam, "negative photon budget");
        std::set<std::string> seen;
        for (const auto &m : modes) {
            if (!seen.insert(m.name).second) throw Error(ErrorCode::DuplicateMode, m.name);
        }
        FockState s;
        s.amps_[OccupationConfig(modes.size(), 0)] = 1.0;
        s.modes_ = std::move(modes);
        s.max_photons_ = max_photons;
        return s;
    }

    /// Builds a state from explicit amplitudes over the modes of `like`.
    static FockState from_amplitudes(const FockState &like, const AmplitudeMap &amps) {
        FockState s;
        s.modes_ = like.modes_;
        s.max_photons_ = like.max_photons_;
        for (const auto &[cfg, a] : amps) {
            if (cfg.size() != s.modes_.size()) {
                throw Error(ErrorCode::ModeMismatch, "configuration length differs from mode count");
            }
            if (std::any_of(cfg.begin(), cfg.end(), [](int n) { return n < 0; })) {
                throw Error(ErrorCode::BadParam, "negative occupation number");
            }
            if (detail::total_photons(cfg) > s.max_photons_) {
                throw Error(ErrorCode::PhotonBudget, "configuration exceeds photon budget");
            }
            if (std::abs(a) >= kPruneEpsilon) s.amps_[cfg] += a;
        }
        return s;
    }

    const std::vector<ModeLabel> &modes() const {
        return modes_;
    }
    const AmplitudeMap &amplitudes() const {
        return amps_;
    }
    int max_photons() const {
        return max_photons_;
    }
    std::size_t mode_count() const {
        return modes_.size();
    }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            if (modes_[i].name == name) return i;
        }
        return std::nullopt;
    }

    std::size_t require_index(std::string_view name) const {
        auto idx = index_of(name);
        if (!idx) throw Error(ErrorCode::UnknownMode, std::string(name));
        return *idx;
    }

    const ModeLabel &mode_named(std::string_view name) const {
        return modes_[require_index(name)];
    }

    Complex amplitude(const OccupationConfig &cfg) const {
        auto it = amps_.find(cfg);
        return it == amps_.end() ? Complex{} : it->second;
    }

    double norm_squared() const {
        double n = 0.0;
        for (const auto &[cfg, a] : amps_) n += std::norm(a);
        return n;
    }

    bool is_zero() const {
        return amps_.empty();
    }

    bool is_normalized(double tol = 1e-10) const {
        return std::abs(norm_squared() - 1.0) <= tol;
    }

    FockState scaled(Complex factor) const {
        AmplitudeMap out;
        for (const auto &[cfg, a] : amps_) out[cfg] = a * factor;
        return with_amplitudes(std::move(out));
    }

    /// Renormalized copy; the zero state stays zero.
    FockState normalized() const {
        double n = norm_squared();
        if (n == 0.0) return *this;
        return scaled(1.0 / std::sqrt(n));
    }

    /// Same modes and budget, new amplitudes (pruned below kPruneEpsilon).
    FockState with_amplitudes(AmplitudeMap amps) const {
        FockState s;
        s.modes_ = modes_;
        s.max_photons_ = max_photons_;
        for (auto &[cfg, a] : amps) {
            if (std::abs(a) >= kPruneEpsilon) s.amps_.emplace(cfg, a);
        }
        return s;
    }

    bool same_modes(const FockState &other) const {
        return modes_ == other.modes_;
    }

    std::string to_string() const {
        std::ostringstream out;
        out << "{";
        bool first = true;
        for (const auto &[cfg, a] : amps_) {
            if (!first) out << ", ";
            first = false;
            out << "(";
            for (std::size_t i = 0; i < cfg.size(); ++i) out << (i ? "," : "") << cfg[i];
            out << "): " << a.real() << (a.imag() < 0 ? "-" : "+") << std::abs(a.imag()) << "i";
        }
        out << "}";
        return out.str();
    }

   private:
    std::vector<ModeLabel> modes_;
    AmplitudeMap amps_;
    int max_photons_ = kDefaultMaxPhotons;
};

/// Renormalized post-measurement state plus the Born probability of the outcome.
struct ProjectionOutcome {
    FockState state;
    double probability = 0.0;

    bool impossible() const {
        return state.is_zero();
    }
};

inline FockState register_modes(std::vector<ModeLabel> labels, int max_photons = kDefaultMaxPhotons) {
    return FockState::vacuum(std::move(labels), max_photons);
}

/// Applies the normalized creation operator sum_k w_k a_k^dagger.
inline FockState inject_superposition(const FockState &state,
                                      std::span<const std::pair<std::string, Complex>> weights) {
    if (weights.empty()) throw Error(ErrorCode::BadParam, "empty source");
    std::vector<std::pair<std::size_t, Complex>> targets;
    for (const auto &[name, w] : weights) targets.emplace_back(state.require_index(name), w);
    FockState::AmplitudeMap out;
    for (const auto &[cfg, a] : state.amplitudes()) {
        if (detail::total_photons(cfg) + 1 > state.max_photons()) {
            throw Error(ErrorCode::PhotonBudget, "adding a photon exceeds the photon budget");
        }
        for (const auto &[idx, w] : targets) {
            OccupationConfig next = cfg;
            next[idx] += 1;
            out[next] += a * w * std::sqrt(static_cast<double>(next[idx]));
        }
    }
    FockState result = state.with_amplitudes(std::move(out));
    if (result.is_zero()) throw Error(ErrorCode::BadParam, "source annihilates the state");
    return result.normalized();
}

inline FockState inject_photon(const FockState &state, const ModeLabel &mode) {
    std::pair<std::string, Complex> w{mode.name, 1.0};
    return inject_superposition(state, std::span(&w, 1));
}

inline bool is_unitary(const Eigen::MatrixXcd &u, double tol = kUnitarityTol) {
    if (u.rows() != u.cols() || u.rows() == 0) return false;
    Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

namespace detail {

inline std::vector<std::size_t> resolve_distinct(const FockState &state, std::span<const ModeLabel> modes) {
    std::vector<std::size_t> idx;
    idx.reserve(modes.size());
    for (const auto &m : modes) {
        std::size_t i = state.require_index(m.name);
        if (std::find(idx.begin(), idx.end(), i) != idx.end()) {
            throw Error(ErrorCode::BadParam, "mode bound twice: " + m.name);
        }
        idx.push_back(i);
    }
    return idx;
}

}  // namespace detail

/// Lifts a k-mode transfer matrix to Fock space: a_i^dagger -> sum_j u(j,i) a_j^dagger.
/// Photon number is conserved; the expansion enumerates every assignment of the
/// input photons to output modes.
inline FockState apply_mode_unitary(const FockState &state, std::span<const ModeLabel> modes,
                                    const Eigen::MatrixXcd &u) {
    const auto k = static_cast<Eigen::Index>(modes.size());
    if (u.rows() != k || u.cols() != k) throw Error(ErrorCode::BadParam, "matrix size differs from mode count");
    if (!is_unitary(u)) throw Error(ErrorCode::NotUnitary, "transfer matrix is not unitary");
    const auto idx = detail::resolve_distinct(state, modes);

    FockState::AmplitudeMap out;
    std::vector<int> photons;
    std::vector<int> counts(static_cast<std::size_t>(k));
    for (const auto &[cfg, a] : state.amplitudes()) {
        photons.clear();
        double in_norm = 1.0;
        OccupationConfig rest = cfg;
        for (Eigen::Index i = 0; i < k; ++i) {
            int n = cfg[idx[static_cast<std::size_t>(i)]];
            in_norm *= detail::factorial(n);
            for (int p = 0; p < n; ++p) photons.push_back(static_cast<int>(i));
            rest[idx[static_cast<std::size_t>(i)]] = 0;
        }
        const Complex base = a / std::sqrt(in_norm);
        const std::size_t n_photons = photons.size();

        // Odometer over output-mode assignments, one digit per photon.
        std::vector<int> digit(n_photons, 0);
        while (true) {
            Complex coeff = base;
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t p = 0; p < n_photons; ++p) {
                coeff *= u(digit[p], photons[p]);
                counts[static_cast<std::size_t>(digit[p])] += 1;
            }
            if (coeff != Complex{}) {
                double out_norm = 1.0;
                OccupationConfig next = rest;
                for (Eigen::Index j = 0; j < k; ++j) {
                    int m = counts[static_cast<std::size_t>(j)];
                    out_norm *= detail::factorial(m);
                    next[idx[static_cast<std::size_t>(j)]] = m;
                }
                out[next] += coeff * std::sqrt(out_norm);
            }
            std::size_t p = 0;
            while (p < n_photons && ++digit[p] == k) digit[p++] = 0;
            if (p == n_photons) break;
        }
    }
    return state.with_amplitudes(std::move(out));
}

/// Multiplies each amplitude by phases[n] where n is the photon count in `mode`.
inline FockState apply_fock_phase(const FockState &state, const ModeLabel &mode, std::span<const Complex> phases) {
    for (const auto &p : phases) {
        if (std::abs(std::abs(p) - 1.0) > kUnitarityTol) throw Error(ErrorCode::NotPhase, "phase is not unit modulus");
    }
    const std::size_t i = state.require_index(mode.name);
    FockState::AmplitudeMap out;
    for (const auto &[cfg, a] : state.amplitudes()) {
        auto n = static_cast<std::size_t>(cfg[i]);
        if (n >= phases.size()) {
            throw Error(ErrorCode::UnsupportedSector, "no phase given for photon number " + std::to_string(n));
        }
        out[cfg] = a * phases[n];
    }
    return state.with_amplitudes(std::move(out));
}

inline Complex inner_product(const FockState &a, const FockState &b) {
    if (!a.same_modes(b)) throw Error(ErrorCode::ModeMismatch, "states are over different mode lists");
    Complex sum{};
    const auto &small = a.amplitudes().size() <= b.amplitudes().size() ? a.amplitudes() : b.amplitudes();
    for (const auto &[cfg, unused] : small) sum += std::conj(a.amplitude(cfg)) * b.amplitude(cfg);
    return sum;
}

/// |<a|b>|^2 for normalized states.
inline double fidelity(const FockState &a, const FockState &b) {
    return std::norm(inner_product(a, b));
}

/// Maximum modulus of the amplitude difference between two states on the same modes.
inline double max_amplitude_deviation(const FockState &a, const FockState &b) {
    if (!a.same_modes(b)) throw Error(ErrorCode::ModeMismatch, "states are over different mode lists");
    double worst = 0.0;
    for (const auto &[cfg, x] : a.amplitudes()) worst = std::max(worst, std::abs(x - b.amplitude(cfg)));
    for (const auto &[cfg, y] : b.amplitudes()) worst = std::max(worst, std::abs(y - a.amplitude(cfg)));
    return worst;
}

using PhotonPattern = std::map<std::string, int>;

inline ProjectionOutcome project_pattern(const FockState &state, const PhotonPattern &pattern) {
    std::vector<std::pair<std::size_t, int>> constraints;
    for (const auto &[name, n] : pattern) constraints.emplace_back(state.require_index(name), n);
    FockState::AmplitudeMap kept;
    for (const auto &[cfg, a] : state.amplitudes()) {
        bool match = std::all_of(constraints.begin(), constraints.end(),
                                 [&](const auto &c) { return cfg[c.first] == c.second; });
        if (match) kept[cfg] = a;
    }
    FockState projected = state.with_amplitudes(std::move(kept));
    double p = projected.norm_squared();
    return {projected.normalized(), p};
}

inline ProjectionOutcome project_onto(const FockState &state, const FockState &target) {
    double p = std::norm(inner_product(target, state));
    if (p < kPruneEpsilon * kPruneEpsilon) return {state.with_amplitudes({}), 0.0};
    return {target, p};
}

/// Projects the modes of `target` (a subset of the state's modes, by name) onto
/// `target`, leaving the other modes untouched. The returned state is
/// target (x) conditioned-remainder, renormalized.
inline ProjectionOutcome project_subsystem(const FockState &state, const FockState &target) {
    std::vector<std::size_t> sub;
    for (const auto &m : target.modes()) sub.push_back(state.require_index(m.name));
    std::vector<bool> in_sub(state.mode_count(), false);
    for (auto i : sub) in_sub[i] = true;

    auto split = [&](const OccupationConfig &cfg) {
        OccupationConfig s(sub.size()), r = cfg;
        for (std::size_t j = 0; j < sub.size(); ++j) {
            s[j] = cfg[sub[j]];
            r[sub[j]] = 0;
        }
        return std::pair{s, r};
    };

    std::map<OccupationConfig, Complex> remainder;
    for (const auto &[cfg, a] : state.amplitudes()) {
        auto [s, r] = split(cfg);
        Complex t = target.amplitude(s);
        if (t != Complex{}) remainder[r] += std::conj(t) * a;
    }
    FockState::AmplitudeMap joined;
    for (const auto &[r, c] : remainder) {
        if (std::abs(c) < kPruneEpsilon) continue;
        for (const auto &[s, t] : target.amplitudes()) {
            OccupationConfig cfg = r;
            for (std::size_t j = 0; j < sub.size(); ++j) cfg[sub[j]] = s[j];
            joined[cfg] += t * c;
        }
    }
    FockState projected = state.with_amplitudes(std::move(joined));
    double p = projected.norm_squared();
    return {projected.normalized(), p};
}

/// <target| contracted over the target's modes; the result lives on the
/// remaining modes of `state`, in their original order, unnormalized.
inline FockState partial_overlap(const FockState &target, const FockState &state) {
    std::vector<bool> in_sub(state.mode_count(), false);
    std::vector<std::size_t> sub;
    for (const auto &m : target.modes()) {
        sub.push_back(state.require_index(m.name));
        in_sub[sub.back()] = true;
    }
    std::vector<ModeLabel> rest;
    for (std::size_t i = 0; i < state.mode_count(); ++i) {
        if (!in_sub[i]) rest.push_back(state.modes()[i]);
    }
    FockState out = register_modes(rest, state.max_photons());
    FockState::AmplitudeMap amps;
    for (const auto &[cfg, a] : state.amplitudes()) {
        OccupationConfig s(sub.size()), r;
        for (std::size_t j = 0; j < sub.size(); ++j) s[j] = cfg[sub[j]];
        for (std::size_t i = 0; i < cfg.size(); ++i) {
            if (!in_sub[i]) r.push_back(cfg[i]);
        }
        const Complex t = target.amplitude(s);
        if (t != Complex{}) amps[r] += std::conj(t) * a;
    }
    return out.with_amplitudes(std::move(amps));
}

/// Probability distribution of the total photon number.
inline std::map<int, double> photon_number_distribution(const FockState &state) {
    std::map<int, double> dist;
    for (const auto &[cfg, a] : state.amplitudes()) dist[detail::total_photons(cfg)] += std::norm(a);
    return dist;
}

/// Squared Schmidt coefficients (descending) of `partition` versus the other modes.
inline std::vector<double> schmidt_spectrum(const FockState &state, const std::vector<ModeLabel> &partition) {
    std::vector<std::size_t> part;
    for (const auto &m : partition) {
        std::size_t i = state.require_index(m.name);
        if (std::find(part.begin(), part.end(), i) == part.end()) part.push_back(i);
    }
    if (part.empty() || part.size() >= state.mode_count()) {
        throw Error(ErrorCode::BadPartition, "partition must be a proper nonempty subset of the modes");
    }
    if (!state.is_normalized()) throw Error(ErrorCode::BadParam, "state is not normalized");
    std::vector<bool> in_part(state.mode_count(), false);
    for (auto i : part) in_part[i] = true;

    std::map<OccupationConfig, Eigen::Index> rows, cols;
    std::vector<std::tuple<Eigen::Index, Eigen::Index, Complex>> entries;
    for (const auto &[cfg, a] : state.amplitudes()) {
        OccupationConfig r, c;
        for (std::size_t i = 0; i < cfg.size(); ++i) (in_part[i] ? r : c).push_back(cfg[i]);
        auto ri = rows.try_emplace(r, static_cast<Eigen::Index>(rows.size())).first->second;
        auto ci = cols.try_emplace(c, static_cast<Eigen::Index>(cols.size())).first->second;
        entries.emplace_back(ri, ci, a);
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                static_cast<Eigen::Index>(cols.size()));
    for (const auto &[r, c, a] : entries) m(r, c) = a;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    std::vector<double> spectrum;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        double s2 = svd.singularValues()(i) * svd.singularValues()(i);
        if (s2 >= kPruneEpsilon) spectrum.push_back(s2);
    }
    std::sort(spectrum.begin(), spectrum.end(), std::greater<>());
    return spectrum;
}

}  // namespace router_sim
