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

// Brute-force dense Fock-space reference used only by the tests. Linear
// elements are lifted through matrix permanents rather than the multinomial
// expansion used by the library.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "router_sim/circuit.hpp"
#include "router_sim/elements.hpp"
#include "router_sim/fock_state.hpp"

namespace oracle {

using router_sim::Complex;
using router_sim::OccupationConfig;

/// Every configuration over `modes` modes with total photon number <= max_photons.
inline std::vector<OccupationConfig> enumerate_basis(std::size_t modes, int max_photons) {
    std::vector<OccupationConfig> out;
    OccupationConfig cur(modes, 0);
    auto rec = [&](auto &&self, std::size_t pos, int left) -> void {
        if (pos == modes) {
            out.push_back(cur);
            return;
        }
        for (int n = 0; n <= left; ++n) {
            cur[pos] = n;
            self(self, pos + 1, left - n);
        }
        cur[pos] = 0;
    };
    rec(rec, 0, max_photons);
    return out;
}

inline Complex permanent(const Eigen::MatrixXcd &m) {
    const auto n = m.rows();
    if (n == 0) return 1.0;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Complex total{};
    do {
        Complex prod = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) prod *= m(i, perm[static_cast<std::size_t>(i)]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

inline double fact(int n) {
    return n <= 1 ? 1.0 : n * fact(n - 1);
}

struct DenseSpace {
    std::vector<OccupationConfig> basis;
    std::map<OccupationConfig, Eigen::Index> index;

    DenseSpace(std::size_t modes, int max_photons) : basis(enumerate_basis(modes, max_photons)) {
        for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<Eigen::Index>(i);
    }

    Eigen::Index dim() const {
        return static_cast<Eigen::Index>(basis.size());
    }

    Eigen::VectorXcd to_dense(const router_sim::FockState &s) const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
        for (const auto &[cfg, a] : s.amplitudes()) v(index.at(cfg)) = a;
        return v;
    }

    router_sim::FockState to_state(const router_sim::FockState &like, const Eigen::VectorXcd &v) const {
        router_sim::FockState::AmplitudeMap amps;
        for (Eigen::Index i = 0; i < dim(); ++i) {
            if (std::abs(v(i)) > 0.0) amps[basis[static_cast<std::size_t>(i)]] = v(i);
        }
        return router_sim::FockState::from_amplitudes(like, amps);
    }

    /// Fock matrix of an m x m single-particle unitary via permanents.
    Eigen::MatrixXcd lift(const Eigen::MatrixXcd &u) const {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim(), dim());
        auto photon_list = [](const OccupationConfig &c) {
            std::vector<Eigen::Index> l;
            for (std::size_t i = 0; i < c.size(); ++i)
                for (int k = 0; k < c[i]; ++k) l.push_back(static_cast<Eigen::Index>(i));
            return l;
        };
        for (Eigen::Index col = 0; col < dim(); ++col) {
            const auto &in = basis[static_cast<std::size_t>(col)];
            const auto in_l = photon_list(in);
            double in_norm = 1.0;
            for (int n : in) in_norm *= fact(n);
            for (Eigen::Index row = 0; row < dim(); ++row) {
                const auto &o = basis[static_cast<std::size_t>(row)];
                const auto out_l = photon_list(o);
                if (out_l.size() != in_l.size()) continue;
                Eigen::MatrixXcd sub(static_cast<Eigen::Index>(out_l.size()), static_cast<Eigen::Index>(in_l.size()));
                for (std::size_t a = 0; a < out_l.size(); ++a)
                    for (std::size_t b = 0; b < in_l.size(); ++b)
                        sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = u(out_l[a], in_l[b]);
                double out_norm = 1.0;
                for (int n : o) out_norm *= fact(n);
                out(row, col) = permanent(sub) / std::sqrt(in_norm * out_norm);
            }
        }
        return out;
    }
};

/// Independent 2x2 definitions of the library's conventions.
inline Eigen::MatrixXcd bs2(double r) {
    const Complex i{0, 1};
    Eigen::MatrixXcd m(2, 2);
    m << std::sqrt(r), i * std::sqrt(1 - r), i * std::sqrt(1 - r), std::sqrt(r);
    return m;
}

inline Eigen::MatrixXcd tunnel2(double theta) {
    const Complex i{0, 1};
    Eigen::MatrixXcd m(2, 2);
    m << std::cos(theta), -i * std::sin(theta), -i * std::sin(theta), std::cos(theta);
    return m;
}

/// Dense Fock matrix of one schedule element over the modes of `like`.
inline Eigen::MatrixXcd element_matrix(const DenseSpace &space, const router_sim::FockState &like,
                                       const router_sim::Element &e) {
    using namespace router_sim;
    const auto m = static_cast<Eigen::Index>(like.mode_count());
    auto embed = [&](const std::vector<ModeLabel> &modes, const Eigen::MatrixXcd &small) {
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(m, m);
        std::vector<Eigen::Index> idx;
        for (const auto &md : modes) idx.push_back(static_cast<Eigen::Index>(like.require_index(md.name)));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b)
                u(idx[a], idx[b]) = small(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        return space.lift(u);
    };
    auto diagonal = [&](auto &&phase_of) {
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
        for (Eigen::Index i = 0; i < space.dim(); ++i) d(i, i) = phase_of(space.basis[static_cast<std::size_t>(i)]);
        return d;
    };
    auto permutation = [&](auto &&map_cfg) {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
        for (Eigen::Index i = 0; i < space.dim(); ++i) {
            auto target = map_cfg(space.basis[static_cast<std::size_t>(i)]);
            p(space.index.at(target), i) = 1.0;
        }
        return p;
    };
    auto composite = [&](const std::vector<Element> &seq) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(space.dim(), space.dim());
        for (const auto &x : seq) acc = element_matrix(space, like, x) * acc;
        return acc;
    };

    if (const auto *x = std::get_if<Beamsplitter>(&e)) return embed({x->first, x->second}, bs2(x->reflectivity));
    if (const auto *x = std::get_if<Tunnel>(&e)) return embed({x->first, x->second}, tunnel2(x->theta));
    if (const auto *x = std::get_if<PhaseShift>(&e)) {
        Eigen::MatrixXcd p(1, 1);
        p(0, 0) = std::polar(1.0, x->angle);
        return embed({x->target}, p);
    }
    if (const auto *x = std::get_if<NsSingle>(&e)) {
        const auto i = like.require_index(x->target.name);
        return diagonal([&](const OccupationConfig &c) { return c[i] == 2 ? Complex(-1.0) : Complex(1.0); });
    }
    if (const auto *x = std::get_if<Relabel>(&e)) {
        std::vector<std::pair<std::size_t, std::size_t>> mv;
        for (const auto &[f, t] : x->mapping) mv.emplace_back(like.require_index(f.name), like.require_index(t.name));
        return permutation([&](const OccupationConfig &c) {
            auto n = c;
            for (auto [f, t] : mv) n[t] = c[f];
            return n;
        });
    }
    if (const auto *x = std::get_if<Router>(&e)) {
        if (x->model == RouterModel::Decomposed) return composite(lower(e));
        const auto a = like.require_index(x->probe_in.name);
        const auto b = like.require_index(x->probe_out.name);
        const auto c = like.require_index(x->control.name);
        const bool reflect = x->orientation == RouterOrientation::ReflectOnMatch;
        // Outside the router's sector the oracle acts as the identity; the
        // library rejects such inputs instead.
        return permutation([&](const OccupationConfig &cfg) {
            auto n = cfg;
            if (cfg[a] + cfg[b] <= 1 && cfg[c] <= 1 && ((cfg[c] == 1) == reflect)) std::swap(n[a], n[b]);
            return n;
        });
    }
    return composite(lower(e));
}

/// Dense propagation of the full schedule of a circuit.
inline router_sim::FockState dense_propagate(const router_sim::Circuit &c) {
    const auto init = router_sim::initial_state(c);
    DenseSpace space(init.mode_count(), c.max_photons);
    Eigen::VectorXcd v = space.to_dense(init);
    for (const auto &e : c.schedule) v = element_matrix(space, init, e) * v;
    return space.to_state(init, v);
}

inline Eigen::MatrixXcd random_unitary(Eigen::Index k, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd z(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) z(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    return qr.householderQ();
}

inline std::vector<Complex> random_unit_vector(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> v(n);
    double norm = 0;
    for (auto &x : v) {
        x = Complex(g(rng), g(rng));
        norm += std::norm(x);
    }
    for (auto &x : v) x /= std::sqrt(norm);
    return v;
}

}  // namespace oracle
