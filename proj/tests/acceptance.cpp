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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "router_sim/circuit_dsl.hpp"
#include "router_sim/report.hpp"
#include "router_sim/scenarios.hpp"
#include "router_sim/tsvf.hpp"

using namespace router_sim;

namespace {

constexpr double kProbTol = 1e-9;          // criteria 1-7
constexpr double kStrictBelow = 1e-6;      // perturbations must fall below 1 - this
constexpr double kRouterTol = 1e-10;       // criterion 8
constexpr double kOracleTol = 1e-12;       // criterion 9
constexpr double kSchmidtFloor = 1e-6;     // criterion 10
constexpr double kSignalingTol = 1e-10;    // criterion 10
constexpr double kDslTol = 1e-10;          // criterion 11
constexpr double kThreeBoxBudgetS = 1.0;   // criterion 1, total
constexpr double kFullRunBudgetS = 0.1;    // criterion 5, per run
constexpr int kDraws = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char *f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Outcome three_box_fidelity() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (int k = 0; k < kDraws; ++k) {
        const auto a = random_alphas(2, rng);
        worst = std::max(worst, std::abs(1.0 - *three_box_shutter(a[0], a[1]).fidelity_to_target));
    }
    const double dt = seconds_since(t0);
    return {worst <= kProbTol && dt < kThreeBoxBudgetS, fmt("max |1 - F| = %.2e over 100 draws, %.3f s", worst, dt)};
}

Outcome abl_predictions() {
    const TwoStateSpec spec = disappearing_particle_spec();
    const std::pair<ProjectorSpec, double> expected[] = {
        {{Box::A, "t1"}, 1.0}, {{Box::C, "t1"}, 1.0}, {{Box::A, "t2"}, 0.0}, {{Box::B, "t2"}, 0.0},
        {{Box::C, "t2"}, 1.0}, {{Box::B, "t3"}, 1.0}, {{Box::C, "t3"}, 1.0}};
    double worst = 0.0;
    for (const auto &[proj, p] : expected) worst = std::max(worst, std::abs(abl_probability(spec, proj) - p));
    return {worst <= kProbTol, fmt("max deviation %.2e over 7 projectors", worst)};
}

Outcome weak_values() {
    const TwoStateSpec spec = disappearing_particle_spec();
    double worst = std::abs(weak_value(spec, {Box::B, "t1"}) + 1.0);
    worst = std::max(worst, std::abs(weak_value(spec, {Box::A, "t3"}) + 1.0));
    for (const char *t : {"t1", "t2", "t3"}) {
        worst = std::max(worst, std::abs(weak_value(spec, {Box::A, t}) + weak_value(spec, {Box::B, t})));
    }
    return {worst <= kProbTol, fmt("max deviation %.2e", worst)};
}

Outcome postselection_odds() {
    const TwoStateSpec spec = disappearing_particle_spec();
    const double plain = postselection_success(spec);
    const double given = postselection_success(spec, ProjectorSpec{Box::C, "t2"});
    const bool ok = std::abs(plain - 1.0 / 9.0) <= kProbTol && std::abs(given - 1.0 / 3.0) <= kProbTol;
    return {ok, fmt("P(post) = %.12f, P(post | C(t2)) = %.12f", plain, given)};
}

Outcome full_scheme() {
    std::mt19937_64 rng(202);
    double worst = 0.0, slowest = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const auto a = random_alphas(5, rng);
        const auto t0 = Clock::now();
        const auto r = disappearing_full(a);
        slowest = std::max(slowest, seconds_since(t0));
        worst = std::max(worst, std::abs(1.0 - r.outcome("spd2|post")));
    }
    return {worst <= kProbTol && slowest < kFullRunBudgetS,
            fmt("max |1 - P| = %.2e over 100 draws, slowest run %.4f s", worst, slowest)};
}

Outcome perturbation_family(const std::vector<std::pair<std::string, std::vector<std::string>>> &cases) {
    double worst_unity = 0.0, highest_perturbed = 0.0;
    for (const auto &[name, perturbations] : cases) {
        const ScenarioEntry *e = find_scenario(name);
        worst_unity = std::max(worst_unity, std::abs(1.0 - e->run({}).outcome("spd2|post")));
        for (const auto &p : perturbations) {
            ScenarioOptions o;
            o.perturbation = p;
            highest_perturbed = std::max(highest_perturbed, e->run(o).outcome("spd2|post"));
        }
    }
    return {worst_unity <= kProbTol && highest_perturbed < 1.0 - kStrictBelow,
            fmt("max |1 - P| = %.2e, highest perturbed P = %.6f", worst_unity, highest_perturbed)};
}

Outcome router_equivalence() {
    const ModeLabel in = mode("in"), out = mode("out"), ctrl = mode("ctrl"), spectator = mode("spec");
    const std::vector<ModeLabel> modes{in, out, ctrl, spectator};
    double worst = 0.0;
    int configs = 0;
    for (RouterOrientation o : {RouterOrientation::ReflectOnMatch, RouterOrientation::TransmitOnMatch}) {
        const Element ideal = pqr_ideal(in, out, ctrl, o), dec = pqr_decomposed(in, out, ctrl, o);
        std::optional<Complex> phase;
        for (const auto &cfg : oracle::enumerate_basis(4, 2)) {
            if (cfg[0] + cfg[1] > 1 || cfg[2] > 1) continue;
            const FockState s = FockState::from_amplitudes(register_modes(modes, 2), {{cfg, 1.0}});
            const FockState a = apply_element(ideal, s), b = apply_element(dec, s);
            const Complex ov = inner_product(a, b);
            if (!phase) phase = ov / std::abs(ov);
            worst = std::max(worst, 1.0 - fidelity(a, b));
            worst = std::max(worst, max_amplitude_deviation(a.scaled(*phase), b));
            ++configs;
        }
    }
    return {worst <= kRouterTol, fmt("%.0f basis configurations, max deviation %.2e", configs, worst)};
}

Outcome oracle_equivalence() {
    double worst = 0.0;
    int circuits = 0;
    for (RouterModel model : {RouterModel::Ideal, RouterModel::Decomposed}) {
        for (const auto &e : scenario_registry()) {
            std::vector<std::string> ps{""};
            ps.insert(ps.end(), e.perturbations.begin(), e.perturbations.end());
            for (const auto &p : ps) {
                ScenarioOptions o;
                o.perturbation = p;
                o.model = model;
                const auto sc = e.build(o);
                worst = std::max(worst, max_amplitude_deviation(simulate(sc.circuit).final_state,
                                                                oracle::dense_propagate(sc.circuit)));
                ++circuits;
            }
        }
    }
    return {worst <= kOracleTol, fmt("%.0f circuits, max amplitude deviation %.2e", circuits, worst)};
}

Outcome entanglement() {
    std::mt19937_64 rng(303);
    double smallest_second = 1.0, signaling = 0.0, chsh_max = 0.0;
    const Dichotomy<AliceSetting> a0{AliceSetting::OpenBoxes, {"A"}}, a1{AliceSetting::Superpose, {"+"}};
    const Dichotomy<BobSetting> b0{BobSetting::OpenCavities, {"i", "ii", "iii"}}, b1{BobSetting::Superpose, {"+"}};
    for (int k = 0; k < 20; ++k) {
        const auto a = random_alphas(5, rng);
        const auto r = disappearing_full(a);
        const auto &s = *r.schmidt_spectrum;
        smallest_second = std::min(smallest_second, s.size() > 1 ? s[1] : 0.0);
        const auto e = bell_experiment(a);
        signaling = std::max(signaling, no_signaling_deviation(e));
        chsh_max = std::max(chsh_max, std::abs(chsh(e, {a0, a1}, {b0, b1})));
    }
    std::printf("  info: largest |CHSH| over the draws with the sample dichotomies = %.6f (reported only)\n", chsh_max);
    return {smallest_second > kSchmidtFloor && signaling <= kSignalingTol,
            fmt("smallest second Schmidt value %.3e, max signaling %.2e", smallest_second, signaling)};
}

std::string read_circuit(const std::string &name) {
    std::ifstream in(std::string(ROUTER_SIM_CIRCUIT_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome dsl_equivalence() {
    const std::pair<const char *, ScenarioCircuit (*)(const ScenarioOptions &)> shipped[] = {
        {"fig2b.circuit", disappearing_full_circuit},
        {"fig3a.circuit", simplified_3path_circuit},
        {"fig3b.circuit", simplest_2path_circuit},
        {"fig4.circuit", stricter_6beam_circuit}};
    bool round_trip = true;
    double worst = 0.0;
    for (const auto &[file, build] : shipped) {
        const std::string text = read_circuit(file);
        if (text.empty()) return {false, std::string("cannot read ") + file};
        const dsl::CircuitDoc doc = dsl::parse(text);
        round_trip = round_trip && dsl::parse(dsl::render(doc)) == doc;
        const ScenarioResult a = circuit_result(file, dsl::compile(doc));
        const ScenarioResult b = evaluate(build({}));
        if (a.outcomes.size() != b.outcomes.size()) return {false, std::string("outcome count differs for ") + file};
        for (std::size_t k = 0; k < a.outcomes.size(); ++k) {
            if (a.outcomes[k].first != b.outcomes[k].first) return {false, std::string("labels differ for ") + file};
            worst = std::max(worst, std::abs(a.outcomes[k].second - b.outcomes[k].second));
        }
    }
    return {round_trip && worst <= kDslTol,
            std::string(round_trip ? "round trip ok" : "round trip FAILED") + fmt(", max outcome deviation %.2e", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"three-box shutter keeps the probe superposition", three_box_fidelity},
        {"ABL predictions at t1, t2, t3", abl_predictions},
        {"weak values -1 and A + B = 0", weak_values},
        {"post-selection odds 1/9 and 1/3", postselection_odds},
        {"full five-beam scheme restores the probe", full_scheme},
        {"simplified schemes and absence test with perturbations",
         [] {
             return perturbation_family({{"simplified_3path", {"no-routers", "wrong-box-t2", "switched-router-C-t2"}},
                                         {"simplest_2path", {"wrong-time", "wrong-box"}},
                                         {"absence_test", {"at-t1", "at-t3", "switched-router"}}});
         }},
        {"stricter six-beam scheme with flipped t2 routers",
         [] { return perturbation_family({{"stricter_6beam", {"reflect-A-t2", "reflect-B-t2"}}}); }},
        {"decomposed router equals the ideal router", router_equivalence},
        {"sparse propagation equals the dense oracle", oracle_equivalence},
        {"entanglement and no-signaling", entanglement},
        {"DSL round trip and circuit-file equivalence", dsl_equivalence},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
