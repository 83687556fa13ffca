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

#include "router_sim/tsvf.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dense_oracle.hpp"

using namespace router_sim;

namespace {

const Complex I{0.0, 1.0};

ErrorCode code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "expected router_sim::Error";
    return ErrorCode::BadParam;
}

const Box kBoxes[] = {Box::A, Box::B, Box::C};
const char *kTimes[] = {"t1", "t2", "t3"};

}  // namespace

TEST(AblProbability, DisappearingParticlePredictions) {
    auto spec = disappearing_particle_spec();
    EXPECT_NEAR(abl_probability(spec, {Box::A, "t1"}), 1.0, 1e-12);
    EXPECT_NEAR(abl_probability(spec, {Box::C, "t1"}), 1.0, 1e-12);
    EXPECT_NEAR(abl_probability(spec, {Box::A, "t2"}), 0.0, 1e-12);
    EXPECT_NEAR(abl_probability(spec, {Box::B, "t2"}), 0.0, 1e-12);
    EXPECT_NEAR(abl_probability(spec, {Box::C, "t2"}), 1.0, 1e-12);
    EXPECT_NEAR(abl_probability(spec, {Box::B, "t3"}), 1.0, 1e-12);
    EXPECT_NEAR(abl_probability(spec, {Box::C, "t3"}), 1.0, 1e-12);
}

TEST(AblProbability, ComplementsSumToOne) {
    // ABL for 1 - Pi equals 1 - ABL(Pi): check against the direct two-term formula.
    auto spec = disappearing_particle_spec();
    for (Box b : kBoxes) {
        for (const char *t : kTimes) {
            const double yes = std::norm(detail::transition_amplitude(spec, ProjectorSpec{b, t}, false));
            const double no = std::norm(detail::transition_amplitude(spec, ProjectorSpec{b, t}, true));
            EXPECT_NEAR(abl_probability(spec, {b, t}) + no / (yes + no), 1.0, 1e-10);
        }
    }
}

TEST(AblProbability, OrthogonalSelectionsAreUndefined) {
    auto spec = three_box_spec();
    spec.post = shutter_state(1.0, -1.0, 0.0);
    // <post|pre> = (1 - 1)/sqrt6 = 0.
    EXPECT_EQ(code_of([&] { abl_probability(spec, {Box::A, "t"}); }), ErrorCode::UndefinedConditioning);
    EXPECT_EQ(code_of([&] { weak_value(spec, {Box::A, "t"}); }), ErrorCode::UndefinedConditioning);
}

TEST(WeakValue, NegativeOccupationsOfTheEmptyPair) {
    auto spec = disappearing_particle_spec();
    auto wb1 = weak_value(spec, {Box::B, "t1"});
    auto wa3 = weak_value(spec, {Box::A, "t3"});
    EXPECT_NEAR(wb1.real(), -1.0, 1e-12);
    EXPECT_NEAR(wb1.imag(), 0.0, 1e-12);
    EXPECT_NEAR(wa3.real(), -1.0, 1e-12);
    EXPECT_NEAR(wa3.imag(), 0.0, 1e-12);
    for (const char *t : kTimes) {
        auto sum = weak_value(spec, {Box::A, t}) + weak_value(spec, {Box::B, t});
        EXPECT_LT(std::abs(sum), 1e-12) << t;
    }
}

TEST(WeakValue, ProjectorCompletenessAndEigenvalueAgreement) {
    std::mt19937_64 rng(21);
    std::vector<TwoStateSpec> specs{disappearing_particle_spec(), three_box_spec()};
    for (int k = 0; k < 30; ++k) {
        auto pre = oracle::random_unit_vector(3, rng), post = oracle::random_unit_vector(3, rng);
        auto spec = disappearing_particle_spec();
        spec.pre = shutter_state(pre[0], pre[1], pre[2]);
        spec.post = shutter_state(post[0], post[1], post[2]);
        specs.push_back(spec);
    }
    for (const auto &spec : specs) {
        for (const auto &cp : spec.checkpoints) {
            Complex sum{};
            for (Box b : kBoxes) {
                const ProjectorSpec proj{b, cp.name};
                const Complex w = weak_value(spec, proj);
                sum += w;
                if (std::abs(w) < 1e-10) EXPECT_NEAR(abl_probability(spec, proj), 0.0, 1e-10);
                if (std::abs(w - 1.0) < 1e-10) EXPECT_NEAR(abl_probability(spec, proj), 1.0, 1e-10);
            }
            EXPECT_LT(std::abs(sum - 1.0), 1e-10);
        }
    }
}

TEST(PostselectionSuccess, OddsRiseWhenTheShutterIsFoundInC) {
    auto spec = disappearing_particle_spec();
    EXPECT_NEAR(postselection_success(spec), 1.0 / 9.0, 1e-12);
    EXPECT_NEAR(postselection_success(spec, ProjectorSpec{Box::C, "t2"}), 1.0 / 3.0, 1e-12);
    // The same 1/3 holds for the other certain outcomes.
    EXPECT_NEAR(postselection_success(spec, ProjectorSpec{Box::A, "t1"}), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(postselection_success(spec, ProjectorSpec{Box::B, "t3"}), 1.0 / 3.0, 1e-12);

    TwoStateSpec trivial{three_box_spec().pre, three_box_spec().pre, {}, {{"t", 0}}};
    EXPECT_NEAR(postselection_success(trivial), 1.0, 1e-12);
}

TEST(PostselectionFrames, EmbeddedFinalEvolutionGivesIdenticalAnalysis) {
    auto full = disappearing_particle_spec(PostselectionFrame::Final);
    auto embedded = disappearing_particle_spec(PostselectionFrame::AtLastCheckpoint);
    EXPECT_NEAR(std::abs(two_state_overlap(full) - two_state_overlap(embedded)), 0.0, 1e-12);
    for (Box b : kBoxes) {
        for (const char *t : kTimes) {
            EXPECT_NEAR(abl_probability(full, {b, t}), abl_probability(embedded, {b, t}), 1e-12);
            EXPECT_LT(std::abs(weak_value(full, {b, t}) - weak_value(embedded, {b, t})), 1e-12);
        }
    }
}

TEST(ThreeBoxRetrodiction, CertainInEitherOpenedBox) {
    auto spec = three_box_spec();
    EXPECT_NEAR(three_box_retrodiction(spec.pre, spec.post, Box::A), 1.0, 1e-12);
    EXPECT_NEAR(three_box_retrodiction(spec.pre, spec.post, Box::B), 1.0, 1e-12);

    // post = pre: direct evaluation of |a|^2 / (|a|^2 + |b|^2) with a = <psi|Pi_A|psi> = 1/3
    // and b = <psi|1 - Pi_A|psi> = 2/3.
    const double a = 1.0 / 3.0, b = 2.0 / 3.0;
    EXPECT_NEAR(three_box_retrodiction(spec.pre, spec.pre, Box::A), a * a / (a * a + b * b), 1e-12);
    EXPECT_EQ(code_of([&] { three_box_retrodiction(spec.pre, spec.post, Box::C); }), ErrorCode::BadParam);
}

TEST(TransitionAmplitude, MarginalOverACompletePostBasisIsTheBornRule) {
    // sum_f |<f|U(tf,t) Pi U(t,0)|pre>|^2 = ||Pi U(t,0)|pre>||^2 for an orthonormal basis {f}.
    std::mt19937_64 rng(8);
    auto u = oracle::random_unitary(3, rng);
    for (const char *t : kTimes) {
        for (Box b : kBoxes) {
            auto spec = disappearing_particle_spec();
            const ProjectorSpec proj{b, t};
            double joint = 0.0;
            for (int k = 0; k < 3; ++k) {
                spec.post = shutter_state(u(0, k), u(1, k), u(2, k));
                joint += std::norm(detail::transition_amplitude(spec, proj, false));
            }
            EXPECT_NEAR(joint, born_probability(spec, proj), 1e-10);
        }
    }
}
