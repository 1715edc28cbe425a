// Copyright 2026 The cvwitness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cvwitness/errors.hpp"
#include "cvwitness/ppt.hpp"
#include "cvwitness/states.hpp"

namespace cvw {
namespace {

TEST(PptMinEig, BellState) {
    const auto v = ppt_min_eig(noon_state({1}, FockCutoff(2, 2)));
    EXPECT_NEAR(v.min_eigenvalue, -0.5, 1e-12);
    EXPECT_TRUE(v.entangled);
}

TEST(PptMinEig, ProductsAndSeparableMixtures) {
    const int d = default_coherent_cutoff(1.0);
    const FockCutoff c(d, d);
    EXPECT_FALSE(ppt_min_eig(coherent_product(Complex(0.7, 0.2), Complex(-0.4, 0.6), c)).entangled);
    EXPECT_FALSE(ppt_min_eig(cat_state({Complex(1, 0), Complex(1, 0), 1.0}, c)).entangled);
    EXPECT_FALSE(ppt_min_eig(thermal_product(0.4, 0.2, FockCutoff(20, 20))).entangled);
}

TEST(PptMinEig, NoonAndCatEntangled) {
    for (int N = 1; N <= 4; ++N) EXPECT_TRUE(ppt_min_eig(noon_state({N}, FockCutoff(N + 1, N + 1))).entangled);
    const int d = default_coherent_cutoff(2.0);
    EXPECT_TRUE(ppt_min_eig(cat_state({Complex(2, 0), Complex(2, 0), 0.0}, FockCutoff(d, d))).entangled);
}

TEST(PptMinEig, FactoryConfirmsNearZero) {
    const auto factory = [](FockCutoff c) { return cat_state({Complex(1, 0), Complex(1, 0), 1.0}, c); };
    const int d = default_coherent_cutoff(1.0);
    const auto v = ppt_min_eig(factory, FockCutoff(d, d));
    EXPECT_TRUE(v.confirmed_at_double_cutoff);
    EXPECT_EQ(v.cutoff, FockCutoff(2 * d, 2 * d));
    EXPECT_FALSE(v.entangled);

    const auto bell = ppt_min_eig([](FockCutoff c) { return noon_state({1}, c); }, FockCutoff(2, 2));
    EXPECT_FALSE(bell.confirmed_at_double_cutoff);
    EXPECT_TRUE(bell.entangled);
}

TEST(SvMomentMinor, Anchors) {
    const auto coh = coherent_product(Complex(0.5, 0.1), Complex(-0.2, 0.3), FockCutoff(20, 20));
    EXPECT_NEAR(sv_moment_minor(coh, {Complex(0.5, 0.1), Complex(-0.2, 0.3)}).value, 0.0, 1e-10);
    EXPECT_NEAR(sv_moment_minor(noon_state({1}, FockCutoff(2, 2)), {}).value, -0.25, 1e-12);
}

TEST(SvMomentMinor, CoherentZeroEverywhere) {
    const auto coh = coherent_product(Complex(0.5, 0.1), Complex(-0.2, 0.3), FockCutoff(20, 20));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 5; ++k) {
        const PhasePoint p{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
        EXPECT_NEAR(sv_moment_minor(coh, p).value, 0.0, 1e-9);
    }
}

TEST(SvMomentMinor, CatDominatesHusimi) {
    const int d = default_coherent_cutoff(3.0);
    const auto cat = cat_state({Complex(3, 0), Complex(3, 0), 0.0}, FockCutoff(d, d));
    const PhasePoint p{Complex(0, 3), Complex(0, 3)};
    EXPECT_GE(sv_moment_minor(cat, p).value, husimi_criterion(cat, p).value);
}

TEST(PptCompression, MatchesHusimiMatrix) {
    EXPECT_LT(ppt_compression_check(TwoModeState::vacuum(FockCutoff(6, 6)), {}, 2), 1e-12);
    EXPECT_LT(ppt_compression_check(noon_state({1}, FockCutoff(6, 6)), {}, 2), 1e-10);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int k = 0; k < 5; ++k) {
        const auto s = random_haar_state(3, 99, k, FockCutoff(3, 3)).embedded(FockCutoff(12, 12));
        const PhasePoint p{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
        EXPECT_LT(ppt_compression_check(s, p, 2), 1e-9);
    }
}

TEST(PptCompression, RejectsSmallCutoff) {
    EXPECT_THROW(ppt_compression_check(noon_state({1}, FockCutoff(5, 5)), {}, 2), InvalidCutoff);
}

}  // namespace
}  // namespace cvw
