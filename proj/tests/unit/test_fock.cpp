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
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "cvwitness/errors.hpp"
#include "cvwitness/fock.hpp"
#include "cvwitness/states.hpp"

namespace cvw {
namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// <m|D(alpha)|n> from the generalised Laguerre kernel of the untruncated operator.
Complex laguerre_element(Complex alpha, int m, int n) {
    const double x = std::norm(alpha);
    const double pre = std::exp(-0.5 * x);
    if (m >= n) {
        const double f = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
        return f * pre * std::pow(alpha, m - n) * std::assoc_laguerre(n, m - n, x);
    }
    const double f = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)));
    return f * pre * std::pow(-std::conj(alpha), n - m) * std::assoc_laguerre(m, n - m, x);
}

// |gamma> amplitudes by the plain power series.
Complex series_amplitude(Complex gamma, int n) {
    Complex term = std::exp(-0.5 * std::norm(gamma));
    for (int k = 1; k <= n; ++k) term *= gamma / std::sqrt(static_cast<double>(k));
    return term;
}

TEST(FockCutoff, RejectsDimensionsBelowTwo) {
    EXPECT_THROW(FockCutoff(1, 3), InvalidCutoff);
    EXPECT_THROW(FockCutoff(3, 0), InvalidCutoff);
    const FockCutoff c(3, 4);
    EXPECT_EQ(c.total(), 12);
    EXPECT_EQ(c.index(2, 1), 9);
}

TEST(LadderOperator, Entries) {
    const auto a2 = ladder_operator(2, LadderKind::Annihilate).matrix;
    EXPECT_DOUBLE_EQ(a2(0, 1).real(), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(a2(0, 0)) + std::abs(a2(1, 0)) + std::abs(a2(1, 1)), 0.0);

    const auto a3 = ladder_operator(3, LadderKind::Annihilate).matrix;
    EXPECT_NEAR(a3(1, 2).real(), 1.41421356, 1e-8);

    const auto n4 = ladder_operator(4, LadderKind::Number).matrix;
    for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(n4(k, k).real(), k);
    EXPECT_DOUBLE_EQ(max_abs(n4) , 3.0);

    EXPECT_THROW(ladder_operator(1, LadderKind::Create), InvalidCutoff);
}

TEST(LadderOperator, CommutatorExactBelowTopLevel) {
    const int d = 9;
    const CMatrix a = ladder_operator(d, LadderKind::Annihilate).matrix;
    const CMatrix ad = ladder_operator(d, LadderKind::Create).matrix;
    const CMatrix comm = a * ad - ad * a - CMatrix::Identity(d, d);
    EXPECT_LT(max_abs(comm.topLeftCorner(d - 1, d - 1)), 1e-12);
}

TEST(DisplacementOperator, ZeroIsIdentity) {
    const auto d = displacement_operator(Complex(0, 0), 7);
    EXPECT_EQ(max_abs(d.matrix - CMatrix::Identity(7, 7)), 0.0);
    EXPECT_EQ(d.unitarity_residual, 0.0);
}

TEST(DisplacementOperator, VacuumOverlapMatchesSeries) {
    const auto d = displacement_operator(Complex(1, 0), 40);
    EXPECT_NEAR(d.matrix(0, 0).real(), std::exp(-0.5), 1e-10);
    for (int n = 0; n < 15; ++n) {
        EXPECT_LT(std::abs(d.matrix(n, 0) - series_amplitude(Complex(1, 0), n)), 1e-10) << n;
    }
}

TEST(DisplacementOperator, UnitaryOnLowLevels) {
    const auto d = displacement_operator(Complex(1, 0), 40);
    const CMatrix u = d.matrix.adjoint() * d.matrix;
    EXPECT_LT(max_abs(u.topLeftCorner(20, 20) - CMatrix::Identity(20, 20)), 1e-8);
}

TEST(DisplacementOperator, MatchesLaguerreKernel) {
    const Complex alpha(0.7, -0.4);
    const auto d = displacement_operator(alpha, 60);
    for (int m = 0; m < 12; ++m) {
        for (int n = 0; n < 12; ++n) {
            EXPECT_LT(std::abs(d.matrix(m, n) - laguerre_element(alpha, m, n)), 1e-10) << m << "," << n;
        }
    }
}

TEST(DisplacementOperator, GuardViolationWarns) {
    const auto d = displacement_operator(Complex(3, 0), 10);
    ASSERT_FALSE(d.warnings.empty());
    EXPECT_EQ(d.warnings.front(), flag::kTruncationRisk);
    EXPECT_THROW(displacement_operator(Complex(std::nan(""), 0), 10), InvalidArgument);
}

TEST(DisplacementOperator, DriftShrinksWithCutoff) {
    EXPECT_LT(displacement_truncation_drift(Complex(1, 0.5), 40), 1e-6);
}

TEST(DisplacedFockColumns, MatchLaguerreKernel) {
    const Complex s(-1.2, 0.9);
    const CMatrix v = displaced_fock_columns(s, 6, 80);
    for (int m = 0; m < 30; ++m) {
        for (int n = 0; n < 6; ++n) {
            EXPECT_LT(std::abs(v(m, n) - laguerre_element(s, m, n)), 1e-12) << m << "," << n;
        }
    }
}

TEST(CoherentKet, MatchesSeries) {
    const Complex g(0.3, 1.1);
    const CVector k = coherent_ket(g, 25);
    for (int n = 0; n < 25; ++n) EXPECT_LT(std::abs(k(n) - series_amplitude(g, n)), 1e-14);
}

CMatrix conjugate(const CMatrix& u, const CMatrix& op) { return u.adjoint() * op * u; }

TEST(Beamsplitter, FullyTransmissive) {
    const FockCutoff c(4, 4);
    const CMatrix u = beamsplitter_unitary(1.0, 0.0, c).matrix;
    const CMatrix a = Eigen::kroneckerProduct(ladder_operator(4, LadderKind::Annihilate).matrix, CMatrix::Identity(4, 4));
    const CMatrix b = Eigen::kroneckerProduct(CMatrix::Identity(4, 4), ladder_operator(4, LadderKind::Annihilate).matrix);
    EXPECT_LT(max_abs(conjugate(u, a) - a), 1e-12);
    EXPECT_LT(max_abs(conjugate(u, b) + b), 1e-12);
}

TEST(Beamsplitter, BalancedModeTransform) {
    const int d = 6;
    const FockCutoff c(d, d);
    const CMatrix a1 = ladder_operator(d, LadderKind::Annihilate).matrix;
    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix a = Eigen::kroneckerProduct(a1, id);
    const CMatrix b = Eigen::kroneckerProduct(id, a1);
    // Compare on states with at most d-2 photons in total, where truncation is invisible.
    std::vector<int> low;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i + j <= d - 2) low.push_back(c.index(i, j));
    auto restricted = [&](const CMatrix& m) {
        CMatrix r(low.size(), low.size());
        for (std::size_t x = 0; x < low.size(); ++x)
            for (std::size_t y = 0; y < low.size(); ++y) r(x, y) = m(low[x], low[y]);
        return r;
    };
    for (double theta : {0.0, std::numbers::pi / 2}) {
        const CMatrix u = beamsplitter_unitary(0.5, theta, c).matrix;
        const CMatrix expect = (std::polar(1.0, theta) * a + b) / std::sqrt(2.0);
        EXPECT_LT(max_abs(restricted(conjugate(u, a) - expect)), 1e-12) << theta;
        EXPECT_LT(max_abs(u.adjoint() * u - CMatrix::Identity(c.total(), c.total())), 1e-12);
    }
    EXPECT_THROW(beamsplitter_unitary(1.5, 0.0, c), InvalidArgument);
}

TEST(Beamsplitter, CoherentInputsStayCoherent) {
    // U |g, h> = |sqrt(t) e^{i th} g + sqrt(1-t) h, sqrt(1-t) e^{i th} g - sqrt(t) h> (up to truncation).
    const double t = 0.3;
    const double th = 0.8;
    const Complex g(0.4, 0.1);
    const Complex h(-0.2, 0.3);
    const int d = 20;
    const FockCutoff c(d, d);
    const CMatrix u = beamsplitter_unitary(t, th, c).matrix;
    const CVector in = Eigen::kroneckerProduct(coherent_ket(g, d), coherent_ket(h, d));
    const Complex e = std::polar(1.0, th);
    const Complex g2 = std::sqrt(t) * e * g + std::sqrt(1 - t) * h;
    const Complex h2 = std::sqrt(1 - t) * e * g - std::sqrt(t) * h;
    const CVector expect = Eigen::kroneckerProduct(coherent_ket(g2, d), coherent_ket(h2, d));
    EXPECT_LT((u * in - expect).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Beamsplitter, BlockMatchesFullUnitary) {
    const FockCutoff c(7, 7);
    const CMatrix u = beamsplitter_unitary(0.37, 1.1, c).matrix;
    for (int n = 0; n <= 6; ++n) {
        const CMatrix blk = beamsplitter_block(0.37, 1.1, n);
        for (int i = 0; i <= n; ++i)
            for (int k = 0; k <= n; ++k) EXPECT_LT(std::abs(blk(i, k) - u(c.index(i, n - i), c.index(k, n - k))), 1e-12);
    }
}

TEST(DisplaceState, VacuumAtOriginUnchanged) {
    const auto v = TwoModeState::vacuum(FockCutoff(5, 5));
    const auto out = displace_state(v, PhasePoint{});
    EXPECT_LT(max_abs(out.rho() - v.rho()), 1e-15);
}

TEST(DisplaceState, CoherentStateReturnsToVacuumAtItsOwnAmplitude) {
    const Complex g(0.6, -0.3);
    const Complex h(-0.4, 0.2);
    const auto st = coherent_product(g, h, FockCutoff(30, 30));
    const auto out = displace_state(st, PhasePoint{g, h});
    EXPECT_NEAR(out.at(0, 0, 0, 0).real(), 1.0, 1e-8);
}

TEST(DisplaceState, PreservesTrace) {
    const auto st = random_haar_state(3, 4, 0, FockCutoff(12, 12));
    const auto out = displace_state(st, PhasePoint{Complex(0.5, 0.2), Complex(-0.3, 0.4)});
    EXPECT_NEAR(out.trace(), 1.0, 1e-9);
}

TEST(PartialTranspose, BellStateOracle) {
    // 4x4 hand-written (|10> + |01>)/sqrt2 and its partial transpose.
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(1, 1) = rho(1, 2) = rho(2, 1) = rho(2, 2) = 0.5;
    CMatrix expect = CMatrix::Zero(4, 4);
    expect(1, 1) = expect(2, 2) = 0.5;
    expect(0, 3) = expect(3, 0) = 0.5;
    const FockCutoff c(2, 2);
    EXPECT_EQ(max_abs(partial_transpose_b(rho, c) - expect), 0.0);
    EXPECT_NEAR(min_eigenvalue(partial_transpose_b(rho, c)), -0.5, 1e-12);
    EXPECT_EQ(max_abs(partial_transpose_b(partial_transpose_b(rho, c), c) - rho), 0.0);
}

TEST(PartialTranspose, ProductStateStaysPositive) {
    const auto st = coherent_product(Complex(0.5, 0.1), Complex(-0.2, 0.7), FockCutoff(12, 12));
    EXPECT_GE(min_eigenvalue(partial_transpose_b(st)), -1e-10);
}

TEST(PartialTranspose, LinearAndTracePreserving) {
    const FockCutoff c(3, 2);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    CMatrix x(6, 6);
    CMatrix y(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k) {
            x(i, k) = Complex(g(rng), g(rng));
            y(i, k) = Complex(g(rng), g(rng));
        }
    const Complex s(0.3, -1.2);
    EXPECT_LT(max_abs(partial_transpose_b(x + s * y, c) - partial_transpose_b(x, c) - s * partial_transpose_b(y, c)),
              1e-14);
    EXPECT_LT(std::abs(partial_transpose_b(x, c).trace() - x.trace()), 1e-14);
}

TEST(ApplyLoss, LosslessIsIdentity) {
    const auto st = random_haar_state(3, 9, 1, FockCutoff(3, 3));
    const auto out = apply_loss(st, {1.0, LossMode::Both});
    EXPECT_LT(max_abs(out.rho() - st.rho()), 1e-12);
}

TEST(ApplyLoss, FockStateGivesBinomial) {
    const int n = 5;
    const double tau = 0.65;
    const FockCutoff c(n + 1, 2);
    CVector psi = CVector::Zero(c.total());
    psi(c.index(n, 0)) = 1.0;
    const auto out = apply_loss(TwoModeState::pure(psi, c), {tau, LossMode::A});
    const auto pop = out.populations();
    for (int k = 0; k <= n; ++k) {
        double binom = 1.0;
        for (int j = 0; j < k; ++j) binom = binom * (n - j) / (j + 1);
        EXPECT_NEAR(pop(k, 0), binom * std::pow(tau, k) * std::pow(1 - tau, n - k), 1e-10) << k;
    }
    EXPECT_THROW(apply_loss(out, {1.2, LossMode::A}), InvalidArgument);
}

TEST(ApplyLoss, AgreesWithBeamsplitterAndVacuumAncilla) {
    // Mode a mixed with a vacuum ancilla on beamsplitter_unitary(tau, 0); trace the ancilla.
    const double tau = 0.7;
    const int d = 5;
    const auto st = random_haar_state(2, 21, 0, FockCutoff(2, 2)).embedded(FockCutoff(d, 2));
    const FockCutoff mix(d, d);
    const CMatrix u = beamsplitter_unitary(tau, 0.0, mix).matrix;
    const auto out = apply_loss(st, {tau, LossMode::A});
    // rho_a,b (x) |0><0|_anc with ancilla as second factor of the mixer.
    CMatrix expect = CMatrix::Zero(d * 2, d * 2);
    for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
            CMatrix sub = CMatrix::Zero(mix.total(), mix.total());
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) sub(mix.index(i, 0), mix.index(k, 0)) = st.at(i, j, k, l);
            const CMatrix evolved = u * sub * u.adjoint();
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k) {
                    Complex acc = 0.0;
                    for (int e = 0; e < d; ++e) acc += evolved(mix.index(i, e), mix.index(k, e));
                    expect(i * 2 + j, k * 2 + l) = acc;
                }
        }
    EXPECT_LT(max_abs(out.rho() - expect), 1e-9);
}

TEST(MinEigenvalue, Basics) {
    EXPECT_NEAR(min_eigenvalue(CMatrix::Identity(4, 4)), 1.0, 1e-15);
    CMatrix d = CMatrix::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = -2.0;
    EXPECT_NEAR(min_eigenvalue(d), -2.0, 1e-15);
    d(2, 2) = Complex(std::numeric_limits<double>::infinity(), 0.0);
    EXPECT_THROW(min_eigenvalue(d), InvalidArgument);
}

TEST(TwoModeState, ValidatesTrace) {
    CMatrix rho = CMatrix::Identity(4, 4);
    EXPECT_THROW(TwoModeState(rho, FockCutoff(2, 2)), InvalidArgument);
    StateCheck relaxed;
    relaxed.strict = false;
    const TwoModeState s(rho, FockCutoff(2, 2), relaxed);
    ASSERT_EQ(s.flags().size(), 1U);
    EXPECT_EQ(s.flags().front(), flag::kTraceDeficit);
    EXPECT_THROW(TwoModeState(CMatrix::Identity(3, 3) / 3.0, FockCutoff(2, 2)), InvalidArgument);
}

TEST(TwoModeState, SymmetrisesOnConstruction) {
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(0, 0) = rho(3, 3) = 0.5;
    rho(0, 3) = Complex(0.2, 1e-12);
    rho(3, 0) = Complex(0.2, 0.0);
    const TwoModeState s(rho, FockCutoff(2, 2));
    EXPECT_EQ(max_abs(s.rho() - s.rho().adjoint()), 0.0);
}

}  // namespace
}  // namespace cvw
