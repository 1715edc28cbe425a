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
#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "cvwitness/fock.hpp"

namespace cvw {

struct NoonParams {
    int N = 1;
    Complex c1{std::numbers::sqrt2 / 2.0, 0.0};
    Complex c2{std::numbers::sqrt2 / 2.0, 0.0};
    /// Transmittivity used by lossy_noon; noon_state ignores it.
    double tau = 1.0;
};

struct CatParams {
    Complex gamma{1.0, 0.0};
    Complex delta{1.0, 0.0};
    /// Dephasing of the coherent cross terms; p = 1 is a separable mixture.
    double p = 0.0;
    /// Relative phase; pi gives the odd cat.
    double theta = std::numbers::pi;
};

struct RandomStateSpec {
    int d = 2;
    std::uint64_t seed = 0;
    int count = 1;
};

/// c1|N,0> + c2|0,N>. Throws InvalidCutoff unless both dims exceed N.
TwoModeState noon_state(const NoonParams& params, FockCutoff cutoff);

/// Balanced NOON state after pure loss with transmittivity tau on both modes (closed form).
TwoModeState lossy_noon(int N, double tau, FockCutoff cutoff);

/// Dephased two-mode cat state N[|g,d><g,d| + |-g,-d><-g,-d| + (1-p)(e^{i theta}|g,d><-g,-d| + h.c.)].
/// Coherent amplitudes are truncated to the cutoff without renormalisation, so the trace
/// deficit measures the truncation error.
TwoModeState cat_state(const CatParams& params, FockCutoff cutoff, double guard = kDefaultCutoffGuard);

/// |gamma><gamma| (x) |delta><delta|.
TwoModeState coherent_product(Complex gamma, Complex delta, FockCutoff cutoff, double guard = kDefaultCutoffGuard);

/// Product of two thermal states with mean photon numbers nbar_a, nbar_b (renormalised on the cutoff).
TwoModeState thermal_product(double nbar_a, double nbar_b, FockCutoff cutoff);

/// Convex mixture sum_k w_k rho_k; weights are normalised.
TwoModeState mixture(const std::vector<double>& weights, const std::vector<TwoModeState>& states);

/// Haar-random pure states on span{|ij>, i,j < d}. State k depends only on (seed, k).
std::vector<TwoModeState> random_haar_pure(const RandomStateSpec& spec, FockCutoff cutoff);

/// The k-th state of random_haar_pure(spec, cutoff).
TwoModeState random_haar_state(int d, std::uint64_t seed, int k, FockCutoff cutoff);

/// Husimi distribution of the balanced NOON state, normalised to integrate to one:
/// |alpha^N + beta^N|^2 exp(-|alpha|^2 - |beta|^2) / (2 N! pi^2).
double analytic_husimi_noon(const PhasePoint& point, int N);

/// Default cutoff per mode for a cat or coherent amplitude.
int default_coherent_cutoff(double amplitude);

}  // namespace cvw
