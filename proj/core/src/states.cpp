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
#include "cvwitness/states.hpp"

#include <cmath>
#include <random>

#include "cvwitness/errors.hpp"

namespace cvw {

namespace {

StateCheck family_check() {
    StateCheck check;
    check.strict = false;
    return check;
}

CVector product_ket(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j) out(i * b.size() + j) = a(i) * b(j);
    return out;
}

// SplitMix64 finaliser; decorrelates per-state seeds derived from (seed, k).
std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

}  // namespace

TwoModeState noon_state(const NoonParams& params, FockCutoff cutoff) {
    if (params.N < 1) {
        throw InvalidArgument("NOON photon number must be >= 1");
    }
    if (cutoff.dim_a <= params.N || cutoff.dim_b <= params.N) {
        throw InvalidCutoff("NOON state needs cutoff > N in both modes");
    }
    const double norm = std::norm(params.c1) + std::norm(params.c2);
    if (std::abs(norm - 1.0) > 1e-12) {
        throw InvalidArgument("NOON coefficients must satisfy |c1|^2 + |c2|^2 = 1");
    }
    CVector psi = CVector::Zero(cutoff.total());
    psi(cutoff.index(params.N, 0)) += params.c1;
    psi(cutoff.index(0, params.N)) += params.c2;
    return TwoModeState::pure(psi, cutoff);
}

TwoModeState lossy_noon(int N, double tau, FockCutoff cutoff) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw InvalidArgument("transmittivity must lie in [0,1]");
    }
    if (N < 1) {
        throw InvalidArgument("NOON photon number must be >= 1");
    }
    if (cutoff.dim_a <= N || cutoff.dim_b <= N) {
        throw InvalidCutoff("NOON state needs cutoff > N in both modes");
    }
    CMatrix rho = CMatrix::Zero(cutoff.total(), cutoff.total());
    for (int k = 0; k <= N; ++k) {
        const double binom = std::exp(std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0));
        const double kept_a = binom * std::pow(tau, N - k) * std::pow(1.0 - tau, k);
        const double kept_b = binom * std::pow(tau, k) * std::pow(1.0 - tau, N - k);
        rho(cutoff.index(N - k, 0), cutoff.index(N - k, 0)) += 0.5 * kept_a;
        rho(cutoff.index(0, k), cutoff.index(0, k)) += 0.5 * kept_b;
    }
    const double coherence = 0.5 * std::pow(tau, N);
    rho(cutoff.index(N, 0), cutoff.index(0, N)) += coherence;
    rho(cutoff.index(0, N), cutoff.index(N, 0)) += coherence;
    return TwoModeState(std::move(rho), cutoff);
}

TwoModeState cat_state(const CatParams& params, FockCutoff cutoff, double guard) {
    if (!(params.p >= 0.0 && params.p <= 1.0)) {
        throw InvalidArgument("dephasing p must lie in [0,1]");
    }
    const double energy = std::norm(params.gamma) + std::norm(params.delta);
    const double normalisation = 2.0 + 2.0 * (1.0 - params.p) * std::cos(params.theta) * std::exp(-2.0 * energy);
    if (!(normalisation > 0.0)) {
        throw InvalidArgument("cat-state normalisation vanishes (even/odd cat with zero amplitude)");
    }
    const CVector plus = product_ket(coherent_ket(params.gamma, cutoff.dim_a), coherent_ket(params.delta, cutoff.dim_b));
    const CVector minus =
        product_ket(coherent_ket(-params.gamma, cutoff.dim_a), coherent_ket(-params.delta, cutoff.dim_b));
    const Complex cross = (1.0 - params.p) * std::polar(1.0, params.theta);
    CMatrix rho = plus * plus.adjoint() + minus * minus.adjoint() + cross * (plus * minus.adjoint()) +
                  std::conj(cross) * (minus * plus.adjoint());
    rho /= normalisation;
    TwoModeState state(std::move(rho), cutoff, family_check());
    if (std::norm(params.gamma) > guard * cutoff.dim_a || std::norm(params.delta) > guard * cutoff.dim_b) {
        return state.with_flag(flag::kTruncationRisk);
    }
    return state;
}

TwoModeState coherent_product(Complex gamma, Complex delta, FockCutoff cutoff, double guard) {
    const CVector psi = product_ket(coherent_ket(gamma, cutoff.dim_a), coherent_ket(delta, cutoff.dim_b));
    TwoModeState state(psi * psi.adjoint(), cutoff, family_check());
    if (std::norm(gamma) > guard * cutoff.dim_a || std::norm(delta) > guard * cutoff.dim_b) {
        return state.with_flag(flag::kTruncationRisk);
    }
    return state;
}

TwoModeState thermal_product(double nbar_a, double nbar_b, FockCutoff cutoff) {
    if (nbar_a < 0.0 || nbar_b < 0.0) {
        throw InvalidArgument("thermal occupation must be non-negative");
    }
    auto weights = [](double nbar, int dim) {
        Eigen::VectorXd w(dim);
        const double ratio = nbar / (1.0 + nbar);
        for (int n = 0; n < dim; ++n) w(n) = std::pow(ratio, n);
        return Eigen::VectorXd(w / w.sum());
    };
    const Eigen::VectorXd wa = weights(nbar_a, cutoff.dim_a);
    const Eigen::VectorXd wb = weights(nbar_b, cutoff.dim_b);
    CMatrix rho = CMatrix::Zero(cutoff.total(), cutoff.total());
    for (int i = 0; i < cutoff.dim_a; ++i)
        for (int j = 0; j < cutoff.dim_b; ++j) rho(cutoff.index(i, j), cutoff.index(i, j)) = wa(i) * wb(j);
    return TwoModeState(std::move(rho), cutoff);
}

TwoModeState mixture(const std::vector<double>& weights, const std::vector<TwoModeState>& states) {
    if (weights.size() != states.size() || states.empty()) {
        throw InvalidArgument("mixture needs one weight per state");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidArgument("mixture weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0)) {
        throw InvalidArgument("mixture weights sum to zero");
    }
    const FockCutoff cutoff = states.front().cutoff();
    CMatrix rho = CMatrix::Zero(cutoff.total(), cutoff.total());
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (!(states[k].cutoff() == cutoff)) {
            throw InvalidCutoff("mixture components must share a cutoff");
        }
        rho += (weights[k] / total) * states[k].rho();
    }
    return TwoModeState(std::move(rho), cutoff, family_check());
}

TwoModeState random_haar_state(int d, std::uint64_t seed, int k, FockCutoff cutoff) {
    if (d < 2) {
        throw InvalidArgument("random state dimension must be >= 2");
    }
    if (cutoff.dim_a < d || cutoff.dim_b < d) {
        throw InvalidCutoff("random states need cutoff >= d in each mode");
    }
    std::mt19937_64 rng(mix_seed(seed ^ mix_seed(static_cast<std::uint64_t>(k))));
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector psi = CVector::Zero(cutoff.total());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            psi(cutoff.index(i, j)) = Complex(re, im);
        }
    psi.normalize();
    return TwoModeState::pure(psi, cutoff);
}

std::vector<TwoModeState> random_haar_pure(const RandomStateSpec& spec, FockCutoff cutoff) {
    if (spec.count < 1) {
        throw InvalidArgument("random state count must be positive");
    }
    std::vector<TwoModeState> states;
    states.reserve(static_cast<std::size_t>(spec.count));
    for (int k = 0; k < spec.count; ++k) states.push_back(random_haar_state(spec.d, spec.seed, k, cutoff));
    return states;
}

double analytic_husimi_noon(const PhasePoint& point, int N) {
    if (N < 1) {
        throw InvalidArgument("NOON photon number must be >= 1");
    }
    const Complex sum = std::pow(point.alpha, N) + std::pow(point.beta, N);
    const double gauss = std::exp(-std::norm(point.alpha) - std::norm(point.beta));
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return std::norm(sum) * gauss / (2.0 * std::tgamma(N + 1.0) * pi2);
}

int default_coherent_cutoff(double amplitude) {
    const int dim = static_cast<int>(std::ceil(amplitude * amplitude + 8.0 * amplitude + 8.0));
    return std::max(dim, 4);
}

}  // namespace cvw
