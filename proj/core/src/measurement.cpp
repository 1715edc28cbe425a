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
#include "cvwitness/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "cvwitness/errors.hpp"
#include "cvwitness/states.hpp"

namespace cvw {

namespace {

double weight_pow(double sigma, int k) { return k == 0 ? 1.0 : std::pow(1.0 - sigma, k); }

double log_binomial(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

// Binomial thinning of both modes with efficiency eta.
void thin(OutcomeHistogram& h, double eta) {
    auto kernel = [eta](int n, int k) {
        if (eta == 1.0) return n == k ? 1.0 : 0.0;
        return std::exp(log_binomial(n, k) + k * std::log(eta) + (n - k) * std::log1p(-eta));
    };
    std::vector<double> out(h.data.size(), 0.0);
    for (int i = 0; i < h.dim_a; ++i)
        for (int j = 0; j < h.dim_b; ++j) {
            const double p = h.at(i, j);
            if (p == 0.0) continue;
            for (int ki = 0; ki <= i; ++ki)
                for (int kj = 0; kj <= j; ++kj)
                    out[static_cast<std::size_t>(ki * h.dim_b + kj)] += p * kernel(i, ki) * kernel(j, kj);
        }
    h.data = std::move(out);
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double n = 0.0;
};

template <typename F>
Moments histogram_moments(const OutcomeHistogram& h, F&& f) {
    const double total = h.sum();
    if (!(total > 0.0)) {
        throw IncompleteData("histogram is empty");
    }
    double m1 = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < h.dim_a; ++i)
        for (int j = 0; j < h.dim_b; ++j) {
            const double w = h.at(i, j) / total;
            if (w == 0.0) continue;
            const double v = f(i, j);
            m1 += w * v;
            m2 += w * v * v;
        }
    return {m1, std::max(0.0, m2 - m1 * m1), h.counts ? h.total : 0.0};
}

const OutcomeHistogram& require(const std::optional<OutcomeHistogram>& h, const char* name) {
    if (!h) {
        throw IncompleteData(std::string("missing histogram for setting ") + name);
    }
    return *h;
}

M2Estimate delta_method_estimate(const HistogramSet& set, const EntryWidths& w) {
    const auto& none = require(set.none, "none");
    const auto& b0 = require(set.balanced_0, "balanced-0");
    const auto& b90 = require(set.balanced_90, "balanced-90");
    const auto& tr = require(set.transmit, "transmit");
    const auto& rf = require(set.reflect, "reflect");

    auto g11 = [&](int i, int j) { return weight_pow(w.s11, i + j); };
    auto g22 = [&](int i, int j) { return (i == 0 || j == 0) ? 0.0 : double(i) * j * weight_pow(w.s22, i + j - 2); };
    // c^dagger (1-s)^{n_c + n_d} c on counts of the first detector.
    auto f = [&](int i, int j) { return i == 0 ? 0.0 : double(i) * weight_pow(w.s12, i - 1 + j); };

    const Moments m11 = histogram_moments(none, g11);
    const Moments m22 = histogram_moments(none, g22);
    const Moments s0 = histogram_moments(b0, f);
    const Moments s90 = histogram_moments(b90, f);
    const Moments st = histogram_moments(tr, f);
    const Moments sr = histogram_moments(rf, f);

    M2Estimate est;
    est.e11 = m11.mean;
    est.e22 = m22.mean;
    // S(theta) = (A + B)/2 + Re(e^{i theta} E12) for the balanced splitter.
    const double half_sum = 0.5 * (st.mean + sr.mean);
    est.e12_re = s0.mean - half_sum;
    est.e12_im = half_sum - s90.mean;
    est.value = est.e11 * est.e22 - est.e12_re * est.e12_re - est.e12_im * est.e12_im;
    est.configs_used = {"none", "balanced-0", "balanced-90", "transmit", "reflect"};

    if (none.counts) {
        const Moments combo = histogram_moments(none, [&](int i, int j) { return est.e22 * g11(i, j) + est.e11 * g22(i, j); });
        double var = combo.variance / combo.n;
        var += 4.0 * est.e12_re * est.e12_re * s0.variance / s0.n;
        var += 4.0 * est.e12_im * est.e12_im * s90.variance / s90.n;
        const double g_tr = est.e12_re - est.e12_im;
        var += g_tr * g_tr * (st.variance / st.n + sr.variance / sr.n);
        est.std_error = std::sqrt(var);
    }
    return est;
}

}  // namespace

const char* mix_name(MixSetting mix) {
    switch (mix) {
        case MixSetting::None:
            return "none";
        case MixSetting::Balanced:
            return "balanced";
        case MixSetting::TransmitOnly:
            return "transmit";
        case MixSetting::ReflectOnly:
            return "reflect";
    }
    return "none";
}

MixSetting parse_mix(const std::string& name) {
    if (name == "none") return MixSetting::None;
    if (name == "balanced") return MixSetting::Balanced;
    if (name == "transmit") return MixSetting::TransmitOnly;
    if (name == "reflect") return MixSetting::ReflectOnly;
    throw InvalidArgument("unknown mixer setting '" + name + "'");
}

double OutcomeHistogram::sum() const {
    double s = 0.0;
    for (double v : data) s += v;
    return s;
}

EntryWidths EntryWidths::from_assignment(const WidthAssignment& widths) {
    if (widths.rows() != 2) {
        throw InvalidArgument("entry widths need a two-row assignment");
    }
    auto same = [](double x, double y) { return std::abs(x - y) < 1e-15; };
    if (!same(widths.combined_a(0, 0), widths.combined_b(0, 0)) ||
        !same(widths.combined_a(1, 1), widths.combined_b(1, 1)) ||
        !same(widths.combined_a(0, 1), widths.combined_b(0, 1))) {
        throw InvalidArgument("the measurement scheme requires equal widths on both modes");
    }
    return {widths.combined_a(0, 0), widths.combined_a(1, 1), widths.combined_a(0, 1)};
}

// Photon-number blocks carrying less probability than this are left at zero.
constexpr double kNegligibleMass = 1e-20;

OutcomeHistogram measurement_distribution(const TwoModeState& state, const MeasurementConfig& config) {
    if (!(config.efficiency > 0.0 && config.efficiency <= 1.0)) {
        throw InvalidArgument("detector efficiency must lie in (0, 1]");
    }
    if (!config.point.finite()) {
        throw InvalidArgument("phase-space point must be finite");
    }
    const FockCutoff c = state.cutoff();
    const double amp = std::hypot(std::abs(config.point.alpha), std::abs(config.point.beta));
    const int k = config.outcome_dim > 0 ? config.outcome_dim
                                         : std::min(working_dimension(std::max(c.dim_a, c.dim_b), amp), 160);
    if (k < 2) {
        throw InvalidCutoff("outcome dimension must be >= 2");
    }
    const int la = std::max(k, working_dimension(c.dim_a, std::abs(config.point.alpha)));
    const int lb = std::max(k, working_dimension(c.dim_b, std::abs(config.point.beta)));
    const CMatrix va = displaced_fock_columns(-config.point.alpha, c.dim_a, la);
    const CMatrix vb = displaced_fock_columns(-config.point.beta, c.dim_b, lb);

    OutcomeHistogram hist;
    hist.dim_a = k;
    hist.dim_b = k;
    hist.counts = false;
    hist.total = 1.0;
    hist.config = config;
    hist.data.assign(static_cast<std::size_t>(k * k), 0.0);

    double tau = 1.0;
    switch (config.mix) {
        case MixSetting::None:
        case MixSetting::TransmitOnly:
            tau = 1.0;
            break;
        case MixSetting::Balanced:
            tau = 0.5;
            break;
        case MixSetting::ReflectOnly:
            tau = 0.0;
            break;
    }
    // rho(alpha,beta) restricted to total photon number N, basis |i, N-i>; the mixer
    // conserves N so each block is measured independently.
    for (int total = 0; total < k; ++total) {
        CMatrix w(total + 1, c.total());
        for (int i = 0; i <= total; ++i)
            for (int s = 0; s < c.dim_a; ++s)
                for (int t = 0; t < c.dim_b; ++t) w(i, c.index(s, t)) = va(i, s) * vb(total - i, t);
        CMatrix block = w * state.rho() * w.adjoint();
        if (block.trace().real() < kNegligibleMass) continue;
        if (config.mix != MixSetting::None) {
            const CMatrix u = beamsplitter_block(tau, config.theta, total);
            block = u * block * u.adjoint();
        }
        for (int i = 0; i <= total; ++i) hist.at(i, total - i) = std::max(0.0, block(i, i).real());
    }
    if (config.efficiency < 1.0) {
        thin(hist, config.efficiency);
    }
    if (config.shots > 0) {
        return sample_histogram(hist, config.shots, config.seed);
    }
    return hist;
}

OutcomeHistogram sample_histogram(const OutcomeHistogram& dist, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw InvalidArgument("shots must be positive; use exact probabilities for shots = 0");
    }
    if (dist.counts) {
        throw InvalidArgument("sampling needs an exact probability distribution");
    }
    OutcomeHistogram out = dist;
    out.counts = true;
    out.total = static_cast<double>(shots);
    out.config.shots = shots;
    out.config.seed = seed;
    std::fill(out.data.begin(), out.data.end(), 0.0);
    std::mt19937_64 rng(seed);
    double remaining_mass = dist.sum();
    std::uint64_t remaining = shots;
    for (std::size_t b = 0; b < dist.data.size() && remaining > 0; ++b) {
        const double p = dist.data[b];
        if (p <= 0.0) continue;
        const double q = std::clamp(p / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        const std::uint64_t n = (q >= 1.0) ? remaining : draw(rng);
        out.data[b] = static_cast<double>(n);
        remaining -= n;
        remaining_mass -= p;
        if (remaining_mass <= 0.0) break;
    }
    if (remaining > 0) {
        // Rounding leftovers go to the most probable bin.
        const auto it = std::max_element(dist.data.begin(), dist.data.end());
        out.data[static_cast<std::size_t>(it - dist.data.begin())] += static_cast<double>(remaining);
    }
    return out;
}

M2Estimate estimate_second_order_minor(const HistogramSet& histograms, const EntryWidths& widths,
                                       const EstimatorOptions& options) {
    M2Estimate est = delta_method_estimate(histograms, widths);
    if (!options.bootstrap || !histograms.none->counts) {
        return est;
    }
    // Parametric bootstrap: redraw every histogram from its empirical distribution.
    auto normalised = [](const OutcomeHistogram& h) {
        OutcomeHistogram p = h;
        const double s = h.sum();
        for (double& v : p.data) v /= s;
        p.counts = false;
        p.total = 1.0;
        return p;
    };
    const std::array<const std::optional<OutcomeHistogram>*, 5> slots = {
        &histograms.none, &histograms.balanced_0, &histograms.balanced_90, &histograms.transmit, &histograms.reflect};
    std::array<OutcomeHistogram, 5> empirical;
    for (std::size_t s = 0; s < slots.size(); ++s) empirical[s] = normalised(**slots[s]);
    double m1 = 0.0;
    double m2 = 0.0;
    for (int r = 0; r < options.replicates; ++r) {
        HistogramSet re;
        std::array<std::optional<OutcomeHistogram>*, 5> out = {&re.none, &re.balanced_0, &re.balanced_90,
                                                               &re.transmit, &re.reflect};
        for (std::size_t s = 0; s < slots.size(); ++s) {
            const auto shots = static_cast<std::uint64_t>((*slots[s])->total);
            *out[s] = sample_histogram(empirical[s], shots, options.bootstrap_seed + 7919U * r + s);
        }
        const double v = delta_method_estimate(re, widths).value;
        m1 += v;
        m2 += v * v;
    }
    const double n = options.replicates;
    est.std_error = std::sqrt(std::max(0.0, m2 / n - (m1 / n) * (m1 / n)));
    return est;
}

HistogramSet simulate_settings(const TwoModeState& state, const PhasePoint& point, std::uint64_t shots,
                               std::uint64_t seed, double efficiency, int outcome_dim) {
    auto run = [&](MixSetting mix, double theta, std::uint64_t index) {
        MeasurementConfig cfg;
        cfg.point = point;
        cfg.mix = mix;
        cfg.theta = theta;
        cfg.efficiency = efficiency;
        cfg.shots = shots;
        cfg.seed = seed + index;
        cfg.outcome_dim = outcome_dim;
        return measurement_distribution(state, cfg);
    };
    HistogramSet set;
    set.none = run(MixSetting::None, 0.0, 0);
    set.balanced_0 = run(MixSetting::Balanced, 0.0, 1);
    set.balanced_90 = run(MixSetting::Balanced, std::numbers::pi / 2.0, 2);
    set.transmit = run(MixSetting::TransmitOnly, 0.0, 3);
    set.reflect = run(MixSetting::ReflectOnly, 0.0, 4);
    return set;
}

M2Estimate estimate_second_order_minor(const TwoModeState& state, const PhasePoint& point, const EntryWidths& widths,
                                       std::uint64_t shots, std::uint64_t seed, double efficiency,
                                       const EstimatorOptions& options) {
    return estimate_second_order_minor(simulate_settings(state, point, shots, seed, efficiency), widths, options);
}

double uhlmann_fidelity(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("fidelity needs matrices of equal size");
    }
    auto psd_sqrt = [](const CMatrix& m) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
        const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return CMatrix(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
    };
    const CMatrix sa = psd_sqrt(a);
    const CMatrix inner = sa * b * sa;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

namespace {

// Kraus operators <k|_anc U |anc> for one mode mixed with a coherent ancilla.
std::vector<CMatrix> ancilla_kraus(double tau, Complex ancilla, int in_dim, int out_dim, int anc_dim) {
    const CVector anc = coherent_ket(ancilla, anc_dim);
    std::vector<CMatrix> kraus(static_cast<std::size_t>(anc_dim), CMatrix::Zero(out_dim, in_dim));
    const int max_total = (out_dim - 1) + (anc_dim - 1);
    for (int total = 0; total <= max_total; ++total) {
        const CMatrix u = beamsplitter_block(tau, 0.0, total);
        for (int s = 0; s < in_dim && s <= total; ++s) {
            const int a_in = total - s;
            if (a_in >= anc_dim) continue;
            for (int i = std::max(0, total - (anc_dim - 1)); i <= std::min(total, out_dim - 1); ++i) {
                const int k = total - i;
                kraus[static_cast<std::size_t>(k)](i, s) += u(i, s) * anc(a_in);
            }
        }
    }
    return kraus;
}

}  // namespace

PhysicalDisplacement physical_displacement(const TwoModeState& state, const PhasePoint& point,
                                           double ancilla_transmittivity, FockCutoff out) {
    const double tau = ancilla_transmittivity;
    if (!(tau > 0.9 && tau < 1.0)) {
        throw InvalidArgument("ancilla transmittivity must lie in (0.9, 1)");
    }
    if (!point.finite()) {
        throw InvalidArgument("phase-space point must be finite");
    }
    const FockCutoff c = state.cutoff();
    if (out.dim_a < c.dim_a || out.dim_b < c.dim_b) {
        throw InvalidCutoff("output cutoff must contain the state's support");
    }
    const double scale = std::sqrt(1.0 - tau);
    const Complex anc_a = -point.alpha / scale;
    const Complex anc_b = -point.beta / scale;
    const double anc_amp = std::max(std::abs(anc_a), std::abs(anc_b));
    const int anc_dim = default_coherent_cutoff(anc_amp);
    constexpr int kMaxAncilla = 160;
    if (anc_dim > kMaxAncilla) {
        throw TruncationRisk("ancilla amplitude too large for the ancilla cutoff");
    }
    const auto ka = ancilla_kraus(tau, anc_a, c.dim_a, out.dim_a, anc_dim);
    const auto kb = ancilla_kraus(tau, anc_b, c.dim_b, out.dim_b, anc_dim);

    // Mode a first: (out_a * d_b) space, then mode b.
    const FockCutoff mid(out.dim_a, c.dim_b);
    CMatrix rho_mid = CMatrix::Zero(mid.total(), mid.total());
    for (const CMatrix& k : ka) {
        CMatrix full = CMatrix::Zero(mid.total(), c.total());
        for (int i = 0; i < out.dim_a; ++i)
            for (int s = 0; s < c.dim_a; ++s)
                for (int j = 0; j < c.dim_b; ++j) full(mid.index(i, j), c.index(s, j)) = k(i, s);
        rho_mid.noalias() += full * state.rho() * full.adjoint();
    }
    CMatrix rho_out = CMatrix::Zero(out.total(), out.total());
    for (const CMatrix& k : kb) {
        CMatrix full = CMatrix::Zero(out.total(), mid.total());
        for (int i = 0; i < out.dim_a; ++i)
            for (int j = 0; j < out.dim_b; ++j)
                for (int t = 0; t < c.dim_b; ++t) full(out.index(i, j), mid.index(i, t)) = k(j, t);
        rho_out.noalias() += full * rho_mid * full.adjoint();
    }
    const CMatrix ideal = displaced_block(state, point, out);
    StateCheck relaxed;
    relaxed.strict = false;
    PhysicalDisplacement result{TwoModeState(rho_out, out, relaxed), 0.0, anc_dim};
    result.fidelity = uhlmann_fidelity(ideal, rho_out);
    return result;
}

PhysicalDisplacement physical_displacement(const TwoModeState& state, const PhasePoint& point,
                                           double ancilla_transmittivity) {
    return physical_displacement(state, point, ancilla_transmittivity, state.cutoff());
}

}  // namespace cvw
