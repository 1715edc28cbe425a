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
#include <optional>
#include <string>
#include <vector>

#include "cvwitness/fock.hpp"
#include "cvwitness/phase_space.hpp"

namespace cvw {

/// Beamsplitter setting in front of the two photon-number-resolving detectors.
enum class MixSetting { None, Balanced, TransmitOnly, ReflectOnly };

const char* mix_name(MixSetting mix);
MixSetting parse_mix(const std::string& name);

struct MeasurementConfig {
    PhasePoint point;
    double theta = 0.0;
    MixSetting mix = MixSetting::None;
    /// Detector efficiency in (0, 1]; below 1 applies binomial thinning per mode.
    double efficiency = 1.0;
    /// 0 means exact probabilities.
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    /// Photon-number levels per detector; 0 selects a size covering the displaced support.
    int outcome_dim = 0;
};

/// Joint photon-number outcomes (i, j), row-major in i.
struct OutcomeHistogram {
    int dim_a = 0;
    int dim_b = 0;
    bool counts = false;
    std::vector<double> data;
    /// shots in count mode, 1.0 in probability mode.
    double total = 1.0;
    MeasurementConfig config;

    [[nodiscard]] double at(int i, int j) const { return data[static_cast<std::size_t>(i * dim_b + j)]; }
    double& at(int i, int j) { return data[static_cast<std::size_t>(i * dim_b + j)]; }
    [[nodiscard]] double sum() const;
};

/// Widths of the three measured entries, shared by both modes.
struct EntryWidths {
    double s11 = 1.0;
    double s22 = 1.0;
    double s12 = 1.0;

    /// Combined widths of a two-row assignment; throws InvalidArgument unless each
    /// entry has equal widths on both modes.
    static EntryWidths from_assignment(const WidthAssignment& widths);
    [[nodiscard]] bool verdict_range() const { return s11 <= 1.0 && s22 <= 1.0 && s12 <= 1.0; }
};

struct M2Estimate {
    double value = 0.0;
    double e11 = 0.0;
    double e22 = 0.0;
    double e12_re = 0.0;
    double e12_im = 0.0;
    /// Plug-in standard error; 0 for exact probabilities.
    double std_error = 0.0;
    std::vector<std::string> configs_used;
};

/// Histograms for the five settings the estimator combines.
struct HistogramSet {
    std::optional<OutcomeHistogram> none;
    std::optional<OutcomeHistogram> balanced_0;
    std::optional<OutcomeHistogram> balanced_90;
    std::optional<OutcomeHistogram> transmit;
    std::optional<OutcomeHistogram> reflect;
};

struct EstimatorOptions {
    /// Replace the delta-method error with a parametric bootstrap.
    bool bootstrap = false;
    int replicates = 200;
    std::uint64_t bootstrap_seed = 0;
};

/// Exact outcome probabilities p(i,j) = <ij| U rho(alpha,beta) U^dagger |ij>.
OutcomeHistogram measurement_distribution(const TwoModeState& state, const MeasurementConfig& config);

/// Multinomial draw from an exact distribution.
OutcomeHistogram sample_histogram(const OutcomeHistogram& dist, std::uint64_t shots, std::uint64_t seed);

/// Reconstructs the second-order minor from the five histograms.
M2Estimate estimate_second_order_minor(const HistogramSet& histograms, const EntryWidths& widths,
                                       const EstimatorOptions& options = {});

/// Simulates all settings on a state, shots per setting (0 = exact), seed + setting index per draw.
M2Estimate estimate_second_order_minor(const TwoModeState& state, const PhasePoint& point, const EntryWidths& widths,
                                       std::uint64_t shots, std::uint64_t seed, double efficiency = 1.0,
                                       const EstimatorOptions& options = {});

/// Builds the five histograms that estimate_second_order_minor(state, ...) consumes.
HistogramSet simulate_settings(const TwoModeState& state, const PhasePoint& point, std::uint64_t shots,
                               std::uint64_t seed, double efficiency = 1.0, int outcome_dim = 0);

struct PhysicalDisplacement {
    TwoModeState state;
    /// Uhlmann fidelity with the ideal displaced state on the same cutoff.
    double fidelity = 0.0;
    int ancilla_dim = 0;
};

/// Displacement by mixing each mode with a coherent ancilla of amplitude -alpha/sqrt(1-t)
/// on a beamsplitter of transmittivity t, tracing out the ancillas. The two-argument
/// overload keeps the state's cutoff.
PhysicalDisplacement physical_displacement(const TwoModeState& state, const PhasePoint& point,
                                           double ancilla_transmittivity, FockCutoff out);

PhysicalDisplacement physical_displacement(const TwoModeState& state, const PhasePoint& point,
                                           double ancilla_transmittivity);

/// (Tr sqrt(sqrt(a) b sqrt(a)))^2 for density matrices of equal size.
double uhlmann_fidelity(const CMatrix& a, const CMatrix& b);

}  // namespace cvw
