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
#include <string>
#include <vector>

#include "cvwitness/fock.hpp"
#include "cvwitness/phase_space.hpp"
#include "cvwitness/states.hpp"

namespace cvw {

enum class Slice { RealPlane, DiagonalLine, FullGrid4D };

const char* slice_name(Slice slice);
Slice parse_slice(const std::string& name);

/// Inclusive uniform grid on one axis.
struct AxisRange {
    double min = 0.0;
    double max = 0.0;
    int steps = 2;

    [[nodiscard]] double at(int i) const;
};

/// Grid of phase-space points.
///
/// RealPlane: axes (Re alpha, Re beta). DiagonalLine: one axis r, alpha = beta = r e^{i phase}.
/// FullGrid4D: axes (Re alpha, Im alpha, Re beta, Im beta). The last axis varies fastest.
struct ScanRegion {
    Slice slice = Slice::RealPlane;
    std::vector<AxisRange> axes;
    double phase = 0.0;
    std::size_t budget = 2'000'000;

    static ScanRegion real_plane(AxisRange alpha, AxisRange beta);
    static ScanRegion diagonal(AxisRange radius, double phase);
    static ScanRegion full_grid(AxisRange re_a, AxisRange im_a, AxisRange re_b, AxisRange im_b);

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] PhasePoint point(std::size_t flat_index) const;
    /// Throws InvalidArgument for malformed axes or a grid larger than the budget.
    void validate() const;
};

enum class CriterionKind { M2, Husimi, Wigner, MinEig };

struct Criterion {
    CriterionKind kind = CriterionKind::M2;
    /// Moment-matrix order for MinEig.
    int order = 2;

    [[nodiscard]] std::string name() const;
    static Criterion parse(const std::string& name, int order = 2);
};

struct Evaluation {
    double value = 0.0;
    Verdict verdict = Verdict::NotDetected;
    std::vector<std::string> flags;
};

/// Criterion value at one point. sigma is the uniform row width for M2 and MinEig and is
/// ignored by the fixed-width criteria.
Evaluation evaluate_criterion(const TwoModeState& state, const PhasePoint& point, double sigma,
                              const Criterion& criterion, double detect_tol = kDefaultDetectTol);

struct Provenance {
    std::string state;
    int dim_a = 0;
    int dim_b = 0;
    std::uint64_t seed = 0;
    std::string version;
};

struct ScanRow {
    PhasePoint point;
    double sigma = 0.0;
    double value = 0.0;
    Verdict verdict = Verdict::NotDetected;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    Provenance provenance;
    std::vector<std::string> flags;

    /// Row with the smallest value; the first one on ties.
    [[nodiscard]] const ScanRow& minimum() const;
};

/// Evaluates the criterion on every grid point in flat-index order. threads <= 1 runs
/// serially; the result is identical for any thread count.
ScanResult grid_scan(const TwoModeState& state, const ScanRegion& region, WidthParam sigma,
                     const Criterion& criterion, int threads = 1);

struct RefineOptions {
    /// Optimise only over real alpha and beta.
    bool real_plane = false;
    double initial_step = 0.2;
    double size_tol = 1e-6;
    int max_iterations = 500;
};

struct RefineResult {
    PhasePoint point;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> flags;
};

/// Nelder-Mead descent over (Re alpha, Im alpha, Re beta, Im beta).
RefineResult refine_minimum(const TwoModeState& state, const PhasePoint& start, WidthParam sigma,
                            const Criterion& criterion, const RefineOptions& options = {});

/// Criterion at a fixed point for each width; widths above 1 get a withheld verdict.
ScanResult sigma_sweep(const TwoModeState& state, const PhasePoint& point, const std::vector<WidthParam>& sigmas,
                       const Criterion& criterion = {});

/// Largest width below which the sweep value is non-negative: the first sigma, in increasing
/// order, whose value is below -tol. Returns a negative number when none is.
double detection_threshold(const ScanResult& sweep, double tol = kDefaultDetectTol);

struct RateRow {
    PhasePoint point;
    double sigma = 0.0;
    int detected = 0;
    int count = 0;
    [[nodiscard]] double rate() const { return count == 0 ? 0.0 : static_cast<double>(detected) / count; }
};

struct RateTable {
    std::vector<RateRow> rows;
    int ppt_entangled = 0;
    int count = 0;
    Provenance provenance;
    std::vector<std::string> flags;
    [[nodiscard]] double ppt_rate() const { return count == 0 ? 0.0 : static_cast<double>(ppt_entangled) / count; }
};

/// Fraction of Haar-random pure states with second-order minor below -detect_tol per
/// (point, sigma); rows are point-major. Also counts PPT-entangled states.
RateTable detection_rate(const RandomStateSpec& spec, const std::vector<PhasePoint>& points,
                         const std::vector<WidthParam>& sigmas, double detect_tol = kDefaultDetectTol,
                         int threads = 1);

}  // namespace cvw
