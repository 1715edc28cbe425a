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

#include <functional>

#include "cvwitness/fock.hpp"
#include "cvwitness/phase_space.hpp"

namespace cvw {

inline constexpr double kDefaultPptTol = 1e-9;

struct PptVerdict {
    double min_eigenvalue = 0.0;
    bool entangled = false;
    FockCutoff cutoff;
    /// Set when the verdict was re-evaluated on a doubled cutoff.
    bool confirmed_at_double_cutoff = false;
};

/// Minimum eigenvalue of the partial transpose on the state's own cutoff.
PptVerdict ppt_min_eig(const TwoModeState& state, double ppt_tol = kDefaultPptTol);

/// As above for a state family; verdicts within 10x tolerance of zero are
/// recomputed from factory(2 * cutoff) and that result is returned.
PptVerdict ppt_min_eig(const std::function<TwoModeState(FockCutoff)>& factory, FockCutoff cutoff,
                       double ppt_tol = kDefaultPptTol);

/// Second-order minor with all widths zero: the displaced-moment baseline.
SecondOrderMinor sv_moment_minor(const TwoModeState& state, const PhasePoint& point);

/// max |M_ij(sigma = 1) - sqrt(n! p! m! q!) <m q| PT_b(rho(alpha,beta)) |n p>| over the
/// order-K matrix, row (n,p), col (m,q). Throws InvalidCutoff when the cutoff is below 2K+2.
double ppt_compression_check(const TwoModeState& state, const PhasePoint& point, int max_order);

}  // namespace cvw
