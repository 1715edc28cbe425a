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
#include "cvwitness/ppt.hpp"

#include <cmath>

#include "cvwitness/errors.hpp"

namespace cvw {

PptVerdict ppt_min_eig(const TwoModeState& state, double ppt_tol) {
    PptVerdict v;
    v.cutoff = state.cutoff();
    v.min_eigenvalue = min_eigenvalue(partial_transpose_b(state));
    v.entangled = v.min_eigenvalue < -ppt_tol;
    return v;
}

PptVerdict ppt_min_eig(const std::function<TwoModeState(FockCutoff)>& factory, FockCutoff cutoff, double ppt_tol) {
    PptVerdict v = ppt_min_eig(factory(cutoff), ppt_tol);
    if (std::abs(v.min_eigenvalue) < 10.0 * ppt_tol) {
        const FockCutoff doubled(2 * cutoff.dim_a, 2 * cutoff.dim_b);
        v = ppt_min_eig(factory(doubled), ppt_tol);
        v.confirmed_at_double_cutoff = true;
    }
    return v;
}

SecondOrderMinor sv_moment_minor(const TwoModeState& state, const PhasePoint& point) {
    return second_order_minor(state, point, WidthAssignment::uniform(0.0, 2));
}

double ppt_compression_check(const TwoModeState& state, const PhasePoint& point, int max_order) {
    if (max_order < 1 || max_order > 3) {
        throw InvalidArgument("compression check supports orders 1..3");
    }
    const FockCutoff c = state.cutoff();
    if (c.dim_a < 2 * max_order + 2 || c.dim_b < 2 * max_order + 2) {
        throw InvalidCutoff("compression check needs cutoff >= 2K + 2");
    }
    const auto indices = multi_indices(max_order);
    const MomentMatrix mm =
        build_moment_matrix(state, point, max_order, WidthAssignment::uniform(1.0, indices.size()));
    // Low-level block of rho(alpha,beta) up to level K in each mode, then PT on b.
    const FockCutoff block(max_order + 1, max_order + 1);
    const CMatrix pt = partial_transpose_b(displaced_block(state, point, block), block);
    auto fact = [](int k) { return std::tgamma(k + 1.0); };
    double worst = 0.0;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        for (std::size_t col = 0; col < indices.size(); ++col) {
            const auto [n, p] = indices[r];
            const auto [m, q] = indices[col];
            const double scale = std::sqrt(fact(n) * fact(p) * fact(m) * fact(q));
            const Complex expected = scale * pt(block.index(m, q), block.index(n, p));
            const auto e = mm.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col));
            worst = std::max(worst, std::abs(e - expected));
        }
    }
    return worst;
}

}  // namespace cvw
