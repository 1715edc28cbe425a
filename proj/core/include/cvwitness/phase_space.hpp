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

#include <optional>
#include <string>
#include <vector>

#include "cvwitness/fock.hpp"

namespace cvw {

/// Smoothing width sigma in [0, 2]: 0 moments, 1 Husimi, 2 Wigner.
class WidthParam {
public:
    /// Throws InvalidArgument outside [0, 2].
    explicit WidthParam(double sigma);
    [[nodiscard]] double value() const { return sigma_; }

private:
    double sigma_;
};

/// sigma = 2 / (1 - s). Throws OutOfDomain for s >= 1.
WidthParam sigma_from_s(double s);

/// sigma_i + sigma_j - sigma_i sigma_j.
[[nodiscard]] constexpr double combine_widths(double si, double sj) { return si + sj - si * sj; }

/// Exponents (n, p) of (a - alpha)^n (b - beta)^p labelling a moment-matrix row.
struct MultiIndex {
    int n = 0;
    int p = 0;

    [[nodiscard]] int order() const { return n + p; }
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Canonical ordering: lower total order first, then smaller b exponent.
bool operator<(const MultiIndex& lhs, const MultiIndex& rhs);

/// All (n, p) with n + p <= max_order, canonically ordered.
std::vector<MultiIndex> multi_indices(int max_order);

/// Per-row widths; entry (i, j) uses combine_widths on each mode.
class WidthAssignment {
public:
    WidthAssignment(std::vector<double> row_a, std::vector<double> row_b);

    static WidthAssignment uniform(double sigma, std::size_t rows);
    /// Two rows, (0,0) then (1,1), with independent widths per mode.
    static WidthAssignment second_order(double s1a, double s1b, double s2a, double s2b);

    [[nodiscard]] std::size_t rows() const { return row_a_.size(); }
    [[nodiscard]] double row_a(std::size_t i) const { return row_a_.at(i); }
    [[nodiscard]] double row_b(std::size_t i) const { return row_b_.at(i); }
    [[nodiscard]] double combined_a(std::size_t i, std::size_t j) const;
    [[nodiscard]] double combined_b(std::size_t i, std::size_t j) const;
    /// True when every row width is <= 1, the range where a negative minor certifies entanglement.
    [[nodiscard]] bool verdict_range() const;

private:
    std::vector<double> row_a_;
    std::vector<double> row_b_;
};

enum class Verdict { Entangled, NotDetected, Withheld };
const char* verdict_name(Verdict v);

struct ScalarResult {
    double value = 0.0;
    std::vector<std::string> flags;
};

struct ElementResult {
    Complex value{0.0, 0.0};
    std::vector<std::string> flags;
};

/// Diagonal two-mode operator sum_ij (1 - sigma_a)^i (1 - sigma_b)^j |ij><ij|.
ModeOperator smoothing_operator(WidthParam sigma_a, WidthParam sigma_b, FockCutoff cutoff);

/// Evaluates displaced, smoothed operator moments of one state at one phase-space point.
///
/// Traces are taken as Tr[rho D X D^dagger] with D X D^dagger built on an enlarged
/// per-mode working space, so results do not depend on the state's own cutoff
/// beyond its support. Immutable after construction; safe to share between threads.
class PointEvaluator {
public:
    PointEvaluator(const TwoModeState& state, const PhasePoint& point);

    /// Tr[rho(alpha,beta) a^dag^n b^dag^q S(sigma_a, sigma_b) a^m b^p] for row (n,p), col (m,q).
    [[nodiscard]] ElementResult element(const MultiIndex& row, const MultiIndex& col, double sigma_a,
                                        double sigma_b) const;

    /// (sigma_a sigma_b / pi^2) Tr[rho(alpha,beta) S(sigma_a, sigma_b)].
    [[nodiscard]] ScalarResult phase_space_value(double sigma_a, double sigma_b) const;

    /// Mode-a factor V^H (a^dag^create S a^annihilate) V on the state's support.
    [[nodiscard]] CMatrix block_a(int create, int annihilate, double sigma_a) const;
    /// Partial trace over b of rho (1 x Y_b) for the mode-b factor Y_b; element() is then
    /// sum_ik block_a(k, i) * reduced_b(i, k).
    [[nodiscard]] CMatrix reduced_b(int create, int annihilate, double sigma_b) const;
    /// Flags an element evaluation would carry.
    [[nodiscard]] std::vector<std::string> element_flags(const MultiIndex& row, const MultiIndex& col) const;

    [[nodiscard]] const PhasePoint& point() const { return point_; }
    [[nodiscard]] const std::vector<std::string>& flags() const { return flags_; }

private:
    // Single-mode block V^H (a^dag^n S a^m) V on the state's support.
    [[nodiscard]] CMatrix mode_block(const CMatrix& columns, int create, int annihilate, double sigma) const;

    const TwoModeState* state_;
    PhasePoint point_;
    CMatrix cols_a_;
    CMatrix cols_b_;
    std::vector<std::string> flags_;
};

ScalarResult phase_space_value(const TwoModeState& state, const PhasePoint& point, WidthParam sigma_a,
                               WidthParam sigma_b);

ElementResult moment_matrix_element(const TwoModeState& state, const PhasePoint& point, const MultiIndex& row,
                                    const MultiIndex& col, double sigma_a, double sigma_b);

struct MomentMatrix {
    CMatrix entries;
    std::vector<MultiIndex> index_map;
    PhasePoint point;
    WidthAssignment widths;
    /// max |M - M^dagger| before symmetrisation.
    double hermiticity_residual = 0.0;
    std::vector<std::string> flags;
};

/// Moment matrix over all multi-indices of order <= max_order. widths must have one row per index.
MomentMatrix build_moment_matrix(const TwoModeState& state, const PhasePoint& point, int max_order,
                                 const WidthAssignment& widths);

struct SecondOrderMinor {
    double value = 0.0;
    double e11 = 0.0;
    double e22 = 0.0;
    Complex e12{0.0, 0.0};
    std::vector<std::string> flags;
};

/// E11 E22 - |E12|^2 for rows (0,0) and (1,1). widths must have two rows.
SecondOrderMinor second_order_minor(const TwoModeState& state, const PhasePoint& point,
                                    const WidthAssignment& widths);

/// Second-order minor with every width set to 1.
SecondOrderMinor husimi_criterion(const TwoModeState& state, const PhasePoint& point);

/// Row widths (0, 2): <n_a(alpha) n_b(beta)> - |E12(sigma = 2)|^2.
SecondOrderMinor wigner_criterion(const TwoModeState& state, const PhasePoint& point);

struct MinorRecord {
    std::vector<MultiIndex> rows;
    double value = 0.0;
};

struct WitnessReport {
    double value = 0.0;
    double min_eigenvalue = 0.0;
    MinorRecord worst_minor;
    PhasePoint point;
    std::optional<WidthAssignment> widths;
    Verdict verdict = Verdict::NotDetected;
    std::vector<std::string> flags;
};

inline constexpr double kDefaultDetectTol = 1e-9;

/// Builds the order-K moment matrix; reports its minimum eigenvalue and the most negative
/// 1x1, 2x2 and leading principal minor. The verdict is Entangled iff the minimum
/// eigenvalue is below -detect_tol and every row width is <= 1.
WitnessReport detect(const TwoModeState& state, const PhasePoint& point, int max_order, const WidthAssignment& widths,
                     double detect_tol = kDefaultDetectTol);

struct DerivativeReport {
    /// |finite-difference d_alpha d_beta* P - element((0,0),(1,1)) (s_a s_b)^2 / pi^2|
    double residual_mixed = 0.0;
    /// |-s^2 d_s (P/s) - (s + d_alpha d_alpha*) (P/s)| for the a-mode width.
    double residual_width = 0.0;
    Complex fd_mixed{0.0, 0.0};
    Complex operator_mixed{0.0, 0.0};
    double width_lhs = 0.0;
    double width_rhs = 0.0;
};

/// Cross-checks the operator path against finite differences of P with the amplitude
/// derivative d_alpha = (d_Re + i d_Im)/2. Requires sigma in (0, 1] and step in [1e-4, 1e-2];
/// throws DiagnosticError when the Richardson sequence shows roundoff domination.
DerivativeReport validate_derivative_identities(const TwoModeState& state, const PhasePoint& point, WidthParam sigma,
                                                double step);

}  // namespace cvw
