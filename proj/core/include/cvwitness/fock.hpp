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

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvw {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Result flags shared across modules.
namespace flag {
inline constexpr const char* kTruncationRisk = "truncation-risk";
inline constexpr const char* kTraceDeficit = "trace-deficit";
inline constexpr const char* kExponentBudget = "exponent-budget";
inline constexpr const char* kVerdictWithheld = "verdict-withheld";
inline constexpr const char* kNotConverged = "not-converged";
}  // namespace flag

/// Per-mode Fock cutoffs. Mode a holds levels 0..dim_a-1, mode b levels 0..dim_b-1.
struct FockCutoff {
    int dim_a = 2;
    int dim_b = 2;

    FockCutoff() = default;
    /// Throws InvalidCutoff unless both dimensions are at least 2.
    FockCutoff(int a, int b);

    [[nodiscard]] int total() const { return dim_a * dim_b; }
    /// Flat index of |i j>.
    [[nodiscard]] int index(int i, int j) const { return i * dim_b + j; }

    friend bool operator==(const FockCutoff&, const FockCutoff&) = default;
};

/// Phase-space coordinate (alpha, beta) of the two modes.
struct PhasePoint {
    Complex alpha{0.0, 0.0};
    Complex beta{0.0, 0.0};

    static PhasePoint real(double a, double b) { return {Complex(a, 0.0), Complex(b, 0.0)}; }
    [[nodiscard]] bool finite() const;
};

/// Construction-time checks applied to a density matrix.
struct StateCheck {
    double trace_tol = 1e-6;
    /// Only evaluated when check_eigenvalues is set; full diagonalisation is O(D^3).
    double eig_tol = 1e-8;
    bool check_eigenvalues = false;
    /// Throw on a failed check instead of recording a flag.
    bool strict = true;
};

/// Density matrix on a truncated two-mode Fock space, flat index i*dim_b + j.
///
/// The matrix is Hermitian-symmetrised on construction. A trace mismatch above
/// StateCheck::trace_tol throws (strict) or records flag::kTraceDeficit.
class TwoModeState {
public:
    TwoModeState(CMatrix rho, FockCutoff cutoff, const StateCheck& check = {});

    static TwoModeState pure(const CVector& psi, FockCutoff cutoff, const StateCheck& check = {});
    static TwoModeState vacuum(FockCutoff cutoff);

    [[nodiscard]] const CMatrix& rho() const { return rho_; }
    [[nodiscard]] FockCutoff cutoff() const { return cutoff_; }
    [[nodiscard]] Complex at(int i, int j, int k, int l) const;
    [[nodiscard]] double trace() const;
    [[nodiscard]] double purity() const;
    [[nodiscard]] const std::vector<std::string>& flags() const { return flags_; }

    /// Zero-padded copy on a larger cutoff.
    [[nodiscard]] TwoModeState embedded(FockCutoff larger) const;
    /// Copy carrying an additional result flag.
    [[nodiscard]] TwoModeState with_flag(const std::string& name) const;
    /// Photon-number populations p(i, j).
    [[nodiscard]] Eigen::MatrixXd populations() const;

private:
    CMatrix rho_;
    FockCutoff cutoff_;
    std::vector<std::string> flags_;
};

struct ModeOperator {
    CMatrix matrix;
    std::string label;
    /// max |U^dagger U - I| for unitaries, 0 otherwise.
    double unitarity_residual = 0.0;
    std::vector<std::string> warnings;
};

enum class LadderKind { Annihilate, Create, Number };
enum class LossMode { A, B, Both };

struct LossChannel {
    double tau = 1.0;
    LossMode mode = LossMode::Both;
};

inline constexpr double kDefaultCutoffGuard = 0.25;

ModeOperator ladder_operator(int cutoff_dim, LadderKind kind);

/// exp(alpha a^dagger - alpha^* a) from the matrix exponential of the truncated generator.
/// Attaches flag::kTruncationRisk when |alpha|^2 > guard * cutoff_dim.
ModeOperator displacement_operator(Complex alpha, int cutoff_dim, double guard = kDefaultCutoffGuard);

/// max |D_d - D_2d| over the lower half block: the doubled-cutoff convergence drift.
double displacement_truncation_drift(Complex alpha, int cutoff_dim);

/// Two-mode mixer with a -> sqrt(t) e^{i phase} a + sqrt(1-t) b and
/// b -> sqrt(1-t) e^{i phase} a - sqrt(t) b (Heisenberg picture, U^dagger a U).
/// At t = 1/2 this is the balanced splitter c = (e^{i phase} a + b)/sqrt2, d = (e^{i phase} a - b)/sqrt2.
ModeOperator beamsplitter_unitary(double transmittivity, double phase, FockCutoff cutoff);

/// The (N+1)x(N+1) block of beamsplitter_unitary on the total-photon-number-N
/// subspace, basis |i, N-i>, i = 0..N. Exact for any N.
CMatrix beamsplitter_block(double transmittivity, double phase, int total_photons);

/// rho(alpha, beta) = D^dagger rho D with D^dagger a b D = (a + alpha)(b + beta),
/// evaluated at the state's own cutoff (truncated-generator displacement, trace preserving).
TwoModeState displace_state(const TwoModeState& state, const PhasePoint& point,
                            double guard = kDefaultCutoffGuard);

/// Low-level block of rho(alpha, beta) computed on an enlarged working space:
/// rows/cols |i j> with i < out.dim_a, j < out.dim_b. Accurate up to the
/// displaced support rather than the state's own cutoff.
CMatrix displaced_block(const TwoModeState& state, const PhasePoint& point, FockCutoff out);

/// |i j><k l| -> |i l><k j|.
CMatrix partial_transpose_b(const CMatrix& rho, FockCutoff cutoff);
CMatrix partial_transpose_b(const TwoModeState& state);

/// Pure-loss channel with transmittivity tau on the selected mode(s).
TwoModeState apply_loss(const TwoModeState& state, const LossChannel& channel);

/// Smallest eigenvalue of a Hermitian matrix (symmetrised internally).
double min_eigenvalue(const CMatrix& matrix);

/// Working dimension for a mode whose state occupies levels < support_dim and is
/// displaced by an amplitude of magnitude amp. Chosen so the displaced support tail is
/// negligible at double precision.
int working_dimension(int support_dim, double amp);

/// Columns D(shift)|n>, n = 0..count-1, represented on levels 0..working_dim-1.
/// Built from the exact coherent-state amplitudes and the recursion
/// D(s)|n> = (a^dagger - s^*) D(s)|n-1> / sqrt(n).
CMatrix displaced_fock_columns(Complex shift, int count, int working_dim);

/// Fock amplitudes of the coherent state |gamma> on levels 0..dim-1 (not renormalised).
CVector coherent_ket(Complex gamma, int dim);

}  // namespace cvw
