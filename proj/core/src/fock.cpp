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
#include "cvwitness/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "cvwitness/errors.hpp"

namespace cvw {

namespace {

void require_finite(Complex z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw InvalidArgument(std::string(what) + " must be finite");
    }
}

void require_transmittivity(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw InvalidArgument("transmittivity must lie in [0,1]");
    }
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Kraus operators of single-mode pure loss on levels 0..dim-1.
std::vector<CMatrix> loss_kraus(double tau, int dim) {
    std::vector<CMatrix> ops;
    ops.reserve(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
        CMatrix kraus = CMatrix::Zero(dim, dim);
        for (int n = k; n < dim; ++n) {
            // sqrt(C(n,k) tau^(n-k) (1-tau)^k)
            const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
            double weight = 0.0;
            const bool zero_loss_term = (k > 0 && tau == 1.0);
            const bool zero_keep_term = (n - k > 0 && tau == 0.0);
            if (!zero_loss_term && !zero_keep_term) {
                const double log_w = log_binom + (n - k) * (tau > 0.0 ? std::log(tau) : 0.0) +
                                     k * (tau < 1.0 ? std::log1p(-tau) : 0.0);
                weight = std::exp(0.5 * log_w);
            }
            kraus(n - k, n) = weight;
        }
        ops.push_back(std::move(kraus));
    }
    return ops;
}

}  // namespace

FockCutoff::FockCutoff(int a, int b) : dim_a(a), dim_b(b) {
    if (a < 2 || b < 2) {
        std::ostringstream msg;
        msg << "cutoff dimensions must be >= 2 (got " << a << ", " << b << ")";
        throw InvalidCutoff(msg.str());
    }
}

bool PhasePoint::finite() const {
    return std::isfinite(alpha.real()) && std::isfinite(alpha.imag()) && std::isfinite(beta.real()) &&
           std::isfinite(beta.imag());
}

TwoModeState::TwoModeState(CMatrix rho, FockCutoff cutoff, const StateCheck& check)
    : rho_(std::move(rho)), cutoff_(cutoff) {
    if (rho_.rows() != cutoff_.total() || rho_.cols() != cutoff_.total()) {
        throw InvalidArgument("density matrix size does not match cutoff");
    }
    if (!rho_.allFinite()) {
        throw InvalidArgument("density matrix has non-finite entries");
    }
    rho_ = hermitian_part(rho_);
    const double tr = trace();
    if (std::abs(tr - 1.0) > check.trace_tol) {
        if (check.strict) {
            std::ostringstream msg;
            msg << "density matrix trace " << tr << " differs from 1";
            throw InvalidArgument(msg.str());
        }
        flags_.emplace_back(flag::kTraceDeficit);
    }
    if (check.check_eigenvalues) {
        const double lowest = min_eigenvalue(rho_);
        if (lowest < -check.eig_tol) {
            if (check.strict) {
                throw InvalidArgument("density matrix is not positive semidefinite");
            }
            flags_.emplace_back("negative-eigenvalue");
        }
    }
}

TwoModeState TwoModeState::pure(const CVector& psi, FockCutoff cutoff, const StateCheck& check) {
    return TwoModeState(psi * psi.adjoint(), cutoff, check);
}

TwoModeState TwoModeState::vacuum(FockCutoff cutoff) {
    CMatrix rho = CMatrix::Zero(cutoff.total(), cutoff.total());
    rho(0, 0) = 1.0;
    return TwoModeState(std::move(rho), cutoff);
}

Complex TwoModeState::at(int i, int j, int k, int l) const {
    return rho_(cutoff_.index(i, j), cutoff_.index(k, l));
}

double TwoModeState::trace() const { return rho_.trace().real(); }

double TwoModeState::purity() const { return (rho_ * rho_).trace().real(); }

TwoModeState TwoModeState::embedded(FockCutoff larger) const {
    if (larger.dim_a < cutoff_.dim_a || larger.dim_b < cutoff_.dim_b) {
        throw InvalidCutoff("embedding requires a cutoff at least as large as the state's");
    }
    CMatrix out = CMatrix::Zero(larger.total(), larger.total());
    for (int i = 0; i < cutoff_.dim_a; ++i)
        for (int j = 0; j < cutoff_.dim_b; ++j)
            for (int k = 0; k < cutoff_.dim_a; ++k)
                for (int l = 0; l < cutoff_.dim_b; ++l)
                    out(larger.index(i, j), larger.index(k, l)) = at(i, j, k, l);
    StateCheck relaxed;
    relaxed.strict = false;
    TwoModeState result(std::move(out), larger, relaxed);
    result.flags_ = flags_;
    return result;
}

TwoModeState TwoModeState::with_flag(const std::string& name) const {
    TwoModeState copy = *this;
    if (std::find(copy.flags_.begin(), copy.flags_.end(), name) == copy.flags_.end()) {
        copy.flags_.push_back(name);
    }
    return copy;
}

Eigen::MatrixXd TwoModeState::populations() const {
    Eigen::MatrixXd pop(cutoff_.dim_a, cutoff_.dim_b);
    for (int i = 0; i < cutoff_.dim_a; ++i)
        for (int j = 0; j < cutoff_.dim_b; ++j) pop(i, j) = at(i, j, i, j).real();
    return pop;
}

ModeOperator ladder_operator(int cutoff_dim, LadderKind kind) {
    if (cutoff_dim < 2) {
        throw InvalidCutoff("ladder operator needs cutoff_dim >= 2");
    }
    CMatrix a = CMatrix::Zero(cutoff_dim, cutoff_dim);
    for (int n = 1; n < cutoff_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    switch (kind) {
        case LadderKind::Annihilate:
            return {a, "a", 0.0, {}};
        case LadderKind::Create:
            return {a.adjoint(), "a^dagger", 0.0, {}};
        case LadderKind::Number:
            return {a.adjoint() * a, "n", 0.0, {}};
    }
    throw InvalidArgument("unknown ladder kind");
}

ModeOperator displacement_operator(Complex alpha, int cutoff_dim, double guard) {
    require_finite(alpha, "displacement amplitude");
    if (cutoff_dim < 2) {
        throw InvalidCutoff("displacement needs cutoff_dim >= 2");
    }
    const CMatrix a = ladder_operator(cutoff_dim, LadderKind::Annihilate).matrix;
    const CMatrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
    ModeOperator out;
    out.matrix = generator.exp();
    out.label = "D(alpha)";
    out.unitarity_residual =
        (out.matrix.adjoint() * out.matrix - CMatrix::Identity(cutoff_dim, cutoff_dim)).cwiseAbs().maxCoeff();
    if (std::norm(alpha) > guard * cutoff_dim) {
        out.warnings.emplace_back(flag::kTruncationRisk);
    }
    return out;
}

double displacement_truncation_drift(Complex alpha, int cutoff_dim) {
    const CMatrix small = displacement_operator(alpha, cutoff_dim).matrix;
    const CMatrix large = displacement_operator(alpha, 2 * cutoff_dim).matrix;
    const int half = std::max(1, cutoff_dim / 2);
    return (small.topLeftCorner(half, half) - large.topLeftCorner(half, half)).cwiseAbs().maxCoeff();
}

CMatrix beamsplitter_block(double transmittivity, double phase, int total_photons) {
    require_transmittivity(transmittivity);
    const int n = total_photons;
    const double angle = std::acos(std::sqrt(transmittivity));
    // Generator angle * (a b^dagger - a^dagger b) on |i, n-i>.
    CMatrix generator = CMatrix::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        if (i > 0) {
            generator(i - 1, i) += angle * std::sqrt(static_cast<double>(i) * (n - i + 1));
        }
        if (i < n) {
            generator(i + 1, i) -= angle * std::sqrt(static_cast<double>(i + 1) * (n - i));
        }
    }
    CMatrix rotation = generator.exp();
    // Phase stage: e^{i phase n_a} (-1)^{n_b}, applied first.
    for (int i = 0; i <= n; ++i) {
        const double sign = ((n - i) % 2 == 0) ? 1.0 : -1.0;
        rotation.col(i) *= sign * std::polar(1.0, phase * i);
    }
    return rotation;
}

ModeOperator beamsplitter_unitary(double transmittivity, double phase, FockCutoff cutoff) {
    require_transmittivity(transmittivity);
    if (cutoff.dim_a != cutoff.dim_b) {
        throw InvalidCutoff("beamsplitter requires equal mode cutoffs");
    }
    const int d = cutoff.dim_a;
    CMatrix u = CMatrix::Zero(cutoff.total(), cutoff.total());
    // Photon-number blocks with total >= d are truncated by the cutoff; the
    // generator is applied on the representable part of those blocks.
    for (int n = 0; n <= 2 * (d - 1); ++n) {
        const int lo = std::max(0, n - (d - 1));
        const int hi = std::min(n, d - 1);
        CMatrix block;
        if (n <= d - 1) {
            block = beamsplitter_block(transmittivity, phase, n);
            for (int i = 0; i <= n; ++i)
                for (int k = 0; k <= n; ++k) u(cutoff.index(i, n - i), cutoff.index(k, n - k)) = block(i, k);
            continue;
        }
        const int m = hi - lo + 1;
        const double angle = std::acos(std::sqrt(transmittivity));
        CMatrix generator = CMatrix::Zero(m, m);
        for (int r = 0; r < m; ++r) {
            const int i = lo + r;
            if (r > 0) generator(r - 1, r) += angle * std::sqrt(static_cast<double>(i) * (n - i + 1));
            if (r + 1 < m) generator(r + 1, r) -= angle * std::sqrt(static_cast<double>(i + 1) * (n - i));
        }
        block = generator.exp();
        for (int r = 0; r < m; ++r) {
            const int i = lo + r;
            const double sign = ((n - i) % 2 == 0) ? 1.0 : -1.0;
            block.col(r) *= sign * std::polar(1.0, phase * i);
        }
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                u(cutoff.index(lo + r, n - lo - r), cutoff.index(lo + c, n - lo - c)) = block(r, c);
    }
    ModeOperator out;
    out.matrix = std::move(u);
    out.label = "BS(tau,theta)";
    out.unitarity_residual =
        (out.matrix.adjoint() * out.matrix - CMatrix::Identity(cutoff.total(), cutoff.total())).cwiseAbs().maxCoeff();
    return out;
}

TwoModeState displace_state(const TwoModeState& state, const PhasePoint& point, double guard) {
    if (!point.finite()) {
        throw InvalidArgument("phase-space point must be finite");
    }
    const FockCutoff c = state.cutoff();
    // D(alpha)^dagger = D(-alpha).
    const ModeOperator da = displacement_operator(-point.alpha, c.dim_a, guard);
    const ModeOperator db = displacement_operator(-point.beta, c.dim_b, guard);
    CMatrix dag(c.total(), c.total());
    for (int i = 0; i < c.dim_a; ++i)
        for (int j = 0; j < c.dim_b; ++j)
            for (int k = 0; k < c.dim_a; ++k)
                for (int l = 0; l < c.dim_b; ++l) dag(c.index(i, j), c.index(k, l)) = da.matrix(i, k) * db.matrix(j, l);
    StateCheck relaxed;
    relaxed.strict = false;
    relaxed.trace_tol = 1e-9;
    TwoModeState out(dag * state.rho() * dag.adjoint(), c, relaxed);
    if (!da.warnings.empty() || !db.warnings.empty()) {
        return out.with_flag(flag::kTruncationRisk);
    }
    return out;
}

CMatrix displaced_block(const TwoModeState& state, const PhasePoint& point, FockCutoff out) {
    if (!point.finite()) {
        throw InvalidArgument("phase-space point must be finite");
    }
    const FockCutoff c = state.cutoff();
    const int la = std::max(out.dim_a, working_dimension(c.dim_a, std::abs(point.alpha)));
    const int lb = std::max(out.dim_b, working_dimension(c.dim_b, std::abs(point.beta)));
    // rho(alpha,beta)[(i,j),(k,l)] = sum V_a[i,s] V_b[j,t] rho[(s,t),(u,v)] conj(V_a[k,u] V_b[l,v])
    // with V = columns of D(-alpha).
    const CMatrix va = displaced_fock_columns(-point.alpha, c.dim_a, la).topRows(out.dim_a);
    const CMatrix vb = displaced_fock_columns(-point.beta, c.dim_b, lb).topRows(out.dim_b);
    CMatrix w(out.total(), c.total());
    for (int i = 0; i < out.dim_a; ++i)
        for (int j = 0; j < out.dim_b; ++j)
            for (int s = 0; s < c.dim_a; ++s)
                for (int t = 0; t < c.dim_b; ++t) w(out.index(i, j), c.index(s, t)) = va(i, s) * vb(j, t);
    return w * state.rho() * w.adjoint();
}

CMatrix partial_transpose_b(const CMatrix& rho, FockCutoff c) {
    if (rho.rows() != c.total() || rho.cols() != c.total()) {
        throw InvalidArgument("matrix size does not match cutoff");
    }
    CMatrix out(c.total(), c.total());
    for (int i = 0; i < c.dim_a; ++i)
        for (int j = 0; j < c.dim_b; ++j)
            for (int k = 0; k < c.dim_a; ++k)
                for (int l = 0; l < c.dim_b; ++l) out(c.index(i, l), c.index(k, j)) = rho(c.index(i, j), c.index(k, l));
    return out;
}

CMatrix partial_transpose_b(const TwoModeState& state) { return partial_transpose_b(state.rho(), state.cutoff()); }

TwoModeState apply_loss(const TwoModeState& state, const LossChannel& channel) {
    require_transmittivity(channel.tau);
    const FockCutoff c = state.cutoff();
    CMatrix rho = state.rho();
    auto apply_mode = [&](bool mode_a) {
        const int dim = mode_a ? c.dim_a : c.dim_b;
        const auto kraus = loss_kraus(channel.tau, dim);
        CMatrix next = CMatrix::Zero(c.total(), c.total());
        for (const CMatrix& k : kraus) {
            CMatrix full(c.total(), c.total());
            if (mode_a) {
                full = Eigen::kroneckerProduct(k, CMatrix::Identity(c.dim_b, c.dim_b));
            } else {
                full = Eigen::kroneckerProduct(CMatrix::Identity(c.dim_a, c.dim_a), k);
            }
            next.noalias() += full * rho * full.adjoint();
        }
        rho = std::move(next);
    };
    if (channel.tau != 1.0) {
        if (channel.mode == LossMode::A || channel.mode == LossMode::Both) apply_mode(true);
        if (channel.mode == LossMode::B || channel.mode == LossMode::Both) apply_mode(false);
    }
    StateCheck relaxed;
    relaxed.strict = false;
    return TwoModeState(std::move(rho), c, relaxed);
}

double min_eigenvalue(const CMatrix& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw InvalidArgument("min_eigenvalue needs a square matrix");
    }
    if (!matrix.allFinite()) {
        throw InvalidArgument("min_eigenvalue: non-finite entries");
    }
    if (matrix.rows() == 0) {
        throw InvalidArgument("min_eigenvalue: empty matrix");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(matrix), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

int working_dimension(int support_dim, double amp) {
    const double spread = std::sqrt(static_cast<double>(support_dim)) + amp;
    const double mean = spread * spread;
    const int dim = static_cast<int>(std::ceil(mean + 12.0 * spread + 30.0));
    return std::max(dim, support_dim + 2);
}

CVector coherent_ket(Complex gamma, int dim) {
    CVector ket(dim);
    const double r = std::abs(gamma);
    const double phi = std::arg(gamma);
    for (int n = 0; n < dim; ++n) {
        if (r == 0.0) {
            ket(n) = (n == 0) ? 1.0 : 0.0;
            continue;
        }
        const double log_mag = -0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
        ket(n) = std::polar(std::exp(log_mag), n * phi);
    }
    return ket;
}

CMatrix displaced_fock_columns(Complex shift, int count, int working_dim) {
    if (count > working_dim) {
        throw InvalidCutoff("working dimension smaller than column count");
    }
    CMatrix cols(working_dim, count);
    cols.col(0) = coherent_ket(shift, working_dim);
    const Complex s_conj = std::conj(shift);
    for (int n = 1; n < count; ++n) {
        const auto prev = cols.col(n - 1);
        auto next = cols.col(n);
        for (int k = 0; k < working_dim; ++k) {
            Complex v = -s_conj * prev(k);
            if (k > 0) v += std::sqrt(static_cast<double>(k)) * prev(k - 1);
            next(k) = v / std::sqrt(static_cast<double>(n));
        }
    }
    return cols;
}

}  // namespace cvw
