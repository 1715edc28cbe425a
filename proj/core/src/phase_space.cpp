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
#include "cvwitness/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "cvwitness/errors.hpp"

namespace cvw {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
constexpr int kMaxWorkingDim = 1500;

void add_flag(std::vector<std::string>& flags, const std::string& name) {
    if (std::find(flags.begin(), flags.end(), name) == flags.end()) flags.push_back(name);
}

void merge_flags(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& f : from) add_flag(into, f);
}

void require_sigma(double sigma) {
    if (!(sigma >= 0.0 && sigma <= 2.0)) {
        std::ostringstream msg;
        msg << "width parameter " << sigma << " outside [0,2]";
        throw InvalidArgument(msg.str());
    }
}

// (1 - sigma)^k with 0^0 = 1.
double smoothing_weight(double sigma, int k) { return k == 0 ? 1.0 : std::pow(1.0 - sigma, k); }

double determinant(const CMatrix& m) { return m.determinant().real(); }

}  // namespace

WidthParam::WidthParam(double sigma) : sigma_(sigma) { require_sigma(sigma); }

WidthParam sigma_from_s(double s) {
    if (!(s < 1.0)) {
        throw OutOfDomain("s >= 1 lies in the excluded Glauber-Sudarshan regime");
    }
    const double sigma = 2.0 / (1.0 - s);
    if (sigma > 2.0) {
        throw OutOfDomain("s maps to a width above 2");
    }
    return WidthParam(sigma);
}

bool operator<(const MultiIndex& lhs, const MultiIndex& rhs) {
    if (lhs.order() != rhs.order()) return lhs.order() < rhs.order();
    return lhs.p < rhs.p;
}

std::vector<MultiIndex> multi_indices(int max_order) {
    if (max_order < 0) {
        throw InvalidArgument("moment-matrix order must be non-negative");
    }
    std::vector<MultiIndex> out;
    for (int total = 0; total <= max_order; ++total)
        for (int p = 0; p <= total; ++p) out.push_back({total - p, p});
    return out;
}

WidthAssignment::WidthAssignment(std::vector<double> row_a, std::vector<double> row_b)
    : row_a_(std::move(row_a)), row_b_(std::move(row_b)) {
    if (row_a_.size() != row_b_.size() || row_a_.empty()) {
        throw InvalidArgument("width assignment needs equally many a and b rows");
    }
    for (double s : row_a_) require_sigma(s);
    for (double s : row_b_) require_sigma(s);
}

WidthAssignment WidthAssignment::uniform(double sigma, std::size_t rows) {
    return {std::vector<double>(rows, sigma), std::vector<double>(rows, sigma)};
}

WidthAssignment WidthAssignment::second_order(double s1a, double s1b, double s2a, double s2b) {
    return {{s1a, s2a}, {s1b, s2b}};
}

double WidthAssignment::combined_a(std::size_t i, std::size_t j) const { return combine_widths(row_a(i), row_a(j)); }
double WidthAssignment::combined_b(std::size_t i, std::size_t j) const { return combine_widths(row_b(i), row_b(j)); }

bool WidthAssignment::verdict_range() const {
    auto within = [](double s) { return s <= 1.0; };
    return std::all_of(row_a_.begin(), row_a_.end(), within) && std::all_of(row_b_.begin(), row_b_.end(), within);
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Entangled:
            return "entangled";
        case Verdict::NotDetected:
            return "not-detected";
        case Verdict::Withheld:
            return "withheld";
    }
    return "unknown";
}

ModeOperator smoothing_operator(WidthParam sigma_a, WidthParam sigma_b, FockCutoff cutoff) {
    CMatrix s = CMatrix::Zero(cutoff.total(), cutoff.total());
    for (int i = 0; i < cutoff.dim_a; ++i)
        for (int j = 0; j < cutoff.dim_b; ++j)
            s(cutoff.index(i, j), cutoff.index(i, j)) =
                smoothing_weight(sigma_a.value(), i) * smoothing_weight(sigma_b.value(), j);
    return {std::move(s), ":exp(-sigma_a n_a - sigma_b n_b):", 0.0, {}};
}

PointEvaluator::PointEvaluator(const TwoModeState& state, const PhasePoint& point) : state_(&state), point_(point) {
    if (!point.finite()) {
        throw InvalidArgument("phase-space point must be finite");
    }
    const FockCutoff c = state.cutoff();
    int la = working_dimension(c.dim_a, std::abs(point.alpha));
    int lb = working_dimension(c.dim_b, std::abs(point.beta));
    if (la > kMaxWorkingDim || lb > kMaxWorkingDim) {
        add_flag(flags_, flag::kTruncationRisk);
        la = std::min(la, kMaxWorkingDim);
        lb = std::min(lb, kMaxWorkingDim);
    }
    // Columns of D(-alpha): rows of D(alpha) on the support are their conjugates.
    cols_a_ = displaced_fock_columns(-point.alpha, c.dim_a, la);
    cols_b_ = displaced_fock_columns(-point.beta, c.dim_b, lb);
    merge_flags(flags_, state.flags());
}

CMatrix PointEvaluator::mode_block(const CMatrix& columns, int create, int annihilate, double sigma) const {
    const int working = static_cast<int>(columns.rows());
    const int support = static_cast<int>(columns.cols());
    // X|t> = coef(t) |t - annihilate + create>.
    CMatrix shifted = CMatrix::Zero(working, support);
    for (int t = annihilate; t < working; ++t) {
        const int base = t - annihilate;
        const int target = base + create;
        if (target >= working) break;
        const double log_coef = 0.5 * (std::lgamma(t + 1.0) - std::lgamma(base + 1.0)) +
                                0.5 * (std::lgamma(target + 1.0) - std::lgamma(base + 1.0));
        const double coef = std::exp(log_coef) * smoothing_weight(sigma, base);
        if (coef == 0.0) continue;
        shifted.row(target) += coef * columns.row(t);
    }
    return columns.adjoint() * shifted;
}

ElementResult PointEvaluator::element(const MultiIndex& row, const MultiIndex& col, double sigma_a,
                                      double sigma_b) const {
    require_sigma(sigma_a);
    require_sigma(sigma_b);
    ElementResult out;
    out.flags = element_flags(row, col);
    // Mode a: a^dag^n S a^m; mode b: b^dag^q S b^p (the b exponents cross between row and column).
    const CMatrix ya = mode_block(cols_a_, row.n, col.n, sigma_a);
    const CMatrix yb = mode_block(cols_b_, col.p, row.p, sigma_b);
    const FockCutoff c = state_->cutoff();
    const CMatrix& rho = state_->rho();
    const CMatrix ybt = yb.transpose();
    Complex total{0.0, 0.0};
    for (int i = 0; i < c.dim_a; ++i) {
        for (int k = 0; k < c.dim_a; ++k) {
            const Complex wa = ya(k, i);
            if (wa == Complex(0.0, 0.0)) continue;
            const auto block = rho.block(i * c.dim_b, k * c.dim_b, c.dim_b, c.dim_b);
            total += wa * block.cwiseProduct(ybt).sum();
        }
    }
    out.value = total;
    return out;
}

std::vector<std::string> PointEvaluator::element_flags(const MultiIndex& row, const MultiIndex& col) const {
    std::vector<std::string> out = flags_;
    if (row.n + col.n > cols_a_.rows() / 2 || row.p + col.p > cols_b_.rows() / 2) {
        add_flag(out, flag::kExponentBudget);
    }
    return out;
}

CMatrix PointEvaluator::block_a(int create, int annihilate, double sigma_a) const {
    require_sigma(sigma_a);
    return mode_block(cols_a_, create, annihilate, sigma_a);
}

CMatrix PointEvaluator::reduced_b(int create, int annihilate, double sigma_b) const {
    require_sigma(sigma_b);
    const CMatrix ybt = mode_block(cols_b_, create, annihilate, sigma_b).transpose();
    const FockCutoff c = state_->cutoff();
    const CMatrix& rho = state_->rho();
    CMatrix z(c.dim_a, c.dim_a);
    for (int k = 0; k < c.dim_a; ++k) {
        for (int i = 0; i < c.dim_a; ++i) {
            z(i, k) = rho.block(i * c.dim_b, k * c.dim_b, c.dim_b, c.dim_b).cwiseProduct(ybt).sum();
        }
    }
    return z;
}

ScalarResult PointEvaluator::phase_space_value(double sigma_a, double sigma_b) const {
    const ElementResult e = element({0, 0}, {0, 0}, sigma_a, sigma_b);
    ScalarResult out;
    out.flags = e.flags;
    if (std::abs(e.value.imag()) > 1e-10) {
        add_flag(out.flags, "imaginary-residual");
    }
    out.value = sigma_a * sigma_b / kPi2 * e.value.real();
    return out;
}

ScalarResult phase_space_value(const TwoModeState& state, const PhasePoint& point, WidthParam sigma_a,
                               WidthParam sigma_b) {
    return PointEvaluator(state, point).phase_space_value(sigma_a.value(), sigma_b.value());
}

ElementResult moment_matrix_element(const TwoModeState& state, const PhasePoint& point, const MultiIndex& row,
                                    const MultiIndex& col, double sigma_a, double sigma_b) {
    return PointEvaluator(state, point).element(row, col, sigma_a, sigma_b);
}

MomentMatrix build_moment_matrix(const TwoModeState& state, const PhasePoint& point, int max_order,
                                 const WidthAssignment& widths) {
    if (max_order < 1) {
        throw InvalidArgument("moment-matrix order must be >= 1");
    }
    const auto indices = multi_indices(max_order);
    if (widths.rows() != indices.size()) {
        throw InvalidArgument("width assignment must have one row per multi-index");
    }
    const PointEvaluator eval(state, point);
    const auto size = static_cast<Eigen::Index>(indices.size());
    CMatrix m(size, size);
    std::vector<std::string> flags = eval.flags();
    // Factors repeat across entries; each reduced_b costs a full pass over rho.
    using Key = std::tuple<int, int, double>;
    std::map<Key, CMatrix> factors_a;
    std::map<Key, CMatrix> factors_b;
    for (Eigen::Index r = 0; r < size; ++r) {
        for (Eigen::Index c = 0; c < size; ++c) {
            const auto ur = static_cast<std::size_t>(r);
            const auto uc = static_cast<std::size_t>(c);
            const MultiIndex& row = indices[ur];
            const MultiIndex& col = indices[uc];
            const Key ka{row.n, col.n, widths.combined_a(ur, uc)};
            const Key kb{col.p, row.p, widths.combined_b(ur, uc)};
            auto ia = factors_a.find(ka);
            if (ia == factors_a.end()) ia = factors_a.emplace(ka, eval.block_a(row.n, col.n, std::get<2>(ka))).first;
            auto ib = factors_b.find(kb);
            if (ib == factors_b.end()) ib = factors_b.emplace(kb, eval.reduced_b(col.p, row.p, std::get<2>(kb))).first;
            m(r, c) = ia->second.transpose().cwiseProduct(ib->second).sum();
            merge_flags(flags, eval.element_flags(row, col));
        }
    }
    MomentMatrix out{m, indices, point, widths, 0.0, flags};
    out.hermiticity_residual = (m - m.adjoint()).cwiseAbs().maxCoeff();
    out.entries = 0.5 * (m + m.adjoint());
    return out;
}

SecondOrderMinor second_order_minor(const TwoModeState& state, const PhasePoint& point,
                                    const WidthAssignment& widths) {
    if (widths.rows() != 2) {
        throw InvalidArgument("second-order minor needs a two-row width assignment");
    }
    const PointEvaluator eval(state, point);
    const MultiIndex first{0, 0};
    const MultiIndex second{1, 1};
    const ElementResult e11 = eval.element(first, first, widths.combined_a(0, 0), widths.combined_b(0, 0));
    const ElementResult e22 = eval.element(second, second, widths.combined_a(1, 1), widths.combined_b(1, 1));
    const ElementResult e12 = eval.element(first, second, widths.combined_a(0, 1), widths.combined_b(0, 1));
    SecondOrderMinor out;
    out.e11 = e11.value.real();
    out.e22 = e22.value.real();
    out.e12 = e12.value;
    out.value = out.e11 * out.e22 - std::norm(out.e12);
    out.flags = e11.flags;
    merge_flags(out.flags, e22.flags);
    merge_flags(out.flags, e12.flags);
    return out;
}

SecondOrderMinor husimi_criterion(const TwoModeState& state, const PhasePoint& point) {
    return second_order_minor(state, point, WidthAssignment::uniform(1.0, 2));
}

SecondOrderMinor wigner_criterion(const TwoModeState& state, const PhasePoint& point) {
    return second_order_minor(state, point, WidthAssignment::second_order(0.0, 0.0, 2.0, 2.0));
}

WitnessReport detect(const TwoModeState& state, const PhasePoint& point, int max_order, const WidthAssignment& widths,
                     double detect_tol) {
    const MomentMatrix mm = build_moment_matrix(state, point, max_order, widths);
    const CMatrix& m = mm.entries;
    const auto n = m.rows();
    WitnessReport report;
    report.point = point;
    report.widths = widths;
    report.flags = mm.flags;
    report.min_eigenvalue = min_eigenvalue(m);

    MinorRecord worst;
    bool have = false;
    auto consider = [&](std::vector<Eigen::Index> subset, double value) {
        if (!have || value < worst.value) {
            worst.value = value;
            worst.rows.clear();
            for (auto s : subset) worst.rows.push_back(mm.index_map[static_cast<std::size_t>(s)]);
            have = true;
        }
    };
    for (Eigen::Index i = 0; i < n; ++i) consider({i}, m(i, i).real());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            consider({i, j}, m(i, i).real() * m(j, j).real() - std::norm(m(i, j)));
    for (Eigen::Index k = 3; k <= n; ++k) {
        std::vector<Eigen::Index> subset(static_cast<std::size_t>(k));
        for (Eigen::Index s = 0; s < k; ++s) subset[static_cast<std::size_t>(s)] = s;
        consider(subset, determinant(m.topLeftCorner(k, k)));
    }
    report.worst_minor = worst;
    report.value = worst.value;
    if (!widths.verdict_range()) {
        report.verdict = Verdict::Withheld;
        add_flag(report.flags, flag::kVerdictWithheld);
    } else {
        report.verdict = report.min_eigenvalue < -detect_tol ? Verdict::Entangled : Verdict::NotDetected;
    }
    return report;
}

namespace {

struct FiniteDifferences {
    Complex mixed;
    double width_lhs;
    double width_rhs;
};

// Central differences at step h for both identities.
FiniteDifferences finite_differences(const TwoModeState& state, const PhasePoint& point, double sigma, double h) {
    auto p_at = [&](Complex da, Complex db, double sa) {
        const PhasePoint shifted{point.alpha + da, point.beta + db};
        return PointEvaluator(state, shifted).phase_space_value(sa, sigma).value;
    };
    const Complex hr{h, 0.0};
    const Complex hi{0.0, h};
    auto cross = [&](Complex ea, Complex eb) {
        return (p_at(ea, eb, sigma) - p_at(ea, -eb, sigma) - p_at(-ea, eb, sigma) + p_at(-ea, -eb, sigma)) /
               (4.0 * h * h);
    };
    const double dxu = cross(hr, hr);
    const double dxv = cross(hr, hi);
    const double dyu = cross(hi, hr);
    const double dyv = cross(hi, hi);
    // (1/2)(d_x + i d_y) applied with (1/2)(d_u - i d_v).
    const Complex mixed = 0.25 * Complex(dxu + dyv, dyu - dxv);

    const double centre = p_at(0.0, 0.0, sigma);
    const double lap = (p_at(hr, 0.0, sigma) + p_at(-hr, 0.0, sigma) + p_at(hi, 0.0, sigma) +
                        p_at(-hi, 0.0, sigma) - 4.0 * centre) /
                       (h * h);
    const double phi_plus = p_at(0.0, 0.0, sigma + h) / (sigma + h);
    const double phi_minus = p_at(0.0, 0.0, sigma - h) / (sigma - h);
    const double width_lhs = -sigma * sigma * (phi_plus - phi_minus) / (2.0 * h);
    const double width_rhs = centre + 0.25 * lap / sigma;
    return {mixed, width_lhs, width_rhs};
}

}  // namespace

DerivativeReport validate_derivative_identities(const TwoModeState& state, const PhasePoint& point, WidthParam sigma,
                                                double step) {
    const double s = sigma.value();
    if (!(s > 0.0 && s <= 1.0)) {
        throw InvalidArgument("derivative validation needs sigma in (0, 1]");
    }
    if (!(step >= 1e-4 && step <= 1e-2)) {
        throw InvalidArgument("finite-difference step must lie in [1e-4, 1e-2]");
    }
    const FiniteDifferences f1 = finite_differences(state, point, s, step);
    const FiniteDifferences f2 = finite_differences(state, point, s, 2.0 * step);
    const FiniteDifferences f4 = finite_differences(state, point, s, 4.0 * step);
    // Second-order schemes shrink successive differences by ~4x; growth signals roundoff.
    auto non_monotone = [](double d1, double d2, double floor) { return d1 > d2 && d1 > floor; };
    const double floor = 1e-10;
    if (non_monotone(std::abs(f1.mixed - f2.mixed), std::abs(f2.mixed - f4.mixed), floor) ||
        non_monotone(std::abs(f1.width_lhs - f2.width_lhs), std::abs(f2.width_lhs - f4.width_lhs), floor) ||
        non_monotone(std::abs(f1.width_rhs - f2.width_rhs), std::abs(f2.width_rhs - f4.width_rhs), floor)) {
        throw DiagnosticError("finite-difference step is dominated by roundoff");
    }
    DerivativeReport report;
    report.fd_mixed = f1.mixed;
    const Complex element = PointEvaluator(state, point).element({0, 0}, {1, 1}, s, s).value;
    report.operator_mixed = element * (s * s * s * s) / kPi2;
    report.residual_mixed = std::abs(report.fd_mixed - report.operator_mixed);
    report.width_lhs = f1.width_lhs;
    report.width_rhs = f1.width_rhs;
    report.residual_width = std::abs(f1.width_lhs - f1.width_rhs);
    return report;
}

}  // namespace cvw
