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
#include "cvwitness/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "cvwitness/errors.hpp"
#include "cvwitness/ppt.hpp"

namespace cvw {

namespace {

void add_flags(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& f : from) {
        if (std::find(into.begin(), into.end(), f) == into.end()) into.push_back(f);
    }
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is written by one
// worker only, so the output never depends on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < n; i = next++) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next = n;
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

const char* slice_name(Slice slice) {
    switch (slice) {
        case Slice::RealPlane:
            return "real";
        case Slice::DiagonalLine:
            return "diagonal";
        case Slice::FullGrid4D:
            return "full";
    }
    return "real";
}

Slice parse_slice(const std::string& name) {
    if (name == "real") return Slice::RealPlane;
    if (name == "diagonal") return Slice::DiagonalLine;
    if (name == "full") return Slice::FullGrid4D;
    throw InvalidArgument("unknown slice '" + name + "' (expected real, diagonal or full)");
}

double AxisRange::at(int i) const {
    if (i == steps - 1) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

ScanRegion ScanRegion::real_plane(AxisRange alpha, AxisRange beta) {
    ScanRegion r;
    r.slice = Slice::RealPlane;
    r.axes = {alpha, beta};
    return r;
}

ScanRegion ScanRegion::diagonal(AxisRange radius, double phase) {
    ScanRegion r;
    r.slice = Slice::DiagonalLine;
    r.axes = {radius};
    r.phase = phase;
    return r;
}

ScanRegion ScanRegion::full_grid(AxisRange re_a, AxisRange im_a, AxisRange re_b, AxisRange im_b) {
    ScanRegion r;
    r.slice = Slice::FullGrid4D;
    r.axes = {re_a, im_a, re_b, im_b};
    return r;
}

std::size_t ScanRegion::size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(std::max(a.steps, 0));
    return n;
}

void ScanRegion::validate() const {
    const std::size_t want = slice == Slice::RealPlane ? 2 : slice == Slice::DiagonalLine ? 1 : 4;
    if (axes.size() != want) {
        throw InvalidArgument(std::string("slice '") + slice_name(slice) + "' needs " + std::to_string(want) +
                              " axes");
    }
    for (const auto& a : axes) {
        if (a.steps < 2) throw InvalidArgument("every scan axis needs at least 2 steps");
        if (!std::isfinite(a.min) || !std::isfinite(a.max)) throw InvalidArgument("scan axis bounds must be finite");
    }
    if (!std::isfinite(phase)) throw InvalidArgument("diagonal phase must be finite");
    if (size() > budget) {
        throw InvalidArgument("scan has " + std::to_string(size()) + " points, above the budget of " +
                              std::to_string(budget) + "; raise the budget to at least " + std::to_string(size()));
    }
}

PhasePoint ScanRegion::point(std::size_t flat_index) const {
    std::vector<double> coord(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const auto steps = static_cast<std::size_t>(axes[k].steps);
        coord[k] = axes[k].at(static_cast<int>(flat_index % steps));
        flat_index /= steps;
    }
    switch (slice) {
        case Slice::RealPlane:
            return {Complex(coord[0], 0.0), Complex(coord[1], 0.0)};
        case Slice::DiagonalLine: {
            const Complex z = std::polar(1.0, phase) * coord[0];
            return {z, z};
        }
        case Slice::FullGrid4D:
            return {Complex(coord[0], coord[1]), Complex(coord[2], coord[3])};
    }
    return {};
}

std::string Criterion::name() const {
    switch (kind) {
        case CriterionKind::M2:
            return "m2";
        case CriterionKind::Husimi:
            return "husimi";
        case CriterionKind::Wigner:
            return "wigner";
        case CriterionKind::MinEig:
            return "mineig";
    }
    return "m2";
}

Criterion Criterion::parse(const std::string& name, int order) {
    if (order < 1) throw InvalidArgument("moment-matrix order must be >= 1");
    if (name == "m2") return {CriterionKind::M2, 2};
    if (name == "husimi") return {CriterionKind::Husimi, 2};
    if (name == "wigner") return {CriterionKind::Wigner, 2};
    if (name == "mineig") return {CriterionKind::MinEig, order};
    throw InvalidArgument("unknown criterion '" + name + "' (expected m2, husimi, wigner or mineig)");
}

Evaluation evaluate_criterion(const TwoModeState& state, const PhasePoint& point, double sigma,
                              const Criterion& criterion, double detect_tol) {
    const WidthParam width(sigma);
    Evaluation out;
    bool verdict_allowed = true;
    switch (criterion.kind) {
        case CriterionKind::M2: {
            const auto m = second_order_minor(state, point, WidthAssignment::uniform(width.value(), 2));
            out.value = m.value;
            out.flags = m.flags;
            verdict_allowed = width.value() <= 1.0;
            break;
        }
        case CriterionKind::Husimi: {
            const auto m = husimi_criterion(state, point);
            out.value = m.value;
            out.flags = m.flags;
            break;
        }
        case CriterionKind::Wigner: {
            // Row widths 0 and 2 are inside the range where the minor bounds separable states.
            const auto m = wigner_criterion(state, point);
            out.value = m.value;
            out.flags = m.flags;
            break;
        }
        case CriterionKind::MinEig: {
            const auto widths = WidthAssignment::uniform(width.value(), multi_indices(criterion.order).size());
            const auto r = detect(state, point, criterion.order, widths, detect_tol);
            out.value = r.min_eigenvalue;
            out.flags = r.flags;
            verdict_allowed = widths.verdict_range();
            break;
        }
    }
    if (!verdict_allowed) {
        out.verdict = Verdict::Withheld;
        add_flags(out.flags, {flag::kVerdictWithheld});
    } else {
        out.verdict = out.value < -detect_tol ? Verdict::Entangled : Verdict::NotDetected;
    }
    return out;
}

const ScanRow& ScanResult::minimum() const {
    if (rows.empty()) throw InvalidArgument("empty scan result");
    const ScanRow* best = &rows.front();
    for (const auto& r : rows) {
        if (r.value < best->value) best = &r;
    }
    return *best;
}

ScanResult grid_scan(const TwoModeState& state, const ScanRegion& region, WidthParam sigma,
                     const Criterion& criterion, int threads) {
    region.validate();
    const std::size_t n = region.size();
    ScanResult result;
    result.rows.resize(n);
    std::vector<std::vector<std::string>> flags(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const PhasePoint p = region.point(i);
        Evaluation e = evaluate_criterion(state, p, sigma.value(), criterion);
        result.rows[i] = {p, sigma.value(), e.value, e.verdict};
        flags[i] = std::move(e.flags);
    });
    for (const auto& f : flags) add_flags(result.flags, f);
    result.provenance.dim_a = state.cutoff().dim_a;
    result.provenance.dim_b = state.cutoff().dim_b;
    return result;
}

namespace {

struct Objective {
    const TwoModeState* state;
    double sigma;
    Criterion criterion;
    bool real_plane;
    std::vector<std::string> flags;

    PhasePoint point(const gsl_vector* x) const {
        if (real_plane) return {Complex(gsl_vector_get(x, 0), 0.0), Complex(gsl_vector_get(x, 1), 0.0)};
        return {Complex(gsl_vector_get(x, 0), gsl_vector_get(x, 1)),
                Complex(gsl_vector_get(x, 2), gsl_vector_get(x, 3))};
    }
};

double objective_value(const gsl_vector* x, void* params) {
    auto* obj = static_cast<Objective*>(params);
    const PhasePoint p = obj->point(x);
    if (!p.finite()) return std::numeric_limits<double>::max();
    try {
        Evaluation e = evaluate_criterion(*obj->state, p, obj->sigma, obj->criterion);
        add_flags(obj->flags, e.flags);
        return e.value;
    } catch (const TruncationRisk&) {
        return std::numeric_limits<double>::max();
    }
}

}  // namespace

RefineResult refine_minimum(const TwoModeState& state, const PhasePoint& start, WidthParam sigma,
                            const Criterion& criterion, const RefineOptions& options) {
    if (!start.finite()) throw InvalidArgument("refinement start point must be finite");
    if (!(options.initial_step > 0.0) || !(options.size_tol > 0.0) || options.max_iterations < 1) {
        throw InvalidArgument("invalid refinement options");
    }
    Objective obj{&state, sigma.value(), criterion, options.real_plane, {}};
    const std::size_t dim = options.real_plane ? 2 : 4;

    gsl_vector* x = gsl_vector_alloc(dim);
    gsl_vector* step = gsl_vector_alloc(dim);
    if (options.real_plane) {
        gsl_vector_set(x, 0, start.alpha.real());
        gsl_vector_set(x, 1, start.beta.real());
    } else {
        gsl_vector_set(x, 0, start.alpha.real());
        gsl_vector_set(x, 1, start.alpha.imag());
        gsl_vector_set(x, 2, start.beta.real());
        gsl_vector_set(x, 3, start.beta.imag());
    }
    gsl_vector_set_all(step, options.initial_step);

    gsl_multimin_function fn{&objective_value, dim, &obj};
    gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(solver, &fn, x, step);

    RefineResult result;
    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && result.iterations < options.max_iterations) {
        ++result.iterations;
        if (gsl_multimin_fminimizer_iterate(solver) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), options.size_tol);
    }
    result.converged = status == GSL_SUCCESS;
    result.point = obj.point(gsl_multimin_fminimizer_x(solver));
    result.value = gsl_multimin_fminimizer_minimum(solver);
    gsl_multimin_fminimizer_free(solver);
    gsl_vector_free(step);
    gsl_vector_free(x);

    result.flags = obj.flags;
    if (!result.converged) add_flags(result.flags, {flag::kNotConverged});
    return result;
}

ScanResult sigma_sweep(const TwoModeState& state, const PhasePoint& point, const std::vector<WidthParam>& sigmas,
                       const Criterion& criterion) {
    if (!point.finite()) throw InvalidArgument("sweep point must be finite");
    ScanResult result;
    for (const auto& s : sigmas) {
        Evaluation e = evaluate_criterion(state, point, s.value(), criterion);
        if (s.value() > 1.0 && e.verdict != Verdict::Withheld) {
            e.verdict = Verdict::Withheld;
            add_flags(e.flags, {flag::kVerdictWithheld});
        }
        result.rows.push_back({point, s.value(), e.value, e.verdict});
        add_flags(result.flags, e.flags);
    }
    result.provenance.dim_a = state.cutoff().dim_a;
    result.provenance.dim_b = state.cutoff().dim_b;
    return result;
}

double detection_threshold(const ScanResult& sweep, double tol) {
    std::vector<const ScanRow*> rows;
    for (const auto& r : sweep.rows) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const ScanRow* a, const ScanRow* b) { return a->sigma < b->sigma; });
    for (const auto* r : rows) {
        if (r->value < -tol) return r->sigma;
    }
    return -1.0;
}

RateTable detection_rate(const RandomStateSpec& spec, const std::vector<PhasePoint>& points,
                         const std::vector<WidthParam>& sigmas, double detect_tol, int threads) {
    if (spec.d < 2) throw InvalidCutoff("random states need d >= 2");
    if (spec.count < 1) throw InvalidArgument("state count must be positive");
    for (const auto& p : points) {
        if (!p.finite()) throw InvalidArgument("rate points must be finite");
    }
    const FockCutoff cutoff(spec.d, spec.d);
    const std::size_t cells = points.size() * sigmas.size();
    const auto count = static_cast<std::size_t>(spec.count);
    std::vector<std::vector<char>> hit(count, std::vector<char>(cells, 0));
    std::vector<char> ppt(count, 0);
    std::vector<std::vector<std::string>> flags(count);

    parallel_for(count, threads, [&](std::size_t k) {
        const TwoModeState state = random_haar_state(spec.d, spec.seed, static_cast<int>(k), cutoff);
        ppt[k] = ppt_min_eig(state).entangled ? 1 : 0;
        for (std::size_t p = 0; p < points.size(); ++p) {
            for (std::size_t s = 0; s < sigmas.size(); ++s) {
                const auto m = second_order_minor(state, points[p], WidthAssignment::uniform(sigmas[s].value(), 2));
                hit[k][p * sigmas.size() + s] = m.value < -detect_tol ? 1 : 0;
                add_flags(flags[k], m.flags);
            }
        }
    });

    RateTable table;
    table.count = spec.count;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t s = 0; s < sigmas.size(); ++s) {
            RateRow row{points[p], sigmas[s].value(), 0, spec.count};
            for (std::size_t k = 0; k < count; ++k) row.detected += hit[k][p * sigmas.size() + s];
            table.rows.push_back(row);
        }
    }
    for (std::size_t k = 0; k < count; ++k) {
        table.ppt_entangled += ppt[k];
        add_flags(table.flags, flags[k]);
    }
    table.provenance.dim_a = spec.d;
    table.provenance.dim_b = spec.d;
    table.provenance.seed = spec.seed;
    return table;
}

}  // namespace cvw
