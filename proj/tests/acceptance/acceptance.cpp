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
// Acceptance gate: one PASS/FAIL line per criterion. `--only N` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvwitness/measurement.hpp"
#include "cvwitness/phase_space.hpp"
#include "cvwitness/ppt.hpp"
#include "cvwitness/scan.hpp"
#include "cvwitness/states.hpp"

using namespace cvw;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Checker {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            failures_.push_back(what);
        }
    }
    void note(const std::string& text) { notes_.push_back(text); }

    [[nodiscard]] Outcome outcome() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < notes_.size(); ++i) os << (i ? "; " : "") << notes_[i];
        for (const auto& f : failures_) os << " | failed: " << f;
        return {pass_, os.str()};
    }

private:
    bool pass_ = true;
    std::vector<std::string> notes_;
    std::vector<std::string> failures_;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

PhasePoint random_point(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    const double ra = u(rng);
    const double ia = u(rng);
    const double rb = u(rng);
    const double ib = u(rng);
    return {Complex(ra, ia), Complex(rb, ib)};
}

TwoModeState balanced_noon(int N, FockCutoff c) { return noon_state({N}, c); }

// Best of 40 seeded Nelder-Mead starts of the Husimi criterion over the full 4D space.
RefineResult husimi_optimum(const TwoModeState& state, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    RefineResult best;
    best.value = INFINITY;
    for (int k = 0; k < 40; ++k) {
        const auto r = refine_minimum(state, random_point(rng, 2.5), WidthParam(1), Criterion{CriterionKind::M2});
        if (r.value < best.value) best = r;
    }
    return best;
}

Outcome bell_anchor() {
    Checker c;
    const auto bell = balanced_noon(1, FockCutoff(2, 2));
    const double h = husimi_criterion(bell, {}).value;
    const double w = wigner_criterion(bell, {}).value;
    const double p = ppt_min_eig(bell).min_eigenvalue;
    c.note("husimi " + num(h) + ", wigner " + num(w) + ", ppt " + num(p));
    c.expect(std::abs(h + 0.25) <= 1e-9, "husimi");
    c.expect(std::abs(w + 0.25) <= 1e-9, "wigner");
    c.expect(std::abs(p + 0.5) <= 1e-10, "ppt");
    return c.outcome();
}

Outcome separability_soundness() {
    Checker c;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> parts(1, 5);
    int violations = 0;
    int evaluations = 0;
    double worst = INFINITY;
    for (int m = 0; m < 50; ++m) {
        const int k = parts(rng);
        std::vector<double> weights;
        std::vector<std::pair<Complex, Complex>> amps;
        double largest = 0.0;
        for (int i = 0; i < k; ++i) {
            weights.push_back(0.05 + unit(rng));
            const PhasePoint a = random_point(rng, 1.2);
            amps.emplace_back(a.alpha, a.beta);
            largest = std::max({largest, std::abs(a.alpha), std::abs(a.beta)});
        }
        const int d = default_coherent_cutoff(largest);
        std::vector<TwoModeState> states;
        for (const auto& [g, h] : amps) states.push_back(coherent_product(g, h, FockCutoff(d, d)));
        const auto rho = mixture(weights, states);
        for (int e = 0; e < 200; ++e) {
            const PhasePoint p = random_point(rng, 2.0);
            const double s = unit(rng);
            const double vals[] = {
                second_order_minor(rho, p, WidthAssignment::uniform(s, 2)).value,
                husimi_criterion(rho, p).value,
                wigner_criterion(rho, p).value,
                detect(rho, p, 2, WidthAssignment::uniform(s, 6)).min_eigenvalue,
            };
            for (double v : vals) {
                ++evaluations;
                worst = std::min(worst, v);
                if (v < -1e-8) ++violations;
            }
        }
    }
    c.note(std::to_string(evaluations) + " evaluations, " + std::to_string(violations) + " below -1e-8, min " +
           num(worst));
    c.expect(violations == 0, "separable state flagged");
    return c.outcome();
}

Outcome ppt_implication() {
    Checker c;
    int detected = 0;
    int counterexamples = 0;
    for (int d : {2, 3}) {
        const auto states = random_haar_pure({d, static_cast<std::uint64_t>(1000 + d), 200}, FockCutoff(d, d));
        std::mt19937_64 rng(77 + d);
        for (const auto& s : states) {
            const double ppt = ppt_min_eig(s).min_eigenvalue;
            for (int k = 0; k < 20; ++k) {
                const auto r = detect(s, random_point(rng, 1.5), 2, WidthAssignment::uniform(1.0, 6));
                if (r.verdict != Verdict::Entangled) continue;
                ++detected;
                if (!(ppt < -1e-8)) ++counterexamples;
            }
        }
    }
    c.note(std::to_string(detected) + " entangled verdicts, " + std::to_string(counterexamples) + " not PPT-confirmed");
    c.expect(counterexamples == 0, "detect verdict without PPT violation");
    c.expect(detected > 0, "no verdicts issued");
    return c.outcome();
}

Outcome compression_identity() {
    Checker c;
    std::mt19937_64 rng(4242);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int d = 2 + k % 3;
        const auto s = random_haar_state(d, 31337, k, FockCutoff(d, d)).embedded(FockCutoff(6, 6));
        for (int j = 0; j < 5; ++j) worst = std::max(worst, ppt_compression_check(s, random_point(rng, 1.5), 2));
    }
    c.note("max residual " + num(worst));
    c.expect(worst < 1e-10, "residual");
    return c.outcome();
}

struct GridStats {
    double min_value = 0.0;
    PhasePoint argmin;
    std::size_t negative = 0;
    std::size_t components = 0;
    std::size_t smallest_component = 0;
};

GridStats analyse_grid(const TwoModeState& s, int steps) {
    const auto res =
        grid_scan(s, ScanRegion::real_plane({-3, 3, steps}, {-3, 3, steps}), WidthParam(1), {CriterionKind::Husimi});
    GridStats g;
    g.min_value = res.minimum().value;
    g.argmin = res.minimum().point;
    const auto n = static_cast<std::size_t>(steps);
    std::vector<int> label(n * n, -1);
    std::vector<bool> neg(n * n);
    for (std::size_t i = 0; i < n * n; ++i) neg[i] = res.rows[i].value < -kDefaultDetectTol;
    g.smallest_component = n * n;
    for (std::size_t start = 0; start < n * n; ++start) {
        if (!neg[start] || label[start] >= 0) continue;
        std::vector<std::size_t> stack{start};
        label[start] = static_cast<int>(g.components);
        std::size_t size = 0;
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            ++size;
            const std::size_t r = cur / n;
            const std::size_t col = cur % n;
            const std::size_t nb[4] = {r > 0 ? cur - n : cur, r + 1 < n ? cur + n : cur, col > 0 ? cur - 1 : cur,
                                       col + 1 < n ? cur + 1 : cur};
            for (std::size_t x : nb) {
                if (neg[x] && label[x] < 0) {
                    label[x] = label[cur];
                    stack.push_back(x);
                }
            }
        }
        g.negative += size;
        g.smallest_component = std::min(g.smallest_component, size);
        ++g.components;
    }
    if (g.components == 0) g.smallest_component = 0;
    return g;
}

// Distance between minimisers modulo (a,b)->(b,a) and (a,b)->(-a,-b).
double symmetric_distance(const PhasePoint& x, const PhasePoint& y) {
    const PhasePoint images[] = {y, {y.beta, y.alpha}, {-y.alpha, -y.beta}, {-y.beta, -y.alpha}};
    double best = INFINITY;
    for (const auto& z : images) best = std::min(best, std::max(std::abs(x.alpha - z.alpha), std::abs(x.beta - z.beta)));
    return best;
}

Outcome noon_landscape() {
    Checker c;
    for (int N : {3, 4, 5}) {
        const auto g = analyse_grid(balanced_noon(N, FockCutoff(N + 1, N + 1)), 121);
        c.note("N=" + std::to_string(N) + " min " + num(g.min_value) + ", " + std::to_string(g.negative) +
               " negative cells in " + std::to_string(g.components) + " regions (smallest " +
               std::to_string(g.smallest_component) + ")");
        c.expect(g.negative > 0, "empty negative region N=" + std::to_string(N));
        c.expect(g.smallest_component >= 4, "speckled negative region N=" + std::to_string(N));
        if (N == 3) {
            const auto fine = analyse_grid(balanced_noon(3, FockCutoff(4, 4)), 241);
            const double dv = std::abs(fine.min_value - g.min_value);
            const double dp = symmetric_distance(g.argmin, fine.argmin);
            c.note("N=3 refinement 121->241: |dmin| " + num(dv) + ", |dargmin| " + num(dp));
            c.expect(dv <= 1e-4 && dp <= 1e-4, "N=3 minimum unstable under refinement");
        }
    }
    return c.outcome();
}

Outcome width_ordering() {
    Checker c;
    std::vector<WidthParam> sigmas;
    for (int k = 1; k <= 10; ++k) sigmas.emplace_back(0.1 * k);
    double previous = -1.0;
    std::string thresholds;
    for (int N : {2, 3, 4}) {
        const auto s = balanced_noon(N, FockCutoff(N + 1, N + 1));
        const auto opt = husimi_optimum(s, static_cast<std::uint64_t>(N));
        const auto sweep = sigma_sweep(s, opt.point, sigmas);
        const auto it = std::min_element(sweep.rows.begin(), sweep.rows.end(),
                                         [](const ScanRow& a, const ScanRow& b) { return a.value < b.value; });
        const double t = detection_threshold(sweep);
        thresholds += (thresholds.empty() ? "" : ", ") + std::string("N=") + std::to_string(N) + " " + num(t);
        c.expect(it->sigma == sweep.rows.back().sigma, "minimum not at sigma=1 for N=" + std::to_string(N));
        c.expect(t > 0.0, "no detection for N=" + std::to_string(N));
        c.expect(t >= previous, "threshold decreased at N=" + std::to_string(N));
        previous = t;
    }
    c.note("thresholds " + thresholds);
    return c.outcome();
}

Outcome loss_trend() {
    Checker c;
    for (int N : {2, 3}) {
        const FockCutoff cut(N + 1, N + 1);
        const PhasePoint p0 = husimi_optimum(lossy_noon(N, 1.0, cut), static_cast<std::uint64_t>(N)).point;
        double prev_fixed = -INFINITY;
        double prev_refined = -INFINITY;
        std::string values;
        for (int k = 0; k <= 6; ++k) {
            const double tau = 1.0 - 0.05 * k;
            const auto s = lossy_noon(N, tau, cut);
            const double fixed = husimi_criterion(s, p0).value;
            const double refined = refine_minimum(s, p0, WidthParam(1), {CriterionKind::M2}).value;
            values += (values.empty() ? "" : " ") + num(fixed);
            if (N == 2) c.expect(fixed < 0.0, "N=2 not detected at tau=" + num(tau));
            c.expect(fixed >= prev_fixed - 1e-8, "fixed-point value fell at N=" + std::to_string(N) + " tau=" + num(tau));
            c.expect(refined >= prev_refined - 1e-8,
                     "refined value fell at N=" + std::to_string(N) + " tau=" + num(tau));
            prev_fixed = fixed;
            prev_refined = refined;
        }
        c.note("N=" + std::to_string(N) + " tau 1.0..0.7: " + values);
    }
    return c.outcome();
}

Outcome cat_states() {
    Checker c;
    std::string amps;
    for (double g : {0.5, 1.0, 2.0, 3.0}) {
        const int d = g == 3.0 ? 40 : default_coherent_cutoff(g);
        const auto s = cat_state({Complex(g, 0), Complex(g, 0), 0.0}, FockCutoff(d, d));
        const double v = husimi_criterion(s, {Complex(0, g), Complex(0, g)}).value;
        amps += (amps.empty() ? "" : ", ") + std::string("g=") + num(g) + " " + num(v);
        c.expect(v < 0.0, "odd cat not detected at gamma=" + num(g));
    }
    c.note("odd cat " + amps);
    const int d = default_coherent_cutoff(1.0);
    const FockCutoff cut(d, d);
    const PhasePoint anchor{Complex(0, 1), Complex(0, 1)};
    std::string deph;
    for (double p : {0.0, 0.25, 0.5, 0.75, 0.9}) {
        const double v = husimi_criterion(cat_state({Complex(1, 0), Complex(1, 0), p}, cut), anchor).value;
        deph += (deph.empty() ? "" : ", ") + std::string("p=") + num(p) + " " + num(v);
        c.expect(v < 0.0, "dephased cat not detected at p=" + num(p));
    }
    const auto sep = cat_state({Complex(1, 0), Complex(1, 0), 1.0}, cut);
    const double at_anchor = husimi_criterion(sep, anchor).value;
    std::mt19937_64 rng(99);
    double lowest = INFINITY;
    for (int k = 0; k < 1000; ++k) lowest = std::min(lowest, husimi_criterion(sep, random_point(rng, 2.5)).value);
    c.note("dephasing " + deph + "; p=1 anchor " + num(at_anchor) + ", min over 1000 points " + num(lowest));
    c.expect(std::abs(at_anchor) <= 1e-8, "p=1 anchor value");
    c.expect(lowest >= -1e-8, "p=1 negative somewhere");
    return c.outcome();
}

Outcome detection_rates() {
    Checker c;
    const auto table = detection_rate({2, 2026, 500},
                                      {PhasePoint{}, PhasePoint::real(1, 1), PhasePoint::real(2, 2)}, {WidthParam(1)});
    const double origin = table.rows[0].rate();
    const double one = table.rows[1].rate();
    const double two = table.rows[2].rate();
    c.note("rate origin " + num(origin) + ", alpha=beta=1 " + num(one) + ", alpha=beta=2 " + num(two) + ", ppt " +
           num(table.ppt_rate()));
    c.expect(two >= 0.40 && two <= 0.60, "rate at alpha=beta=2 outside [0.40, 0.60]");
    c.expect(origin <= 0.02, "rate at origin above 0.02");
    c.expect(two >= one - 0.05, "rate(2) < rate(1) - 0.05");
    return c.outcome();
}

Outcome measurement_equivalence() {
    Checker c;
    std::mt19937_64 rng(555);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int d = 2 + k % 3;
        const auto s = random_haar_state(d, 8080, k, FockCutoff(d, d));
        for (int j = 0; j < 5; ++j) {
            const PhasePoint p = random_point(rng, 1.0);
            for (double sigma : {0.5, 1.0}) {
                const auto w = WidthAssignment::uniform(sigma, 2);
                const double exact = second_order_minor(s, p, w).value;
                const double est = estimate_second_order_minor(s, p, EntryWidths::from_assignment(w), 0, 0).value;
                worst = std::max(worst, std::abs(exact - est));
            }
        }
    }
    c.expect(worst < 1e-9, "exact-mode mismatch");

    const auto bell = balanced_noon(1, FockCutoff(2, 2));
    const auto big = estimate_second_order_minor(bell, {}, EntryWidths{}, 1'000'000, 1);
    const double z = std::abs(big.value + 0.25) / big.std_error;
    c.expect(z <= 5.0, "Bell estimate beyond 5 standard errors");

    int covered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto e = estimate_second_order_minor(bell, {}, EntryWidths{}, 100'000, 1000 + 10 * seed);
        if (std::abs(e.value + 0.25) <= 2.0 * e.std_error) ++covered;
    }
    c.expect(covered >= 90, "2-sigma coverage below 90%");
    c.note("exact max diff " + num(worst) + "; 1e6 shots " + num(big.value) + " +- " + num(big.std_error) + " (z " +
           num(z) + "); coverage " + std::to_string(covered) + "/100");
    return c.outcome();
}

Outcome derivative_identities() {
    Checker c;
    struct Case {
        TwoModeState state;
        PhasePoint point;
        double sigma;
    };
    std::vector<Case> cases;
    cases.push_back({TwoModeState::vacuum(FockCutoff(3, 3)), {}, 1.0});
    cases.push_back({balanced_noon(2, FockCutoff(3, 3)), PhasePoint::real(0.5, 0.5), 0.7});
    cases.push_back({balanced_noon(1, FockCutoff(2, 2)), {Complex(0.2, 0.3), Complex(-0.1, 0.4)}, 0.5});
    cases.push_back({balanced_noon(3, FockCutoff(4, 4)), PhasePoint::real(-1.0, 1.0), 1.0});
    cases.push_back({coherent_product(Complex(0.5, 0.2), Complex(-0.3, 0.1), FockCutoff(16, 16)),
                     {Complex(0.1, 0.1), Complex(0.2, -0.2)}, 0.8});
    cases.push_back({cat_state({Complex(1, 0), Complex(1, 0), 0.0}, FockCutoff(20, 20)), {Complex(0, 1), Complex(0, 1)},
                     0.6});
    cases.push_back({thermal_product(0.3, 0.5, FockCutoff(25, 25)), PhasePoint::real(0.4, -0.3), 0.9});
    for (int k = 0; k < 3; ++k) {
        cases.push_back({random_haar_state(3, 404, k, FockCutoff(3, 3)),
                         {Complex(0.3 * k, -0.2), Complex(0.1, 0.25 * k)}, 0.4 + 0.2 * k});
    }
    double worst = 0.0;
    double worst_ratio = INFINITY;
    for (const auto& cs : cases) {
        const auto fine = validate_derivative_identities(cs.state, cs.point, WidthParam(cs.sigma), 1e-3);
        const auto coarse = validate_derivative_identities(cs.state, cs.point, WidthParam(cs.sigma), 1e-2);
        const double rf = std::max(fine.residual_mixed, fine.residual_width);
        const double rc = std::max(coarse.residual_mixed, coarse.residual_width);
        worst = std::max(worst, rf);
        // Already at roundoff level there is nothing left to converge.
        if (rc > 1e-9) worst_ratio = std::min(worst_ratio, rc / std::max(rf, 1e-300));
    }
    c.note(std::to_string(cases.size()) + " cases, max residual " + num(worst) + ", min convergence ratio " +
           num(worst_ratio));
    c.expect(worst < 1e-5, "residual at step 1e-3");
    c.expect(worst_ratio >= 20.0, "convergence ratio");
    return c.outcome();
}

Outcome analytic_husimi() {
    Checker c;
    double worst = 0.0;
    for (int N = 1; N <= 5; ++N) {
        const auto s = balanced_noon(N, FockCutoff(N + 15, N + 15));
        for (double x : {-1.0, 0.0, 1.0}) {
            for (double y : {-0.5, 0.0, 0.5}) {
                const PhasePoint p{Complex(x, y), Complex(y, -x)};
                const double v = phase_space_value(s, p, WidthParam(1), WidthParam(1)).value;
                worst = std::max(worst, std::abs(v - analytic_husimi_noon(p, N)));
            }
        }
    }
    c.note("max deviation " + num(worst));
    c.expect(worst <= 1e-9, "deviation");
    return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Bell-state anchor", bell_anchor},
        {"separability soundness", separability_soundness},
        {"PPT implication", ppt_implication},
        {"compression identity", compression_identity},
        {"NOON negative regions and grid stability", noon_landscape},
        {"width ordering and thresholds", width_ordering},
        {"loss never helps", loss_trend},
        {"cat states and dephasing", cat_states},
        {"random-state detection rates", detection_rates},
        {"measurement-scheme equivalence", measurement_equivalence},
        {"derivative identities", derivative_identities},
        {"analytic Husimi", analytic_husimi},
    };
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
        return 2;
    }
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2zu %s: %s  [%.1fs] %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
