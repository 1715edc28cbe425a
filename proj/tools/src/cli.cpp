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
#include "cvwitness_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cvwitness/errors.hpp"
#include "cvwitness/io.hpp"
#include "cvwitness/measurement.hpp"
#include "cvwitness/phase_space.hpp"
#include "cvwitness/ppt.hpp"
#include "cvwitness/scan.hpp"
#include "cvwitness/states.hpp"
#include "json.hpp"

namespace cvw::cli {

namespace {

using Json = nlohmann::ordered_json;

// Raw option values as typed on the command line; converted after config merging.
struct Options {
    std::string state = "noon";
    std::string state_file;
    std::string N = "1";
    std::string tau = "1";
    std::string gamma = "1";
    std::string delta;
    std::string p = "0";
    std::string theta;
    std::string d = "2";
    std::string count = "500";
    std::string index = "0";
    std::vector<std::string> points;
    std::vector<std::string> sigmas;
    std::string criterion = "m2";
    std::string order = "2";
    std::string shots = "0";
    std::string out;
    std::string format;
    std::string seed = "0";
    std::string cutoff;
    std::string threads = "1";
    std::string config;
    std::string dump_config;
    std::string detect_tol = "1e-9";
    std::string ppt_tol = "1e-9";
    std::string step = "1e-3";
    bool allow_truncation = false;
    // scan
    std::string slice = "real";
    std::vector<std::string> ranges;
    std::string phase = "0";
    std::string budget = "2000000";
    bool refine = false;
    // simulate
    std::string efficiency = "1";
    bool bootstrap = false;
    std::string replicates = "200";
    std::string histograms;
    // ppt
    bool confirm = false;
};

double to_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("--" + what + ": '" + text + "' is not a finite number");
    }
}

long long to_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("--" + what + ": '" + text + "' is not an integer");
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ss(text);
    while (std::getline(ss, cur, sep)) parts.push_back(cur);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

std::vector<double> to_doubles(const std::string& text, const std::string& what) {
    std::vector<double> v;
    for (const auto& part : split(text, ',')) v.push_back(to_double(part, what));
    return v;
}

Complex to_complex(const std::string& text, const std::string& what) {
    const auto v = to_doubles(text, what);
    if (v.size() == 1) return {v[0], 0.0};
    if (v.size() == 2) return {v[0], v[1]};
    throw InvalidArgument("--" + what + " expects re or re,im");
}

PhasePoint to_point(const std::string& text) {
    const auto v = to_doubles(text, "point");
    if (v.size() != 4) throw InvalidArgument("--point expects re_a,im_a,re_b,im_b");
    return {Complex(v[0], v[1]), Complex(v[2], v[3])};
}

std::string complex_text(Complex z) { return format_double(z.real()) + "," + format_double(z.imag()); }

struct LoadedState {
    TwoModeState state;
    std::string descriptor;
};

std::optional<FockCutoff> parse_cutoff(const Options& o) {
    if (o.cutoff.empty()) return std::nullopt;
    const auto parts = split(o.cutoff, ',');
    if (parts.size() == 1) {
        const int c = static_cast<int>(to_int(parts[0], "cutoff"));
        return FockCutoff(c, c);
    }
    if (parts.size() == 2) {
        return FockCutoff(static_cast<int>(to_int(parts[0], "cutoff")), static_cast<int>(to_int(parts[1], "cutoff")));
    }
    throw InvalidArgument("--cutoff expects d or d_a,d_b");
}

LoadedState load_state(const Options& o) {
    const auto cutoff = parse_cutoff(o);
    if (!o.state_file.empty()) {
        TwoModeState s = state_from_json(read_file(o.state_file));
        return {s, "file:" + o.state_file};
    }
    std::optional<TwoModeState> st;
    std::string desc;
    if (o.state == "noon" || o.state == "lossy-noon") {
        const int n = static_cast<int>(to_int(o.N, "N"));
        if (n < 1) throw InvalidArgument("--N must be >= 1");
        const FockCutoff c = cutoff.value_or(FockCutoff(n + 1, n + 1));
        if (o.state == "noon") {
            NoonParams params;
            params.N = n;
            st = noon_state(params, c);
            desc = "noon(N=" + o.N + ")";
        } else {
            const double tau = to_double(o.tau, "tau");
            st = lossy_noon(n, tau, c);
            desc = "lossy-noon(N=" + o.N + ",tau=" + format_double(tau) + ")";
        }
    } else if (o.state == "cat" || o.state == "coherent") {
        const Complex g = to_complex(o.gamma, "gamma");
        const Complex dl = o.delta.empty() ? g : to_complex(o.delta, "delta");
        const int def = default_coherent_cutoff(std::max(std::abs(g), std::abs(dl)));
        const FockCutoff c = cutoff.value_or(FockCutoff(def, def));
        if (o.state == "cat") {
            CatParams params;
            params.gamma = g;
            params.delta = dl;
            params.p = to_double(o.p, "p");
            if (!o.theta.empty()) params.theta = to_double(o.theta, "theta");
            st = cat_state(params, c);
            desc = "cat(gamma=" + complex_text(g) + ",delta=" + complex_text(dl) + ",p=" + format_double(params.p) +
                   ",theta=" + format_double(params.theta) + ")";
        } else {
            st = coherent_product(g, dl, c);
            desc = "coherent(gamma=" + complex_text(g) + ",delta=" + complex_text(dl) + ")";
        }
    } else if (o.state == "random") {
        const int d = static_cast<int>(to_int(o.d, "d"));
        const auto seed = static_cast<std::uint64_t>(to_int(o.seed, "seed"));
        const int k = static_cast<int>(to_int(o.index, "index"));
        st = random_haar_state(d, seed, k, cutoff.value_or(FockCutoff(d, d)));
        desc = "random(d=" + o.d + ",seed=" + o.seed + ",index=" + o.index + ")";
    } else {
        throw InvalidArgument("unknown --state '" + o.state + "' (expected noon, lossy-noon, cat, coherent or random)");
    }
    const auto& flags = st->flags();
    if (!o.allow_truncation && std::find(flags.begin(), flags.end(), flag::kTruncationRisk) != flags.end()) {
        throw TruncationRisk("state amplitude too large for the cutoff " + std::to_string(st->cutoff().dim_a) + "x" +
                             std::to_string(st->cutoff().dim_b) + "; raise --cutoff or pass --allow-truncation");
    }
    return {*st, desc};
}

Provenance provenance(const Options& o, const LoadedState& s) {
    Provenance p;
    p.state = s.descriptor;
    p.dim_a = s.state.cutoff().dim_a;
    p.dim_b = s.state.cutoff().dim_b;
    p.seed = static_cast<std::uint64_t>(to_int(o.seed, "seed"));
    return p;
}

std::vector<double> sigma_list(const Options& o, std::vector<double> fallback) {
    std::vector<double> v;
    for (const auto& s : o.sigmas) {
        for (double x : to_doubles(s, "sigma")) v.push_back(x);
    }
    return v.empty() ? fallback : v;
}

PhasePoint single_point(const Options& o) {
    if (o.points.empty()) return {};
    if (o.points.size() > 1) throw InvalidArgument("this subcommand takes a single --point");
    return to_point(o.points.front());
}

double detect_tol(const Options& o) {
    const double t = to_double(o.detect_tol, "detect-tol");
    if (!(t > 0.0)) throw InvalidArgument("--detect-tol must be positive");
    return t;
}

std::string format_for(const Options& o, const std::string& fallback) {
    const std::string f = o.format.empty() ? fallback : o.format;
    if (f != "csv" && f != "json") throw InvalidArgument("--format must be csv or json");
    return f;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out.empty()) {
        out << text;
    } else {
        atomic_write(o.out, text);
    }
}

Json provenance_json(const Provenance& p) {
    return {{"state", p.state},
            {"cutoff", Json::array({p.dim_a, p.dim_b})},
            {"seed", p.seed},
            {"version", version()}};
}

Json point_json(const PhasePoint& p) {
    return {{"alpha", Json::array({p.alpha.real(), p.alpha.imag()})},
            {"beta", Json::array({p.beta.real(), p.beta.imag()})}};
}

// --- subcommands -------------------------------------------------------------

int run_witness(const Options& o, std::ostream& out) {
    const LoadedState s = load_state(o);
    const PhasePoint point = single_point(o);
    const Criterion crit = Criterion::parse(o.criterion, static_cast<int>(to_int(o.order, "order")));
    const double tol = detect_tol(o);
    WitnessReport report;
    report.point = point;
    if (crit.kind == CriterionKind::MinEig) {
        const auto sig = sigma_list(o, {1.0});
        const auto rows = multi_indices(crit.order).size();
        const WidthAssignment w = sig.size() == 2
                                      ? WidthAssignment(std::vector<double>(rows, sig[0]), std::vector<double>(rows, sig[1]))
                                      : WidthAssignment::uniform(sig.at(0), rows);
        report = detect(s.state, point, crit.order, w, tol);
    } else {
        SecondOrderMinor m;
        std::optional<WidthAssignment> widths;
        if (crit.kind == CriterionKind::Husimi) {
            m = husimi_criterion(s.state, point);
            widths = WidthAssignment::uniform(1.0, 2);
        } else if (crit.kind == CriterionKind::Wigner) {
            m = wigner_criterion(s.state, point);
            widths = WidthAssignment::second_order(0.0, 0.0, 2.0, 2.0);
        } else {
            const auto sig = sigma_list(o, {1.0});
            if (sig.size() > 2) throw InvalidArgument("--sigma takes one width or one per mode");
            const double sa = WidthParam(sig[0]).value();
            const double sb = WidthParam(sig.size() == 2 ? sig[1] : sig[0]).value();
            widths = WidthAssignment::second_order(sa, sb, sa, sb);
            m = second_order_minor(s.state, point, *widths);
        }
        report.value = m.value;
        // Smallest eigenvalue of [[e11, e12], [e12*, e22]].
        const double mean = 0.5 * (m.e11 + m.e22);
        const double half = 0.5 * (m.e11 - m.e22);
        report.min_eigenvalue = mean - std::sqrt(half * half + std::norm(m.e12));
        report.worst_minor = {{MultiIndex{0, 0}, MultiIndex{1, 1}}, m.value};
        report.widths = widths;
        report.flags = m.flags;
        const bool allowed = crit.kind == CriterionKind::Wigner || widths->verdict_range();
        if (!allowed) {
            report.verdict = Verdict::Withheld;
            report.flags.emplace_back(flag::kVerdictWithheld);
        } else {
            report.verdict = m.value < -tol ? Verdict::Entangled : Verdict::NotDetected;
        }
    }
    emit(o, report_to_json(report, provenance(o, s)), out);
    return kExitOk;
}

ScanRegion region_from(const Options& o) {
    const Slice slice = parse_slice(o.slice);
    const std::size_t axes = slice == Slice::RealPlane ? 2 : slice == Slice::DiagonalLine ? 1 : 4;
    std::vector<AxisRange> ranges;
    const std::vector<std::string> specs = o.ranges.empty() ? std::vector<std::string>{"-3:3:61"} : o.ranges;
    for (const auto& spec : specs) {
        const auto parts = split(spec, ':');
        if (parts.size() != 3) throw InvalidArgument("--range expects min:max:steps");
        ranges.push_back({to_double(parts[0], "range"), to_double(parts[1], "range"),
                          static_cast<int>(to_int(parts[2], "range"))});
    }
    if (ranges.size() == 1) ranges.resize(axes, ranges.front());
    if (ranges.size() != axes) {
        throw InvalidArgument("--range given " + std::to_string(ranges.size()) + " times; slice needs 1 or " +
                              std::to_string(axes));
    }
    ScanRegion region;
    region.slice = slice;
    region.axes = ranges;
    region.phase = to_double(o.phase, "phase");
    const long long budget = to_int(o.budget, "budget");
    if (budget < 1) throw InvalidArgument("--budget must be positive");
    region.budget = static_cast<std::size_t>(budget);
    return region;
}

int threads_of(const Options& o) {
    const long long t = to_int(o.threads, "threads");
    if (t < 1) throw InvalidArgument("--threads must be >= 1");
    return static_cast<int>(t);
}

int run_scan(const Options& o, std::ostream& out) {
    const LoadedState s = load_state(o);
    const ScanRegion region = region_from(o);
    const Criterion crit = Criterion::parse(o.criterion, static_cast<int>(to_int(o.order, "order")));
    const auto sig = sigma_list(o, {1.0});
    if (sig.size() != 1) throw InvalidArgument("scan takes a single --sigma");
    ScanResult result = grid_scan(s.state, region, WidthParam(sig[0]), crit, threads_of(o));
    result.provenance = provenance(o, s);
    if (format_for(o, "csv") == "csv") {
        emit(o, scan_to_csv(result), out);
        return kExitOk;
    }
    Json j = Json::parse(scan_to_json(result));
    j["region"] = {{"slice", slice_name(region.slice)}, {"phase", region.phase}};
    j["criterion"] = crit.name();
    if (o.refine) {
        RefineOptions ro;
        ro.real_plane = region.slice == Slice::RealPlane;
        const RefineResult r = refine_minimum(s.state, result.minimum().point, WidthParam(sig[0]), crit, ro);
        Json rj = point_json(r.point);
        rj["value"] = r.value;
        rj["iterations"] = r.iterations;
        rj["converged"] = r.converged;
        rj["flags"] = r.flags;
        j["refined"] = rj;
    }
    emit(o, j.dump(2) + "\n", out);
    return kExitOk;
}

int run_sweep(const Options& o, std::ostream& out) {
    const LoadedState s = load_state(o);
    const PhasePoint point = single_point(o);
    const Criterion crit = Criterion::parse(o.criterion, static_cast<int>(to_int(o.order, "order")));
    std::vector<double> fallback;
    for (int k = 1; k <= 10; ++k) fallback.push_back(k / 10.0);
    std::vector<WidthParam> widths;
    for (double x : sigma_list(o, fallback)) widths.emplace_back(x);
    ScanResult result = sigma_sweep(s.state, point, widths, crit);
    result.provenance = provenance(o, s);
    if (format_for(o, "csv") == "csv") {
        emit(o, scan_to_csv(result), out);
        return kExitOk;
    }
    Json j = Json::parse(scan_to_json(result));
    j["criterion"] = crit.name();
    j["threshold"] = detection_threshold(result, detect_tol(o));
    emit(o, j.dump(2) + "\n", out);
    return kExitOk;
}

int run_rate(const Options& o, std::ostream& out) {
    RandomStateSpec spec;
    spec.d = static_cast<int>(to_int(o.d, "d"));
    spec.count = static_cast<int>(to_int(o.count, "count"));
    spec.seed = static_cast<std::uint64_t>(to_int(o.seed, "seed"));
    std::vector<PhasePoint> points;
    for (const auto& p : o.points) points.push_back(to_point(p));
    if (points.empty()) {
        for (double r : {0.0, 1.0, 2.0}) points.push_back({Complex(r, 0.0), Complex(r, 0.0)});
    }
    std::vector<WidthParam> widths;
    for (double x : sigma_list(o, {1.0})) widths.emplace_back(x);
    RateTable table = detection_rate(spec, points, widths, detect_tol(o), threads_of(o));
    table.provenance.state = "random(d=" + o.d + ",count=" + o.count + ")";
    if (format_for(o, "csv") == "csv") {
        emit(o, rate_to_csv(table), out);
    } else {
        emit(o, rate_to_json(table), out);
    }
    return kExitOk;
}

int run_ppt(const Options& o, std::ostream& out) {
    const LoadedState s = load_state(o);
    const double tol = to_double(o.ppt_tol, "ppt-tol");
    if (!(tol > 0.0)) throw InvalidArgument("--ppt-tol must be positive");
    PptVerdict v;
    if (o.confirm && o.state_file.empty()) {
        Options copy = o;
        v = ppt_min_eig(
            [&copy](FockCutoff c) {
                copy.cutoff = std::to_string(c.dim_a) + "," + std::to_string(c.dim_b);
                return load_state(copy).state;
            },
            s.state.cutoff(), tol);
    } else {
        v = ppt_min_eig(s.state, tol);
    }
    emit(o, ppt_to_json(v, provenance(o, s)), out);
    return kExitOk;
}

int run_simulate(const Options& o, std::ostream& out) {
    const LoadedState s = load_state(o);
    const PhasePoint point = single_point(o);
    const auto sig = sigma_list(o, {1.0});
    if (sig.size() != 1) throw InvalidArgument("simulate takes a single --sigma");
    const double w = WidthParam(sig[0]).value();
    const EntryWidths widths = EntryWidths::from_assignment(WidthAssignment::uniform(w, 2));
    const long long shots = to_int(o.shots, "shots");
    if (shots < 0) throw InvalidArgument("--shots must be >= 0");
    const auto seed = static_cast<std::uint64_t>(to_int(o.seed, "seed"));
    const double eff = to_double(o.efficiency, "efficiency");
    EstimatorOptions eo;
    eo.bootstrap = o.bootstrap;
    eo.replicates = static_cast<int>(to_int(o.replicates, "replicates"));
    eo.bootstrap_seed = seed ^ 0x9e3779b97f4a7c15ULL;
    const HistogramSet set = simulate_settings(s.state, point, static_cast<std::uint64_t>(shots), seed, eff);
    const M2Estimate est = estimate_second_order_minor(set, widths, eo);
    if (!o.histograms.empty()) {
        Json h = Json::array();
        for (const auto* slot : {&set.none, &set.balanced_0, &set.balanced_90, &set.transmit, &set.reflect}) {
            h.push_back(Json::parse(histogram_to_json(**slot)));
        }
        atomic_write(o.histograms, h.dump() + "\n");
    }
    Json j = Json::parse(estimate_to_json(est, provenance(o, s)));
    j["point"] = point_json(point);
    j["sigma"] = w;
    j["shots_per_setting"] = shots;
    j["efficiency"] = eff;
    j["exact"] = second_order_minor(s.state, point, WidthAssignment::uniform(w, 2)).value;
    emit(o, j.dump(2) + "\n", out);
    return kExitOk;
}

int run_hierarchy(const Options& o, std::ostream& out) {
    const LoadedState s = load_state(o);
    const PhasePoint point = single_point(o);
    const int order = static_cast<int>(to_int(o.order, "order"));
    if (order < 1) throw InvalidArgument("--order must be >= 1");
    const auto sig = sigma_list(o, {1.0});
    const auto rows = multi_indices(order).size();
    WidthAssignment w = WidthAssignment::uniform(sig.at(0), rows);
    if (sig.size() == 2) {
        w = WidthAssignment(std::vector<double>(rows, sig[0]), std::vector<double>(rows, sig[1]));
    } else if (sig.size() != 1) {
        throw InvalidArgument("--sigma takes one width or one per mode");
    }
    const WitnessReport r = detect(s.state, point, order, w, detect_tol(o));
    emit(o, report_to_json(r, provenance(o, s)), out);
    return kExitOk;
}

int run_validate(const Options& o, std::ostream& out) {
    const LoadedState s = load_state(o);
    const PhasePoint point = single_point(o);
    const auto sig = sigma_list(o, {1.0});
    if (sig.size() != 1) throw InvalidArgument("validate takes a single --sigma");
    const double step = to_double(o.step, "step");
    const DerivativeReport r = validate_derivative_identities(s.state, point, WidthParam(sig[0]), step);
    Json j;
    j["residual_mixed"] = r.residual_mixed;
    j["residual_width"] = r.residual_width;
    j["fd_mixed"] = Json::array({r.fd_mixed.real(), r.fd_mixed.imag()});
    j["operator_mixed"] = Json::array({r.operator_mixed.real(), r.operator_mixed.imag()});
    j["width_lhs"] = r.width_lhs;
    j["width_rhs"] = r.width_rhs;
    j["step"] = step;
    j["point"] = point_json(point);
    j["provenance"] = provenance_json(provenance(o, s));
    emit(o, j.dump(2) + "\n", out);
    return kExitOk;
}

// --- parser ------------------------------------------------------------------

struct Command {
    std::string name;
    std::string help;
    std::function<int(const Options&, std::ostream&)> run;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> list = {
        {"witness", "second-order (or mineig) witness at one phase-space point", run_witness},
        {"scan", "criterion on a phase-space grid", run_scan},
        {"sweep", "criterion versus width at a fixed point", run_sweep},
        {"rate", "detection rate over Haar-random pure states", run_rate},
        {"ppt", "partial-transpose minimum eigenvalue", run_ppt},
        {"simulate", "photon-counting estimate of the second-order minor", run_simulate},
        {"hierarchy", "moment-matrix minors and eigenvalue at order K", run_hierarchy},
        {"validate", "finite-difference check of the derivative identities", run_validate},
    };
    return list;
}

void add_common(CLI::App& sub, Options& o) {
    sub.add_option("--state", o.state, "noon | lossy-noon | cat | coherent | random");
    sub.add_option("--state-file", o.state_file, "density matrix in JSON interchange format");
    sub.add_option("--N", o.N, "NOON photon number");
    sub.add_option("--tau", o.tau, "loss transmittivity for lossy-noon");
    sub.add_option("--gamma", o.gamma, "coherent amplitude re[,im]");
    sub.add_option("--delta", o.delta, "second-mode amplitude re[,im] (default: gamma)");
    sub.add_option("--p", o.p, "cat dephasing");
    sub.add_option("--theta", o.theta, "cat relative phase (default pi)");
    sub.add_option("--d", o.d, "random-state dimension per mode");
    sub.add_option("--count", o.count, "number of random states");
    sub.add_option("--index", o.index, "random-state index");
    sub.add_option("--point", o.points, "re_a,im_a,re_b,im_b")->expected(1);
    sub.add_option("--sigma", o.sigmas, "width or comma list")->expected(1);
    sub.add_option("--criterion", o.criterion, "m2 | husimi | wigner | mineig");
    sub.add_option("--order", o.order, "moment-matrix order K");
    sub.add_option("--shots", o.shots, "shots per measurement setting (0 = exact)");
    sub.add_option("--out", o.out, "output path (written atomically)");
    sub.add_option("--format", o.format, "csv | json");
    sub.add_option("--seed", o.seed, "random seed");
    sub.add_option("--cutoff", o.cutoff, "Fock cutoff d or d_a,d_b");
    sub.add_option("--threads", o.threads, "worker threads");
    sub.add_option("--config", o.config, "JSON config; command-line flags take precedence");
    sub.add_option("--dump-config", o.dump_config, "write the effective configuration as JSON");
    sub.add_option("--detect-tol", o.detect_tol, "entanglement threshold");
    sub.add_option("--ppt-tol", o.ppt_tol, "PPT eigenvalue threshold");
    sub.add_option("--step", o.step, "finite-difference step");
    sub.add_flag("--allow-truncation", o.allow_truncation, "proceed when the state exceeds the cutoff guard");
}

void add_specific(CLI::App& sub, Options& o) {
    const std::string& n = sub.get_name();
    if (n == "scan") {
        sub.add_option("--slice", o.slice, "real | diagonal | full");
        sub.add_option("--range", o.ranges, "min:max:steps, once or per axis")->expected(1);
        sub.add_option("--phase", o.phase, "ray phase for the diagonal slice");
        sub.add_option("--budget", o.budget, "maximum grid points");
        sub.add_flag("--refine", o.refine, "refine the grid minimum (json output)");
    } else if (n == "simulate") {
        sub.add_option("--efficiency", o.efficiency, "detector efficiency");
        sub.add_flag("--bootstrap", o.bootstrap, "bootstrap standard error");
        sub.add_option("--replicates", o.replicates, "bootstrap replicates");
        sub.add_option("--histograms", o.histograms, "write simulated histograms as JSON");
    } else if (n == "ppt") {
        sub.add_flag("--confirm", o.confirm, "re-check near-zero eigenvalues at doubled cutoff");
    }
}

// Flags named on the command line, without leading dashes.
std::vector<std::string> named_flags(const std::vector<std::string>& args) {
    std::vector<std::string> names;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0 && a.size() > 2) names.push_back(a.substr(2, a.find('=') - 2));
    }
    return names;
}

std::string config_value(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return format_double(v.get<double>());
    throw InvalidArgument("config values must be strings, numbers, booleans or arrays of those");
}

// Config entries become command-line arguments unless the same flag was given explicitly.
std::vector<std::string> config_args(const std::string& path, const std::vector<std::string>& user) {
    Json cfg;
    try {
        cfg = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw InvalidArgument("config '" + path + "' must be a JSON object");
    const auto given = named_flags(user);
    std::vector<std::string> args;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config" || std::find(given.begin(), given.end(), key) != given.end()) continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& item : value) {
                args.push_back(flag);
                args.push_back(config_value(item));
            }
        } else {
            args.push_back(flag);
            args.push_back(config_value(value));
        }
    }
    return args;
}

std::string find_config(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

std::string effective_config(const CLI::App& sub) {
    Json j;
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_lnames().empty() ? std::string() : opt->get_lnames().front();
        if (name.empty() || name == "help" || name == "config" || name == "dump-config" || opt->count() == 0) {
            continue;
        }
        if (opt->get_expected_min() == 0) {
            j[name] = true;
        } else if (name == "point" || name == "sigma" || name == "range") {
            j[name] = opt->results();
        } else {
            j[name] = opt->results().back();
        }
    }
    return j.dump(2) + "\n";
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Phase-space entanglement witnesses for two-mode states", "cvwitness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(*sub, o);
        add_specific(*sub, o);
        subs[c.name] = sub;
    }

    std::vector<std::string> full = args;
    try {
        const std::string cfg = find_config(args);
        if (!cfg.empty() && !args.empty()) {
            const auto extra = config_args(cfg, args);
            full.insert(full.begin() + 1, extra.begin(), extra.end());
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        std::vector<std::string> reversed(full.rbegin(), full.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << version() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* active = &app;
        for (const auto& [name, sub] : subs) {
            if (sub->parsed()) active = sub;
        }
        err << active->help();
        return kExitUsage;
    }

    for (const auto& c : commands()) {
        CLI::App* sub = subs.at(c.name);
        if (!sub->parsed()) continue;
        try {
            if (!o.dump_config.empty()) atomic_write(o.dump_config, effective_config(*sub));
            return c.run(o, out);
        } catch (const TruncationRisk& e) {
            err << "refused: " << e.what() << "\n";
            return kExitTruncation;
        } catch (const InvalidArgument& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const InvalidCutoff& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const OutOfDomain& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const std::exception& e) {
            err << "failed: " << e.what() << "\n";
            return kExitFailure;
        }
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace cvw::cli
