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
#include "cvwitness/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvwitness/errors.hpp"
#include "json.hpp"

#ifndef CVWITNESS_VERSION
#define CVWITNESS_VERSION "0.0.0"
#endif

namespace cvw {

using Json = nlohmann::ordered_json;

namespace {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json provenance_json(const Provenance& p) {
    Json j;
    j["state"] = p.state;
    j["cutoff"] = Json::array({p.dim_a, p.dim_b});
    j["seed"] = p.seed;
    j["version"] = p.version.empty() ? std::string(version()) : p.version;
    return j;
}

Json flags_json(const std::vector<std::string>& flags) { return Json(flags); }

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed JSON: ") + e.what());
    }
}

Json config_json(const MeasurementConfig& c) {
    Json j;
    j["alpha"] = complex_json(c.point.alpha);
    j["beta"] = complex_json(c.point.beta);
    j["mix"] = mix_name(c.mix);
    j["theta"] = c.theta;
    j["efficiency"] = c.efficiency;
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    return j;
}

Complex complex_from(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidArgument("complex numbers are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

void csv_point(std::string& out, const PhasePoint& p, double sigma) {
    out += format_double(p.alpha.real()) + ',' + format_double(p.alpha.imag()) + ',' +
           format_double(p.beta.real()) + ',' + format_double(p.beta.imag()) + ',' + format_double(sigma);
}

}  // namespace

const char* version() { return CVWITNESS_VERSION; }

std::string format_double(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string state_to_json(const TwoModeState& state) {
    const auto& rho = state.rho();
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        Json rr = Json::array();
        Json ri = Json::array();
        for (Eigen::Index k = 0; k < rho.cols(); ++k) {
            rr.push_back(rho(i, k).real());
            ri.push_back(rho(i, k).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    Json j;
    j["dim_a"] = state.cutoff().dim_a;
    j["dim_b"] = state.cutoff().dim_b;
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j.dump();
}

TwoModeState state_from_json(const std::string& text, const StateCheck& check) {
    const Json j = parse(text);
    try {
        const FockCutoff cutoff(j.at("dim_a").get<int>(), j.at("dim_b").get<int>());
        const auto n = static_cast<std::size_t>(cutoff.total());
        const Json& re = j.at("re");
        const Json& im = j.at("im");
        if (re.size() != n || im.size() != n) throw InvalidArgument("state matrix has the wrong number of rows");
        CMatrix rho(cutoff.total(), cutoff.total());
        for (std::size_t r = 0; r < n; ++r) {
            if (re[r].size() != n || im[r].size() != n) {
                throw InvalidArgument("state matrix has the wrong number of columns");
            }
            for (std::size_t c = 0; c < n; ++c) {
                rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {re[r][c].get<double>(),
                                                                                   im[r][c].get<double>()};
            }
        }
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        if (herm > check.trace_tol) {
            throw InvalidArgument("state matrix is not Hermitian (residual " + format_double(herm) + ")");
        }
        return TwoModeState(rho, cutoff, check);
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed state JSON: ") + e.what());
    }
}

std::string report_to_json(const WitnessReport& report, const Provenance& provenance) {
    Json j;
    j["value"] = report.value;
    j["min_eig"] = report.min_eigenvalue;
    Json rows = Json::array();
    for (const auto& r : report.worst_minor.rows) rows.push_back(Json::array({r.n, r.p}));
    j["worst_minor"] = {{"rows", rows}, {"value", report.worst_minor.value}};
    j["alpha"] = complex_json(report.point.alpha);
    j["beta"] = complex_json(report.point.beta);
    if (report.widths) {
        Json a = Json::array();
        Json b = Json::array();
        for (std::size_t i = 0; i < report.widths->rows(); ++i) {
            a.push_back(report.widths->row_a(i));
            b.push_back(report.widths->row_b(i));
        }
        j["sigma"] = {{"a", a}, {"b", b}};
    } else {
        j["sigma"] = nullptr;
    }
    j["verdict"] = verdict_name(report.verdict);
    j["flags"] = flags_json(report.flags);
    j["provenance"] = provenance_json(provenance);
    return j.dump(2) + "\n";
}

std::string ppt_to_json(const PptVerdict& verdict, const Provenance& provenance) {
    Json j;
    j["min_eig"] = verdict.min_eigenvalue;
    j["entangled"] = verdict.entangled;
    j["cutoff"] = Json::array({verdict.cutoff.dim_a, verdict.cutoff.dim_b});
    j["confirmed_at_double_cutoff"] = verdict.confirmed_at_double_cutoff;
    j["provenance"] = provenance_json(provenance);
    return j.dump(2) + "\n";
}

std::string histogram_to_json(const OutcomeHistogram& h) {
    Json data = Json::array();
    for (int i = 0; i < h.dim_a; ++i) {
        for (int k = 0; k < h.dim_b; ++k) {
            const double v = h.at(i, k);
            if (v == 0.0) continue;
            if (h.counts) {
                data.push_back(Json::array({i, k, static_cast<std::uint64_t>(v)}));
            } else {
                data.push_back(Json::array({i, k, v}));
            }
        }
    }
    Json j;
    j["dims"] = Json::array({h.dim_a, h.dim_b});
    j["mode"] = h.counts ? "counts" : "prob";
    j["data"] = std::move(data);
    j["config"] = config_json(h.config);
    return j.dump();
}

OutcomeHistogram histogram_from_json(const std::string& text) {
    const Json j = parse(text);
    try {
        OutcomeHistogram h;
        h.dim_a = j.at("dims").at(0).get<int>();
        h.dim_b = j.at("dims").at(1).get<int>();
        if (h.dim_a < 1 || h.dim_b < 1) throw InvalidArgument("histogram dims must be positive");
        const std::string mode = j.at("mode").get<std::string>();
        if (mode != "counts" && mode != "prob") throw InvalidArgument("histogram mode must be counts or prob");
        h.counts = mode == "counts";
        h.data.assign(static_cast<std::size_t>(h.dim_a * h.dim_b), 0.0);
        for (const auto& e : j.at("data")) {
            const int i = e.at(0).get<int>();
            const int k = e.at(1).get<int>();
            const double v = e.at(2).get<double>();
            if (i < 0 || k < 0 || i >= h.dim_a || k >= h.dim_b) throw InvalidArgument("histogram index out of range");
            if (!(v >= 0.0)) throw InvalidArgument("histogram entries must be non-negative");
            h.at(i, k) += v;
        }
        h.total = h.counts ? h.sum() : 1.0;
        if (j.contains("config")) {
            const Json& c = j.at("config");
            h.config.point = {complex_from(c.at("alpha")), complex_from(c.at("beta"))};
            h.config.mix = parse_mix(c.at("mix").get<std::string>());
            h.config.theta = c.at("theta").get<double>();
            h.config.efficiency = c.at("efficiency").get<double>();
            h.config.shots = c.at("shots").get<std::uint64_t>();
            h.config.seed = c.at("seed").get<std::uint64_t>();
        }
        return h;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed histogram JSON: ") + e.what());
    }
}

std::string estimate_to_json(const M2Estimate& e, const Provenance& provenance) {
    Json j;
    j["value"] = e.value;
    j["std_error"] = e.std_error;
    j["e11"] = e.e11;
    j["e22"] = e.e22;
    j["e12"] = Json::array({e.e12_re, e.e12_im});
    j["configs"] = e.configs_used;
    j["provenance"] = provenance_json(provenance);
    return j.dump(2) + "\n";
}

std::string scan_to_csv(const ScanResult& result) {
    std::string out = "re_alpha,im_alpha,re_beta,im_beta,sigma,value,verdict\n";
    for (const auto& r : result.rows) {
        csv_point(out, r.point, r.sigma);
        out += ',' + format_double(r.value) + ',' + verdict_name(r.verdict) + '\n';
    }
    return out;
}

std::string scan_to_json(const ScanResult& result) {
    Json rows = Json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"alpha", complex_json(r.point.alpha)},
                        {"beta", complex_json(r.point.beta)},
                        {"sigma", r.sigma},
                        {"value", r.value},
                        {"verdict", verdict_name(r.verdict)}});
    }
    Json j;
    j["rows"] = std::move(rows);
    if (!result.rows.empty()) {
        const auto& m = result.minimum();
        j["minimum"] = {{"alpha", complex_json(m.point.alpha)},
                        {"beta", complex_json(m.point.beta)},
                        {"sigma", m.sigma},
                        {"value", m.value}};
    }
    j["flags"] = flags_json(result.flags);
    j["provenance"] = provenance_json(result.provenance);
    return j.dump(2) + "\n";
}

std::string rate_to_csv(const RateTable& table) {
    std::string out = "re_alpha,im_alpha,re_beta,im_beta,sigma,detected,count,rate\n";
    for (const auto& r : table.rows) {
        csv_point(out, r.point, r.sigma);
        out += ',' + std::to_string(r.detected) + ',' + std::to_string(r.count) + ',' + format_double(r.rate()) + '\n';
    }
    return out;
}

std::string rate_to_json(const RateTable& table) {
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"alpha", complex_json(r.point.alpha)},
                        {"beta", complex_json(r.point.beta)},
                        {"sigma", r.sigma},
                        {"detected", r.detected},
                        {"count", r.count},
                        {"rate", r.rate()}});
    }
    Json j;
    j["rows"] = std::move(rows);
    j["ppt_entangled"] = table.ppt_entangled;
    j["ppt_rate"] = table.ppt_rate();
    j["flags"] = flags_json(table.flags);
    j["provenance"] = provenance_json(table.provenance);
    return j.dump(2) + "\n";
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InvalidArgument("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw InvalidArgument("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InvalidArgument("cannot move output into place at '" + path + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace cvw
