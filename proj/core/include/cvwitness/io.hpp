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

#include <string>

#include "cvwitness/fock.hpp"
#include "cvwitness/measurement.hpp"
#include "cvwitness/phase_space.hpp"
#include "cvwitness/ppt.hpp"
#include "cvwitness/scan.hpp"

namespace cvw {

/// Library version string.
const char* version();

/// {"dim_a", "dim_b", "re": [[...]], "im": [[...]]}, row-major density matrix.
std::string state_to_json(const TwoModeState& state);

/// Parses the state format; Hermiticity and trace are checked strictly. Throws InvalidArgument
/// on malformed input.
TwoModeState state_from_json(const std::string& text, const StateCheck& check = {});

/// {value, min_eig, worst_minor: {rows, value}, alpha, beta, sigma, verdict, flags, provenance}.
std::string report_to_json(const WitnessReport& report, const Provenance& provenance);

std::string ppt_to_json(const PptVerdict& verdict, const Provenance& provenance);

/// {"dims": [da, db], "mode": "counts"|"prob", "data": [[i, j, v], ...], "config": {...}};
/// zero entries are omitted.
std::string histogram_to_json(const OutcomeHistogram& histogram);
OutcomeHistogram histogram_from_json(const std::string& text);

std::string estimate_to_json(const M2Estimate& estimate, const Provenance& provenance);

/// Header re_alpha,im_alpha,re_beta,im_beta,sigma,value,verdict and one line per row.
std::string scan_to_csv(const ScanResult& result);
std::string scan_to_json(const ScanResult& result);

/// Header re_alpha,im_alpha,re_beta,im_beta,sigma,detected,count,rate.
std::string rate_to_csv(const RateTable& table);
std::string rate_to_json(const RateTable& table);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

/// Writes to a temporary file in the target directory, then renames it over `path`.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace cvw
