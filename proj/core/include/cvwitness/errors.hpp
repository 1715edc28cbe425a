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

#include <stdexcept>
#include <string>

namespace cvw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Fock cutoff too small for the requested object.
class InvalidCutoff : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Parameter outside the supported domain (e.g. s >= 1).
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// The truncated space cannot represent the requested object.
class TruncationRisk : public Error {
public:
    using Error::Error;
};

/// An estimator was missing one of its required measurement settings.
class IncompleteData : public Error {
public:
    using Error::Error;
};

/// Numerical diagnostics failed (e.g. finite-difference step dominated by roundoff).
class DiagnosticError : public Error {
public:
    using Error::Error;
};

}  // namespace cvw
