// Copyright 2026 The qaoalab Authors
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

namespace qaoalab {

/// Invalid argument to an operation (infeasible degree, bad length, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Problem size exceeds a configured cap (brute force, statevector, dense eigensolver).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Full-basis object passed where a parity-reduced one is expected, or vice versa.
class BasisMismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Non-finite objective, failed step control, or similar numerical breakdown.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file contents.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qaoalab
