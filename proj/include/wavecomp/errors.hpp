// Copyright 2026 The wavecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavecomp {

/// Bad argument to a generator or model (non-positive duration, rate, ...).
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A value does not fit the fixed-point range it is being forced into.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Mismatched or empty sequence lengths.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A compressed window or file is malformed.
struct CorruptStream : std::runtime_error {
    CorruptStream(const std::string &what, std::size_t window_index)
        : std::runtime_error(what + " (window " + std::to_string(window_index) + ")"),
          window(window_index) {}
    explicit CorruptStream(const std::string &what) : std::runtime_error(what), window(npos) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t window;
};

/// A bank plan needs more memories than the device provides.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// User input that is well-formed but inconsistent (label mismatch, unsupported combination).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File-system failure, always carrying the offending path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wavecomp
