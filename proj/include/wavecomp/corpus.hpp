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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wavecomp/errors.hpp"
#include "wavecomp/waveform.hpp"

namespace wavecomp {

enum class ReadoutShape { FlatTop, Constant };

/// Synthetic stand-in for a device calibration library.
struct CorpusParams {
    std::size_t qubits = 16;
    std::uint64_t seed = 20230617;
    double sample_rate_hz = kIbmSampleRate;
    double single_qubit_seconds = 30e-9;
    double two_qubit_seconds = 300e-9;
    double readout_seconds = 300e-9;
    int neighbours = 2;  // two-qubit pulses per qubit
    ReadoutShape readout = ReadoutShape::FlatTop;
};

struct WaveformLibrary {
    int format_version = 1;
    double sample_rate_hz = kIbmSampleRate;
    std::vector<Waveform> entries;
    std::optional<std::uint64_t> seed;
};

namespace detail {

// Uniform in [lo, hi) from the top 53 bits; independent of the standard
// library's distribution implementations so corpora are byte-identical everywhere.
class CorpusRng {
public:
    explicit CorpusRng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::mt19937_64 engine_;
};

inline std::string qubit_tag(std::size_t q) {
    std::string digits = std::to_string(q);
    return "q" + std::string(digits.size() < 2 ? 2 - digits.size() : 0, '0') + digits;
}

}  // namespace detail

/// Per qubit: X and SX DRAG pulses, one flat-top cross-resonance pulse per
/// neighbour, and one readout pulse. Entries are ordered by label.
inline WaveformLibrary generate_corpus(const CorpusParams &p) {
    if (p.qubits == 0) throw InvalidParameter("corpus needs at least one qubit");
    if (p.neighbours < 0 || static_cast<std::size_t>(p.neighbours) >= p.qubits) {
        throw InvalidParameter("neighbour count must be below the qubit count");
    }
    detail::CorpusRng rng(p.seed);
    WaveformLibrary lib;
    lib.sample_rate_hz = p.sample_rate_hz;
    lib.seed = p.seed;

    const double rate = p.sample_rate_hz;
    for (std::size_t q = 0; q < p.qubits; ++q) {
        const std::string tag = detail::qubit_tag(q);
        double x_amp = rng.uniform(0.12, 0.24);
        double sigma = p.single_qubit_seconds / 4.0 * rng.uniform(0.9, 1.1);
        double beta = rng.uniform(-2.0, 2.0);
        lib.entries.push_back(gen_drag(x_amp / 2.0, sigma, beta, p.single_qubit_seconds, rate, tag + "_sx"));
        lib.entries.push_back(gen_drag(x_amp, sigma, beta, p.single_qubit_seconds, rate, tag + "_x"));

        for (int k = 1; k <= p.neighbours; ++k) {
            std::size_t partner = (q + static_cast<std::size_t>(k)) % p.qubits;
            double amp = rng.uniform(0.1, 0.5);
            double rise = rng.uniform(16e-9, 24e-9);
            double phase = rng.uniform(-std::numbers::pi, std::numbers::pi);
            double flat = std::max(0.0, p.two_qubit_seconds - 2.0 * rise);
            lib.entries.push_back(
                gen_flat_top(amp, rise, flat, rate, tag + "_cx_" + detail::qubit_tag(partner), phase));
        }

        double ro_amp = rng.uniform(0.1, 0.5);
        double ro_phase = rng.uniform(-std::numbers::pi, std::numbers::pi);
        if (p.readout == ReadoutShape::Constant) {
            lib.entries.push_back(gen_constant(ro_amp, p.readout_seconds, rate, tag + "_measure", ro_phase));
        } else {
            double rise = rng.uniform(16e-9, 24e-9);
            double flat = std::max(0.0, p.readout_seconds - 2.0 * rise);
            lib.entries.push_back(gen_flat_top(ro_amp, rise, flat, rate, tag + "_measure", ro_phase));
        }
    }
    std::stable_sort(lib.entries.begin(), lib.entries.end(),
                     [](const Waveform &a, const Waveform &b) { return a.label < b.label; });
    return lib;
}

}  // namespace wavecomp
