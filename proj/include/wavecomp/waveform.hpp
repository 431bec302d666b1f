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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavecomp/errors.hpp"

namespace wavecomp {

/// Sampled I/Q envelope of one gate pulse. Amplitudes are dimensionless and
/// lie in [-1, 1]; both channels have the same length.
struct Waveform {
    std::vector<double> i_samples;
    std::vector<double> q_samples;
    double sample_rate_hz = 0.0;
    std::string label;

    std::size_t size() const { return i_samples.size(); }
    bool operator==(const Waveform &) const = default;
};

/// Fixed-point image of a Waveform: every sample is round(sample * scale).
struct QuantizedWaveform {
    std::vector<std::int32_t> i_samples;
    std::vector<std::int32_t> q_samples;
    int bit_width = 16;
    std::int32_t scale = 1;
    double sample_rate_hz = 0.0;
    std::string label;

    std::size_t size() const { return i_samples.size(); }
    bool operator==(const QuantizedWaveform &) const = default;
};

struct GateLatency {
    std::string name;
    double latency_seconds = 0.0;
};

/// Per-vendor parameters for the per-qubit memory capacity estimate.
struct ControlSystemParams {
    double sampling_rate_sps = 0.0;
    int sample_size_bits = 0;  // I and Q together
    std::vector<GateLatency> single_qubit_gates;
    std::vector<GateLatency> two_qubit_gates;
    double readout_latency_seconds = 0.0;
    double connectivity_degree = 0.0;
};

inline void validate(const Waveform &w) {
    if (w.i_samples.size() != w.q_samples.size()) {
        throw ShapeError("waveform '" + w.label + "': I has " + std::to_string(w.i_samples.size()) +
                         " samples but Q has " + std::to_string(w.q_samples.size()));
    }
    if (w.i_samples.empty()) {
        throw ShapeError("waveform '" + w.label + "' is empty");
    }
    if (!(w.sample_rate_hz > 0.0) || !std::isfinite(w.sample_rate_hz)) {
        throw InvalidParameter("waveform '" + w.label + "': sample rate must be positive");
    }
    for (const auto *channel : {&w.i_samples, &w.q_samples}) {
        for (std::size_t n = 0; n < channel->size(); ++n) {
            double v = (*channel)[n];
            if (!std::isfinite(v) || std::abs(v) > 1.0) {
                throw RangeError("waveform '" + w.label + "': sample " + std::to_string(n) +
                                 " is outside [-1, 1]");
            }
        }
    }
}

namespace detail {

inline std::size_t sample_count(double seconds, double rate, const char *what) {
    if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
        throw InvalidParameter(std::string(what) + " must be a non-negative duration");
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw InvalidParameter("sample rate must be positive");
    }
    return static_cast<std::size_t>(std::llround(seconds * rate));
}

// Scales both channels down together if either exceeds unit magnitude.
inline void normalize_peak(Waveform &w) {
    double peak = 0.0;
    for (double v : w.i_samples) peak = std::max(peak, std::abs(v));
    for (double v : w.q_samples) peak = std::max(peak, std::abs(v));
    if (peak > 1.0) {
        for (double &v : w.i_samples) v /= peak;
        for (double &v : w.q_samples) v /= peak;
    }
}

}  // namespace detail

/// DRAG pulse: lifted Gaussian on I (zero one sample beyond either end, peak
/// `amplitude` at the centre) and beta * dI/dt on Q, with t in sample periods.
/// Sample n sits at offset n - (L-1)/2 from the centre, so I is symmetric and
/// Q antisymmetric.
inline Waveform gen_drag(double amplitude, double sigma_seconds, double beta, double duration_seconds,
                         double sample_rate_hz, std::string label = "drag") {
    if (!(duration_seconds > 0.0)) throw InvalidParameter("DRAG duration must be positive");
    if (!(amplitude >= 0.0 && amplitude <= 1.0)) throw InvalidParameter("DRAG amplitude must lie in [0, 1]");
    if (!(sigma_seconds > 0.0)) throw InvalidParameter("DRAG sigma must be positive");
    std::size_t length = detail::sample_count(duration_seconds, sample_rate_hz, "DRAG duration");
    if (length == 0) throw InvalidParameter("DRAG duration is shorter than one sample");

    double sigma = sigma_seconds * sample_rate_hz;
    double centre = (static_cast<double>(length) - 1.0) / 2.0;
    double edge = (static_cast<double>(length) + 1.0) / 2.0;
    auto gauss = [sigma](double t) { return std::exp(-t * t / (2.0 * sigma * sigma)); };
    double floor_value = gauss(edge);
    double lift = 1.0 - floor_value;

    Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.label = std::move(label);
    w.i_samples.resize(length);
    w.q_samples.resize(length);
    for (std::size_t n = 0; n < length; ++n) {
        double t = static_cast<double>(n) - centre;
        double g = gauss(t);
        w.i_samples[n] = amplitude * (g - floor_value) / lift;
        w.q_samples[n] = amplitude * beta * (-t / (sigma * sigma)) * g / lift;
    }
    detail::normalize_peak(w);
    return w;
}

/// Flat-top pulse: lifted-Gaussian rise over round(rise * rate) samples, a
/// plateau of round(flat * rate) samples at exactly `amplitude`, then the
/// mirrored fall. `phase_radians` splits the envelope between I and Q.
inline Waveform gen_flat_top(double amplitude, double rise_seconds, double flat_seconds, double sample_rate_hz,
                             std::string label = "flat_top", double phase_radians = 0.0) {
    if (!(rise_seconds > 0.0)) throw InvalidParameter("flat-top rise must be positive");
    if (!(amplitude >= 0.0 && amplitude <= 1.0)) throw InvalidParameter("flat-top amplitude must lie in [0, 1]");
    std::size_t rise = detail::sample_count(rise_seconds, sample_rate_hz, "flat-top rise");
    std::size_t flat = detail::sample_count(flat_seconds, sample_rate_hz, "flat-top plateau");
    if (rise == 0) throw InvalidParameter("flat-top rise is shorter than one sample");

    double sigma = static_cast<double>(rise) / 3.0;
    auto gauss = [sigma](double t) { return std::exp(-t * t / (2.0 * sigma * sigma)); };
    double floor_value = gauss(static_cast<double>(rise) + 1.0);
    auto ramp = [&](double t) { return (gauss(t) - floor_value) / (1.0 - floor_value); };

    std::vector<double> envelope;
    envelope.reserve(2 * rise + flat);
    for (std::size_t n = 0; n < rise; ++n) envelope.push_back(ramp(static_cast<double>(rise - n)));
    envelope.insert(envelope.end(), flat, 1.0);
    for (std::size_t n = 0; n < rise; ++n) envelope.push_back(ramp(static_cast<double>(n + 1)));

    Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.label = std::move(label);
    double i_gain = amplitude * std::cos(phase_radians);
    double q_gain = amplitude * std::sin(phase_radians);
    w.i_samples.reserve(envelope.size());
    w.q_samples.reserve(envelope.size());
    for (double e : envelope) {
        w.i_samples.push_back(i_gain * e);
        w.q_samples.push_back(q_gain * e);
    }
    return w;
}

/// Square pulse at a fixed amplitude.
inline Waveform gen_constant(double amplitude, double duration_seconds, double sample_rate_hz,
                             std::string label = "constant", double phase_radians = 0.0) {
    if (!(std::abs(amplitude) <= 1.0)) throw InvalidParameter("constant amplitude must lie in [-1, 1]");
    if (!(duration_seconds > 0.0)) throw InvalidParameter("constant duration must be positive");
    std::size_t length = detail::sample_count(duration_seconds, sample_rate_hz, "constant duration");
    if (length == 0) throw InvalidParameter("constant duration is shorter than one sample");
    Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.label = std::move(label);
    w.i_samples.assign(length, amplitude * std::cos(phase_radians));
    w.q_samples.assign(length, amplitude * std::sin(phase_radians));
    return w;
}

inline std::int32_t max_signed(int bit_width) { return (std::int32_t{1} << (bit_width - 1)) - 1; }
inline std::int32_t min_signed(int bit_width) { return -(std::int32_t{1} << (bit_width - 1)); }

/// Round-half-away-from-zero fixed-point conversion. Throws RangeError naming
/// the first sample whose scaled value does not fit `bit_width` signed bits.
inline QuantizedWaveform quantize(const Waveform &w, int bit_width, std::int32_t scale) {
    if (bit_width != 12 && bit_width != 14 && bit_width != 16) {
        throw InvalidParameter("quantization width must be 12, 14 or 16 bits, got " + std::to_string(bit_width));
    }
    if (scale < 1) throw InvalidParameter("quantization scale must be positive");
    validate(w);

    QuantizedWaveform q;
    q.bit_width = bit_width;
    q.scale = scale;
    q.sample_rate_hz = w.sample_rate_hz;
    q.label = w.label;
    auto convert = [&](std::span<const double> in, std::vector<std::int32_t> &out, const char *channel) {
        out.resize(in.size());
        for (std::size_t n = 0; n < in.size(); ++n) {
            double scaled = std::round(in[n] * static_cast<double>(scale));
            if (scaled > max_signed(bit_width) || scaled < min_signed(bit_width)) {
                throw RangeError(std::string("quantize: ") + channel + " sample " + std::to_string(n) + " of '" +
                                 w.label + "' overflows " + std::to_string(bit_width) + " bits at scale " +
                                 std::to_string(scale));
            }
            out[n] = static_cast<std::int32_t>(scaled);
        }
    };
    convert(w.i_samples, q.i_samples, "I");
    convert(w.q_samples, q.q_samples, "Q");
    return q;
}

inline Waveform dequantize(const QuantizedWaveform &q) {
    Waveform w;
    w.sample_rate_hz = q.sample_rate_hz;
    w.label = q.label;
    double inv = 1.0 / static_cast<double>(q.scale);
    w.i_samples.reserve(q.size());
    w.q_samples.reserve(q.size());
    for (auto v : q.i_samples) w.i_samples.push_back(static_cast<double>(v) * inv);
    for (auto v : q.q_samples) w.q_samples.push_back(static_cast<double>(v) * inv);
    return w;
}

/// Mean squared error over both channels.
inline double mse(const Waveform &a, const Waveform &b) {
    if (a.i_samples.size() != b.i_samples.size() || a.q_samples.size() != b.q_samples.size() ||
        a.i_samples.size() != a.q_samples.size()) {
        throw ShapeError("mse: waveforms '" + a.label + "' and '" + b.label + "' differ in length");
    }
    if (a.i_samples.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t n = 0; n < a.i_samples.size(); ++n) {
        double di = a.i_samples[n] - b.i_samples[n];
        double dq = a.q_samples[n] - b.q_samples[n];
        sum += di * di + dq * dq;
    }
    return sum / (2.0 * static_cast<double>(a.i_samples.size()));
}

/// Waveform memory needed per qubit, in bytes: one waveform per single-qubit
/// gate, `connectivity_degree` waveforms per two-qubit gate type, one readout.
inline double estimate_capacity(const ControlSystemParams &p) {
    double bytes_per_second = p.sampling_rate_sps * static_cast<double>(p.sample_size_bits) / 8.0;
    double single = 0.0;
    for (const auto &g : p.single_qubit_gates) single += g.latency_seconds;
    double pair = 0.0;
    for (const auto &g : p.two_qubit_gates) pair += g.latency_seconds;
    return bytes_per_second * (single + p.connectivity_degree * pair + p.readout_latency_seconds);
}

/// Streaming bandwidth in bytes per second.
inline double estimate_bandwidth(double sampling_rate_sps, int sample_size_bits) {
    if (!(sampling_rate_sps > 0.0) || sample_size_bits <= 0) {
        throw InvalidParameter("bandwidth needs a positive rate and sample size");
    }
    return sampling_rate_sps * static_cast<double>(sample_size_bits) / 8.0;
}

inline constexpr double kIbmSampleRate = 4.54e9;

/// IBM-style heavy-hex device: X and SX at 30 ns, CX at 300 ns, 300 ns readout, two neighbours.
inline ControlSystemParams ibm_params() {
    return ControlSystemParams{
        .sampling_rate_sps = kIbmSampleRate,
        .sample_size_bits = 32,
        .single_qubit_gates = {{"x", 30e-9}, {"sx", 30e-9}},
        .two_qubit_gates = {{"cx", 300e-9}},
        .readout_latency_seconds = 300e-9,
        .connectivity_degree = 2.0,
    };
}

/// Google-style grid device: phased-XZ at 25 ns, fSim and iSWAP at 30 ns, 500 ns readout, four neighbours.
inline ControlSystemParams google_params() {
    return ControlSystemParams{
        .sampling_rate_sps = 1e9,
        .sample_size_bits = 28,
        .single_qubit_gates = {{"phased_xz", 25e-9}},
        .two_qubit_gates = {{"fsim", 30e-9}, {"iswap", 30e-9}},
        .readout_latency_seconds = 500e-9,
        .connectivity_degree = 4.0,
    };
}

}  // namespace wavecomp
