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
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "wavecomp/errors.hpp"
#include "wavecomp/transform.hpp"
#include "wavecomp/waveform.hpp"

namespace wavecomp {

/// Marks the trailing run of zeros in a window. In a 16-bit slot stream the
/// codeword is the single value kSignature; the count is implied by its position.
struct RleCodeword {
    static constexpr std::int16_t kSignature = -32768;
    std::int32_t zero_count = 0;
    bool operator==(const RleCodeword &) const = default;
};

/// Largest legal integer coefficient magnitude; -32768 is reserved for the codeword.
inline constexpr std::int32_t kMaxCoefficient = 32767;

template <class T>
struct CompressedWindow {
    std::vector<T> coefficients;
    std::optional<RleCodeword> rle;

    int occupied_slots() const { return static_cast<int>(coefficients.size()) + (rle ? 1 : 0); }
    bool operator==(const CompressedWindow &) const = default;
};

struct CodecConfig {
    TransformVariant variant;
    double threshold = 0.0;  // in orthonormal coefficient units
    int bit_width = 16;
};

/// One compressed waveform. Integer-variant coefficients are stored as exact
/// integral doubles so that every variant shares one representation.
struct CompressedWaveform {
    std::string label;
    TransformVariant variant;
    int window_size = 0;  // equals original_length for DCT-N
    std::int32_t scale = 1;
    std::size_t original_length = 0;
    int uniform_width = 0;
    double threshold_used = 0.0;
    double sample_rate_hz = 0.0;
    std::vector<CompressedWindow<double>> i_windows;
    std::vector<CompressedWindow<double>> q_windows;

    std::size_t window_count() const { return i_windows.size(); }
    bool operator==(const CompressedWaveform &) const = default;
};

/// Orthonormal-domain value of one stored coefficient step.
template <class T>
double coefficient_unit(const CoefficientWindow<T> &y) {
    if constexpr (std::is_integral_v<T>) {
        return int_coefficient_unit(static_cast<int>(y.size()));
    } else {
        return 1.0;
    }
}

/// Zeroes every coefficient whose descaled magnitude is below `t`.
template <class T>
CoefficientWindow<T> threshold(CoefficientWindow<T> y, double t) {
    if (!(t >= 0.0)) throw InvalidParameter("threshold must be non-negative");
    const double unit = coefficient_unit(y);
    for (auto &v : y.values) {
        if (std::abs(static_cast<double>(v)) * unit < t) v = T{0};
    }
    return y;
}

/// Replaces the longest all-zero suffix with one codeword. Interior zeros stay.
template <class T>
CompressedWindow<T> rle_encode(const CoefficientWindow<T> &y) {
    std::size_t end = y.values.size();
    while (end > 0 && y.values[end - 1] == T{0}) --end;
    CompressedWindow<T> w;
    w.coefficients.assign(y.values.begin(), y.values.begin() + static_cast<std::ptrdiff_t>(end));
    if (end < y.values.size()) w.rle = RleCodeword{static_cast<std::int32_t>(y.values.size() - end)};
    return w;
}

template <class T>
CoefficientWindow<T> rle_decode(const CompressedWindow<T> &w, std::size_t window_size, std::int32_t scale = 1) {
    std::size_t zeros = 0;
    if (w.rle) {
        if (w.rle->zero_count < 1) throw CorruptStream("RLE codeword with non-positive zero count");
        zeros = static_cast<std::size_t>(w.rle->zero_count);
    }
    if (w.coefficients.size() + zeros != window_size) {
        throw CorruptStream("window holds " + std::to_string(w.coefficients.size()) + " coefficients and " +
                            std::to_string(zeros) + " encoded zeros, expected " + std::to_string(window_size));
    }
    CoefficientWindow<T> y{w.coefficients, scale};
    y.values.resize(window_size, T{0});
    return y;
}

namespace detail {

// Grows a window to `slots` by moving zeros out of its codeword into explicit coefficients.
inline void pad_window(CompressedWindow<double> &w, int slots) {
    while (w.occupied_slots() < slots) {
        // zero_count == 1 means the window already fills every slot.
        if (!w.rle || w.rle->zero_count < 2) throw CorruptStream("cannot pad a window without spare encoded zeros");
        w.coefficients.push_back(0.0);
        --w.rle->zero_count;
    }
}

template <class T>
CompressedWindow<double> widen(const CompressedWindow<T> &w) {
    CompressedWindow<double> out;
    out.coefficients.reserve(w.coefficients.size());
    for (auto v : w.coefficients) out.coefficients.push_back(static_cast<double>(v));
    out.rle = w.rle;
    return out;
}

inline std::vector<CoefficientWindow<std::int32_t>> clamp_coefficients(std::vector<CoefficientWindow<std::int32_t>> ws) {
    for (auto &w : ws) {
        for (auto &v : w.values) v = std::clamp(v, -kMaxCoefficient, kMaxCoefficient);
    }
    return ws;
}

// Transform of both channels without thresholding, as doubles plus their unit.
struct Spectrum {
    std::vector<CoefficientWindow<std::int32_t>> i_int, q_int;
    std::vector<CoefficientWindow<double>> i_float, q_float;
    int window_size = 0;
    std::int32_t scale = 1;
};

inline Spectrum analyse(const Waveform &w, const CodecConfig &cfg) {
    validate(w);
    validate(cfg.variant);
    Spectrum s;
    switch (cfg.variant.kind) {
        case TransformKind::IntDctW: {
            s.window_size = cfg.variant.window_size;
            s.scale = int_scale(s.window_size);
            auto q = quantize(w, cfg.bit_width, s.scale);
            s.i_int = clamp_coefficients(int_dct_w(q.i_samples, s.window_size));
            s.q_int = clamp_coefficients(int_dct_w(q.q_samples, s.window_size));
            break;
        }
        case TransformKind::DctW:
            s.window_size = cfg.variant.window_size;
            s.i_float = dct_w(w.i_samples, s.window_size);
            s.q_float = dct_w(w.q_samples, s.window_size);
            break;
        case TransformKind::DctN:
            s.window_size = static_cast<int>(w.size());
            s.i_float = {{dct_n(w.i_samples), 1}};
            s.q_float = {{dct_n(w.q_samples), 1}};
            break;
    }
    return s;
}

template <class T>
double max_descaled(const std::vector<CoefficientWindow<T>> &windows) {
    double m = 0.0;
    for (const auto &y : windows) {
        const double unit = coefficient_unit(y);
        for (auto v : y.values) m = std::max(m, std::abs(static_cast<double>(v)) * unit);
    }
    return m;
}

}  // namespace detail

/// Largest descaled coefficient magnitude over both channels: the starting
/// threshold of the fidelity-aware search.
inline double max_descaled_coefficient(const Waveform &w, const CodecConfig &cfg) {
    auto s = detail::analyse(w, cfg);
    if (cfg.variant.integer()) return std::max(detail::max_descaled(s.i_int), detail::max_descaled(s.q_int));
    return std::max(detail::max_descaled(s.i_float), detail::max_descaled(s.q_float));
}

/// Transform, threshold and run-length encode both channels, then pad each
/// window index so that I and Q occupy the same number of slots.
inline CompressedWaveform compress(const Waveform &w, const CodecConfig &cfg) {
    if (!(cfg.threshold >= 0.0)) throw InvalidParameter("threshold must be non-negative");
    auto s = detail::analyse(w, cfg);

    CompressedWaveform c;
    c.label = w.label;
    c.variant = cfg.variant;
    c.window_size = s.window_size;
    c.scale = s.scale;
    c.original_length = w.size();
    c.threshold_used = cfg.threshold;
    c.sample_rate_hz = w.sample_rate_hz;

    auto encode_all = [&](const auto &windows, std::vector<CompressedWindow<double>> &out) {
        out.reserve(windows.size());
        for (const auto &y : windows) out.push_back(detail::widen(rle_encode(threshold(y, cfg.threshold))));
    };
    if (cfg.variant.integer()) {
        encode_all(s.i_int, c.i_windows);
        encode_all(s.q_int, c.q_windows);
    } else {
        encode_all(s.i_float, c.i_windows);
        encode_all(s.q_float, c.q_windows);
    }

    for (std::size_t k = 0; k < c.i_windows.size(); ++k) {
        int slots = std::max(c.i_windows[k].occupied_slots(), c.q_windows[k].occupied_slots());
        detail::pad_window(c.i_windows[k], slots);
        detail::pad_window(c.q_windows[k], slots);
        c.uniform_width = std::max(c.uniform_width, slots);
    }
    return c;
}

namespace detail {

// Samples of window k of one channel, before truncation to the original length.
inline std::vector<double> decode_window(const CompressedWaveform &c, const std::vector<CompressedWindow<double>> &ws,
                                         std::size_t k) {
    const auto window_size = static_cast<std::size_t>(c.window_size);
    CoefficientWindow<double> y;
    try {
        y = rle_decode(ws[k], window_size);
    } catch (const CorruptStream &e) {
        throw CorruptStream(e.what(), k);
    }
    if (!c.variant.integer()) return idct_n(y.values);

    CoefficientWindow<std::int32_t> iy{std::vector<std::int32_t>(window_size), c.scale};
    for (std::size_t n = 0; n < window_size; ++n) {
        double v = y.values[n];
        if (v != std::trunc(v) || std::abs(v) > kMaxCoefficient) {
            throw CorruptStream("integer coefficient out of range", k);
        }
        iy.values[n] = static_cast<std::int32_t>(v);
    }
    std::vector<double> block;
    block.reserve(window_size);
    // The DAC saturates at full scale.
    for (auto v : int_idct_w(iy)) block.push_back(static_cast<double>(std::clamp(v, -c.scale, c.scale)) / c.scale);
    return block;
}

inline std::vector<double> decode_channel(const CompressedWaveform &c, const std::vector<CompressedWindow<double>> &ws) {
    std::vector<double> out;
    out.reserve(c.original_length);
    for (std::size_t k = 0; k < ws.size(); ++k) {
        for (double v : decode_window(c, ws, k)) {
            if (out.size() == c.original_length) break;
            out.push_back(v);
        }
    }
    if (out.size() != c.original_length) {
        throw CorruptStream("windows decode to " + std::to_string(out.size()) + " samples, expected " +
                            std::to_string(c.original_length));
    }
    return out;
}

}  // namespace detail

inline Waveform decompress(const CompressedWaveform &c) {
    if (c.i_windows.size() != c.q_windows.size()) {
        throw CorruptStream("I and Q channels have different window counts");
    }
    if (c.window_size < 1) throw CorruptStream("window size must be positive");
    std::size_t expected =
        (c.original_length + static_cast<std::size_t>(c.window_size) - 1) / static_cast<std::size_t>(c.window_size);
    if (c.i_windows.size() != expected) {
        throw CorruptStream("stream has " + std::to_string(c.i_windows.size()) + " windows, expected " +
                            std::to_string(expected));
    }
    Waveform w;
    w.label = c.label;
    w.sample_rate_hz = c.sample_rate_hz;
    w.i_samples = detail::decode_channel(c, c.i_windows);
    w.q_samples = detail::decode_channel(c, c.q_windows);
    return w;
}

struct TrajectoryPoint {
    double threshold = 0.0;
    double mse = 0.0;
};

/// Outcome of the fidelity-aware threshold search. `compressed` is empty
/// when the threshold fell below the floor without meeting the target.
struct FidelityResult {
    std::optional<CompressedWaveform> compressed;
    std::vector<TrajectoryPoint> trajectory;
    double initial_threshold = 0.0;
};

inline constexpr double kThresholdFloor = 1e-6;

/// Starts at the largest descaled coefficient and halves the threshold until
/// the reconstruction MSE meets `target_error`.
inline FidelityResult fidelity_aware_compress(const Waveform &w, double target_error, CodecConfig cfg) {
    if (!(target_error >= 0.0)) throw InvalidParameter("target error must be non-negative");
    FidelityResult result;
    double t = max_descaled_coefficient(w, cfg);
    result.initial_threshold = t;
    while (true) {
        cfg.threshold = t;
        auto c = compress(w, cfg);
        double e = mse(w, decompress(c));
        result.trajectory.push_back({t, e});
        if (e <= target_error) {
            result.compressed = std::move(c);
            return result;
        }
        t /= 2.0;
        if (t < kThresholdFloor) return result;
    }
}

/// Slot-count ratio (coefficients and codewords only) and the effective ratio that
/// also charges the per-entry header.
struct CompressionRatio {
    double slots = 1.0;
    double effective = 1.0;
};

/// Bytes of per-entry header in the compressed library format.
inline std::size_t entry_header_bytes(const CompressedWaveform &c) {
    return 2 + c.label.size() + 4 + 1 + 8;
}

inline CompressionRatio compression_ratio(std::size_t original_samples, const CompressedWaveform &c) {
    const double stored_slots =
        static_cast<double>(c.window_count()) * static_cast<double>(c.uniform_width);
    CompressionRatio r;
    if (stored_slots <= 0.0) return r;
    r.slots = static_cast<double>(original_samples) / stored_slots;
    const double slot_bytes = c.variant.integer() ? 2.0 : 8.0;
    const double original_bytes = 2.0 * static_cast<double>(original_samples) * 2.0;
    r.effective = original_bytes / (2.0 * stored_slots * slot_bytes + static_cast<double>(entry_header_bytes(c)));
    return r;
}

inline CompressionRatio compression_ratio(const Waveform &original, const CompressedWaveform &c) {
    return compression_ratio(original.size(), c);
}

// ---------------------------------------------------------------------------
// Delta baseline.

struct DeltaChannel {
    std::int32_t first = 0;
    std::vector<std::int32_t> deltas;
    bool half_width = false;
    bool operator==(const DeltaChannel &) const = default;
};

struct DeltaStream {
    DeltaChannel i, q;
    int bit_width = 16;
    std::size_t length = 0;
    bool operator==(const DeltaStream &) const = default;

    std::size_t stored_bits() const {
        auto channel_bits = [&](const DeltaChannel &c) {
            std::size_t per_delta = c.half_width ? static_cast<std::size_t>(bit_width / 2) : static_cast<std::size_t>(bit_width);
            return static_cast<std::size_t>(bit_width) + c.deltas.size() * per_delta;
        };
        return channel_bits(i) + channel_bits(q);
    }
    double ratio() const {
        std::size_t stored = stored_bits();
        return stored == 0 ? 1.0 : static_cast<double>(2 * length * static_cast<std::size_t>(bit_width)) / static_cast<double>(stored);
    }
};

namespace detail {

inline DeltaChannel delta_channel(std::span<const std::int32_t> x, int bit_width) {
    DeltaChannel c;
    if (x.empty()) return c;
    c.first = x[0];
    c.deltas.reserve(x.size() - 1);
    const std::int32_t half_max = max_signed(bit_width / 2);
    const std::int32_t half_min = min_signed(bit_width / 2);
    bool fits = true;
    bool crosses_zero = false;
    for (std::size_t n = 1; n < x.size(); ++n) {
        std::int32_t d = x[n] - x[n - 1];
        c.deltas.push_back(d);
        fits = fits && d <= half_max && d >= half_min;
        crosses_zero = crosses_zero || (x[n] < 0) != (x[n - 1] < 0);
    }
    // A sign change flips the sign bit, so the delta spans the full word.
    c.half_width = fits && !crosses_zero;
    return c;
}

inline std::vector<std::int32_t> undelta(const DeltaChannel &c, std::size_t length) {
    std::vector<std::int32_t> x;
    if (length == 0) return x;
    if (c.deltas.size() + 1 != length) throw CorruptStream("delta channel length mismatch");
    x.reserve(length);
    x.push_back(c.first);
    for (auto d : c.deltas) x.push_back(x.back() + d);
    return x;
}

}  // namespace detail

inline DeltaStream delta_compress(const QuantizedWaveform &w) {
    if (w.i_samples.size() != w.q_samples.size()) throw ShapeError("delta_compress: channel lengths differ");
    DeltaStream s;
    s.bit_width = w.bit_width;
    s.length = w.size();
    s.i = detail::delta_channel(w.i_samples, w.bit_width);
    s.q = detail::delta_channel(w.q_samples, w.bit_width);
    return s;
}

/// Inverse of delta_compress; metadata (scale, rate, label) comes from `like`.
inline QuantizedWaveform delta_decompress(const DeltaStream &s, const QuantizedWaveform &like = {}) {
    QuantizedWaveform w = like;
    w.bit_width = s.bit_width;
    w.i_samples = detail::undelta(s.i, s.length);
    w.q_samples = detail::undelta(s.q, s.length);
    return w;
}

}  // namespace wavecomp
