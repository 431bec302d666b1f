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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wavecomp/errors.hpp"

namespace wavecomp {

enum class TransformKind : std::uint8_t { DctN = 0, DctW = 1, IntDctW = 2 };

struct TransformVariant {
    TransformKind kind = TransformKind::IntDctW;
    int window_size = 16;  // ignored for DctN

    bool windowed() const { return kind != TransformKind::DctN; }
    bool integer() const { return kind == TransformKind::IntDctW; }
    bool operator==(const TransformVariant &) const = default;
};

inline void validate(const TransformVariant &v) {
    if (v.windowed() && v.window_size != 8 && v.window_size != 16) {
        throw InvalidParameter("window size must be 8 or 16, got " + std::to_string(v.window_size));
    }
}

inline const char *to_string(TransformKind k) {
    switch (k) {
        case TransformKind::DctN: return "dct-n";
        case TransformKind::DctW: return "dct-w";
        case TransformKind::IntDctW: return "int-dct-w";
    }
    return "?";
}

/// Arithmetic census of one transform call.
struct OpCounter {
    std::uint64_t multiplies = 0;
    std::uint64_t adds = 0;
    std::uint64_t shifts = 0;

    OpCounter &operator+=(const OpCounter &o) {
        multiplies += o.multiplies;
        adds += o.adds;
        shifts += o.shifts;
        return *this;
    }
    bool operator==(const OpCounter &) const = default;
};

/// One window of transform coefficients. `scale` is the integer transform
/// scaling factor S for integer windows and 1 for floating-point ones.
template <class T>
struct CoefficientWindow {
    std::vector<T> values;
    std::int32_t scale = 1;

    std::size_t size() const { return values.size(); }
    bool operator==(const CoefficientWindow &) const = default;
};

// ---------------------------------------------------------------------------
// Floating-point DCT-II / DCT-III, orthonormal.

namespace detail {

// cos(pi * m / (2N)) for m in [0, 4N); the DCT argument (2n+1)k is reduced mod 4N.
inline std::vector<double> cosine_table(std::size_t n) {
    std::vector<double> table(4 * n);
    for (std::size_t m = 0; m < table.size(); ++m) {
        table[m] = std::cos(std::numbers::pi * static_cast<double>(m) / (2.0 * static_cast<double>(n)));
    }
    return table;
}

}  // namespace detail

inline std::vector<double> dct_n(std::span<const double> x, OpCounter *ops = nullptr) {
    const std::size_t n = x.size();
    if (n == 0) throw ShapeError("dct_n: empty input");
    auto table = detail::cosine_table(n);
    const double dc_weight = 1.0 / std::sqrt(static_cast<double>(n));
    const double ac_weight = std::sqrt(2.0 / static_cast<double>(n));
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[i] * table[((2 * i + 1) * k) % (4 * n)];
        y[k] = acc * (k == 0 ? dc_weight : ac_weight);
    }
    if (ops) {
        ops->multiplies += n * n + n;
        ops->adds += n * (n - 1);
    }
    return y;
}

inline std::vector<double> idct_n(std::span<const double> y, OpCounter *ops = nullptr) {
    const std::size_t n = y.size();
    if (n == 0) throw ShapeError("idct_n: empty input");
    auto table = detail::cosine_table(n);
    const double dc_weight = 1.0 / std::sqrt(static_cast<double>(n));
    const double ac_weight = std::sqrt(2.0 / static_cast<double>(n));
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 1; i < n; ++i) acc += y[i] * table[((2 * k + 1) * i) % (4 * n)];
        x[k] = y[0] * dc_weight + ac_weight * acc;
    }
    if (ops) {
        ops->multiplies += n * n + n;
        ops->adds += n * n;
    }
    return x;
}

/// Splits a channel into consecutive windows, zero-padding the last one, and
/// transforms each independently.
inline std::vector<CoefficientWindow<double>> dct_w(std::span<const double> channel, int window_size,
                                                    OpCounter *ops = nullptr) {
    validate(TransformVariant{TransformKind::DctW, window_size});
    const auto ws = static_cast<std::size_t>(window_size);
    std::vector<CoefficientWindow<double>> out;
    out.reserve((channel.size() + ws - 1) / ws);
    std::vector<double> block(ws);
    for (std::size_t start = 0; start < channel.size(); start += ws) {
        std::fill(block.begin(), block.end(), 0.0);
        for (std::size_t i = 0; i < ws && start + i < channel.size(); ++i) block[i] = channel[start + i];
        out.push_back({dct_n(block, ops), 1});
    }
    return out;
}

/// Inverse of dct_w, truncated to `original_length` samples.
inline std::vector<double> idct_w(std::span<const CoefficientWindow<double>> windows, std::size_t original_length,
                                  OpCounter *ops = nullptr) {
    std::vector<double> out;
    out.reserve(original_length);
    for (const auto &w : windows) {
        auto block = idct_n(w.values, ops);
        for (double v : block) {
            if (out.size() == original_length) break;
            out.push_back(v);
        }
    }
    if (out.size() != original_length) {
        throw ShapeError("idct_w: windows cover " + std::to_string(out.size()) + " samples, expected " +
                         std::to_string(original_length));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integer DCT on the HEVC core-transform basis, built from shifts and adds.
//
// Forward:  y = (T x + 2^(f-1)) >> f,   f = log2(N) - 1
// Inverse:  x = (T^T y + 2^(g-1)) >> g, g = 13
// T T^T ~= 64^2 N I, so f + g = 12 + log2(N) makes the pair unit gain. Inputs
// are expected pre-scaled by S = 2^(6 + log2(N)/2); a coefficient y then
// stands for y * 2^f / S^2 in orthonormal DCT units.

/// S for an N-point integer transform: 181 (= round(2^7.5)) for 8, 256 for 16.
inline std::int32_t int_scale(int window_size) {
    switch (window_size) {
        case 8: return 181;
        case 16: return 256;
        default: throw InvalidParameter("integer DCT window size must be 8 or 16, got " + std::to_string(window_size));
    }
}

inline int int_forward_shift(int window_size) { return window_size == 8 ? 2 : 3; }
inline constexpr int kIntInverseShift = 13;

/// Largest coefficient magnitude a 16-bit input window can produce: 64 * N * 2^15 >> f = 2^22 for N = 8 and 16.
inline constexpr std::int64_t kIntCoefficientLimit = std::int64_t{1} << 22;

/// Size of one integer coefficient step in orthonormal units.
inline double int_coefficient_unit(int window_size) {
    double s = static_cast<double>(int_scale(window_size));
    return static_cast<double>(1 << int_forward_shift(window_size)) / (s * s);
}

namespace detail {

// First half of the odd rows of the HEVC basis for each butterfly level
// (row 2m+1, columns 0..N/2-1); the even rows recurse into the N/2 basis.
inline constexpr std::array<std::int32_t, 1> kOdd2 = {64};
inline constexpr std::array<std::int32_t, 4> kOdd4 = {83, 36, 36, -83};
inline constexpr std::array<std::int32_t, 16> kOdd8 = {
    89, 75, 50,  18,   //
    75, -18, -89, -50,  //
    50, -89, 18,  75,   //
    18, -50, 75,  -89,
};
inline constexpr std::array<std::int32_t, 64> kOdd16 = {
    90, 87,  80,  70,  57,  43,  25,  9,    //
    87, 57,  9,   -43, -80, -90, -70, -25,  //
    80, 9,   -70, -87, -25, 57,  90,  43,   //
    70, -43, -87, 9,   90,  25,  -80, -57,  //
    57, -80, -25, 90,  -9,  -87, 43,  70,   //
    43, -90, 57,  25,  -87, 70,  9,   -80,  //
    25, -70, 90,  -80, 43,  9,   -57, 87,   //
    9,  -25, 43,  -57, 70,  -80, 87,  -90,
};
inline constexpr std::int32_t kDcWeight = 64;

inline std::span<const std::int32_t> odd_rows(std::size_t n) {
    switch (n) {
        case 2: return kOdd2;
        case 4: return kOdd4;
        case 8: return kOdd8;
        default: return kOdd16;
    }
}

// c * v using only shifts and adds, via the non-adjacent-form recoding of c.
inline std::int64_t shift_add_mul(std::int64_t v, std::int32_t c, OpCounter &ops) {
    std::int64_t acc = 0;
    bool first = true;
    int bit = 0;
    std::int64_t rest = c;
    while (rest != 0) {
        if (rest & 1) {
            std::int64_t digit = 2 - (((rest % 4) + 4) % 4);  // +1 or -1
            rest -= digit;
            std::int64_t term = v;
            if (bit > 0) {
                term = v << bit;
                ++ops.shifts;
            }
            if (first) {
                acc = digit > 0 ? term : -term;
                if (digit < 0) ++ops.adds;
                first = false;
            } else {
                acc = digit > 0 ? acc + term : acc - term;
                ++ops.adds;
            }
        }
        rest >>= 1;
        ++bit;
    }
    return acc;
}

inline void forward_butterfly(std::span<const std::int64_t> x, std::span<std::int64_t> y, OpCounter &ops) {
    const std::size_t n = x.size();
    if (n == 1) {
        y[0] = shift_add_mul(x[0], kDcWeight, ops);
        return;
    }
    const std::size_t half = n / 2;
    std::array<std::int64_t, 8> even{};
    std::array<std::int64_t, 8> odd{};
    for (std::size_t k = 0; k < half; ++k) {
        even[k] = x[k] + x[n - 1 - k];
        odd[k] = x[k] - x[n - 1 - k];
        ops.adds += 2;
    }
    std::array<std::int64_t, 8> even_out{};
    forward_butterfly(std::span<const std::int64_t>(even.data(), half), std::span(even_out.data(), half), ops);
    for (std::size_t m = 0; m < half; ++m) y[2 * m] = even_out[m];

    auto rows = odd_rows(n);
    for (std::size_t m = 0; m < half; ++m) {
        std::int64_t acc = 0;
        for (std::size_t k = 0; k < half; ++k) {
            acc += shift_add_mul(odd[k], rows[m * half + k], ops);
            if (k > 0) ++ops.adds;
        }
        y[2 * m + 1] = acc;
    }
}

inline void inverse_butterfly(std::span<const std::int64_t> y, std::span<std::int64_t> x, OpCounter &ops) {
    const std::size_t n = y.size();
    if (n == 1) {
        x[0] = shift_add_mul(y[0], kDcWeight, ops);
        return;
    }
    const std::size_t half = n / 2;
    std::array<std::int64_t, 8> even_in{};
    for (std::size_t m = 0; m < half; ++m) even_in[m] = y[2 * m];
    std::array<std::int64_t, 8> even{};
    inverse_butterfly(std::span<const std::int64_t>(even_in.data(), half), std::span(even.data(), half), ops);

    auto rows = odd_rows(n);
    for (std::size_t k = 0; k < half; ++k) {
        std::int64_t acc = 0;
        for (std::size_t m = 0; m < half; ++m) {
            acc += shift_add_mul(y[2 * m + 1], rows[m * half + k], ops);
            if (m > 0) ++ops.adds;
        }
        x[k] = even[k] + acc;
        x[n - 1 - k] = even[k] - acc;
        ops.adds += 2;
    }
}

inline std::int64_t round_shift(std::int64_t v, int shift, OpCounter &ops) {
    ops.adds += 1;
    ops.shifts += 1;
    return (v + (std::int64_t{1} << (shift - 1))) >> shift;
}

}  // namespace detail

/// Forward integer DCT of one window of 16-bit samples.
inline CoefficientWindow<std::int32_t> int_dct_window(std::span<const std::int32_t> block, OpCounter *ops = nullptr) {
    const int ws = static_cast<int>(block.size());
    const std::int32_t scale = int_scale(ws);
    OpCounter local;
    std::array<std::int64_t, 16> in{};
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (block[i] > std::numeric_limits<std::int16_t>::max() || block[i] < std::numeric_limits<std::int16_t>::min()) {
            throw RangeError("int_dct: sample " + std::to_string(i) + " (" + std::to_string(block[i]) +
                             ") exceeds 16-bit range");
        }
        in[i] = block[i];
    }
    std::array<std::int64_t, 16> out{};
    detail::forward_butterfly(std::span<const std::int64_t>(in.data(), block.size()), std::span(out.data(), block.size()),
                              local);
    CoefficientWindow<std::int32_t> result{std::vector<std::int32_t>(block.size()), scale};
    const int shift = int_forward_shift(ws);
    for (std::size_t k = 0; k < block.size(); ++k) {
        result.values[k] = static_cast<std::int32_t>(detail::round_shift(out[k], shift, local));
    }
    if (ops) *ops += local;
    return result;
}

/// Inverse integer DCT of one coefficient window. Output is in the scaled
/// sample domain (divide by S to recover amplitudes).
inline std::vector<std::int32_t> int_idct_w(const CoefficientWindow<std::int32_t> &window, OpCounter *ops = nullptr) {
    const int ws = static_cast<int>(window.size());
    if (ws != 8 && ws != 16) throw ShapeError("int_idct: window length must be 8 or 16, got " + std::to_string(ws));
    OpCounter local;
    std::array<std::int64_t, 16> in{};
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (std::abs(std::int64_t{window.values[i]}) > kIntCoefficientLimit) {
            throw RangeError("int_idct: coefficient " + std::to_string(i) + " (" + std::to_string(window.values[i]) +
                             ") is outside the transform's dynamic range");
        }
        in[i] = window.values[i];
    }
    std::array<std::int64_t, 16> out{};
    detail::inverse_butterfly(std::span<const std::int64_t>(in.data(), window.size()),
                              std::span(out.data(), window.size()), local);
    std::vector<std::int32_t> x(window.size());
    for (std::size_t k = 0; k < window.size(); ++k) {
        x[k] = static_cast<std::int32_t>(detail::round_shift(out[k], kIntInverseShift, local));
    }
    if (ops) *ops += local;
    return x;
}

/// Windowed integer DCT of a quantized channel; the tail window is zero-padded.
inline std::vector<CoefficientWindow<std::int32_t>> int_dct_w(std::span<const std::int32_t> channel, int window_size,
                                                              OpCounter *ops = nullptr) {
    int_scale(window_size);  // validates
    const auto ws = static_cast<std::size_t>(window_size);
    std::vector<CoefficientWindow<std::int32_t>> out;
    out.reserve((channel.size() + ws - 1) / ws);
    std::vector<std::int32_t> block(ws);
    for (std::size_t start = 0; start < channel.size(); start += ws) {
        std::fill(block.begin(), block.end(), 0);
        for (std::size_t i = 0; i < ws && start + i < channel.size(); ++i) block[i] = channel[start + i];
        try {
            out.push_back(int_dct_window(block, ops));
        } catch (const RangeError &e) {
            throw RangeError(std::string(e.what()) + " in window starting at sample " + std::to_string(start));
        }
    }
    return out;
}

/// Inverse of int_dct_w, truncated to `original_length` scaled samples.
inline std::vector<std::int32_t> int_idct_windows(std::span<const CoefficientWindow<std::int32_t>> windows,
                                                  std::size_t original_length, OpCounter *ops = nullptr) {
    std::vector<std::int32_t> out;
    out.reserve(original_length);
    for (const auto &w : windows) {
        for (auto v : int_idct_w(w, ops)) {
            if (out.size() == original_length) break;
            out.push_back(v);
        }
    }
    if (out.size() != original_length) {
        throw ShapeError("int_idct: windows cover " + std::to_string(out.size()) + " samples, expected " +
                         std::to_string(original_length));
    }
    return out;
}

}  // namespace wavecomp
