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

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "wavecomp/codec.hpp"
#include "wavecomp/corpus.hpp"
#include "wavecomp/errors.hpp"

namespace wavecomp {

// ---------------------------------------------------------------------------
// Waveform library (JSON).

inline nlohmann::json library_to_json(const WaveformLibrary &lib) {
    nlohmann::json doc;
    doc["format_version"] = lib.format_version;
    doc["sample_rate_hz"] = lib.sample_rate_hz;
    if (lib.seed) doc["metadata"] = {{"seed", *lib.seed}};
    auto &entries = doc["entries"] = nlohmann::json::array();
    for (const auto &w : lib.entries) {
        entries.push_back({{"label", w.label}, {"i", w.i_samples}, {"q", w.q_samples}});
    }
    return doc;
}

inline WaveformLibrary library_from_json(const nlohmann::json &doc) {
    WaveformLibrary lib;
    try {
        lib.format_version = doc.at("format_version").get<int>();
        if (lib.format_version != 1) {
            throw ValidationError("unsupported waveform library version " + std::to_string(lib.format_version));
        }
        lib.sample_rate_hz = doc.at("sample_rate_hz").get<double>();
        if (doc.contains("metadata") && doc["metadata"].contains("seed")) {
            lib.seed = doc["metadata"]["seed"].get<std::uint64_t>();
        }
        for (const auto &e : doc.at("entries")) {
            Waveform w;
            w.label = e.at("label").get<std::string>();
            w.i_samples = e.at("i").get<std::vector<double>>();
            w.q_samples = e.at("q").get<std::vector<double>>();
            w.sample_rate_hz = lib.sample_rate_hz;
            validate(w);
            lib.entries.push_back(std::move(w));
        }
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed waveform library: ") + e.what());
    }
    return lib;
}

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return bytes;
}

inline void write_file(const std::string &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error while writing '" + path + "'");
}

inline void write_text(const std::string &path, const std::string &text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

}  // namespace detail

inline WaveformLibrary read_library(const std::string &path) {
    auto bytes = detail::read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
    return library_from_json(doc);
}

inline void write_library(const std::string &path, const WaveformLibrary &lib) {
    detail::write_text(path, library_to_json(lib).dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// Compressed library (binary, little-endian).
//
//   "CWMF" u8 version u8 variant u8 window_size u16 scale u32 count
//   per entry: u16 label_len, label, u32 original_length, u8 uniform_width,
//              f64 threshold_used, then for each window index the I window
//              and the Q window, each uniform_width slots.
//
// Integer slots are i16 with -32768 as the codeword. Floating-point (DCT-W)
// slots are f64 with a quiet NaN as the codeword. Slots after the codeword
// are zero.

inline constexpr std::uint8_t kCwmfVersion = 1;
inline constexpr std::uint64_t kFloatSignatureBits = 0x7FF8000000000000ULL;

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { little(v, 2); }
    void u32(std::uint32_t v) { little(v, 4); }
    void u64(std::uint64_t v) { little(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void little(std::uint64_t v, int n) {
        for (int k = 0; k < n; ++k) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
    }
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> b) : bytes_(b) {}
    std::uint8_t u8() { return static_cast<std::uint8_t>(little(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(little(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(little(4)); }
    std::uint64_t u64() { return little(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string raw(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char *>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw CorruptStream("compressed library truncated at byte " + std::to_string(pos_));
    }
    std::uint64_t little(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(k)]) << (8 * k);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

inline void write_window(ByteWriter &out, const CompressedWindow<double> &w, int width, bool integer) {
    int written = 0;
    for (double v : w.coefficients) {
        if (integer) {
            out.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
        } else {
            out.f64(v);
        }
        ++written;
    }
    if (w.rle) {
        if (integer) {
            out.u16(static_cast<std::uint16_t>(RleCodeword::kSignature));
        } else {
            out.u64(kFloatSignatureBits);
        }
        ++written;
    }
    for (; written < width; ++written) {
        if (integer) {
            out.u16(0);
        } else {
            out.f64(0.0);
        }
    }
}

inline CompressedWindow<double> read_window(ByteReader &in, int width, int window_size, bool integer,
                                            std::size_t index) {
    CompressedWindow<double> w;
    bool after_codeword = false;
    for (int s = 0; s < width; ++s) {
        double value = 0.0;
        bool signature = false;
        if (integer) {
            auto raw = static_cast<std::int16_t>(in.u16());
            signature = raw == RleCodeword::kSignature;
            value = raw;
        } else {
            auto bits = in.u64();
            signature = bits == kFloatSignatureBits;
            value = std::bit_cast<double>(bits);
            if (!signature && !std::isfinite(value)) throw CorruptStream("non-finite coefficient", index);
        }
        if (after_codeword) {
            if (signature || value != 0.0) throw CorruptStream("non-zero slot after RLE codeword", index);
            continue;
        }
        if (signature) {
            after_codeword = true;
            continue;
        }
        w.coefficients.push_back(value);
    }
    int coefficients = static_cast<int>(w.coefficients.size());
    if (after_codeword) {
        if (coefficients >= window_size) throw CorruptStream("RLE codeword encodes no zeros", index);
        w.rle = RleCodeword{window_size - coefficients};
    } else if (coefficients != window_size) {
        throw CorruptStream("window has " + std::to_string(coefficients) + " coefficients and no codeword", index);
    }
    return w;
}

}  // namespace detail

/// Serializes a library. All entries must share variant and window size;
/// DCT-N streams have no fixed window and are rejected.
inline std::vector<std::uint8_t> encode_cwmf(std::span<const CompressedWaveform> lib) {
    TransformVariant variant{TransformKind::IntDctW, 16};
    if (!lib.empty()) variant = lib.front().variant;
    if (!variant.windowed()) throw ValidationError("DCT-N streams cannot be stored in a compressed library");
    validate(variant);
    const bool integer = variant.integer();
    const std::int32_t scale = integer ? int_scale(variant.window_size) : 1;

    detail::ByteWriter out;
    out.raw("CWMF");
    out.u8(kCwmfVersion);
    out.u8(static_cast<std::uint8_t>(variant.kind));
    out.u8(static_cast<std::uint8_t>(variant.window_size));
    out.u16(static_cast<std::uint16_t>(scale));
    out.u32(static_cast<std::uint32_t>(lib.size()));
    for (const auto &c : lib) {
        if (c.variant != variant || c.window_size != variant.window_size || c.scale != scale) {
            throw ValidationError("entry '" + c.label + "' does not match the library transform settings");
        }
        if (c.label.size() > 0xFFFF) throw ValidationError("label too long: '" + c.label.substr(0, 32) + "...'");
        if (c.uniform_width < 1 || c.uniform_width > c.window_size) {
            throw ValidationError("entry '" + c.label + "' has invalid uniform width");
        }
        if (c.i_windows.size() != c.q_windows.size()) throw ValidationError("entry '" + c.label + "' has unequal channels");
        out.u16(static_cast<std::uint16_t>(c.label.size()));
        out.raw(c.label);
        out.u32(static_cast<std::uint32_t>(c.original_length));
        out.u8(static_cast<std::uint8_t>(c.uniform_width));
        out.f64(c.threshold_used);
        for (std::size_t k = 0; k < c.i_windows.size(); ++k) {
            for (const auto *w : {&c.i_windows[k], &c.q_windows[k]}) {
                if (w->occupied_slots() > c.uniform_width) {
                    throw ValidationError("entry '" + c.label + "' window " + std::to_string(k) +
                                          " exceeds the uniform width");
                }
                if (integer) {
                    for (double v : w->coefficients) {
                        if (v != std::trunc(v) || std::abs(v) > kMaxCoefficient) {
                            throw ValidationError("entry '" + c.label + "' has a coefficient outside the 16-bit range");
                        }
                    }
                }
                detail::write_window(out, *w, c.uniform_width, integer);
            }
        }
    }
    return out.take();
}

/// Parses a library. The format carries no sample rate; it is supplied here.
inline std::vector<CompressedWaveform> decode_cwmf(std::span<const std::uint8_t> bytes,
                                                   double sample_rate_hz = kIbmSampleRate) {
    detail::ByteReader in(bytes);
    if (in.raw(4) != "CWMF") throw CorruptStream("not a compressed waveform library (bad magic)");
    if (auto v = in.u8(); v != kCwmfVersion) throw CorruptStream("unsupported library version " + std::to_string(v));
    auto kind = in.u8();
    if (kind > static_cast<std::uint8_t>(TransformKind::IntDctW) || kind == static_cast<std::uint8_t>(TransformKind::DctN)) {
        throw CorruptStream("unsupported transform variant " + std::to_string(kind));
    }
    TransformVariant variant{static_cast<TransformKind>(kind), in.u8()};
    if (variant.window_size != 8 && variant.window_size != 16) {
        throw CorruptStream("unsupported window size " + std::to_string(variant.window_size));
    }
    const bool integer = variant.integer();
    const std::int32_t scale = in.u16();
    if (scale != (integer ? int_scale(variant.window_size) : 1)) {
        throw CorruptStream("scale " + std::to_string(scale) + " does not match the transform");
    }
    const std::uint32_t count = in.u32();

    std::vector<CompressedWaveform> lib;
    for (std::uint32_t e = 0; e < count; ++e) {
        CompressedWaveform c;
        c.variant = variant;
        c.window_size = variant.window_size;
        c.scale = scale;
        c.sample_rate_hz = sample_rate_hz;
        c.label = in.raw(in.u16());
        c.original_length = in.u32();
        c.uniform_width = in.u8();
        c.threshold_used = in.f64();
        if (c.uniform_width < 1 || c.uniform_width > c.window_size) {
            throw CorruptStream("entry '" + c.label + "' has invalid uniform width " + std::to_string(c.uniform_width));
        }
        const std::size_t windows = (c.original_length + static_cast<std::size_t>(c.window_size) - 1) /
                                    static_cast<std::size_t>(c.window_size);
        const std::size_t slot_bytes = integer ? 2 : 8;
        if (windows > in.remaining() / (2 * static_cast<std::size_t>(c.uniform_width) * slot_bytes)) {
            throw CorruptStream("entry '" + c.label + "' declares more windows than the file holds");
        }
        c.i_windows.reserve(windows);
        c.q_windows.reserve(windows);
        for (std::size_t k = 0; k < windows; ++k) {
            c.i_windows.push_back(detail::read_window(in, c.uniform_width, c.window_size, integer, k));
            c.q_windows.push_back(detail::read_window(in, c.uniform_width, c.window_size, integer, k));
        }
        lib.push_back(std::move(c));
    }
    if (!in.done()) throw CorruptStream("trailing bytes after the last entry");
    return lib;
}

inline void write_cwmf(const std::string &path, std::span<const CompressedWaveform> lib) {
    detail::write_file(path, encode_cwmf(lib));
}

inline std::vector<CompressedWaveform> read_cwmf(const std::string &path, double sample_rate_hz = kIbmSampleRate) {
    return decode_cwmf(detail::read_file(path), sample_rate_hz);
}

}  // namespace wavecomp
