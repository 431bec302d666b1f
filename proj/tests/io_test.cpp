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

#include <cstring>
#include <filesystem>
#include <random>

#include "gtest/gtest.h"
#include "wavecomp/codec.hpp"
#include "wavecomp/corpus.hpp"
#include "wavecomp/io.hpp"

using namespace wavecomp;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / ("wavecomp_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::create_directories(dir);
    return dir;
}

std::vector<CompressedWaveform> compress_all(const WaveformLibrary &lib, TransformVariant v, double eps) {
    std::vector<CompressedWaveform> out;
    for (const auto &w : lib.entries) out.push_back(*fidelity_aware_compress(w, eps, CodecConfig{v, 0.0, 16}).compressed);
    return out;
}

WaveformLibrary small_library() {
    CorpusParams p;
    p.qubits = 3;
    return generate_corpus(p);
}

std::vector<std::uint8_t> golden(const std::string &name) {
    return detail::read_file(std::string(WAVECOMP_GOLDEN_DIR) + "/" + name);
}

}  // namespace

TEST(LibraryJson, RoundTrip) {
    auto lib = small_library();
    lib.seed = 42;
    auto back = library_from_json(library_to_json(lib));
    EXPECT_EQ(back.format_version, 1);
    EXPECT_EQ(back.sample_rate_hz, lib.sample_rate_hz);
    ASSERT_EQ(back.seed, std::optional<std::uint64_t>(42));
    ASSERT_EQ(back.entries.size(), lib.entries.size());
    for (std::size_t n = 0; n < lib.entries.size(); ++n) {
        EXPECT_EQ(back.entries[n].label, lib.entries[n].label);
        EXPECT_EQ(back.entries[n].i_samples, lib.entries[n].i_samples);
        EXPECT_EQ(back.entries[n].q_samples, lib.entries[n].q_samples);
    }
}

TEST(LibraryJson, Schema) {
    WaveformLibrary lib;
    lib.sample_rate_hz = 1e9;
    lib.entries.push_back(gen_constant(0.5, 3e-9, 1e9, "c"));
    auto doc = library_to_json(lib);
    EXPECT_EQ(doc.at("format_version"), 1);
    EXPECT_EQ(doc.at("sample_rate_hz"), 1e9);
    EXPECT_EQ(doc.at("entries").at(0).at("label"), "c");
    EXPECT_EQ(doc.at("entries").at(0).at("i").size(), 3u);
    EXPECT_FALSE(doc.contains("metadata"));
}

TEST(LibraryJson, RejectsMalformedDocuments) {
    auto doc = nlohmann::json::parse(R"({"format_version":1,"sample_rate_hz":1e9,"entries":[{"label":"a","i":[0.1],"q":[]}]})");
    EXPECT_THROW(library_from_json(doc), ShapeError);
    doc = nlohmann::json::parse(R"({"format_version":2,"sample_rate_hz":1e9,"entries":[]})");
    EXPECT_THROW(library_from_json(doc), ValidationError);
    doc = nlohmann::json::parse(R"({"format_version":1,"entries":[]})");
    EXPECT_THROW(library_from_json(doc), ValidationError);
    doc = nlohmann::json::parse(R"({"format_version":1,"sample_rate_hz":1e9,"entries":[{"label":"a","i":["x"],"q":[0]}]})");
    EXPECT_THROW(library_from_json(doc), ValidationError);
}

TEST(LibraryJson, FileErrorsCarryPath) {
    try {
        read_library("/nonexistent/dir/lib.json");
        FAIL();
    } catch (const IoError &e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/lib.json"), std::string::npos);
    }
    EXPECT_THROW(write_library("/nonexistent/dir/lib.json", small_library()), IoError);
    auto bad = temp_dir() / "bad.json";
    detail::write_text(bad.string(), "{not json");
    EXPECT_THROW(read_library(bad.string()), ValidationError);
}

TEST(Cwmf, RoundTripIntegerAndFloat) {
    auto lib = small_library();
    for (auto v : {TransformVariant{TransformKind::IntDctW, 16}, TransformVariant{TransformKind::IntDctW, 8},
                   TransformVariant{TransformKind::DctW, 8}, TransformVariant{TransformKind::DctW, 16}}) {
        auto compressed = compress_all(lib, v, 1e-5);
        auto bytes = encode_cwmf(compressed);
        auto back = decode_cwmf(bytes, lib.sample_rate_hz);
        ASSERT_EQ(back.size(), compressed.size());
        for (std::size_t n = 0; n < back.size(); ++n) {
            EXPECT_EQ(back[n], compressed[n]) << compressed[n].label;
            auto a = decompress(back[n]), b = decompress(compressed[n]);
            EXPECT_EQ(0, std::memcmp(a.i_samples.data(), b.i_samples.data(), a.size() * sizeof(double)));
            EXPECT_EQ(0, std::memcmp(a.q_samples.data(), b.q_samples.data(), a.size() * sizeof(double)));
        }
        EXPECT_EQ(encode_cwmf(back), bytes);
    }
}

TEST(Cwmf, HeaderLayout) {
    auto c = compress(gen_constant(0.5, 32e-9, 1e9, "ab"), CodecConfig{{TransformKind::IntDctW, 16}, 0.0, 16});
    std::vector<CompressedWaveform> lib{c};
    auto bytes = encode_cwmf(lib);
    ASSERT_GE(bytes.size(), 13u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CWMF");
    EXPECT_EQ(bytes[4], 1);    // version
    EXPECT_EQ(bytes[5], 2);    // int-dct-w
    EXPECT_EQ(bytes[6], 16);   // window size
    EXPECT_EQ(bytes[7], 0);    // scale 256, little-endian
    EXPECT_EQ(bytes[8], 1);
    EXPECT_EQ(bytes[9], 1);    // one entry
    // header 13 + label block 2 + 2 + length 4 + width 1 + threshold 8 + 2 windows x 2 channels x 2 slots x 2 bytes
    EXPECT_EQ(bytes.size(), 13u + 4u + 4u + 1u + 8u + 16u);
    // first I window: DC then the codeword
    const std::size_t first_slot = 13 + 4 + 4 + 1 + 8;
    std::int16_t codeword = static_cast<std::int16_t>(bytes[first_slot + 2] | bytes[first_slot + 3] << 8);
    EXPECT_EQ(codeword, RleCodeword::kSignature);
}

TEST(Cwmf, RejectsUnsupportedContent) {
    auto w = gen_constant(0.5, 32e-9, 1e9);
    std::vector<CompressedWaveform> dctn{compress(w, CodecConfig{{TransformKind::DctN, 16}, 0.0, 16})};
    EXPECT_THROW(encode_cwmf(dctn), ValidationError);
    std::vector<CompressedWaveform> mixed{compress(w, CodecConfig{{TransformKind::IntDctW, 16}, 0.0, 16}),
                                          compress(w, CodecConfig{{TransformKind::IntDctW, 8}, 0.0, 16})};
    EXPECT_THROW(encode_cwmf(mixed), ValidationError);
}

TEST(Cwmf, CorruptInputsAreDetected) {
    auto lib = compress_all(small_library(), {TransformKind::IntDctW, 16}, 1e-5);
    const auto bytes = encode_cwmf(lib);
    auto mutate = [&](auto &&edit) {
        auto copy = bytes;
        edit(copy);
        return copy;
    };
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b[0] = 'X'; })), CorruptStream);
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b[4] = 9; })), CorruptStream);
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b[5] = 0; })), CorruptStream);
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b[6] = 32; })), CorruptStream);
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b[7] = 7; })), CorruptStream);
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b.pop_back(); })), CorruptStream);
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b.push_back(0); })), CorruptStream);
    EXPECT_THROW(decode_cwmf(mutate([](auto &b) { b.resize(20); })), CorruptStream);
    EXPECT_THROW(read_cwmf("/nonexistent/x.cwmf"), IoError);

    // Random single-byte flips either decode or raise CorruptStream, never anything else.
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> pos(0, bytes.size() - 1);
    std::uniform_int_distribution<int> val(0, 255);
    for (int trial = 0; trial < 2000; ++trial) {
        auto copy = bytes;
        copy[pos(rng)] = static_cast<std::uint8_t>(val(rng));
        try {
            auto out = decode_cwmf(copy);
            for (const auto &c : out) decompress(c);
        } catch (const CorruptStream &) {
        }
    }
}

TEST(Cwmf, FileRoundTripMatchesInMemory) {
    auto lib = small_library();
    auto compressed = compress_all(lib, {TransformKind::IntDctW, 16}, 1e-5);
    auto path = (temp_dir() / "lib.cwmf").string();
    write_cwmf(path, compressed);
    auto back = read_cwmf(path, lib.sample_rate_hz);
    ASSERT_EQ(back.size(), compressed.size());
    for (std::size_t n = 0; n < back.size(); ++n) {
        auto a = decompress(back[n]), b = decompress(compressed[n]);
        EXPECT_EQ(a.i_samples, b.i_samples);
        EXPECT_EQ(a.q_samples, b.q_samples);
    }
}

TEST(Golden, CompressedFilesAreStable) {
    auto lib = read_library(std::string(WAVECOMP_GOLDEN_DIR) + "/library.json");
    EXPECT_EQ(encode_cwmf(compress_all(lib, {TransformKind::IntDctW, 16}, 1e-5)), golden("int_dct_w16.cwmf"));
    EXPECT_EQ(encode_cwmf(compress_all(lib, {TransformKind::IntDctW, 8}, 1e-5)), golden("int_dct_w8.cwmf"));
}

TEST(Golden, LibraryMatchesGenerator) {
    CorpusParams p;
    p.qubits = 3;
    auto lib = generate_corpus(p);
    auto stored = read_library(std::string(WAVECOMP_GOLDEN_DIR) + "/library.json");
    ASSERT_EQ(stored.entries.size(), lib.entries.size());
    for (std::size_t n = 0; n < lib.entries.size(); ++n) {
        EXPECT_EQ(stored.entries[n].i_samples, lib.entries[n].i_samples);
        EXPECT_EQ(stored.entries[n].q_samples, lib.entries[n].q_samples);
    }
}
