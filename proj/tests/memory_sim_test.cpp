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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "wavecomp/corpus.hpp"
#include "wavecomp/memory_sim.hpp"

using namespace wavecomp;

namespace {

const CodecConfig kIntW16{{TransformKind::IntDctW, 16}, 0.0, 16};

CompressedWaveform tuned(const Waveform &w, int ws = 16, double eps = 1e-5) {
    return *fidelity_aware_compress(w, eps, CodecConfig{{TransformKind::IntDctW, ws}, 0.0, 16}).compressed;
}

// Samples per fabric cycle the banks can deliver, counting whole windows only.
double delivery_rate(int banks, int ws, int width, double ratio) {
    int engines = static_cast<int>(std::ceil(ratio / ws - 1e-9));
    return std::min(static_cast<double>(banks) * ws / width, static_cast<double>(engines * ws));
}

}  // namespace

TEST(PlanBanks, WorkedExamples) {
    auto cfg16 = pipeline_for_ratio(16, 16);
    auto p = plan_banks(std::size_t{1362}, cfg16);
    EXPECT_EQ(p.banks_per_channel, 16);
    EXPECT_EQ(p.mode, BankMode::Uncompressed);

    CompressedWaveform c = tuned(gen_flat_top(0.4, 20e-9, 260e-9, kIbmSampleRate));
    ASSERT_EQ(c.uniform_width, 3);
    auto cp = plan_banks(c, cfg16);
    EXPECT_EQ(cp.banks_per_channel, 3);
    EXPECT_EQ(cp.mode, BankMode::Compressed);
    EXPECT_EQ(cp.idct_engines, 1);

    auto c8 = tuned(gen_flat_top(0.4, 20e-9, 260e-9, kIbmSampleRate), 8);
    ASSERT_EQ(c8.uniform_width, 3);
    auto cp8 = plan_banks(c8, pipeline_for_ratio(16, 8));
    EXPECT_EQ(cp8.banks_per_channel, 6);
    EXPECT_EQ(cp8.idct_engines, 2);
}

TEST(PlanBanks, Errors) {
    auto c = tuned(gen_drag(0.2, 7.5e-9, 0.5, 30e-9, kIbmSampleRate));
    EXPECT_THROW(plan_banks(c, pipeline_for_ratio(16, 16, 5)), CapacityError);
    EXPECT_NO_THROW(plan_banks(c, pipeline_for_ratio(16, 16, 6)));
    EXPECT_THROW(plan_banks(std::size_t{10}, pipeline_for_ratio(16, 16, 31)), CapacityError);
    EXPECT_THROW(plan_banks(c, pipeline_for_ratio(16, 8)), ValidationError);
    EXPECT_THROW(plan_banks(std::size_t{10}, pipeline_for_ratio(0.5, 16)), InvalidParameter);
    auto bad = pipeline_for_ratio(16, 16);
    bad.idct_latency_cycles = 0;
    EXPECT_THROW(validate(bad), InvalidParameter);
    bad = pipeline_for_ratio(16, 12);
    EXPECT_THROW(validate(bad), InvalidParameter);
}

TEST(CapacityGain, ExactBankRatios) {
    auto g8 = qubit_capacity_gain(pipeline_for_ratio(16, 8), 3);
    EXPECT_TRUE(g8.equals(16, 6));
    EXPECT_TRUE(g8.equals(8, 3));
    EXPECT_NEAR(g8.value(), 2.667, 1e-3);
    auto g16 = qubit_capacity_gain(pipeline_for_ratio(16, 16), 3);
    EXPECT_TRUE(g16.equals(16, 3));
    EXPECT_NEAR(g16.value(), 5.333, 1e-3);
    EXPECT_TRUE(qubit_capacity_gain(pipeline_for_ratio(6, 8), 3).equals(2, 1));
    // Exact ratios from real clocks despite binary rounding.
    PipelineConfig real{300e6, 4.8e9, 16, 1, 1 << 20};
    EXPECT_TRUE(qubit_capacity_gain(real, 3).equals(16, 3));
}

TEST(CapacityGain, NonIntegerRatioLosesALittle) {
    // 17 banks against 2 engines * 3 slots: 17/6 < 17.0/16 * 16/3.
    auto g = qubit_capacity_gain(pipeline_for_ratio(16.5, 16), 3);
    EXPECT_EQ(g.uncompressed_banks, 17);
    EXPECT_EQ(g.compressed_banks, 6);
    EXPECT_LT(g.value(), 16.5 / 3);
}

TEST(CapacityGain, EqualsPlanRatioAndIsMonotone) {
    for (double r : {1.0, 2.5, 6.0, 7.5, 8.0, 12.0, 16.0, 20.0, 24.0, 32.0, 48.0}) {
        for (int ws : {8, 16}) {
            auto cfg = pipeline_for_ratio(r, ws);
            double previous = INFINITY;
            for (int w = 1; w <= 8; ++w) {
                auto g = qubit_capacity_gain(cfg, w);
                EXPECT_EQ(g.uncompressed_banks, plan_banks(std::size_t{1}, cfg).banks_per_channel);
                EXPECT_LE(g.value(), previous) << r << ' ' << ws << ' ' << w;
                previous = g.value();
                if (ws == 8) {
                    EXPECT_LE(g.value(), qubit_capacity_gain(pipeline_for_ratio(r, 16), w).value());
                }
            }
        }
    }
}

TEST(SimulateStream, WorkedExamples) {
    auto cfg = pipeline_for_ratio(16, 16);
    StreamShape s{1362, 16, 3};
    EXPECT_EQ(simulate_stream(s, cfg, 3).underrun_count, 0u);
    EXPECT_GT(simulate_stream(s, cfg, 2).underrun_count, 0u);
    EXPECT_EQ(simulate_uncompressed(1362, cfg, 16).underrun_count, 0u);
    EXPECT_GT(simulate_uncompressed(1362, cfg, 15).underrun_count, 0u);
}

TEST(SimulateStream, TraceAccounting) {
    auto cfg = pipeline_for_ratio(16, 16);
    StreamShape s{1362, 16, 3};
    auto t = simulate_stream(s, cfg, 3);
    std::size_t windows = (1362 + 15) / 16;
    EXPECT_EQ(t.memory_accesses, 2 * 3 * windows);
    EXPECT_EQ(t.idct_invocations, 2 * windows);
    std::uint64_t fetched = 0, delivered = 0;
    for (const auto &c : t.cycles) {
        fetched += static_cast<std::uint64_t>(c.fetches);
        delivered += static_cast<std::uint64_t>(c.decoder_out);
        EXPECT_LE(c.fifo_occupancy, 32);
        EXPECT_GE(c.fifo_occupancy, 0);
    }
    EXPECT_EQ(fetched, t.memory_accesses);
    EXPECT_EQ(delivered, 1362u);  // the tail window only emits its real samples

    auto u = simulate_uncompressed(1362, cfg, 16);
    EXPECT_EQ(u.memory_accesses, 2u * 1362);
    EXPECT_EQ(u.idct_invocations, 0u);
}

TEST(SimulateStream, CompressedWaveformOverloads) {
    auto c = tuned(gen_flat_top(0.3, 20e-9, 260e-9, kIbmSampleRate));
    auto cfg = pipeline_for_ratio(16, 16);
    auto planned = simulate_stream(c, cfg);
    EXPECT_EQ(planned.underrun_count, 0u);
    EXPECT_EQ(planned.memory_accesses, simulate_stream(shape_of(c), cfg, 3).memory_accesses);
    EXPECT_THROW(simulate_stream(c, pipeline_for_ratio(16, 8), 6), ValidationError);
    EXPECT_THROW(simulate_stream(shape_of(c), cfg, 0), InvalidParameter);
}

TEST(SimulateStream, Deterministic) {
    auto cfg = pipeline_for_ratio(13.7, 8);
    cfg.idct_latency_cycles = 3;
    StreamShape s{2000, 8, 5};
    EXPECT_EQ(trace_to_csv(simulate_stream(s, cfg, 9)), trace_to_csv(simulate_stream(s, cfg, 9)));
}

// Planned banks never starve the DAC; banks that cannot deliver the DAC rate
// always do once the stream is long enough to drain the buffers.
TEST(SimulateStream, RandomizedFeasibilitySweep) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> real_ratio(1.0, 40.0);
    std::uniform_int_distribution<int> length(1, 3000), banks(1, 40), latency(1, 4);
    int infeasible_checked = 0;
    for (int trial = 0; trial < 4000; ++trial) {
        int ws = trial % 2 ? 8 : 16;
        int width = 1 + static_cast<int>(rng() % static_cast<unsigned>(ws));
        double r = trial % 3 == 0 ? static_cast<double>(1 + rng() % 40) : real_ratio(rng);
        auto cfg = pipeline_for_ratio(r, ws);
        cfg.idct_latency_cycles = latency(rng);
        int b = banks(rng);
        auto len = static_cast<std::size_t>(length(rng));
        auto trace = simulate_stream(StreamShape{len, ws, width}, cfg, b);
        int plan = qubit_capacity_gain(cfg, width).compressed_banks;
        if (b >= plan) {
            EXPECT_EQ(trace.underrun_count, 0u) << "r=" << r << " ws=" << ws << " w=" << width << " b=" << b
                                                << " len=" << len << " lat=" << cfg.idct_latency_cycles;
        }
        int engines = static_cast<int>(std::ceil(r / ws - 1e-9));
        double span = std::max<double>(engines * ws, std::ceil(r - 1e-9));
        double slack = 2 * span + cfg.idct_latency_cycles * engines * ws + ws;
        double rate = delivery_rate(b, ws, width, r);
        if (rate < r && (r - rate) * (static_cast<double>(len) / r) > slack) {
            ++infeasible_checked;
            EXPECT_GT(trace.underrun_count, 0u) << "r=" << r << " ws=" << ws << " w=" << width << " b=" << b;
        }
    }
    EXPECT_GT(infeasible_checked, 500);
}

TEST(SimulateStream, UncompressedNeedsCeilRatioBanks) {
    for (double r : {1.0, 4.0, 6.0, 7.5, 16.0, 23.3}) {
        auto cfg = pipeline_for_ratio(r, 16);
        int plan = plan_banks(std::size_t{1}, cfg).banks_per_channel;
        EXPECT_EQ(simulate_uncompressed(3000, cfg, plan).underrun_count, 0u) << r;
        if (plan > 1) {
            EXPECT_GT(simulate_uncompressed(3000, cfg, plan - 1).underrun_count, 0u) << r;
        }
    }
}

TEST(SimulateStream, EmptyWaveform) {
    auto t = simulate_stream(StreamShape{0, 16, 1}, pipeline_for_ratio(16, 16), 1);
    EXPECT_EQ(t.underrun_count, 0u);
    EXPECT_EQ(t.memory_accesses, 0u);
}

TEST(Histogram, ConstantLibraryUsesAtMostTwoSlots) {
    std::vector<CompressedWaveform> lib;
    for (double a : {0.1, -0.4, 0.9}) lib.push_back(tuned(gen_constant(a, 60e-9, kIbmSampleRate, "c", 0.7)));
    auto h = samples_per_window_histogram(lib);
    ASSERT_FALSE(h.empty());
    EXPECT_LE(h.rbegin()->first, 2);
    EXPECT_GE(h.begin()->first, 1);
}

TEST(Histogram, CorpusShapeAndConservation) {
    auto lib = generate_corpus(CorpusParams{});
    std::vector<CompressedWaveform> out;
    for (const auto &w : lib.entries) out.push_back(tuned(w));
    auto h = samples_per_window_histogram(out);
    std::uint64_t total = 0, small = 0;
    for (auto [slots, n] : h) {
        total += n;
        if (slots <= 3) small += n;
    }
    std::uint64_t windows = 0;
    for (const auto &c : out) windows += c.window_count();
    EXPECT_EQ(total, 2 * windows);
    EXPECT_GE(h.begin()->first, 1);
    EXPECT_LE(h.rbegin()->first, 4);
    EXPECT_GE(static_cast<double>(small), 0.95 * static_cast<double>(total));
}

TEST(Histogram, IgnoresChannelPadding) {
    // Q is identically zero: its windows occupy one slot even though they are padded to I's width.
    auto c = tuned(gen_flat_top(0.5, 20e-9, 60e-9, kIbmSampleRate, "ft", 0.0));
    std::vector<CompressedWaveform> lib{c};
    auto h = samples_per_window_histogram(lib);
    EXPECT_GE(h[1], c.window_count());
    EXPECT_THROW(samples_per_window_histogram(std::span<const CompressedWaveform>{}), ShapeError);
}

TEST(Adaptive, FlatTopBypassesPlateau) {
    auto c = tuned(gen_flat_top(0.3, 20e-9, 100e-9, kIbmSampleRate, "ft", 0.3));
    auto a = adaptive_stream(c, pipeline_for_ratio(16, 16));
    ASSERT_FALSE(a.plateaus.empty());
    EXPECT_EQ(a.trace.underrun_count, 0u);
    double access_cut = 1.0 - static_cast<double>(a.adaptive.memory_accesses) / a.baseline.memory_accesses;
    double idct_cut = 1.0 - static_cast<double>(a.adaptive.idct_invocations) / a.baseline.idct_invocations;
    EXPECT_GE(access_cut, 0.65);
    EXPECT_GE(idct_cut, 0.65);
    EXPECT_EQ(a.adaptive.mode, "adaptive");
    EXPECT_EQ(a.baseline.mode, "compressed");

    auto normal = decompress(c);
    auto bypass = adaptive_decompress(c, a.plateaus);
    EXPECT_EQ(normal.i_samples, bypass.i_samples);
    EXPECT_EQ(normal.q_samples, bypass.q_samples);

    // No fetch lands inside a plateau's cycle span beyond the single codeword.
    std::uint64_t fetched = 0;
    for (const auto &cy : a.trace.cycles) fetched += static_cast<std::uint64_t>(cy.fetches);
    EXPECT_EQ(fetched, a.adaptive.memory_accesses);
}

TEST(Adaptive, NothingToBypassWithoutPlateau) {
    auto c = tuned(gen_flat_top(0.3, 20e-9, 0.0, kIbmSampleRate, "ramp"));
    auto a = adaptive_stream(c, pipeline_for_ratio(16, 16));
    EXPECT_TRUE(a.plateaus.empty());
    EXPECT_EQ(a.adaptive.memory_accesses, a.baseline.memory_accesses);
    EXPECT_EQ(a.adaptive.idct_invocations, a.baseline.idct_invocations);
}

TEST(Adaptive, ConstantWaveformIsOneCodeword) {
    // 320 samples = 20 whole windows.
    Waveform w{std::vector<double>(320, 0.25), std::vector<double>(320, -0.125), kIbmSampleRate, "const"};
    auto c = tuned(w);
    auto a = adaptive_stream(c, pipeline_for_ratio(16, 16));
    ASSERT_EQ(a.plateaus.size(), 1u);
    EXPECT_EQ(a.plateaus[0].window_count, 20u);
    EXPECT_EQ(a.adaptive.memory_accesses, 1u);
    EXPECT_EQ(a.adaptive.idct_invocations, 0u);
    EXPECT_EQ(a.trace.underrun_count, 0u);
    auto out = adaptive_decompress(c, a.plateaus);
    EXPECT_EQ(out.i_samples, decompress(c).i_samples);
}

TEST(Adaptive, RandomFlatTopsAreBitExact) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> amp(0.05, 0.9), rise(8e-9, 30e-9), flat(0.0, 300e-9), ph(-3.1, 3.1);
    for (int trial = 0; trial < 60; ++trial) {
        int ws = trial % 2 ? 8 : 16;
        auto c = tuned(gen_flat_top(amp(rng), rise(rng), flat(rng), kIbmSampleRate, "ft", ph(rng)), ws);
        auto a = adaptive_stream(c, pipeline_for_ratio(16, ws));
        EXPECT_EQ(a.trace.underrun_count, 0u);
        EXPECT_LE(a.adaptive.memory_accesses, a.baseline.memory_accesses);
        auto normal = decompress(c);
        auto bypass = adaptive_decompress(c, a.plateaus);
        EXPECT_EQ(normal.i_samples, bypass.i_samples);
        EXPECT_EQ(normal.q_samples, bypass.q_samples);
        for (const auto &run : a.plateaus) EXPECT_GE(run.samples, 2u * static_cast<unsigned>(ws));
    }
}

TEST(PowerProxy, Examples) {
    EXPECT_EQ(power_proxy(AccessStats{}, EnergyWeights{}), 0.0);
    auto cfg = pipeline_for_ratio(16, 16);
    auto c = tuned(gen_flat_top(0.3, 20e-9, 260e-9, kIbmSampleRate));
    auto unc = access_stats(simulate_uncompressed(c.original_length, cfg, 16), "uncompressed");
    auto cmp = access_stats(simulate_stream(c, cfg), "compressed");
    EnergyWeights equal{1.0, 0.0};
    EXPECT_GE(power_proxy(unc, equal) / power_proxy(cmp, equal), 5.0);

    EnergyWeights w{0.7, 2.5}, w2{1.4, 5.0};
    EXPECT_DOUBLE_EQ(power_proxy(cmp, w2), 2 * power_proxy(cmp, w));
    EXPECT_DOUBLE_EQ(power_proxy(unc, w2) / power_proxy(cmp, w2), power_proxy(unc, w) / power_proxy(cmp, w));
    EXPECT_THROW(power_proxy(cmp, EnergyWeights{-1.0, 0.0}), InvalidParameter);
    EXPECT_THROW(power_proxy(cmp, EnergyWeights{1.0, NAN}), InvalidParameter);
}

TEST(TraceCsv, HeaderAndRows) {
    auto t = simulate_stream(StreamShape{40, 16, 2}, pipeline_for_ratio(16, 16), 1);
    auto csv = trace_to_csv(t);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "cycle,fetches,decoder_out,fifo_occupancy,underrun");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    }
    EXPECT_EQ(rows, t.cycles.size());
    EXPECT_GT(t.underrun_count, 0u);
}
