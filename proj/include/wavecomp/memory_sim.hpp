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
#include <deque>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wavecomp/codec.hpp"
#include "wavecomp/errors.hpp"

namespace wavecomp {

/// Fabric/DAC clocking and memory resources of one controller.
struct PipelineConfig {
    double fabric_clock_hz = 0.0;
    double dac_rate_sps = 0.0;
    int window_size = 16;
    int idct_latency_cycles = 1;
    int banks_available = 1 << 20;  // across both channels

    double clock_ratio() const { return dac_rate_sps / fabric_clock_hz; }
};

/// Config with a given DAC/fabric ratio on a 300 MHz fabric.
inline PipelineConfig pipeline_for_ratio(double ratio, int window_size, int banks_available = 1 << 20) {
    PipelineConfig cfg;
    cfg.fabric_clock_hz = 300e6;
    cfg.dac_rate_sps = ratio * cfg.fabric_clock_hz;
    cfg.window_size = window_size;
    cfg.banks_available = banks_available;
    return cfg;
}

inline void validate(const PipelineConfig &cfg) {
    if (!(cfg.fabric_clock_hz > 0.0)) throw InvalidParameter("fabric clock must be positive");
    if (!(cfg.dac_rate_sps >= cfg.fabric_clock_hz)) {
        throw InvalidParameter("DAC rate must be at least the fabric clock (clock ratio >= 1)");
    }
    if (cfg.window_size != 8 && cfg.window_size != 16) {
        throw InvalidParameter("pipeline window size must be 8 or 16, got " + std::to_string(cfg.window_size));
    }
    if (cfg.idct_latency_cycles < 1) throw InvalidParameter("IDCT latency must be at least one cycle");
    if (cfg.banks_available < 1) throw InvalidParameter("at least one bank must be available");
}

namespace detail {

// ceil() that ignores floating-point dust on exact ratios such as 4.8e9 / 300e6.
inline int ceil_ratio(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<int>(r);
    return static_cast<int>(std::ceil(x));
}

}  // namespace detail

enum class BankMode { Uncompressed, Compressed };

/// Interleaving of one waveform across memory banks, per channel.
struct BankPlan {
    int banks_per_channel = 0;
    BankMode mode = BankMode::Uncompressed;
    int slots_per_fetch = 0;  // slots read per fabric cycle per channel
    int idct_engines = 0;
    int uniform_width = 0;
    bool operator==(const BankPlan &) const = default;
};

namespace detail {

inline BankPlan uncompressed_plan(const PipelineConfig &cfg) {
    int banks = ceil_ratio(cfg.clock_ratio());
    return {banks, BankMode::Uncompressed, banks, 0, 1};
}

inline BankPlan compressed_plan(const PipelineConfig &cfg, int uniform_width) {
    if (uniform_width < 1 || uniform_width > cfg.window_size) {
        throw InvalidParameter("uniform width must lie in [1, window size], got " + std::to_string(uniform_width));
    }
    int engines = ceil_ratio(cfg.clock_ratio() / cfg.window_size);
    int banks = uniform_width * engines;
    return {banks, BankMode::Compressed, banks, engines, uniform_width};
}

inline BankPlan check_capacity(BankPlan plan, const PipelineConfig &cfg) {
    if (2 * plan.banks_per_channel > cfg.banks_available) {
        throw CapacityError("plan needs " + std::to_string(2 * plan.banks_per_channel) + " banks for I and Q, only " +
                            std::to_string(cfg.banks_available) + " available");
    }
    return plan;
}

}  // namespace detail

/// ceil(ratio) banks per channel, one sample per bank per fabric cycle.
inline BankPlan plan_banks(std::size_t /*uncompressed_length*/, const PipelineConfig &cfg) {
    validate(cfg);
    return detail::check_capacity(detail::uncompressed_plan(cfg), cfg);
}

/// uniform_width * ceil(ratio / window_size) banks per channel: one bank per
/// slot for each window-size IDCT engine needed to keep up with the DAC.
inline BankPlan plan_banks(const CompressedWaveform &c, const PipelineConfig &cfg) {
    validate(cfg);
    if (c.window_size != cfg.window_size) {
        throw ValidationError("waveform '" + c.label + "' uses window size " + std::to_string(c.window_size) +
                              " but the pipeline is configured for " + std::to_string(cfg.window_size));
    }
    return detail::check_capacity(detail::compressed_plan(cfg, c.uniform_width), cfg);
}

/// Qubits per controller relative to uncompressed storage, as an exact bank ratio.
struct CapacityGain {
    int uncompressed_banks = 0;
    int compressed_banks = 0;

    double value() const { return static_cast<double>(uncompressed_banks) / static_cast<double>(compressed_banks); }
    /// Exact comparison against num/den.
    bool equals(long num, long den) const {
        return static_cast<long>(uncompressed_banks) * den == static_cast<long>(compressed_banks) * num;
    }
};

inline CapacityGain qubit_capacity_gain(const PipelineConfig &cfg, int uniform_width) {
    validate(cfg);
    return {detail::uncompressed_plan(cfg).banks_per_channel,
            detail::compressed_plan(cfg, uniform_width).banks_per_channel};
}

// ---------------------------------------------------------------------------
// Cycle-level streaming model.

struct CycleRecord {
    std::uint64_t cycle = 0;
    int fetches = 0;         // memory accesses this cycle, both channels
    int decoder_out = 0;     // samples entering the DAC FIFO
    int fifo_occupancy = 0;  // after the DAC has drawn its samples
    bool underrun = false;
};

struct StreamTrace {
    std::vector<CycleRecord> cycles;
    std::uint64_t underrun_count = 0;
    std::uint64_t memory_accesses = 0;
    std::uint64_t idct_invocations = 0;
};

struct AccessStats {
    std::uint64_t memory_accesses = 0;
    std::uint64_t idct_invocations = 0;
    std::string mode;
    bool operator==(const AccessStats &) const = default;
};

/// Minimal description of a stream for the simulator.
struct StreamShape {
    std::size_t original_length = 0;
    int window_size = 16;
    int uniform_width = 1;
};

inline StreamShape shape_of(const CompressedWaveform &c) {
    return {c.original_length, c.window_size, c.uniform_width};
}

namespace detail {

// One memory transaction group: a compressed window, a raw sample pair, or a
// plateau codeword that bypasses the IDCT.
struct FetchUnit {
    int slots = 1;               // bank slots per channel
    int accesses_per_slot = 2;   // memory accesses per slot across channels
    std::size_t samples = 0;
    bool idct = false;
    bool bypass = false;
};

struct InFlight {
    std::uint64_t ready = 0;
    std::size_t remaining = 0;
    bool bypass = false;
};

struct SimParams {
    int banks = 1;
    int engines = 1;
    double ratio = 1.0;
    int latency = 1;
    std::size_t depth = 0;     // DAC FIFO, samples
    std::size_t pipeline = 0;  // samples held in the decode pipeline registers
    std::size_t prime = 0;
    std::size_t burst = 0;     // bypass samples per cycle
};

inline StreamTrace run_stream(const std::vector<FetchUnit> &units, std::size_t total, const SimParams &p) {
    if (p.banks < 1) throw InvalidParameter("simulation needs at least one bank");
    StreamTrace trace;
    std::deque<InFlight> in_flight;
    std::size_t reserved = 0;  // fetched samples not yet in the FIFO
    std::size_t fifo = 0;
    std::size_t consumed = 0;
    std::size_t unit = 0;
    int progress = 0;  // slots of the current unit already read
    bool started = false;
    std::uint64_t draw_index = 0;
    auto due = [&](std::uint64_t k) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(k) * p.ratio + 1e-9));
    };

    std::size_t slot_total = 0;
    for (const auto &u : units) slot_total += static_cast<std::size_t>(u.slots);
    const std::uint64_t cycle_limit = 64 + 4 * (slot_total + total) + static_cast<std::uint64_t>(p.latency) * 4;

    for (std::uint64_t t = 0; consumed < total; ++t) {
        if (t > cycle_limit) throw std::logic_error("stream simulation failed to make progress");
        CycleRecord rec;
        rec.cycle = t;

        // Decoded windows enter the FIFO whole; plateau bursts may be split.
        std::size_t bypass_sent = 0;
        while (!in_flight.empty() && in_flight.front().ready <= t) {
            auto &f = in_flight.front();
            std::size_t room = p.depth - fifo;
            std::size_t n = f.remaining;
            if (f.bypass) {
                n = std::min({n, p.burst - bypass_sent, room});
            } else if (n > room) {
                break;
            }
            fifo += n;
            reserved -= n;
            f.remaining -= n;
            rec.decoder_out += static_cast<int>(n);
            if (f.bypass) bypass_sent += n;
            if (f.remaining > 0) break;
            in_flight.pop_front();
        }

        if (!started && fifo >= p.prime) started = true;
        if (started) {
            std::size_t need = std::min(due(draw_index + 1) - due(draw_index), total - consumed);
            std::size_t take = std::min(need, fifo);
            if (take < need) {
                rec.underrun = true;
                ++trace.underrun_count;
            }
            fifo -= take;
            consumed += take;
            ++draw_index;
        }

        int capacity = p.banks;
        int completed = 0;
        while (capacity > 0 && unit < units.size()) {
            const auto &u = units[unit];
            if (progress == 0) {
                std::size_t claim = u.bypass ? 0 : u.samples;
                if (fifo + reserved + claim > p.depth + p.pipeline) break;
            }
            if (u.idct && completed == p.engines && progress + capacity >= u.slots) break;
            int take = std::min(capacity, u.slots - progress);
            capacity -= take;
            progress += take;
            rec.fetches += take * u.accesses_per_slot;
            if (progress == u.slots) {
                in_flight.push_back({t + static_cast<std::uint64_t>(p.latency), u.samples, u.bypass});
                reserved += u.samples;
                if (u.idct) {
                    ++completed;
                    trace.idct_invocations += 2;
                }
                ++unit;
                progress = 0;
            }
        }
        rec.fifo_occupancy = static_cast<int>(fifo);
        trace.memory_accesses += static_cast<std::uint64_t>(rec.fetches);
        trace.cycles.push_back(rec);
    }
    return trace;
}

inline SimParams compressed_params(const PipelineConfig &cfg, int banks, std::size_t total) {
    SimParams p;
    p.banks = banks;
    p.engines = ceil_ratio(cfg.clock_ratio() / cfg.window_size);
    p.ratio = cfg.clock_ratio();
    p.latency = cfg.idct_latency_cycles;
    const auto per_cycle = static_cast<std::size_t>(p.engines * cfg.window_size);
    const auto span = std::max(per_cycle, static_cast<std::size_t>(ceil_ratio(cfg.clock_ratio())));
    p.depth = 2 * span;
    p.pipeline = static_cast<std::size_t>(p.latency) * per_cycle;
    p.prime = std::min(total, span);
    p.burst = per_cycle;
    return p;
}

inline std::vector<FetchUnit> window_units(std::size_t first, std::size_t count, const StreamShape &s) {
    std::vector<FetchUnit> units;
    const auto ws = static_cast<std::size_t>(s.window_size);
    for (std::size_t k = first; k < first + count; ++k) {
        std::size_t samples = std::min(ws, s.original_length - k * ws);
        units.push_back({s.uniform_width, 2, samples, true, false});
    }
    return units;
}

}  // namespace detail

/// Streams a compressed waveform through `banks` banks per channel. Each
/// fabric cycle reads one slot per bank; a complete window is RLE-decoded and
/// inverse transformed by one of ceil(ratio / window) engines, leaving the
/// pipeline after the IDCT latency. The DAC draws clock_ratio samples per
/// cycle from a FIFO of 2 * max(engines * window, ceil(ratio)) samples and
/// starts once the FIFO holds half of that.
inline StreamTrace simulate_stream(const StreamShape &s, const PipelineConfig &cfg, int banks) {
    validate(cfg);
    if (s.window_size != cfg.window_size) throw ValidationError("stream and pipeline window sizes differ");
    if (s.original_length == 0) return {};
    const auto ws = static_cast<std::size_t>(s.window_size);
    auto units = detail::window_units(0, (s.original_length + ws - 1) / ws, s);
    return detail::run_stream(units, s.original_length, detail::compressed_params(cfg, banks, s.original_length));
}

inline StreamTrace simulate_stream(const CompressedWaveform &c, const PipelineConfig &cfg, int banks) {
    return simulate_stream(shape_of(c), cfg, banks);
}

/// Simulation at the planned bank count.
inline StreamTrace simulate_stream(const CompressedWaveform &c, const PipelineConfig &cfg) {
    return simulate_stream(c, cfg, plan_banks(c, cfg).banks_per_channel);
}

/// Uncompressed baseline: one raw sample per bank per cycle, one cycle read latency.
inline StreamTrace simulate_uncompressed(std::size_t length, const PipelineConfig &cfg, int banks) {
    validate(cfg);
    if (length == 0) return {};
    const int ratio_ceil = detail::ceil_ratio(cfg.clock_ratio());
    detail::SimParams p;
    p.banks = banks;
    p.engines = banks;
    p.ratio = cfg.clock_ratio();
    p.latency = 1;
    p.depth = 2 * static_cast<std::size_t>(ratio_ceil);
    p.pipeline = static_cast<std::size_t>(banks);
    p.prime = std::min(length, static_cast<std::size_t>(ratio_ceil));
    p.burst = p.depth;
    std::vector<detail::FetchUnit> units(length, detail::FetchUnit{1, 2, 1, false, false});
    return detail::run_stream(units, length, p);
}

inline AccessStats access_stats(const StreamTrace &t, std::string mode) {
    return {t.memory_accesses, t.idct_invocations, std::move(mode)};
}

/// Occupied slots per window (codeword included, I/Q padding removed) over
/// both channels of every waveform.
inline std::map<int, std::uint64_t> samples_per_window_histogram(std::span<const CompressedWaveform> library) {
    if (library.empty()) throw ShapeError("histogram needs a non-empty library");
    std::map<int, std::uint64_t> hist;
    for (const auto &c : library) {
        for (const auto *channel : {&c.i_windows, &c.q_windows}) {
            for (const auto &w : *channel) {
                auto canonical = rle_encode(rle_decode(w, static_cast<std::size_t>(c.window_size)));
                ++hist[canonical.occupied_slots()];
            }
        }
    }
    return hist;
}

// ---------------------------------------------------------------------------
// Adaptive decompression: constant stretches skip memory and the IDCT.

/// A run of whole windows that decode to one constant I/Q pair. In the
/// adaptive stream the run is a single codeword holding the value and length.
struct PlateauRun {
    std::size_t first_window = 0;
    std::size_t window_count = 0;
    std::size_t samples = 0;
    double i_value = 0.0;
    double q_value = 0.0;
    bool operator==(const PlateauRun &) const = default;
};

/// Runs of >= 2 windows (2 * window_size samples) whose decoded samples are all identical.
inline std::vector<PlateauRun> find_plateaus(const CompressedWaveform &c) {
    std::vector<PlateauRun> runs;
    const auto ws = static_cast<std::size_t>(c.window_size);
    auto constant_value = [&](std::size_t k, std::pair<double, double> &value) {
        auto i = detail::decode_window(c, c.i_windows, k);
        auto q = detail::decode_window(c, c.q_windows, k);
        std::size_t n = std::min(ws, c.original_length - k * ws);
        for (std::size_t s = 1; s < n; ++s) {
            if (i[s] != i[0] || q[s] != q[0]) return false;
        }
        value = {i[0], q[0]};
        return true;
    };

    std::optional<PlateauRun> open;
    auto close = [&] {
        if (open && open->samples >= 2 * ws) runs.push_back(*open);
        open.reset();
    };
    for (std::size_t k = 0; k < c.window_count(); ++k) {
        std::pair<double, double> v;
        if (!constant_value(k, v)) {
            close();
            continue;
        }
        std::size_t n = std::min(ws, c.original_length - k * ws);
        if (open && open->i_value == v.first && open->q_value == v.second) {
            ++open->window_count;
            open->samples += n;
        } else {
            close();
            open = PlateauRun{k, 1, n, v.first, v.second};
        }
    }
    close();
    return runs;
}

struct AdaptiveResult {
    StreamTrace trace;
    AccessStats adaptive;
    AccessStats baseline;
    std::vector<PlateauRun> plateaus;
};

/// Output of the adaptive pipeline: IDCT windows outside plateaus, the
/// codeword value repeated inside them.
inline Waveform adaptive_decompress(const CompressedWaveform &c, std::span<const PlateauRun> plateaus) {
    Waveform w;
    w.label = c.label;
    w.sample_rate_hz = c.sample_rate_hz;
    const auto ws = static_cast<std::size_t>(c.window_size);
    std::size_t next = 0;
    for (std::size_t k = 0; k < c.window_count();) {
        if (next < plateaus.size() && plateaus[next].first_window == k) {
            const auto &run = plateaus[next++];
            w.i_samples.insert(w.i_samples.end(), run.samples, run.i_value);
            w.q_samples.insert(w.q_samples.end(), run.samples, run.q_value);
            k += run.window_count;
            continue;
        }
        std::size_t n = std::min(ws, c.original_length - k * ws);
        auto i = detail::decode_window(c, c.i_windows, k);
        auto q = detail::decode_window(c, c.q_windows, k);
        w.i_samples.insert(w.i_samples.end(), i.begin(), i.begin() + static_cast<std::ptrdiff_t>(n));
        w.q_samples.insert(w.q_samples.end(), q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n));
        ++k;
    }
    return w;
}

/// Streams `c` with plateaus served from one codeword each: one memory
/// access per plateau, no IDCT, samples pushed straight into the DAC FIFO.
inline AdaptiveResult adaptive_stream(const CompressedWaveform &c, const PipelineConfig &cfg, int banks) {
    validate(cfg);
    AdaptiveResult r;
    r.plateaus = find_plateaus(c);
    r.baseline = access_stats(simulate_stream(c, cfg, banks), "compressed");
    if (c.original_length == 0) return r;

    const auto shape = shape_of(c);
    std::vector<detail::FetchUnit> units;
    std::size_t k = 0;
    for (const auto &run : r.plateaus) {
        auto before = detail::window_units(k, run.first_window - k, shape);
        units.insert(units.end(), before.begin(), before.end());
        units.push_back({1, 1, run.samples, false, true});
        k = run.first_window + run.window_count;
    }
    auto after = detail::window_units(k, c.window_count() - k, shape);
    units.insert(units.end(), after.begin(), after.end());

    r.trace = detail::run_stream(units, c.original_length, detail::compressed_params(cfg, banks, c.original_length));
    r.adaptive = access_stats(r.trace, "adaptive");
    return r;
}

inline AdaptiveResult adaptive_stream(const CompressedWaveform &c, const PipelineConfig &cfg) {
    return adaptive_stream(c, cfg, plan_banks(c, cfg).banks_per_channel);
}

struct EnergyWeights {
    double memory_access = 1.0;
    double idct_invocation = 0.0;
};

/// Relative energy: weighted event count. Only ratios between runs are meaningful.
inline double power_proxy(const AccessStats &stats, const EnergyWeights &w) {
    if (!(w.memory_access >= 0.0) || !(w.idct_invocation >= 0.0)) {
        throw InvalidParameter("energy weights must be non-negative");
    }
    return w.memory_access * static_cast<double>(stats.memory_accesses) +
           w.idct_invocation * static_cast<double>(stats.idct_invocations);
}

inline std::string trace_to_csv(const StreamTrace &t) {
    std::ostringstream out;
    out << "cycle,fetches,decoder_out,fifo_occupancy,underrun\n";
    for (const auto &c : t.cycles) {
        out << c.cycle << ',' << c.fetches << ',' << c.decoder_out << ',' << c.fifo_occupancy << ','
            << (c.underrun ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace wavecomp
