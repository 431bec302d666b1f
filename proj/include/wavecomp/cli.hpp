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
#include <cstdint>
#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavecomp/codec.hpp"
#include "wavecomp/corpus.hpp"
#include "wavecomp/errors.hpp"
#include "wavecomp/io.hpp"
#include "wavecomp/memory_sim.hpp"
#include "wavecomp/transform.hpp"
#include "wavecomp/waveform.hpp"

// Command implementations behind the wavecomp executable. Each command takes
// plain option structs so it can be driven from tests without a process.
namespace wavecomp::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitIo = 3,
    kExitNoSolution = 4,
};

/// The threshold search reached its floor without meeting the target error.
struct NoSolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CodecOptions {
    std::string variant = "int-dct-w";
    int window_size = 16;
    std::optional<double> target_error;
    std::optional<double> threshold;
    int bit_width = 16;
};

inline TransformVariant parse_variant(const std::string &name, int window_size) {
    TransformVariant v;
    if (name == "dct-n") {
        v.kind = TransformKind::DctN;
    } else if (name == "dct-w") {
        v.kind = TransformKind::DctW;
    } else if (name == "int-dct-w") {
        v.kind = TransformKind::IntDctW;
    } else {
        throw InvalidParameter("unknown variant '" + name + "' (expected dct-n, dct-w or int-dct-w)");
    }
    v.window_size = window_size;
    validate(v);
    return v;
}

/// Compresses every entry. With a target error each waveform gets its own
/// threshold from the halving search; otherwise the fixed threshold is used.
inline std::vector<CompressedWaveform> compress_library(const WaveformLibrary &lib, const CodecOptions &opt) {
    if (opt.target_error && opt.threshold) {
        throw InvalidParameter("--target-error and --threshold are mutually exclusive");
    }
    CodecConfig cfg;
    cfg.variant = parse_variant(opt.variant, opt.window_size);
    cfg.bit_width = opt.bit_width;
    std::vector<CompressedWaveform> out;
    out.reserve(lib.entries.size());
    for (const auto &w : lib.entries) {
        if (opt.threshold) {
            cfg.threshold = *opt.threshold;
            out.push_back(compress(w, cfg));
            continue;
        }
        auto r = fidelity_aware_compress(w, opt.target_error.value_or(1e-5), cfg);
        if (!r.compressed) {
            throw NoSolution("no threshold meets the target error for '" + w.label + "'");
        }
        out.push_back(std::move(*r.compressed));
    }
    return out;
}

/// Runs `body`, mapping exceptions to exit codes and printing one error line.
template <class F>
int guarded(F &&body, std::ostream &err) {
    try {
        return body();
    } catch (const NoSolution &e) {
        err << "error: " << e.what() << '\n';
        return kExitNoSolution;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const nlohmann::json::exception &e) {
        err << "error: malformed JSON: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

// ---------------------------------------------------------------------------

struct GenCorpusOptions {
    std::string output;
    CorpusParams params;
    std::string readout = "flat-top";
};

inline int gen_corpus(const GenCorpusOptions &opt, std::ostream &log) {
    auto p = opt.params;
    if (opt.readout == "flat-top") {
        p.readout = ReadoutShape::FlatTop;
    } else if (opt.readout == "constant") {
        p.readout = ReadoutShape::Constant;
    } else {
        throw InvalidParameter("unknown readout shape '" + opt.readout + "' (expected flat-top or constant)");
    }
    auto lib = generate_corpus(p);
    write_library(opt.output, lib);
    log << "wrote " << lib.entries.size() << " waveforms to " << opt.output << '\n';
    return kExitOk;
}

struct CompressOptions {
    std::string input;
    std::string output;
    CodecOptions codec;
};

inline int compress_cmd(const CompressOptions &opt, std::ostream &log) {
    auto lib = read_library(opt.input);
    if (opt.codec.variant == "dct-n") {
        throw ValidationError("dct-n output has no fixed window layout and cannot be stored; use report instead");
    }
    auto compressed = compress_library(lib, opt.codec);
    write_cwmf(opt.output, compressed);
    log << "compressed " << compressed.size() << " waveforms to " << opt.output << '\n';
    return kExitOk;
}

struct DecompressOptions {
    std::string input;
    std::string output;
    double sample_rate_hz = kIbmSampleRate;
};

inline WaveformLibrary decompress_library(std::span<const CompressedWaveform> lib, double sample_rate_hz) {
    WaveformLibrary out;
    out.sample_rate_hz = sample_rate_hz;
    for (const auto &c : lib) out.entries.push_back(decompress(c));
    return out;
}

inline int decompress_cmd(const DecompressOptions &opt, std::ostream &log) {
    auto lib = read_cwmf(opt.input, opt.sample_rate_hz);
    auto out = decompress_library(lib, opt.sample_rate_hz);
    write_library(opt.output, out);
    log << "decompressed " << out.entries.size() << " waveforms to " << opt.output << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReportOptions {
    std::string input;
    std::optional<std::string> compressed;
    std::string output;
    std::optional<std::string> csv;
    CodecOptions codec;
};

struct WaveformReport {
    std::string label;
    std::size_t samples = 0;
    int uniform_width = 0;
    double threshold = 0.0;
    double ratio = 0.0;
    double effective_ratio = 0.0;
    double mse = 0.0;
};

struct LibraryReport {
    std::vector<WaveformReport> waveforms;
    double min_ratio = 0.0;
    double avg_ratio = 0.0;
    double max_ratio = 0.0;
    double library_ratio = 0.0;  // total samples / total slots
    std::map<int, std::uint64_t> histogram;
    double capacity_bytes = 0.0;
    double bandwidth_bytes_per_s = 0.0;
};

inline LibraryReport build_report(const WaveformLibrary &lib, std::span<const CompressedWaveform> compressed) {
    if (lib.entries.size() != compressed.size()) {
        throw ValidationError("library has " + std::to_string(lib.entries.size()) + " waveforms but the compressed file has " +
                              std::to_string(compressed.size()));
    }
    if (lib.entries.empty()) throw ValidationError("cannot report on an empty library");
    LibraryReport r;
    double samples = 0.0;
    double slots = 0.0;
    for (std::size_t n = 0; n < compressed.size(); ++n) {
        const auto &w = lib.entries[n];
        const auto &c = compressed[n];
        if (w.label != c.label) {
            throw ValidationError("label mismatch at entry " + std::to_string(n) + ": '" + w.label + "' vs '" + c.label + "'");
        }
        auto ratio = compression_ratio(w.i_samples.size(), c);
        r.waveforms.push_back({w.label, w.i_samples.size(), c.uniform_width, c.threshold_used, ratio.slots,
                               ratio.effective, mse(w, decompress(c))});
        samples += static_cast<double>(w.i_samples.size());
        slots += static_cast<double>(c.window_count() * static_cast<std::size_t>(c.uniform_width));
    }
    r.min_ratio = r.max_ratio = r.waveforms.front().ratio;
    double sum = 0.0;
    for (const auto &w : r.waveforms) {
        r.min_ratio = std::min(r.min_ratio, w.ratio);
        r.max_ratio = std::max(r.max_ratio, w.ratio);
        sum += w.ratio;
    }
    r.avg_ratio = sum / static_cast<double>(r.waveforms.size());
    r.library_ratio = samples / slots;
    r.histogram = samples_per_window_histogram(compressed);

    auto params = ibm_params();
    params.sampling_rate_sps = lib.sample_rate_hz;
    r.capacity_bytes = estimate_capacity(params);
    r.bandwidth_bytes_per_s = estimate_bandwidth(params.sampling_rate_sps, params.sample_size_bits);
    return r;
}

inline nlohmann::json report_to_json(const LibraryReport &r) {
    nlohmann::json doc;
    doc["waveforms"] = nlohmann::json::array();
    for (const auto &w : r.waveforms) {
        doc["waveforms"].push_back({{"label", w.label},
                                    {"samples", w.samples},
                                    {"uniform_width", w.uniform_width},
                                    {"threshold", w.threshold},
                                    {"ratio", w.ratio},
                                    {"effective_ratio", w.effective_ratio},
                                    {"mse", w.mse}});
    }
    doc["ratio"] = {{"min", r.min_ratio}, {"avg", r.avg_ratio}, {"max", r.max_ratio}, {"library", r.library_ratio}};
    nlohmann::json hist = nlohmann::json::object();
    std::uint64_t total = 0;
    for (const auto &[slots, count] : r.histogram) {
        hist[std::to_string(slots)] = count;
        total += count;
    }
    doc["samples_per_window"] = {{"histogram", hist}, {"total_windows", total}};
    doc["capacity"] = {{"uncompressed_bytes", r.capacity_bytes},
                       {"compressed_bytes", r.capacity_bytes / r.library_ratio}};
    doc["bandwidth"] = {{"uncompressed_bytes_per_s", r.bandwidth_bytes_per_s},
                        {"compressed_bytes_per_s", r.bandwidth_bytes_per_s / r.library_ratio}};
    return doc;
}

inline std::string report_to_csv(const LibraryReport &r) {
    std::ostringstream out;
    out.precision(17);
    out << "label,samples,uniform_width,threshold,ratio,effective_ratio,mse\n";
    for (const auto &w : r.waveforms) {
        out << w.label << ',' << w.samples << ',' << w.uniform_width << ',' << w.threshold << ',' << w.ratio << ','
            << w.effective_ratio << ',' << w.mse << '\n';
    }
    return out.str();
}

inline int report_cmd(const ReportOptions &opt, std::ostream &log) {
    auto lib = read_library(opt.input);
    auto compressed = opt.compressed ? read_cwmf(*opt.compressed, lib.sample_rate_hz) : compress_library(lib, opt.codec);
    auto r = build_report(lib, compressed);
    detail::write_text(opt.output, report_to_json(r).dump(2) + "\n");
    if (opt.csv) detail::write_text(*opt.csv, report_to_csv(r));
    log << "R min/avg/max " << r.min_ratio << " / " << r.avg_ratio << " / " << r.max_ratio << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string input;
    std::optional<std::string> label;
    std::string output;
    std::optional<std::string> trace;
    double ratio = 16.0;
    double fabric_clock_hz = 300e6;
    std::optional<int> banks;
    int idct_latency_cycles = 1;
    bool adaptive = false;
};

inline nlohmann::json stats_to_json(const AccessStats &s) {
    return {{"memory_accesses", s.memory_accesses}, {"idct_invocations", s.idct_invocations}, {"mode", s.mode}};
}

inline int simulate_cmd(const SimulateOptions &opt, std::ostream &log) {
    auto lib = read_cwmf(opt.input);
    if (lib.empty()) throw ValidationError("compressed library is empty");
    auto it = lib.begin();
    if (opt.label) {
        it = std::find_if(lib.begin(), lib.end(), [&](const auto &c) { return c.label == *opt.label; });
        if (it == lib.end()) throw ValidationError("no waveform labelled '" + *opt.label + "'");
    }
    PipelineConfig cfg;
    cfg.fabric_clock_hz = opt.fabric_clock_hz;
    cfg.dac_rate_sps = opt.ratio * opt.fabric_clock_hz;
    cfg.window_size = it->window_size;
    cfg.idct_latency_cycles = opt.idct_latency_cycles;
    const int banks = opt.banks ? *opt.banks : plan_banks(*it, cfg).banks_per_channel;

    nlohmann::json doc;
    StreamTrace trace;
    if (opt.adaptive) {
        auto r = adaptive_stream(*it, cfg, banks);
        doc = stats_to_json(r.adaptive);
        doc["baseline"] = stats_to_json(r.baseline);
        doc["plateau_windows"] = std::accumulate(r.plateaus.begin(), r.plateaus.end(), std::size_t{0},
                                                 [](std::size_t n, const PlateauRun &p) { return n + p.window_count; });
        trace = std::move(r.trace);
    } else {
        trace = simulate_stream(*it, cfg, banks);
        doc = stats_to_json(access_stats(trace, "compressed"));
    }
    doc["label"] = it->label;
    doc["banks_per_channel"] = banks;
    doc["cycles"] = trace.cycles.size();
    doc["underrun_count"] = trace.underrun_count;
    detail::write_text(opt.output, doc.dump(2) + "\n");
    if (opt.trace) detail::write_text(*opt.trace, trace_to_csv(trace));
    log << it->label << ": " << trace.underrun_count << " underruns over " << trace.cycles.size() << " cycles\n";
    return kExitOk;
}

struct SweepOptions {
    std::string output;
    std::vector<double> ratios{16.0};
    std::vector<int> window_sizes{8, 16};
    std::vector<int> widths{3};
    std::size_t length = 1362;
};

struct SweepRow {
    double ratio = 0.0;
    int window_size = 0;
    int width = 0;
    CapacityGain gain;
    std::uint64_t underruns_at_plan = 0;
    std::optional<std::uint64_t> underruns_below_plan;  // absent when the plan is a single bank
    double access_ratio = 0.0;                          // uncompressed / compressed memory accesses
};

inline std::vector<SweepRow> run_sweep(const SweepOptions &opt) {
    std::vector<SweepRow> rows;
    for (double ratio : opt.ratios) {
        for (int ws : opt.window_sizes) {
            for (int width : opt.widths) {
                auto cfg = pipeline_for_ratio(ratio, ws);
                validate(cfg);
                SweepRow row;
                row.ratio = ratio;
                row.window_size = ws;
                row.width = width;
                row.gain = qubit_capacity_gain(cfg, width);
                StreamShape shape{opt.length, ws, width};
                auto at_plan = simulate_stream(shape, cfg, row.gain.compressed_banks);
                row.underruns_at_plan = at_plan.underrun_count;
                if (row.gain.compressed_banks > 1) {
                    row.underruns_below_plan = simulate_stream(shape, cfg, row.gain.compressed_banks - 1).underrun_count;
                }
                auto raw = simulate_uncompressed(opt.length, cfg, row.gain.uncompressed_banks);
                row.access_ratio = static_cast<double>(raw.memory_accesses) / static_cast<double>(at_plan.memory_accesses);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline std::string sweep_to_csv(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out.precision(10);
    out << "ratio,window_size,width,uncompressed_banks,compressed_banks,gain,underruns_at_plan,underruns_below_plan,"
           "access_ratio\n";
    for (const auto &r : rows) {
        out << r.ratio << ',' << r.window_size << ',' << r.width << ',' << r.gain.uncompressed_banks << ','
            << r.gain.compressed_banks << ',' << r.gain.value() << ',' << r.underruns_at_plan << ',';
        if (r.underruns_below_plan) out << *r.underruns_below_plan;
        out << ',' << r.access_ratio << '\n';
    }
    return out.str();
}

inline int sweep_cmd(const SweepOptions &opt, std::ostream &log) {
    if (opt.ratios.empty() || opt.window_sizes.empty() || opt.widths.empty()) {
        throw InvalidParameter("sweep grid needs at least one ratio, window size and width");
    }
    auto rows = run_sweep(opt);
    detail::write_text(opt.output, sweep_to_csv(rows));
    log << "wrote " << rows.size() << " configurations to " << opt.output << '\n';
    return kExitOk;
}

}  // namespace wavecomp::cli
