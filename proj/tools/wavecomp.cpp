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

#include <iostream>

#include "CLI11.hpp"
#include "wavecomp/cli.hpp"

namespace {

using namespace wavecomp;

void add_codec_flags(CLI::App &cmd, cli::CodecOptions &codec) {
    cmd.add_option("--variant", codec.variant, "Transform variant")
        ->check(CLI::IsMember({"dct-n", "dct-w", "int-dct-w"}))
        ->capture_default_str();
    cmd.add_option("--window-size", codec.window_size, "Window size for windowed variants")
        ->check(CLI::IsMember({8, 16}))
        ->capture_default_str();
    auto *target = cmd.add_option("--target-error", codec.target_error, "Per-waveform MSE target (default 1e-5)");
    auto *fixed = cmd.add_option("--threshold", codec.threshold, "Fixed coefficient threshold");
    target->excludes(fixed);
    cmd.add_option("--bit-width", codec.bit_width, "Quantizer width for integer variants")
        ->check(CLI::IsMember({12, 14, 16}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Gate waveform compression toolkit"};
    app.require_subcommand(1);

    cli::GenCorpusOptions gen;
    auto *gen_cmd = app.add_subcommand("gen-corpus", "Generate a synthetic calibration library (JSON)");
    gen_cmd->add_option("--output", gen.output, "Library JSON path")->required();
    gen_cmd->add_option("--seed", gen.params.seed, "Generator seed")->capture_default_str();
    gen_cmd->add_option("--qubits", gen.params.qubits, "Number of qubits")->capture_default_str();
    gen_cmd->add_option("--neighbours", gen.params.neighbours, "Two-qubit pulses per qubit")->capture_default_str();
    gen_cmd->add_option("--sample-rate", gen.params.sample_rate_hz, "DAC sample rate (Hz)")->capture_default_str();
    gen_cmd->add_option("--readout", gen.readout, "Readout pulse shape")
        ->check(CLI::IsMember({"flat-top", "constant"}))
        ->capture_default_str();

    cli::CompressOptions comp;
    auto *comp_cmd = app.add_subcommand("compress", "Compress a library into a CWMF file");
    comp_cmd->add_option("--input", comp.input, "Library JSON path")->required();
    comp_cmd->add_option("--output", comp.output, "CWMF output path")->required();
    add_codec_flags(*comp_cmd, comp.codec);

    cli::DecompressOptions decomp;
    auto *decomp_cmd = app.add_subcommand("decompress", "Expand a CWMF file back into a library");
    decomp_cmd->add_option("--input", decomp.input, "CWMF path")->required();
    decomp_cmd->add_option("--output", decomp.output, "Library JSON path")->required();
    decomp_cmd->add_option("--sample-rate", decomp.sample_rate_hz, "Sample rate to record (Hz)")->capture_default_str();

    cli::ReportOptions rep;
    std::string rep_compressed;
    std::string rep_csv;
    auto *rep_cmd = app.add_subcommand("report", "Compression ratio, fidelity and memory summary");
    rep_cmd->add_option("--input", rep.input, "Library JSON path")->required();
    auto *rep_comp_opt = rep_cmd->add_option("--compressed", rep_compressed, "CWMF file matching the library");
    rep_cmd->add_option("--output", rep.output, "Report JSON path")->required();
    auto *rep_csv_opt = rep_cmd->add_option("--csv", rep_csv, "Per-waveform CSV path");
    add_codec_flags(*rep_cmd, rep.codec);

    cli::SimulateOptions sim;
    std::string sim_label;
    std::string sim_trace;
    int sim_banks = 0;
    auto *sim_cmd = app.add_subcommand("simulate", "Cycle-level streaming of one compressed waveform");
    sim_cmd->add_option("--input", sim.input, "CWMF path")->required();
    sim_cmd->add_option("--output", sim.output, "Stats JSON path")->required();
    auto *sim_label_opt = sim_cmd->add_option("--label", sim_label, "Waveform label (default: first entry)");
    auto *sim_trace_opt = sim_cmd->add_option("--trace", sim_trace, "Per-cycle CSV path");
    sim_cmd->add_option("--ratio", sim.ratio, "DAC rate / fabric clock")->capture_default_str();
    sim_cmd->add_option("--fabric-clock", sim.fabric_clock_hz, "Fabric clock (Hz)")->capture_default_str();
    auto *sim_banks_opt = sim_cmd->add_option("--banks", sim_banks, "Banks per channel (default: plan)");
    sim_cmd->add_option("--idct-latency", sim.idct_latency_cycles, "IDCT latency in cycles")->capture_default_str();
    sim_cmd->add_flag("--adaptive", sim.adaptive, "Bypass memory and IDCT on plateaus");

    cli::SweepOptions sweep;
    auto *sweep_cmd = app.add_subcommand("sweep", "Capacity gain and streaming checks over a parameter grid");
    sweep_cmd->add_option("--output", sweep.output, "CSV path")->required();
    sweep_cmd->add_option("--ratio", sweep.ratios, "Clock ratios")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--window-size", sweep.window_sizes, "Window sizes")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--width", sweep.widths, "Uniform widths")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--length", sweep.length, "Simulated waveform length")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitValidation;
    }

    return cli::guarded(
        [&] {
            if (*gen_cmd) return cli::gen_corpus(gen, std::cout);
            if (*comp_cmd) return cli::compress_cmd(comp, std::cout);
            if (*decomp_cmd) return cli::decompress_cmd(decomp, std::cout);
            if (*rep_cmd) {
                if (*rep_comp_opt) rep.compressed = rep_compressed;
                if (*rep_csv_opt) rep.csv = rep_csv;
                return cli::report_cmd(rep, std::cout);
            }
            if (*sim_cmd) {
                if (*sim_label_opt) sim.label = sim_label;
                if (*sim_trace_opt) sim.trace = sim_trace;
                if (*sim_banks_opt) sim.banks = sim_banks;
                return cli::simulate_cmd(sim, std::cout);
            }
            return cli::sweep_cmd(sweep, std::cout);
        },
        std::cerr);
}
