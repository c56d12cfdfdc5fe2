#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sounder/correlator.hpp"
#include "sounder/frontend.hpp"
#include "sounder/metrics.hpp"
#include "sounder/types.hpp"

namespace sounder {

// generic sweep output: self-describing rows under named columns.
// Monte-Carlo sweeps use the canonical column set
// (snr_r_db, psr_q01_db, psr_mean_db, trials, N, L, K, snr_a_db, seed).
struct SweepResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    // run metadata (tool version, seed, timestamp); the timestamp is kept in
    // memory only and never serialized so reruns stay byte-identical
    std::map<std::string, std::string> metadata;
};

// attenuation sweep declaration: snr_r = snr_a - attenuation per setting
struct AttenuationSweep {
    double start_db = 0.0;
    double stop_db = 0.0;
    double step_db = 10.0;

    std::vector<double> settings() const;
};

// parsed + validated scenario configuration (strict schema, unknown keys rejected)
struct ScenarioFile {
    FzcSpec waveform;
    double sample_rate = 1.0;

    double snr_a_db = kSnrOff;           // normalized receiver description
    std::optional<ReceiverModel> physical; // dBm-level description, when given
    std::optional<int> bits_l;
    double fullscale_l0 = 1.0;

    std::vector<ChannelTap> taps;              // capture mode
    std::optional<AttenuationSweep> sweep;     // sweep mode (exclusive with taps)

    int periods_k = 1;
    int trials = 200;
    std::uint64_t master_seed = 1;

    WindowSpec window;
    std::optional<int> excluded_halfwidth; // empty = choose by window kind
    std::optional<double> cal_known_loss_db;

    void validate() const;
    static ScenarioFile from_json_text(const std::string& text);
    static ScenarioFile load(const std::string& path);
};

// executes the declared pipeline; sweep mode yields the canonical Monte-Carlo
// table, capture mode one row per channel measurement with peak/PSR columns
SweepResultTable run_scenario(const ScenarioFile& scenario);

// sidecar metadata stored next to the IQ payload
struct IqMetadata {
    double sample_rate = 1.0;
    std::optional<double> center_frequency_hz;
    std::optional<FzcSpec> fzc;
    std::optional<int> periods_k;
    std::optional<double> gain_db;
    std::string notes;
    std::map<std::string, std::string> extra;
};

// little-endian float32 interleaved I/Q with magic + version header and a JSON
// sidecar at path + ".json"; payload round-trips bit-exactly for
// float32-representable samples
void store_iq(const ComplexSequence& seq, const std::string& path, const IqMetadata& metadata);
Capture load_iq(const std::string& path);

enum class ResultFormat { Csv, Json };

// stable column order, shortest round-trip number serialization; identical
// seeds produce byte-identical files
std::string render_results(const SweepResultTable& table, ResultFormat format);
void emit_results(const SweepResultTable& table, ResultFormat format, const std::string& path);

// CIR exports: CSV (delay_s, magnitude_db, phase_rad) and the binary IQ format
void export_cir_csv(const CirEstimate& cir, const std::string& path);
void store_cir(const CirEstimate& cir, const std::string& path);

// figure-reproduction presets, stored as data with stated parameters and
// reconstruction choices separated
struct PresetOverrides {
    std::optional<int> trials;
    std::optional<std::uint64_t> master_seed;
    std::optional<double> snr_r_step_db;
};

std::vector<std::string> preset_names();
std::string preset_definition(const std::string& name); // JSON text
SweepResultTable run_preset(const std::string& name, const PresetOverrides& overrides = {});

// default output directory override (environment), applied to relative paths
std::string resolve_output_path(const std::string& path);

} // namespace sounder
