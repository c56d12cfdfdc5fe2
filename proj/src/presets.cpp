#include "sounder/harness.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "sounder/fzc.hpp"
#include "sounder/rng.hpp"
#include "sounder/version.hpp"

namespace sounder {

namespace {

using nlohmann::json;

// Figure-reproduction presets, stored as data. Values the figure itself
// states (snr_a, quantizer bits, window) live under "stated"; values it
// leaves open (sequence-length decades, sweep step, trial counts, seeds) are
// "reconstruction" choices and overridable.
const std::pair<const char*, const char*> kPresets[] = {
    {"fig1", R"json({
  "kind": "correlation_traces",
  "stated": {"n": 100, "lambda": 1, "bits_l": 6, "awgn_db": -30.0, "floor_db": -60.0},
  "reconstruction": {"master_seed": 1}
})json"},
    {"fig3", R"json({
  "kind": "psr_vs_snr",
  "stated": {"snr_a_db": 40.0, "l_values": [10], "periods_k": 1},
  "reconstruction": {"n_values": [1000, 10000, 100000], "snr_r_start_db": 0.0,
                     "snr_r_step_db": 5.0, "trials": 200, "master_seed": 1}
})json"},
    {"fig4", R"json({
  "kind": "psr_vs_snr",
  "stated": {"snr_a_db": 40.0, "l_values": [6], "periods_k": 1},
  "reconstruction": {"n_values": [1000, 10000, 100000], "snr_r_start_db": 0.0,
                     "snr_r_step_db": 5.0, "trials": 200, "master_seed": 1}
})json"},
    {"fig5", R"json({
  "kind": "psr_vs_snr",
  "stated": {"snr_a_db": 40.0, "n_values": [100000],
                   "l_values": [4, 5, 6, 7, 8, 9, 10, 11, 12], "periods_k": 1},
  "reconstruction": {"include_unquantized": true, "snr_r_start_db": 0.0,
                     "snr_r_step_db": 5.0, "trials": 200, "master_seed": 1}
})json"},
    {"fig6", R"json({
  "kind": "psr_vs_snr",
  "stated": {"snr_a_db": 20.0, "n_values": [100000],
                   "l_values": [4, 5, 6, 7, 8, 9, 10, 11, 12], "periods_k": 1},
  "reconstruction": {"include_unquantized": true, "snr_r_start_db": 0.0,
                     "snr_r_step_db": 5.0, "trials": 200, "master_seed": 1}
})json"},
    {"fig7", R"json({
  "kind": "psr_vs_snr",
  "stated": {"snr_a_db": 60.0, "n_values": [100000],
                   "l_values": [4, 5, 6, 7, 8, 9, 10, 11, 12], "periods_k": 1},
  "reconstruction": {"include_unquantized": true, "snr_r_start_db": 0.0,
                     "snr_r_step_db": 5.0, "trials": 200, "master_seed": 1}
})json"},
    {"fig9", R"json({
  "kind": "peak_vs_attenuation",
  "stated": {"snr_a_db": 45.0, "attenuation_start_db": 0.0,
                   "attenuation_stop_db": 90.0, "attenuation_step_db": 10.0,
                   "window": {"kind": "chebyshev", "sidelobe_db": 100.0}, "periods_k": 1},
  "reconstruction": {"n_values": [1000, 10000, 100000], "bits_l": 10, "trials": 20,
                     "master_seed": 1}
})json"},
};

const char* find_preset(const std::string& name) {
    for (const auto& [preset_name, text] : kPresets)
        if (name == preset_name)
            return text;
    throw ValidationError("unknown preset '" + name + "' (see preset_names())");
}

SweepResultTable run_correlation_traces(const json& def, const PresetOverrides& overrides) {
    const json& stated = def["stated"];
    FzcSpec spec{stated["n"].get<std::int64_t>(), stated["lambda"].get<std::int64_t>()};
    const int bits_l = stated["bits_l"].get<int>();
    const double awgn_db = stated["awgn_db"].get<double>();
    const double floor_db = stated["floor_db"].get<double>();
    const std::uint64_t seed =
        overrides.master_seed.value_or(def["reconstruction"]["master_seed"].get<std::uint64_t>());

    const ComplexSequence tx = generate_fzc(spec, 1.0);
    const ComplexSequence quantized = quantize(tx, bits_l, 1.0);
    const ComplexSequence noisy = add_noise(tx, awgn_db, rng::derive_seed(seed, 1, 0));

    SweepResultTable table;
    table.metadata["tool_version"] = kToolVersion;
    table.metadata["preset"] = "fig1";
    table.metadata["seed"] = std::to_string(seed);
    table.metadata["trace_0"] = "quantized L=" + std::to_string(bits_l);
    table.metadata["trace_1"] = "awgn " + std::to_string(awgn_db) + " dB";
    table.columns = {"trace", "delay_bin", "magnitude_db"};
    const ComplexSequence traces[2] = {periodic_xcorr(quantized, tx),
                                       periodic_xcorr(noisy, tx)};
    for (int trace = 0; trace < 2; ++trace)
        for (std::size_t k = 0; k < traces[trace].samples.size(); ++k) {
            const double mag_db = linear_amp_to_db(std::abs(traces[trace].samples[k]));
            table.rows.push_back({static_cast<double>(trace), static_cast<double>(k),
                                  std::max(mag_db, floor_db)});
        }
    return table;
}

SweepResultTable run_psr_vs_snr(const json& def, const PresetOverrides& overrides) {
    const json& stated = def["stated"];
    const json& recon = def["reconstruction"];
    const double snr_a_db = stated["snr_a_db"].get<double>();
    const int periods_k = stated["periods_k"].get<int>();
    const json& n_source = stated.contains("n_values") ? stated["n_values"] : recon["n_values"];
    std::vector<std::int64_t> n_values;
    for (const auto& n : n_source)
        n_values.push_back(n.get<std::int64_t>());
    std::vector<int> l_values;
    if (recon.value("include_unquantized", false))
        l_values.push_back(0);
    for (const auto& l : stated["l_values"])
        l_values.push_back(l.get<int>());

    const double start = recon["snr_r_start_db"].get<double>();
    const double step = overrides.snr_r_step_db.value_or(recon["snr_r_step_db"].get<double>());
    if (!(step > 0.0))
        throw ValidationError("preset: snr_r_step_db must be > 0");
    std::vector<double> snr_r_db;
    for (double r = start; r <= snr_a_db + 1e-9; r += step)
        snr_r_db.push_back(std::min(r, snr_a_db));
    const int trials = overrides.trials.value_or(recon["trials"].get<int>());
    const std::uint64_t seed =
        overrides.master_seed.value_or(recon["master_seed"].get<std::uint64_t>());

    SweepResultTable table;
    table.metadata["tool_version"] = kToolVersion;
    table.metadata["seed"] = std::to_string(seed);
    table.columns = {"snr_r_db", "psr_q01_db", "psr_mean_db", "trials", "N",
                     "L",        "K",          "snr_a_db",    "seed"};
    // each (N, L) case gets its own seed lane so adding cases never reshuffles
    // existing rows
    std::uint64_t lane = 0;
    for (std::int64_t n : n_values)
        for (int l : l_values) {
            MonteCarloSpec mc;
            mc.spec = FzcSpec{n, 1};
            mc.snr_a_db = snr_a_db;
            mc.snr_r_db = snr_r_db;
            if (l > 0)
                mc.bits_l = l;
            mc.periods_k = periods_k;
            mc.trials = trials;
            mc.master_seed = rng::derive_seed(seed, 0xF16, lane++);
            for (const MonteCarloRow& row : monte_carlo_psr(mc))
                table.rows.push_back({row.snr_r_db, row.psr_q_db, row.psr_mean_db,
                                      static_cast<double>(row.trials),
                                      static_cast<double>(row.n),
                                      static_cast<double>(row.bits_l),
                                      static_cast<double>(row.periods_k), row.snr_a_db,
                                      static_cast<double>(seed)});
        }
    return table;
}

SweepResultTable run_peak_vs_attenuation(const json& def, const PresetOverrides& overrides) {
    const json& stated = def["stated"];
    const json& recon = def["reconstruction"];
    const double snr_a_db = stated["snr_a_db"].get<double>();
    const int periods_k = stated["periods_k"].get<int>();
    AttenuationSweep sweep;
    sweep.start_db = stated["attenuation_start_db"].get<double>();
    sweep.stop_db = stated["attenuation_stop_db"].get<double>();
    sweep.step_db = stated["attenuation_step_db"].get<double>();
    WindowSpec window;
    if (stated["window"]["kind"].get<std::string>() == "chebyshev") {
        window.kind = WindowKind::Chebyshev;
        window.sidelobe_db = stated["window"]["sidelobe_db"].get<double>();
    }
    std::vector<std::int64_t> n_values;
    for (const auto& n : recon["n_values"])
        n_values.push_back(n.get<std::int64_t>());
    const int bits_l = recon["bits_l"].get<int>();
    const int trials = overrides.trials.value_or(recon["trials"].get<int>());
    const std::uint64_t seed =
        overrides.master_seed.value_or(recon["master_seed"].get<std::uint64_t>());

    SweepResultTable table;
    table.metadata["tool_version"] = kToolVersion;
    table.metadata["preset"] = "fig9";
    table.metadata["seed"] = std::to_string(seed);
    table.columns = {"attenuation_db", "snr_r_db", "peak_mean_db", "trials", "N",
                     "L",              "K",        "snr_a_db",     "seed"};
    const std::vector<double> settings = sweep.settings();
    std::uint64_t point = 0;
    for (std::int64_t n : n_values) {
        const FzcSpec spec{n, 1};
        const ComplexSequence tx = generate_fzc(spec, 1.0);
        const double full_scale_amp = 1.0 / interpolated_peak(tx, 8);
        const NormalizedLink link = NormalizedLink::at_full_scale(snr_a_db);
        for (double att : settings) {
            const ChannelModel channel = ChannelModel::single_tap(-att);
            double peak_sum = 0.0;
            for (int trial = 0; trial < trials; ++trial) {
                Capture capture;
                capture.samples = simulate_receive_scaled(
                    tx, channel, link, bits_l, periods_k,
                    rng::derive_seed(seed, point, static_cast<std::uint64_t>(trial)),
                    full_scale_amp);
                capture.spec = spec;
                capture.periods_k = periods_k;
                const CirEstimate cir = compute_cir(capture, tx, nullptr, window);
                double peak = 0.0;
                for (const cplx& tap : cir.taps)
                    peak = std::max(peak, std::abs(tap));
                peak_sum += linear_amp_to_db(peak);
            }
            ++point;
            table.rows.push_back({att, snr_a_db - att, peak_sum / trials,
                                  static_cast<double>(trials), static_cast<double>(n),
                                  static_cast<double>(bits_l), static_cast<double>(periods_k),
                                  snr_a_db, static_cast<double>(seed)});
        }
    }
    return table;
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : kPresets)
        names.push_back(name);
    return names;
}

std::string preset_definition(const std::string& name) { return find_preset(name); }

SweepResultTable run_preset(const std::string& name, const PresetOverrides& overrides) {
    const json def = json::parse(find_preset(name));
    const auto kind = def["kind"].get<std::string>();
    SweepResultTable table;
    if (kind == "correlation_traces")
        table = run_correlation_traces(def, overrides);
    else if (kind == "psr_vs_snr")
        table = run_psr_vs_snr(def, overrides);
    else if (kind == "peak_vs_attenuation")
        table = run_peak_vs_attenuation(def, overrides);
    else
        throw ValidationError("preset '" + name + "' has unsupported kind '" + kind + "'");
    table.metadata["preset"] = name;
    return table;
}

} // namespace sounder
