#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "sounder/fzc.hpp"
#include "sounder/harness.hpp"
#include "sounder/metrics.hpp"
#include "sounder/rng.hpp"
#include "sounder/version.hpp"

namespace {

using namespace sounder;

ResultFormat parse_format(const std::string& name) {
    if (name == "csv")
        return ResultFormat::Csv;
    if (name == "json")
        return ResultFormat::Json;
    throw ValidationError("format must be csv or json, got '" + name + "'");
}

void emit_table(const SweepResultTable& table, const std::string& out_path,
                const std::string& format) {
    const ResultFormat fmt = parse_format(format);
    if (out_path.empty()) {
        std::cout << render_results(table, fmt);
        return;
    }
    const std::string resolved = resolve_output_path(out_path);
    emit_results(table, fmt, resolved);
    std::cout << "wrote " << resolved << "\n";
}

PresetOverrides gather_overrides(int trials, std::uint64_t seed, double snr_step, bool has_trials,
                                 bool has_seed, bool has_step) {
    PresetOverrides overrides;
    if (has_trials)
        overrides.trials = trials;
    if (has_seed)
        overrides.master_seed = seed;
    if (has_step)
        overrides.snr_r_step_db = snr_step;
    return overrides;
}

int run(int argc, char** argv) {
    CLI::App app{"FZC channel sounder simulation and analysis toolkit"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // generate: waveform to IQ file
    auto* generate = app.add_subcommand("generate", "write an FZC waveform as an IQ file");
    std::int64_t gen_n = 0;
    std::int64_t gen_lambda = 1;
    double gen_sample_rate = 1.0;
    int gen_periods = 1;
    std::string gen_out;
    generate->add_option("--n", gen_n, "sequence length N")->required();
    generate->add_option("--lambda", gen_lambda, "root lambda (coprime with N)");
    generate->add_option("--sample-rate", gen_sample_rate, "sample rate = bandwidth B in Hz");
    generate->add_option("--periods", gen_periods, "periods to write");
    generate->add_option("--out", gen_out, "output IQ path")->required();

    // simulate: scenario to stored captures
    auto* simulate = app.add_subcommand("simulate", "run a capture scenario and store IQ files");
    std::string sim_scenario;
    std::string sim_out;
    int sim_trials = 0;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--scenario", sim_scenario, "scenario JSON path")->required();
    simulate->add_option("--out", sim_out, "output path prefix (files <prefix>_<trial>.iq)")
        ->required();
    auto* sim_trials_opt = simulate->add_option("--trials", sim_trials, "override trial count");
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "override master seed");

    // cir: capture file to CIR
    auto* cir_cmd = app.add_subcommand("cir", "compute a CIR from a stored capture");
    std::string cir_capture;
    std::string cir_out;
    std::string cir_store;
    std::string cir_window = "rectangular";
    double cir_sidelobe = 100.0;
    std::string cir_cal_capture;
    double cir_known_loss = 0.0;
    cir_cmd->add_option("--capture", cir_capture, "input capture IQ path")->required();
    cir_cmd->add_option("--out", cir_out, "output CSV path (delay_s,magnitude_db,phase_rad)");
    cir_cmd->add_option("--store", cir_store, "also store the complex CIR as an IQ file");
    cir_cmd->add_option("--window", cir_window, "window: rectangular or chebyshev");
    cir_cmd->add_option("--sidelobe-db", cir_sidelobe, "chebyshev sidelobe suppression in dB");
    auto* cal_opt =
        cir_cmd->add_option("--cal-capture", cir_cal_capture, "back-to-back capture IQ path");
    cir_cmd->add_option("--known-loss-db", cir_known_loss,
                        "declared attenuation of the calibration path")
        ->needs(cal_opt);

    // psr: CIR file to report
    auto* psr_cmd = app.add_subcommand("psr", "report PSR of a stored CIR");
    std::string psr_cir;
    int psr_halfwidth = 0;
    psr_cmd->add_option("--cir", psr_cir, "CIR IQ path (from cir --store)")->required();
    psr_cmd->add_option("--excluded-halfwidth", psr_halfwidth, "bins excluded around the peak");

    // sweep: scenario to result table
    auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario and emit the result table");
    std::string sweep_scenario;
    std::string sweep_out;
    std::string sweep_format = "csv";
    int sweep_trials = 0;
    std::uint64_t sweep_seed = 0;
    sweep_cmd->add_option("--scenario", sweep_scenario, "scenario JSON path")->required();
    sweep_cmd->add_option("--out", sweep_out, "output path (stdout when omitted)");
    sweep_cmd->add_option("--format", sweep_format, "csv or json");
    auto* sweep_trials_opt =
        sweep_cmd->add_option("--trials", sweep_trials, "override trial count");
    auto* sweep_seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "override master seed");

    // plan: parametrization advisor
    auto* plan = app.add_subcommand("plan", "recommend parametrization changes for a target");
    AdvisorScenario advisor;
    double plan_snr_a_gain = 0.0;
    plan->add_option("--min-path-loss", advisor.min_path_loss_db, "path loss at d_min in dB")
        ->required();
    plan->add_option("--ptx", advisor.ptx_dbm, "current transmit power in dBm")->required();
    plan->add_option("--ptx-max", advisor.ptx_max_dbm, "maximum transmit power in dBm")
        ->required();
    plan->add_option("--s-max", advisor.s_max_dbm, "receiver full-scale input in dBm")
        ->required();
    plan->add_option("--snr-a", advisor.snr_a_db, "achievable SNR in dB")->required();
    auto* gain_opt = plan->add_option("--snr-a-gain", plan_snr_a_gain,
                                      "achievable SNR with the input gain block in dB");
    plan->add_option("--n", advisor.n, "current sequence length N")->required();
    plan->add_option("--k", advisor.periods_k, "current averaging periods K");
    plan->add_option("--target-dr", advisor.target_dr_db, "target dynamic range in dB")
        ->required();
    plan->add_option("--max-n", advisor.max_n, "largest usable N (0 = unconstrained)");
    plan->add_option("--max-k", advisor.max_k, "largest usable K (0 = unconstrained)");
    plan->add_flag("--vary-bandwidth", advisor.vary_bandwidth,
                   "word the first rule as a bandwidth increase");

    // preset: list/show/run figure presets
    auto* preset_cmd = app.add_subcommand("preset", "list or run figure-reproduction presets");
    bool preset_list = false;
    std::string preset_show;
    std::string preset_name;
    std::string preset_out;
    std::string preset_format = "csv";
    int preset_trials = 0;
    std::uint64_t preset_seed = 0;
    double preset_step = 5.0;
    preset_cmd->add_flag("--list", preset_list, "list preset names");
    preset_cmd->add_option("--show", preset_show, "print a preset definition");
    preset_cmd->add_option("--name", preset_name, "preset to run");
    preset_cmd->add_option("--out", preset_out, "output path (stdout when omitted)");
    preset_cmd->add_option("--format", preset_format, "csv or json");
    auto* preset_trials_opt =
        preset_cmd->add_option("--trials", preset_trials, "override trial count");
    auto* preset_seed_opt = preset_cmd->add_option("--seed", preset_seed, "override master seed");
    auto* preset_step_opt =
        preset_cmd->add_option("--snr-step", preset_step, "override snr_r step in dB");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11's own exit codes collapse onto the documented contract:
        // 0 for help/version, 1 for any usage problem
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (generate->parsed()) {
        const FzcSpec spec{gen_n, gen_lambda};
        if (gen_periods < 1)
            throw ValidationError("generate: --periods must be >= 1");
        const ComplexSequence one = generate_fzc(spec, gen_sample_rate);
        ComplexSequence out = one;
        for (int k = 1; k < gen_periods; ++k)
            out.samples.insert(out.samples.end(), one.samples.begin(), one.samples.end());
        IqMetadata meta;
        meta.sample_rate = gen_sample_rate;
        meta.fzc = spec;
        meta.periods_k = gen_periods;
        const std::string resolved = resolve_output_path(gen_out);
        store_iq(out, resolved, meta);
        std::cout << "wrote " << resolved << " (" << out.samples.size() << " samples)\n";
        return 0;
    }

    if (simulate->parsed()) {
        ScenarioFile scenario = ScenarioFile::load(sim_scenario);
        if (*sim_trials_opt)
            scenario.trials = sim_trials;
        if (*sim_seed_opt)
            scenario.master_seed = sim_seed;
        scenario.validate();
        if (scenario.sweep)
            throw ValidationError("simulate: scenario declares a sweep; use the sweep command");
        const ComplexSequence tx = generate_fzc(scenario.waveform, scenario.sample_rate);
        const double full_scale_amp = scenario.fullscale_l0 / interpolated_peak(tx, 8);
        ChannelModel channel;
        channel.taps = scenario.taps;
        const NormalizedLink link = NormalizedLink::at_full_scale(scenario.snr_a_db);
        for (int trial = 0; trial < scenario.trials; ++trial) {
            const std::uint64_t seed =
                rng::derive_seed(scenario.master_seed, 0, static_cast<std::uint64_t>(trial));
            ComplexSequence rx =
                simulate_receive_scaled(tx, channel, link, scenario.bits_l, scenario.periods_k,
                                        seed, full_scale_amp, scenario.fullscale_l0);
            IqMetadata meta;
            meta.sample_rate = scenario.sample_rate;
            meta.fzc = scenario.waveform;
            meta.periods_k = scenario.periods_k;
            meta.extra["trial"] = std::to_string(trial);
            meta.extra["master_seed"] = std::to_string(scenario.master_seed);
            const std::string path =
                resolve_output_path(sim_out + "_" + std::to_string(trial) + ".iq");
            store_iq(rx, path, meta);
            std::cout << "wrote " << path << "\n";
        }
        return 0;
    }

    if (cir_cmd->parsed()) {
        const Capture capture = load_iq(cir_capture);
        const ComplexSequence ref = generate_fzc(capture.spec, capture.samples.sample_rate);
        WindowSpec window;
        if (cir_window == "chebyshev") {
            window.kind = WindowKind::Chebyshev;
            window.sidelobe_db = cir_sidelobe;
        } else if (cir_window != "rectangular") {
            throw ValidationError("cir: --window must be rectangular or chebyshev");
        }
        CalibrationProfile cal;
        const CalibrationProfile* cal_ptr = nullptr;
        if (*cal_opt) {
            const Capture reference = load_iq(cir_cal_capture);
            cal = calibrate_b2b(reference, generate_fzc(reference.spec,
                                                        reference.samples.sample_rate),
                                cir_known_loss);
            cal_ptr = &cal;
        }
        const CirEstimate cir = compute_cir(capture, ref, cal_ptr, window);
        if (cir_out.empty() && cir_store.empty())
            throw ValidationError("cir: give --out and/or --store");
        if (!cir_out.empty()) {
            const std::string resolved = resolve_output_path(cir_out);
            export_cir_csv(cir, resolved);
            std::cout << "wrote " << resolved << "\n";
        }
        if (!cir_store.empty()) {
            const std::string resolved = resolve_output_path(cir_store);
            store_cir(cir, resolved);
            std::cout << "wrote " << resolved << "\n";
        }
        return 0;
    }

    if (psr_cmd->parsed()) {
        const Capture stored = load_iq(psr_cir);
        CirEstimate cir;
        cir.taps = stored.samples.samples;
        cir.delay_step_s = 1.0 / stored.samples.sample_rate;
        const PsrReport report = psr(cir, psr_halfwidth);
        nlohmann::json doc;
        doc["psr_db"] = report.psr_db;
        doc["peak_index"] = report.peak_index;
        doc["peak_magnitude_db"] = report.peak_magnitude_db;
        doc["floor_q99_db"] = report.floor_q99_db;
        doc["excluded_halfwidth"] = report.excluded_halfwidth;
        std::cout << doc.dump(2) << "\n";
        return 0;
    }

    if (sweep_cmd->parsed()) {
        ScenarioFile scenario = ScenarioFile::load(sweep_scenario);
        if (*sweep_trials_opt)
            scenario.trials = sweep_trials;
        if (*sweep_seed_opt)
            scenario.master_seed = sweep_seed;
        emit_table(run_scenario(scenario), sweep_out, sweep_format);
        return 0;
    }

    if (plan->parsed()) {
        if (*gain_opt)
            advisor.snr_a_gain_db = plan_snr_a_gain;
        const ProcessingGain gain = processing_gain(advisor.n, advisor.periods_k);
        std::cout << "g_proc = " << gain.g_proc_db << " dB (g_corr " << gain.g_corr_db
                  << " + g_avg " << gain.g_avg_db << ")\n";
        std::cout << "dr_a at snr_a = " << psr_bound(advisor.snr_a_db, gain.g_proc_db)
                  << " dB, target " << advisor.target_dr_db << " dB\n";
        const std::vector<Recommendation> recs = advise(advisor);
        if (recs.empty()) {
            std::cout << "target already met; no changes needed\n";
            return 0;
        }
        for (const Recommendation& rec : recs)
            std::cout << "rule " << rec.rule << " (+" << rec.delta_db << " dB): " << rec.action
                      << "\n";
        return 0;
    }

    if (preset_cmd->parsed()) {
        if (preset_list) {
            for (const std::string& name : preset_names())
                std::cout << name << "\n";
            return 0;
        }
        if (!preset_show.empty()) {
            std::cout << preset_definition(preset_show);
            return 0;
        }
        if (preset_name.empty())
            throw ValidationError("preset: give --name, --show or --list");
        const PresetOverrides overrides =
            gather_overrides(preset_trials, preset_seed, preset_step, !!*preset_trials_opt,
                             !!*preset_seed_opt, !!*preset_step_opt);
        emit_table(run_preset(preset_name, overrides), preset_out, preset_format);
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
