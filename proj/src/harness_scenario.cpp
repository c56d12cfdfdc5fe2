#include "sounder/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "json.hpp"

#include "sounder/fzc.hpp"
#include "sounder/rng.hpp"
#include "sounder/version.hpp"

namespace sounder {

namespace {

using nlohmann::json;

// the calibration capture gets its own point lane in the seed space so it can
// never collide with a measurement trial
constexpr std::uint64_t kCalSeedLane = 0xB2B;

void require_object(const json& node, const std::string& where) {
    if (!node.is_object())
        throw ValidationError("scenario: " + where + " must be an object");
}

void reject_unknown_keys(const json& node, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : node.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw ValidationError("scenario: unknown key '" + item.key() + "' in " + where);
    }
}

double get_number(const json& node, const std::string& where) {
    if (!node.is_number())
        throw ValidationError("scenario: " + where + " must be a number");
    return node.get<double>();
}

std::int64_t get_integer(const json& node, const std::string& where) {
    if (!node.is_number_integer())
        throw ValidationError("scenario: " + where + " must be an integer");
    return node.get<std::int64_t>();
}

std::string format_seed(std::uint64_t seed) { return std::to_string(seed); }

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace

std::vector<double> AttenuationSweep::settings() const {
    if (!(step_db > 0.0))
        throw ValidationError("AttenuationSweep: step_db must be > 0");
    if (stop_db < start_db)
        throw ValidationError("AttenuationSweep: stop_db must be >= start_db");
    std::vector<double> values;
    for (int i = 0;; ++i) {
        const double a = start_db + step_db * i;
        if (a > stop_db + 1e-9)
            break;
        values.push_back(a);
    }
    return values;
}

void ScenarioFile::validate() const {
    waveform.validate();
    if (!(sample_rate > 0.0))
        throw ValidationError("scenario: waveform.sample_rate must be > 0");
    if (bits_l && *bits_l < 1)
        throw ValidationError("scenario: receiver.bits_l must be >= 1");
    if (!(fullscale_l0 > 0.0))
        throw ValidationError("scenario: receiver.fullscale_l0 must be > 0");
    if (physical)
        physical->validate();
    if (taps.empty() == !sweep)
        throw ValidationError(
            "scenario: channel must declare exactly one of taps or attenuation_sweep");
    if (sweep) {
        if (!std::isfinite(snr_a_db))
            throw ValidationError("scenario: attenuation sweeps require a finite snr_a_db");
        if (sweep->settings().empty())
            throw ValidationError("scenario: attenuation sweep is empty");
    } else {
        ChannelModel model;
        model.taps = taps;
        model.validate();
    }
    if (periods_k < 1)
        throw ValidationError("scenario: acquisition.periods_k must be >= 1");
    if (trials < 1)
        throw ValidationError("scenario: acquisition.trials must be >= 1");
    window.validate();
    if (excluded_halfwidth && *excluded_halfwidth < 0)
        throw ValidationError("scenario: processing.excluded_halfwidth must be >= 0");
}

ScenarioFile ScenarioFile::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("scenario: not valid JSON: ") + e.what());
    }
    require_object(doc, "top level");
    reject_unknown_keys(doc, "top level",
                        {"waveform", "receiver", "channel", "acquisition", "processing"});

    ScenarioFile sc;
    if (!doc.contains("waveform"))
        throw ValidationError("scenario: missing waveform");
    const json& wf = doc["waveform"];
    require_object(wf, "waveform");
    reject_unknown_keys(wf, "waveform", {"n", "lambda", "sample_rate"});
    if (!wf.contains("n"))
        throw ValidationError("scenario: missing waveform.n");
    sc.waveform.n = get_integer(wf["n"], "waveform.n");
    if (wf.contains("lambda"))
        sc.waveform.lambda = get_integer(wf["lambda"], "waveform.lambda");
    if (wf.contains("sample_rate"))
        sc.sample_rate = get_number(wf["sample_rate"], "waveform.sample_rate");

    if (doc.contains("receiver")) {
        const json& rx = doc["receiver"];
        require_object(rx, "receiver");
        reject_unknown_keys(rx, "receiver",
                            {"snr_a_db", "bandwidth_b", "gain_db", "noise_figure_db",
                             "max_input_dbm", "input_power_dbm", "bits_l", "fullscale_l0"});
        const bool normalized = rx.contains("snr_a_db");
        const bool physical = rx.contains("bandwidth_b") || rx.contains("gain_db") ||
                              rx.contains("noise_figure_db") || rx.contains("max_input_dbm") ||
                              rx.contains("input_power_dbm");
        if (normalized && physical)
            throw ValidationError(
                "scenario: receiver mixes the normalized form (snr_a_db) with the physical form");
        if (normalized) {
            if (rx["snr_a_db"].is_string()) {
                const auto s = rx["snr_a_db"].get<std::string>();
                if (s != "off" && s != "inf")
                    throw ValidationError("scenario: receiver.snr_a_db string must be "
                                          "'off' or 'inf'");
                sc.snr_a_db = kSnrOff;
            } else {
                sc.snr_a_db = get_number(rx["snr_a_db"], "receiver.snr_a_db");
            }
        } else if (physical) {
            ReceiverModel model;
            if (!rx.contains("bandwidth_b") || !rx.contains("max_input_dbm"))
                throw ValidationError(
                    "scenario: physical receiver needs bandwidth_b and max_input_dbm");
            model.bandwidth_b = get_number(rx["bandwidth_b"], "receiver.bandwidth_b");
            if (rx.contains("gain_db"))
                model.gain_db = get_number(rx["gain_db"], "receiver.gain_db");
            if (rx.contains("noise_figure_db"))
                model.noise_figure_db =
                    get_number(rx["noise_figure_db"], "receiver.noise_figure_db");
            model.max_input_dbm = get_number(rx["max_input_dbm"], "receiver.max_input_dbm");
            const double input_dbm = rx.contains("input_power_dbm")
                                         ? get_number(rx["input_power_dbm"],
                                                      "receiver.input_power_dbm")
                                         : model.max_input_dbm;
            sc.physical = model;
            sc.snr_a_db = derive_link(model, input_dbm).snr_a_db;
        }
        if (rx.contains("bits_l"))
            sc.bits_l = static_cast<int>(get_integer(rx["bits_l"], "receiver.bits_l"));
        if (rx.contains("fullscale_l0"))
            sc.fullscale_l0 = get_number(rx["fullscale_l0"], "receiver.fullscale_l0");
    }

    if (!doc.contains("channel"))
        throw ValidationError("scenario: missing channel");
    const json& ch = doc["channel"];
    require_object(ch, "channel");
    reject_unknown_keys(ch, "channel", {"taps", "attenuation_sweep"});
    if (ch.contains("taps") == ch.contains("attenuation_sweep"))
        throw ValidationError(
            "scenario: channel must declare exactly one of taps or attenuation_sweep");
    if (ch.contains("taps")) {
        const json& taps = ch["taps"];
        if (!taps.is_array() || taps.empty())
            throw ValidationError("scenario: channel.taps must be a nonempty array");
        for (std::size_t i = 0; i < taps.size(); ++i) {
            const std::string where = "channel.taps[" + std::to_string(i) + "]";
            require_object(taps[i], where);
            reject_unknown_keys(taps[i], where, {"delay", "gain_db", "phase_deg"});
            ChannelTap tap;
            if (taps[i].contains("delay"))
                tap.delay = get_integer(taps[i]["delay"], where + ".delay");
            if (!taps[i].contains("gain_db"))
                throw ValidationError("scenario: missing " + where + ".gain_db");
            const double gain_db = get_number(taps[i]["gain_db"], where + ".gain_db");
            const double phase = taps[i].contains("phase_deg")
                                     ? get_number(taps[i]["phase_deg"], where + ".phase_deg") *
                                           M_PI / 180.0
                                     : 0.0;
            tap.gain = std::polar(db_to_linear_amp(gain_db), phase);
            sc.taps.push_back(tap);
        }
    } else {
        const json& sw = ch["attenuation_sweep"];
        require_object(sw, "channel.attenuation_sweep");
        reject_unknown_keys(sw, "channel.attenuation_sweep", {"start_db", "stop_db", "step_db"});
        AttenuationSweep sweep;
        if (sw.contains("start_db"))
            sweep.start_db = get_number(sw["start_db"], "channel.attenuation_sweep.start_db");
        if (!sw.contains("stop_db"))
            throw ValidationError("scenario: missing channel.attenuation_sweep.stop_db");
        sweep.stop_db = get_number(sw["stop_db"], "channel.attenuation_sweep.stop_db");
        if (sw.contains("step_db"))
            sweep.step_db = get_number(sw["step_db"], "channel.attenuation_sweep.step_db");
        sc.sweep = sweep;
    }

    if (doc.contains("acquisition")) {
        const json& acq = doc["acquisition"];
        require_object(acq, "acquisition");
        reject_unknown_keys(acq, "acquisition", {"periods_k", "trials", "master_seed"});
        if (acq.contains("periods_k"))
            sc.periods_k = static_cast<int>(get_integer(acq["periods_k"], "acquisition.periods_k"));
        if (acq.contains("trials"))
            sc.trials = static_cast<int>(get_integer(acq["trials"], "acquisition.trials"));
        if (acq.contains("master_seed")) {
            if (!acq["master_seed"].is_number_unsigned() && !acq["master_seed"].is_number_integer())
                throw ValidationError("scenario: acquisition.master_seed must be an integer");
            sc.master_seed = acq["master_seed"].get<std::uint64_t>();
        }
    }

    if (doc.contains("processing")) {
        const json& proc = doc["processing"];
        require_object(proc, "processing");
        reject_unknown_keys(proc, "processing",
                            {"window", "excluded_halfwidth", "cal_known_loss_db"});
        if (proc.contains("window")) {
            const json& win = proc["window"];
            require_object(win, "processing.window");
            reject_unknown_keys(win, "processing.window", {"kind", "sidelobe_db"});
            if (!win.contains("kind") || !win["kind"].is_string())
                throw ValidationError("scenario: processing.window.kind must be a string");
            const auto kind = win["kind"].get<std::string>();
            if (kind == "rectangular") {
                sc.window.kind = WindowKind::Rectangular;
                if (win.contains("sidelobe_db"))
                    throw ValidationError(
                        "scenario: sidelobe_db only applies to the chebyshev window");
            } else if (kind == "chebyshev") {
                sc.window.kind = WindowKind::Chebyshev;
                if (win.contains("sidelobe_db"))
                    sc.window.sidelobe_db =
                        get_number(win["sidelobe_db"], "processing.window.sidelobe_db");
            } else {
                throw ValidationError("scenario: processing.window.kind must be "
                                      "'rectangular' or 'chebyshev'");
            }
        }
        if (proc.contains("excluded_halfwidth"))
            sc.excluded_halfwidth = static_cast<int>(
                get_integer(proc["excluded_halfwidth"], "processing.excluded_halfwidth"));
        if (proc.contains("cal_known_loss_db"))
            sc.cal_known_loss_db =
                get_number(proc["cal_known_loss_db"], "processing.cal_known_loss_db");
    }

    sc.validate();
    return sc;
}

ScenarioFile ScenarioFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path + " for reading");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed for " + path);
    return from_json_text(text);
}

SweepResultTable run_scenario(const ScenarioFile& scenario) {
    scenario.validate();
    SweepResultTable table;
    table.metadata["tool_version"] = kToolVersion;
    table.metadata["seed"] = format_seed(scenario.master_seed);
    table.metadata["timestamp"] = iso_timestamp();

    if (scenario.sweep) {
        MonteCarloSpec mc;
        mc.spec = scenario.waveform;
        mc.snr_a_db = scenario.snr_a_db;
        for (double att : scenario.sweep->settings())
            mc.snr_r_db.push_back(scenario.snr_a_db - att);
        mc.bits_l = scenario.bits_l;
        mc.periods_k = scenario.periods_k;
        mc.trials = scenario.trials;
        mc.master_seed = scenario.master_seed;
        table.metadata["mode"] = "sweep";
        table.columns = {"snr_r_db", "psr_q01_db", "psr_mean_db", "trials", "N",
                         "L",        "K",          "snr_a_db",    "seed"};
        for (const MonteCarloRow& row : monte_carlo_psr(mc))
            table.rows.push_back({row.snr_r_db, row.psr_q_db, row.psr_mean_db,
                                  static_cast<double>(row.trials), static_cast<double>(row.n),
                                  static_cast<double>(row.bits_l),
                                  static_cast<double>(row.periods_k), row.snr_a_db,
                                  static_cast<double>(row.master_seed)});
        return table;
    }

    const ComplexSequence tx = generate_fzc(scenario.waveform, scenario.sample_rate);
    const double full_scale_amp = scenario.fullscale_l0 / interpolated_peak(tx, 8);
    ChannelModel channel;
    channel.taps = scenario.taps;
    double tap_power = 0.0;
    for (const ChannelTap& t : scenario.taps)
        tap_power += std::norm(t.gain);
    const double snr_r_db = scenario.snr_a_db + linear_power_to_db(tap_power);
    const NormalizedLink link = NormalizedLink::at_full_scale(scenario.snr_a_db);

    CalibrationProfile cal;
    const CalibrationProfile* cal_ptr = nullptr;
    if (scenario.cal_known_loss_db) {
        // back-to-back reference: identity channel captured at full scale with
        // the declared pad value, mirroring a bench calibration at maximum
        // input level
        Capture reference;
        reference.samples = simulate_receive_scaled(
            tx, ChannelModel::identity(), link, scenario.bits_l, scenario.periods_k,
            rng::derive_seed(scenario.master_seed, kCalSeedLane, 0), full_scale_amp,
            scenario.fullscale_l0);
        reference.spec = scenario.waveform;
        reference.periods_k = scenario.periods_k;
        cal = calibrate_b2b(reference, tx, *scenario.cal_known_loss_db);
        cal_ptr = &cal;
        table.metadata["cal_known_loss_db"] = std::to_string(*scenario.cal_known_loss_db);
    }

    table.metadata["mode"] = "capture";
    table.columns = {"trial", "snr_r_db", "peak_db", "peak_delay_bin", "psr_db",
                     "N",     "L",        "K",       "snr_a_db",       "seed"};
    for (int trial = 0; trial < scenario.trials; ++trial) {
        Capture capture;
        capture.samples = simulate_receive_scaled(
            tx, channel, link, scenario.bits_l, scenario.periods_k,
            rng::derive_seed(scenario.master_seed, 0, static_cast<std::uint64_t>(trial)),
            full_scale_amp, scenario.fullscale_l0);
        capture.spec = scenario.waveform;
        capture.periods_k = scenario.periods_k;
        const CirEstimate cir = compute_cir(capture, tx, cal_ptr, scenario.window);
        const PsrReport report = scenario.excluded_halfwidth
                                     ? psr(cir, *scenario.excluded_halfwidth)
                                     : psr(cir);
        table.rows.push_back({static_cast<double>(trial), snr_r_db, report.peak_magnitude_db,
                              static_cast<double>(report.peak_index), report.psr_db,
                              static_cast<double>(scenario.waveform.n),
                              static_cast<double>(scenario.bits_l ? *scenario.bits_l : 0),
                              static_cast<double>(scenario.periods_k), scenario.snr_a_db,
                              static_cast<double>(scenario.master_seed)});
    }
    return table;
}

} // namespace sounder
