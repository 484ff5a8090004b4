#include "cvqkd/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cvqkd/random.hpp"
#include "cvqkd/tx_frontend.hpp"

namespace cvqkd {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad integer value for " + key + ": '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean value for " + key + ": '" + value + "'");
}

}  // namespace

std::string to_string(CpeMethod m) {
    switch (m) {
        case CpeMethod::argument: return "argument";
        case CpeMethod::ukf: return "ukf";
        case CpeMethod::both: return "both";
    }
    return "?";
}

std::optional<CpeMethod> parse_cpe_method(const std::string& s) {
    if (s == "argument") return CpeMethod::argument;
    if (s == "ukf") return CpeMethod::ukf;
    if (s == "both") return CpeMethod::both;
    return std::nullopt;
}

std::size_t ExperimentConfig::samples_per_symbol() const {
    return static_cast<std::size_t>(std::llround(sample_rate_hz / symbol_rate_hz));
}

double ExperimentConfig::wiener_step_variance() const {
    return 2.0 * std::numbers::pi * linewidth_hz / sample_rate_hz;
}

double ExperimentConfig::snr_reference_bandwidth() const {
    return snr_reference_bandwidth_hz > 0.0 ? snr_reference_bandwidth_hz : symbol_rate_hz / 2.0;
}

double ExperimentConfig::snr_reference_variance() const {
    return shot_noise_variance * snr_reference_bandwidth() / sample_rate_hz;
}

double ExperimentConfig::pilot_amplitude() const {
    if (pilot_amplitude_override) return *pilot_amplitude_override;
    if (shot_noise_variance == 0.0) return 0.0;
    return pilot_amplitude_for_snr(pilot_snr_db, snr_reference_variance());
}

UkfParams ExperimentConfig::resolved_ukf() const {
    UkfParams p = ukf;
    if (p.process_noise_q < 0.0) p.process_noise_q = wiener_step_variance();
    if (p.measurement_noise_r < 0.0) {
        // Tuned to the underlying white shot-noise level rather than the
        // variance left inside the pilot filter band: the band-passed noise is
        // correlated over ~f_s/B samples, and a gain tuned to the narrower
        // in-band variance tracks that noise as if it were phase.
        p.measurement_noise_r = shot_noise_variance > 0.0 ? shot_noise_variance : 1e-12;
    }
    return p;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

    if (n_symbols == 0) fail("n_symbols must be positive");
    if (symbol_rate_hz <= 0 || sample_rate_hz <= 0) fail("rates must be positive");
    const double ratio = sample_rate_hz / symbol_rate_hz;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 || std::llround(ratio) < 1)
        fail("sample_rate_hz must be an integer multiple of symbol_rate_hz");
    if (rrc_rolloff < 0.0 || rrc_rolloff > 1.0) fail("rrc_rolloff must be in [0, 1]");
    if (modulation_variance_snu < 0.0) fail("modulation_variance_snu must be >= 0");
    if (linewidth_hz < 0.0) fail("linewidth_hz must be >= 0");
    if (shot_noise_variance < 0.0) fail("shot_noise_variance must be >= 0");
    if (channel_transmittance < 0.0 || channel_transmittance > 1.0)
        fail("channel_transmittance must be in [0, 1]");
    if (repetitions == 0) fail("repetitions must be >= 1");
    if (pilot_filter_bandwidth_hz <= 0) fail("pilot_filter_bandwidth_hz must be positive");

    const double nyquist = sample_rate_hz / 2.0;
    if (pilot_freq_hz() + pilot_filter_bandwidth_hz / 2.0 >= nyquist)
        fail("pilot band must lie inside the Nyquist band");
    const double signal_hi = carrier_hz + (1.0 + rrc_rolloff) * symbol_rate_hz / 2.0;
    const double pilot_lo = pilot_freq_hz() - pilot_filter_bandwidth_hz / 2.0;
    if (pilot_lo <= signal_hi) fail("signal band and pilot filter band must be disjoint");
    if (carrier_hz - (1.0 + rrc_rolloff) * symbol_rate_hz / 2.0 <= 0.0)
        fail("signal band must stay above DC");

    if (2 * guard_symbols >= n_symbols) fail("guard_symbols leave no symbols for metrics");
    if (calibration_frames == 0) fail("calibration_frames must be >= 1");

    const UkfParams p = resolved_ukf();
    const double n = 1.0;
    const double lambda = p.alpha * p.alpha * (n + p.kappa) - n;
    if (!(n + lambda > 0.0)) fail("ukf: alpha^2 (1 + kappa) must be positive");
    if (p.process_noise_q < 0.0) fail("ukf: process_noise_q must be >= 0");
    if (!(p.measurement_noise_r > 0.0)) fail("ukf: measurement_noise_r must be > 0");
    if (!(p.initial_variance_p0 > 0.0)) fail("ukf: initial_variance_p0 must be > 0");
}

std::map<std::string, std::string> ExperimentConfig::to_key_values() const {
    std::map<std::string, std::string> kv;
    kv["n_symbols"] = std::to_string(n_symbols);
    kv["symbol_rate_hz"] = fmt_double(symbol_rate_hz);
    kv["sample_rate_hz"] = fmt_double(sample_rate_hz);
    kv["rrc_rolloff"] = fmt_double(rrc_rolloff);
    kv["carrier_hz"] = fmt_double(carrier_hz);
    kv["pilot_offset_hz"] = fmt_double(pilot_offset_hz);
    kv["modulation_variance_snu"] = fmt_double(modulation_variance_snu);
    kv["linewidth_hz"] = fmt_double(linewidth_hz);
    kv["pilot_snr_db"] = fmt_double(pilot_snr_db);
    kv["channel_transmittance"] = fmt_double(channel_transmittance);
    kv["repetitions"] = std::to_string(repetitions);
    kv["rng_seed"] = std::to_string(rng_seed);
    kv["cpe_method"] = to_string(cpe_method);
    kv["pilot_filter_bandwidth_hz"] = fmt_double(pilot_filter_bandwidth_hz);
    kv["snr_reference_bandwidth_hz"] = fmt_double(snr_reference_bandwidth_hz);
    kv["shot_noise_variance"] = fmt_double(shot_noise_variance);
    kv["guard_symbols"] = std::to_string(guard_symbols);
    kv["calibration_frames"] = std::to_string(calibration_frames);
    kv["compensate_before_filter"] = compensate_before_filter ? "true" : "false";
    kv["pilot_amplitude_override"] =
        pilot_amplitude_override ? fmt_double(*pilot_amplitude_override) : "none";
    kv["ukf.alpha"] = fmt_double(ukf.alpha);
    kv["ukf.beta"] = fmt_double(ukf.beta);
    kv["ukf.kappa"] = fmt_double(ukf.kappa);
    kv["ukf.process_noise_q"] = fmt_double(ukf.process_noise_q);
    kv["ukf.measurement_noise_r"] = fmt_double(ukf.measurement_noise_r);
    kv["ukf.initial_phase"] = fmt_double(ukf.initial_phase);
    kv["ukf.initial_phase_auto"] = ukf.initial_phase_auto ? "true" : "false";
    kv["ukf.initial_variance_p0"] = fmt_double(ukf.initial_variance_p0);
    kv["ukf.amplitude_from_rms"] = ukf.amplitude_from_rms ? "true" : "false";
    return kv;
}

std::string ExperimentConfig::digest() const {
    std::string canon;
    for (const auto& [k, v] : to_key_values()) {
        canon += k;
        canon += '=';
        canon += v;
        canon += '\n';
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

void ExperimentConfig::apply_key_value(const std::string& key, const std::string& value) {
    if (key == "n_symbols") n_symbols = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "symbol_rate_hz") symbol_rate_hz = parse_double(key, value);
    else if (key == "sample_rate_hz") sample_rate_hz = parse_double(key, value);
    else if (key == "rrc_rolloff") rrc_rolloff = parse_double(key, value);
    else if (key == "carrier_hz") carrier_hz = parse_double(key, value);
    else if (key == "pilot_offset_hz") pilot_offset_hz = parse_double(key, value);
    else if (key == "modulation_variance_snu") modulation_variance_snu = parse_double(key, value);
    else if (key == "linewidth_hz") linewidth_hz = parse_double(key, value);
    else if (key == "pilot_snr_db") pilot_snr_db = parse_double(key, value);
    else if (key == "channel_transmittance") channel_transmittance = parse_double(key, value);
    else if (key == "repetitions") repetitions = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "rng_seed") rng_seed = parse_u64(key, value);
    else if (key == "cpe_method") {
        auto m = parse_cpe_method(value);
        if (!m) throw std::invalid_argument("config: unknown cpe_method '" + value + "'");
        cpe_method = *m;
    } else if (key == "pilot_filter_bandwidth_hz") pilot_filter_bandwidth_hz = parse_double(key, value);
    else if (key == "snr_reference_bandwidth_hz") snr_reference_bandwidth_hz = parse_double(key, value);
    else if (key == "shot_noise_variance") shot_noise_variance = parse_double(key, value);
    else if (key == "guard_symbols") guard_symbols = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "calibration_frames") calibration_frames = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "compensate_before_filter") compensate_before_filter = parse_bool(key, value);
    else if (key == "pilot_amplitude_override") {
        if (value == "none") pilot_amplitude_override.reset();
        else pilot_amplitude_override = parse_double(key, value);
    } else if (key == "ukf.alpha") ukf.alpha = parse_double(key, value);
    else if (key == "ukf.beta") ukf.beta = parse_double(key, value);
    else if (key == "ukf.kappa") ukf.kappa = parse_double(key, value);
    else if (key == "ukf.process_noise_q") ukf.process_noise_q = parse_double(key, value);
    else if (key == "ukf.measurement_noise_r") ukf.measurement_noise_r = parse_double(key, value);
    else if (key == "ukf.initial_phase") {
        ukf.initial_phase = parse_double(key, value);
        ukf.initial_phase_auto = false;
    } else if (key == "ukf.initial_phase_auto") ukf.initial_phase_auto = parse_bool(key, value);
    else if (key == "ukf.initial_variance_p0") ukf.initial_variance_p0 = parse_double(key, value);
    else if (key == "ukf.amplitude_from_rms") ukf.amplitude_from_rms = parse_bool(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        base.apply_key_value(key, value);
    }
    return base;
}

}  // namespace cvqkd
