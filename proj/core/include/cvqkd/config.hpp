#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace cvqkd {

enum class CpeMethod { argument, ukf, both };

std::string to_string(CpeMethod m);
std::optional<CpeMethod> parse_cpe_method(const std::string& s);

/// Phase estimator identity attached to estimates and result records.
/// `perfect` feeds the true trajectory back (diagnostic baseline only).
enum class Estimator { argument, ukf, perfect };

std::string to_string(Estimator e);
std::optional<Estimator> parse_estimator(const std::string& s);

/// Unscented transform and phase-tracking filter parameters. Negative values
/// for q, r, initial_phase mean "derive from the experiment config at run
/// time" (see ExperimentConfig::resolved_ukf).
struct UkfParams {
    double alpha = 0.1;
    double beta = 2.0;
    double kappa = 0.0;
    double process_noise_q = -1.0;      // rad^2/sample; auto: 2*pi*linewidth/f_s
    double measurement_noise_r = -1.0;  // auto: per-quadrature shot variance per sample
    double initial_phase = 0.0;
    bool initial_phase_auto = true;     // warm start from the argument of sample 0
    double initial_variance_p0 = 0.01;  // rad^2
    bool amplitude_from_rms = false;    // estimate pilot amplitude instead of using the known value
};

/// Full parameter set for one simulated transmission.
struct ExperimentConfig {
    std::size_t n_symbols = 1u << 15;
    double symbol_rate_hz = 50e6;
    double sample_rate_hz = 1e9;
    double rrc_rolloff = 0.001;
    double carrier_hz = 250e6;
    double pilot_offset_hz = 50e6;
    double modulation_variance_snu = 2.0;
    double linewidth_hz = 2e3;
    double pilot_snr_db = 20.0;
    double channel_transmittance = 1.0;
    std::size_t repetitions = 310;
    std::uint64_t rng_seed = 1;
    CpeMethod cpe_method = CpeMethod::both;
    double pilot_filter_bandwidth_hz = 10e6;

    // Pilot SNR is quoted against the shot noise in this reference bandwidth.
    // Default: half the symbol rate (the one-sided width of the signal band,
    // i.e. the band that defines a shot-noise unit). Set to sample_rate_hz to
    // reference the full per-sample noise power instead.
    double snr_reference_bandwidth_hz = -1.0;  // auto: symbol_rate_hz / 2

    double shot_noise_variance = 1.0;  // per quadrature, per full-rate sample
    std::size_t guard_symbols = 256;   // trimmed from each frame edge in all metrics
    std::size_t calibration_frames = 64;
    bool compensate_before_filter = false;  // ablation; default order is filter, then compensate
    std::optional<double> pilot_amplitude_override;

    UkfParams ukf;

    // Derived quantities.
    std::size_t samples_per_symbol() const;
    std::size_t n_samples() const { return n_symbols * samples_per_symbol(); }
    double pilot_freq_hz() const { return carrier_hz + pilot_offset_hz; }
    double wiener_step_variance() const;
    double snr_reference_bandwidth() const;
    /// Shot-noise variance per quadrature inside the SNR reference bandwidth.
    double snr_reference_variance() const;
    double pilot_amplitude() const;
    /// UkfParams with every auto field replaced by its derived value.
    UkfParams resolved_ukf() const;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    /// Canonical key=value serialization (stable ordering).
    std::map<std::string, std::string> to_key_values() const;
    /// FNV-1a over the canonical serialization; changes when any field changes.
    std::string digest() const;

    /// Apply "key=value" text (config file line or CLI override).
    /// Throws std::invalid_argument on unknown key or malformed value.
    void apply_key_value(const std::string& key, const std::string& value);
};

/// Parse a plain-text config file of key=value lines ('#' comments allowed).
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

}  // namespace cvqkd
