#include "cvqkd/metrics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cvqkd/channel_model.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/rx_dsp.hpp"

namespace cvqkd {

namespace {

std::string calibration_key(const ExperimentConfig& c) {
    // Only the fields the shot-noise-only receive chain can see.
    std::ostringstream key;
    key << c.n_symbols << '|' << c.symbol_rate_hz << '|' << c.sample_rate_hz << '|'
        << c.rrc_rolloff << '|' << c.carrier_hz << '|' << c.guard_symbols << '|'
        << c.calibration_frames << '|' << c.shot_noise_variance << '|' << c.rng_seed << '|'
        << c.compensate_before_filter;
    return key.str();
}

std::mutex g_calibration_mutex;
std::map<std::string, Calibration> g_calibration_cache;

}  // namespace

Calibration snu_calibrate(const ExperimentConfig& config) {
    const std::string key = calibration_key(config);
    {
        std::lock_guard<std::mutex> lock(g_calibration_mutex);
        auto it = g_calibration_cache.find(key);
        if (it != g_calibration_cache.end()) return it->second;
    }

    Calibration cal;
    if (config.shot_noise_variance == 0.0) {
        cal = Calibration{1.0, 1.0, 0.0, 0.0};
    } else {
        const std::size_t n_samples = config.n_samples();
        PhaseEstimate zero_estimate;
        zero_estimate.theta_hat.assign(n_samples, 0.0);

        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t frame_idx = 0; frame_idx < config.calibration_frames; ++frame_idx) {
            ComplexFrame noise;
            noise.sample_rate_hz = config.sample_rate_hz;
            noise.samples.assign(n_samples, cplx{0.0, 0.0});
            noise = add_shot_noise(derive_seed(config.rng_seed, frame_idx, "calibration"), noise,
                                   config.shot_noise_variance);
            SymbolFrame symbols = receive(noise, config, zero_estimate, 1.0);
            for (std::size_t k = 0; k < symbols.size(); ++k) {
                acc += symbols.i[k] * symbols.i[k] + symbols.q[k] * symbols.q[k];
            }
            count += 2 * symbols.size();
        }
        const double measured = acc / static_cast<double>(count);
        cal.measured_variance = measured;
        cal.variance_scale = 1.0 / measured;
        cal.amplitude_scale = std::sqrt(cal.variance_scale);
        cal.noise_floor_snu = 1.0;
    }

    std::lock_guard<std::mutex> lock(g_calibration_mutex);
    g_calibration_cache.emplace(key, cal);
    return cal;
}

std::tuple<double, double, double> second_moments(const SymbolFrame& alice,
                                                  const SymbolFrame& bob) {
    if (alice.size() != bob.size())
        throw std::invalid_argument("second_moments: frame length mismatch");
    if (alice.size() < 2) throw std::invalid_argument("second_moments: need at least 2 symbols");

    double sx = 0.0, sy = 0.0, sz = 0.0;
    const std::size_t n = alice.size();
    for (std::size_t k = 0; k < n; ++k) {
        sx += alice.i[k] * alice.i[k] + alice.q[k] * alice.q[k];
        sy += bob.i[k] * bob.i[k] + bob.q[k] * bob.q[k];
        sz += alice.i[k] * bob.i[k] + alice.q[k] * bob.q[k];
    }
    const double inv = 1.0 / (2.0 * static_cast<double>(n));
    return {sx * inv, sy * inv, sz * inv};
}

std::pair<double, double> excess_noise(double x, double y, double z, double noise_floor) {
    if (!(x > 0.0)) throw std::domain_error("excess_noise: x must be positive");
    const double t = (z / x) * (z / x);
    const double xi = y - noise_floor - t * x;
    return {t, xi};
}

double phase_mse(const PhaseTrajectory& truth, const PhaseEstimate& estimate,
                 std::size_t guard_samples) {
    const std::size_t n = truth.size();
    if (n != estimate.theta_hat.size())
        throw std::invalid_argument("phase_mse: length mismatch");
    if (2 * guard_samples >= n) throw std::invalid_argument("phase_mse: guard too large");

    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t k = guard_samples; k < n - guard_samples; ++k) {
        double r = truth.theta[k] - estimate.theta_hat[k];
        r -= 2.0 * std::numbers::pi *
             std::floor((r + std::numbers::pi) / (2.0 * std::numbers::pi));
        acc += r * r;
        ++count;
    }
    return acc / static_cast<double>(count);
}

}  // namespace cvqkd
