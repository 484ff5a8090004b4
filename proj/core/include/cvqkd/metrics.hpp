#pragma once

#include <cstdint>
#include <tuple>

#include "cvqkd/config.hpp"
#include "cvqkd/cpe.hpp"
#include "cvqkd/frame.hpp"

namespace cvqkd {

/// One Monte Carlo repetition's parameter estimates.
struct ExcessNoiseRecord {
    double x = 0.0;  // Alice second moment, SNU
    double y = 0.0;  // Bob second moment, SNU
    double z = 0.0;  // cross moment, SNU
    double transmittance_t = 0.0;
    double excess_noise_xi = 0.0;
    double pilot_snr_db = 0.0;
    Estimator method = Estimator::argument;
    std::uint64_t seed = 0;  // master seed of the run
    std::size_t repetition_index = 0;
};

/// Result of the shot-noise-unit calibration.
struct Calibration {
    double variance_scale = 1.0;   // multiplies symbol variances into SNU
    double amplitude_scale = 1.0;  // sqrt(variance_scale), applied to symbols
    /// Shot-noise power at the chain output in calibrated units: 1 by
    /// construction, 0 when the configured shot noise is zero.
    double noise_floor_snu = 1.0;
    double measured_variance = 0.0;  // raw per-quadrature variance before scaling
};

/// Runs the receive chain on shot-noise-only frames (no signal, no pilot, no
/// phase noise) with a dedicated seed stream and returns the scale that makes
/// the per-quadrature symbol variance equal to one. Deterministic per
/// (config, seed); results are cached per config digest.
Calibration snu_calibrate(const ExperimentConfig& config);

/// x = mean[(I_A^2+Q_A^2)/2], y likewise for Bob,
/// z = mean[(I_A I_B + Q_A Q_B)/2].
std::tuple<double, double, double> second_moments(const SymbolFrame& alice,
                                                  const SymbolFrame& bob);

/// T = (z/x)^2 and xi = y - noise_floor - T x. The floor is the calibrated
/// shot-noise power (1 SNU normally, 0 for noiseless runs).
std::pair<double, double> excess_noise(double x, double y, double z, double noise_floor = 1.0);

/// Mean over non-guard samples of wrap(theta - theta_hat)^2, wrap into
/// (-pi, pi]. guard_samples are skipped at both ends.
double phase_mse(const PhaseTrajectory& truth, const PhaseEstimate& estimate,
                 std::size_t guard_samples);

}  // namespace cvqkd
