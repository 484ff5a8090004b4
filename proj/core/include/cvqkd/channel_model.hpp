#pragma once

#include <cstdint>

#include "cvqkd/frame.hpp"

namespace cvqkd {

/// Wiener-process laser phase: theta[0] = 0, increments i.i.d.
/// N(0, 2 pi linewidth / sample_rate).
PhaseTrajectory wiener_phase(std::uint64_t seed, std::size_t n_samples, double linewidth_hz,
                             double sample_rate_hz);

/// output[k] = input[k] * exp(j theta[k])
ComplexFrame apply_phase(const ComplexFrame& frame, const PhaseTrajectory& phase);

/// Amplitude scaling by sqrt(T). The lost vacuum contribution is supplied by
/// add_shot_noise's fixed noise floor, so loss comes before shot noise.
ComplexFrame apply_loss(const ComplexFrame& frame, double transmittance);

/// Independent N(0, sigma2) on the real and imaginary part of every sample.
ComplexFrame add_shot_noise(std::uint64_t seed, const ComplexFrame& frame,
                            double sigma2_per_quadrature);

}  // namespace cvqkd
