#pragma once

#include <cstdint>

#include "cvqkd/frame.hpp"

namespace cvqkd {

/// A single pilot tone at an absolute digital frequency.
struct PilotSpec {
    double frequency_hz = 300e6;
    double amplitude = 0.0;
};

/// Gaussian I/Q symbols, zero mean, per-quadrature variance
/// modulation_variance_snu.
SymbolFrame generate_symbols(std::uint64_t seed, std::size_t n_symbols,
                             double modulation_variance_snu, double symbol_rate_hz);

/// Zero-insertion upsampling by sps.
ComplexFrame upsample(const SymbolFrame& symbols, std::size_t sps);

/// Unit-energy root-raised-cosine response applied as a spectral mask
/// (circular convolution). The rolloff 0.001 used here makes a truncated FIR
/// impractically long; the mask is exact up to frame circularity.
ComplexFrame rrc_filter(const ComplexFrame& frame, double rolloff, std::size_t sps);

/// Multiply sample k by exp(+j 2 pi f_shift k / f_s).
ComplexFrame upconvert(const ComplexFrame& frame, double f_shift_hz);

/// Add amplitude * exp(j 2 pi f_p k / f_s).
ComplexFrame add_pilot(const ComplexFrame& frame, const PilotSpec& pilot);

/// Amplitude A with A^2 / (2 sigma^2) = 10^(snr_db/10), sigma^2 the
/// per-quadrature noise variance the SNR is referenced to.
double pilot_amplitude_for_snr(double pilot_snr_db, double noise_variance_per_quadrature);

}  // namespace cvqkd
