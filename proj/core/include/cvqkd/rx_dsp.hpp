#pragma once

#include "cvqkd/config.hpp"
#include "cvqkd/cpe.hpp"
#include "cvqkd/frame.hpp"

namespace cvqkd {

/// Exact inverse of upconvert: multiply sample k by exp(-j 2 pi f_c k / f_s).
ComplexFrame downconvert(const ComplexFrame& frame, double carrier_hz);

/// Same unit-energy root-raised-cosine response as the transmit filter;
/// the cascade of the two is a raised cosine.
ComplexFrame matched_filter(const ComplexFrame& frame, double rolloff, std::size_t sps);

/// output[k] = input[k] * exp(-j theta_hat[k])
ComplexFrame compensate_phase(const ComplexFrame& frame, const PhaseEstimate& estimate);

/// Take samples at offset + k*sps and split into I (real) and Q (imag).
SymbolFrame decimate(const ComplexFrame& frame, std::size_t sps, std::size_t offset);

/// Full receive chain: downconvert, matched filter, phase compensation,
/// decimation. Symbols are scaled into shot-noise units by amplitude_scale
/// (from metrics::snu_calibrate) and the guard symbols at both frame edges are
/// dropped. config.compensate_before_filter flips the filter/compensation
/// order for ablation runs.
SymbolFrame receive(const ComplexFrame& raw, const ExperimentConfig& config,
                    const PhaseEstimate& estimate, double amplitude_scale = 1.0);

}  // namespace cvqkd
