#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cvqkd {

using cplx = std::complex<double>;

/// Uniformly sampled complex baseband/passband waveform.
struct ComplexFrame {
    std::vector<cplx> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

/// Per-symbol I/Q pairs at symbol rate.
struct SymbolFrame {
    std::vector<double> i;
    std::vector<double> q;
    double symbol_rate_hz = 0.0;

    std::size_t size() const { return i.size(); }
};

/// Per-sample phase in radians. The sequence is kept unwrapped: consecutive
/// differences are the raw increments, no modular reduction.
struct PhaseTrajectory {
    std::vector<double> theta;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return theta.size(); }
};

}  // namespace cvqkd
