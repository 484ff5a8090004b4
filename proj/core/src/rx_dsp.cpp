#include "cvqkd/rx_dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvqkd/tx_frontend.hpp"

namespace cvqkd {

ComplexFrame downconvert(const ComplexFrame& frame, double carrier_hz) {
    if (std::abs(carrier_hz) >= frame.sample_rate_hz / 2.0)
        throw std::invalid_argument("downconvert: carrier outside Nyquist band");
    ComplexFrame out;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples.resize(frame.size());
    const double w = 2.0 * std::numbers::pi * carrier_hz / frame.sample_rate_hz;
    for (std::size_t k = 0; k < frame.size(); ++k)
        out.samples[k] = frame.samples[k] * std::polar(1.0, -w * static_cast<double>(k));
    return out;
}

ComplexFrame matched_filter(const ComplexFrame& frame, double rolloff, std::size_t sps) {
    return rrc_filter(frame, rolloff, sps);
}

ComplexFrame compensate_phase(const ComplexFrame& frame, const PhaseEstimate& estimate) {
    if (frame.size() != estimate.theta_hat.size())
        throw std::invalid_argument("compensate_phase: frame/estimate length mismatch");
    ComplexFrame out;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples.resize(frame.size());
    for (std::size_t k = 0; k < frame.size(); ++k) {
        const double theta = estimate.theta_hat[k];
        out.samples[k] =
            theta == 0.0 ? frame.samples[k] : frame.samples[k] * std::polar(1.0, -theta);
    }
    return out;
}

SymbolFrame decimate(const ComplexFrame& frame, std::size_t sps, std::size_t offset) {
    if (sps == 0) throw std::invalid_argument("decimate: sps must be >= 1");
    if (offset >= sps) throw std::domain_error("decimate: offset out of range");
    SymbolFrame out;
    out.symbol_rate_hz = frame.sample_rate_hz / static_cast<double>(sps);
    const std::size_t n_symbols = frame.size() / sps;
    out.i.resize(n_symbols);
    out.q.resize(n_symbols);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        const cplx v = frame.samples[offset + k * sps];
        out.i[k] = v.real();
        out.q[k] = v.imag();
    }
    return out;
}

SymbolFrame receive(const ComplexFrame& raw, const ExperimentConfig& config,
                    const PhaseEstimate& estimate, double amplitude_scale) {
    if (raw.size() != estimate.theta_hat.size())
        throw std::invalid_argument("receive: frame/estimate length mismatch");

    const std::size_t sps = config.samples_per_symbol();
    ComplexFrame stage = downconvert(raw, config.carrier_hz);
    if (config.compensate_before_filter) {
        stage = compensate_phase(stage, estimate);
        stage = matched_filter(stage, config.rrc_rolloff, sps);
    } else {
        stage = matched_filter(stage, config.rrc_rolloff, sps);
        stage = compensate_phase(stage, estimate);
    }
    // Zero-phase circular filtering keeps symbol centers on the upsampling
    // grid, so the decimation offset is 0 by construction.
    SymbolFrame symbols = decimate(stage, sps, 0);

    const std::size_t guard = config.guard_symbols;
    if (2 * guard >= symbols.size())
        throw std::invalid_argument("receive: guard interval leaves no symbols");
    SymbolFrame out;
    out.symbol_rate_hz = symbols.symbol_rate_hz;
    out.i.assign(symbols.i.begin() + guard, symbols.i.end() - guard);
    out.q.assign(symbols.q.begin() + guard, symbols.q.end() - guard);
    if (amplitude_scale != 1.0) {
        for (auto& v : out.i) v *= amplitude_scale;
        for (auto& v : out.q) v *= amplitude_scale;
    }
    return out;
}

}  // namespace cvqkd
