#include "cvqkd/tx_frontend.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvqkd/fft.hpp"
#include "cvqkd/random.hpp"

namespace cvqkd {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SymbolFrame generate_symbols(std::uint64_t seed, std::size_t n_symbols,
                             double modulation_variance_snu, double symbol_rate_hz) {
    if (n_symbols == 0) throw std::invalid_argument("generate_symbols: n_symbols must be >= 1");
    // Interleaved draws: even indices are I, odd indices are Q.
    auto draws = gaussian_stream(seed, 2 * n_symbols, modulation_variance_snu);
    SymbolFrame out;
    out.symbol_rate_hz = symbol_rate_hz;
    out.i.resize(n_symbols);
    out.q.resize(n_symbols);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        out.i[k] = draws[2 * k];
        out.q[k] = draws[2 * k + 1];
    }
    return out;
}

ComplexFrame upsample(const SymbolFrame& symbols, std::size_t sps) {
    if (sps == 0) throw std::invalid_argument("upsample: sps must be >= 1");
    ComplexFrame out;
    out.sample_rate_hz = symbols.symbol_rate_hz * static_cast<double>(sps);
    out.samples.assign(symbols.size() * sps, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < symbols.size(); ++k)
        out.samples[k * sps] = cplx{symbols.i[k], symbols.q[k]};
    return out;
}

namespace {

// Raised-cosine magnitude response on the DFT grid, 1 in the passband, 0 in
// the stopband, cosine transition of width rolloff * R_s. Folding over
// aliases of R_s sums to exactly 1, which is what makes the tx/rx cascade
// ISI-free on the symbol grid.
double raised_cosine_gain(double abs_freq_over_rs, double rolloff) {
    const double lo = (1.0 - rolloff) / 2.0;
    const double hi = (1.0 + rolloff) / 2.0;
    if (abs_freq_over_rs <= lo) return 1.0;
    if (abs_freq_over_rs >= hi) return 0.0;
    if (rolloff == 0.0) return 0.5;  // single boundary bin
    const double x = (abs_freq_over_rs - lo) / rolloff;  // in (0, 1)
    return 0.5 * (1.0 + std::cos(std::numbers::pi * x));
}

ComplexFrame apply_rrc_mask(const ComplexFrame& frame, double rolloff, std::size_t sps) {
    if (rolloff < 0.0 || rolloff > 1.0)
        throw std::domain_error("rrc_filter: rolloff must be in [0, 1]");
    if (frame.samples.empty()) throw std::invalid_argument("rrc_filter: empty frame");
    if (sps == 0) throw std::invalid_argument("rrc_filter: sps must be >= 1");

    const std::size_t n = frame.size();
    auto spectrum = fft::forward(frame.samples);
    const double root_sps = std::sqrt(static_cast<double>(sps));
    for (std::size_t m = 0; m < n; ++m) {
        // Signed bin frequency as a fraction of the symbol rate.
        const double signed_bin =
            (m <= n / 2) ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
        const double f_over_rs = std::abs(signed_bin) * static_cast<double>(sps) / static_cast<double>(n);
        spectrum[m] *= root_sps * std::sqrt(raised_cosine_gain(f_over_rs, rolloff));
    }
    ComplexFrame out;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples = fft::inverse(spectrum);
    return out;
}

}  // namespace

ComplexFrame rrc_filter(const ComplexFrame& frame, double rolloff, std::size_t sps) {
    return apply_rrc_mask(frame, rolloff, sps);
}

ComplexFrame upconvert(const ComplexFrame& frame, double f_shift_hz) {
    if (std::abs(f_shift_hz) >= frame.sample_rate_hz / 2.0)
        throw std::invalid_argument("upconvert: shift outside Nyquist band");
    ComplexFrame out;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples.resize(frame.size());
    const double w = kTwoPi * f_shift_hz / frame.sample_rate_hz;
    for (std::size_t k = 0; k < frame.size(); ++k)
        out.samples[k] = frame.samples[k] * std::polar(1.0, w * static_cast<double>(k));
    return out;
}

ComplexFrame add_pilot(const ComplexFrame& frame, const PilotSpec& pilot) {
    if (std::abs(pilot.frequency_hz) >= frame.sample_rate_hz / 2.0)
        throw std::invalid_argument("add_pilot: pilot outside Nyquist band");
    ComplexFrame out = frame;
    if (pilot.amplitude == 0.0) return out;
    const double w = kTwoPi * pilot.frequency_hz / frame.sample_rate_hz;
    for (std::size_t k = 0; k < out.size(); ++k)
        out.samples[k] += pilot.amplitude * std::polar(1.0, w * static_cast<double>(k));
    return out;
}

double pilot_amplitude_for_snr(double pilot_snr_db, double noise_variance_per_quadrature) {
    if (!(noise_variance_per_quadrature > 0.0))
        throw std::domain_error("pilot_amplitude_for_snr: noise variance must be positive");
    return std::sqrt(2.0 * noise_variance_per_quadrature * std::pow(10.0, pilot_snr_db / 10.0));
}

}  // namespace cvqkd
