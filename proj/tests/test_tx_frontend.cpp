#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvqkd/fft.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/rx_dsp.hpp"
#include "cvqkd/tx_frontend.hpp"
#include "doctest.h"

using namespace cvqkd;

namespace {

double variance(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(xs.size());
}

double energy(const ComplexFrame& f) {
    double acc = 0.0;
    for (const auto& v : f.samples) acc += std::norm(v);
    return acc;
}

}  // namespace

TEST_SUITE("tx_frontend") {

    TEST_CASE("symbol variance lands in the expected interval at 2^15 symbols") {
        auto symbols = generate_symbols(42, 1u << 15, 2.0, 50e6);
        CHECK(variance(symbols.i) > 1.97);
        CHECK(variance(symbols.i) < 2.03);
        CHECK(variance(symbols.q) > 1.97);
        CHECK(variance(symbols.q) < 2.03);
    }

    TEST_CASE("zero modulation variance gives an all-zero frame") {
        auto symbols = generate_symbols(42, 64, 0.0, 50e6);
        for (std::size_t k = 0; k < symbols.size(); ++k) {
            CHECK(symbols.i[k] == 0.0);
            CHECK(symbols.q[k] == 0.0);
        }
    }

    TEST_CASE("same seed reproduces the frame") {
        auto a = generate_symbols(9, 128, 2.0, 50e6);
        auto b = generate_symbols(9, 128, 2.0, 50e6);
        CHECK(a.i == b.i);
        CHECK(a.q == b.q);
    }

    TEST_CASE("upsample inserts zeros and preserves energy") {
        SymbolFrame s{{1.0}, {0.0}, 50e6};
        auto up = upsample(s, 4);
        REQUIRE(up.size() == 4);
        CHECK(up.samples[0] == cplx{1.0, 0.0});
        for (int k = 1; k < 4; ++k) CHECK(up.samples[k] == cplx{0.0, 0.0});
        CHECK(up.sample_rate_hz == doctest::Approx(200e6));

        auto symbols = generate_symbols(5, 256, 2.0, 50e6);
        auto up2 = upsample(symbols, 8);
        double sym_energy = 0.0;
        for (std::size_t k = 0; k < symbols.size(); ++k)
            sym_energy += symbols.i[k] * symbols.i[k] + symbols.q[k] * symbols.q[k];
        CHECK(energy(up2) == doctest::Approx(sym_energy).epsilon(1e-12));
    }

    TEST_CASE("upsample with sps=1 is the identity embedding") {
        auto symbols = generate_symbols(5, 64, 2.0, 50e6);
        auto up = upsample(symbols, 1);
        for (std::size_t k = 0; k < symbols.size(); ++k) {
            CHECK(up.samples[k].real() == symbols.i[k]);
            CHECK(up.samples[k].imag() == symbols.q[k]);
        }
    }

    TEST_CASE("rrc filter has unit energy") {
        ComplexFrame impulse;
        impulse.sample_rate_hz = 1e9;
        impulse.samples.assign(4096, cplx{0.0, 0.0});
        impulse.samples[0] = 1.0;
        auto h = rrc_filter(impulse, 0.001, 16);
        CHECK(std::abs(energy(h) - 1.0) < 1e-6);
    }

    TEST_CASE("tx/rx rrc cascade satisfies the ISI criterion") {
        const std::size_t sps = 20, n_symbols = 2048;
        ComplexFrame impulse;
        impulse.sample_rate_hz = 1e9;
        impulse.samples.assign(sps * n_symbols, cplx{0.0, 0.0});
        impulse.samples[0] = 1.0;
        auto cascade = rrc_filter(rrc_filter(impulse, 0.001, sps), 0.001, sps);
        const double center = std::abs(cascade.samples[0]);
        CHECK(center == doctest::Approx(1.0).epsilon(1e-9));
        double worst = 0.0;
        for (std::size_t k = 1; k < n_symbols; ++k)
            worst = std::max(worst, std::abs(cascade.samples[k * sps]));
        CHECK(worst / center < 1e-3);
    }

    TEST_CASE("rrc stopband is dark") {
        const std::size_t n = 1u << 16;
        const std::size_t sps = 20;
        ComplexFrame noise;
        noise.sample_rate_hz = 1e9;
        noise.samples.resize(n);
        auto draws = gaussian_stream(77, 2 * n, 1.0);
        for (std::size_t k = 0; k < n; ++k) noise.samples[k] = {draws[2 * k], draws[2 * k + 1]};

        auto shaped = rrc_filter(noise, 0.001, sps);
        auto spectrum = fft::forward(shaped.samples);
        const double rs = 1e9 / static_cast<double>(sps);
        const double edge = (1.0 + 0.001) * rs / 2.0;
        double in_band = 0.0, out_band = 0.0;
        std::size_t in_count = 0, out_count = 0;
        for (std::size_t m = 0; m < n; ++m) {
            const double bin = (m <= n / 2) ? double(m) : double(m) - double(n);
            const double f = bin * 1e9 / double(n);
            if (std::abs(f) < 0.9 * rs / 2.0) {
                in_band += std::norm(spectrum[m]);
                ++in_count;
            } else if (std::abs(f) > edge) {
                out_band += std::norm(spectrum[m]);
                ++out_count;
            }
        }
        const double in_level = in_band / double(in_count);
        const double out_level = out_band / double(out_count);
        // -60 dB required; the spectral mask actually zeroes the stopband.
        CHECK(out_level < 1e-6 * in_level);
    }

    TEST_CASE("rolloff outside [0,1] is rejected") {
        ComplexFrame f;
        f.sample_rate_hz = 1e9;
        f.samples.assign(64, cplx{1.0, 0.0});
        CHECK_THROWS_AS(rrc_filter(f, -0.1, 4), std::domain_error);
        CHECK_THROWS_AS(rrc_filter(f, 1.5, 4), std::domain_error);
    }

    TEST_CASE("upconvert rotates and preserves energy") {
        ComplexFrame f;
        f.sample_rate_hz = 4.0;
        f.samples.assign(4, cplx{1.0, 0.0});
        auto shifted = upconvert(f, 1.0);
        CHECK(std::abs(shifted.samples[0] - cplx{1.0, 0.0}) < 1e-12);
        CHECK(std::abs(shifted.samples[1] - cplx{0.0, 1.0}) < 1e-12);
        CHECK(std::abs(shifted.samples[2] - cplx{-1.0, 0.0}) < 1e-12);
        CHECK(std::abs(shifted.samples[3] - cplx{0.0, -1.0}) < 1e-12);
        CHECK(energy(shifted) == doctest::Approx(energy(f)).epsilon(1e-12));

        auto same = upconvert(f, 0.0);
        for (std::size_t k = 0; k < 4; ++k) CHECK(same.samples[k] == f.samples[k]);
    }

    TEST_CASE("add_pilot produces a single spectral line") {
        const std::size_t n = 256;
        ComplexFrame f;
        f.sample_rate_hz = 4.0;
        f.samples.assign(n, cplx{0.0, 0.0});

        auto same = add_pilot(f, PilotSpec{1.0, 0.0});
        for (std::size_t k = 0; k < n; ++k) CHECK(same.samples[k] == f.samples[k]);

        auto tone = add_pilot(f, PilotSpec{1.0, 1.0});  // f_s / 4
        CHECK(std::abs(tone.samples[0] - cplx{1.0, 0.0}) < 1e-12);
        CHECK(std::abs(tone.samples[1] - cplx{0.0, 1.0}) < 1e-12);
        CHECK(std::abs(tone.samples[2] - cplx{-1.0, 0.0}) < 1e-12);

        auto spectrum = fft::forward(tone.samples);
        for (std::size_t m = 0; m < n; ++m) {
            if (m == n / 4) {
                CHECK(std::abs(spectrum[m]) == doctest::Approx(double(n)).epsilon(1e-9));
            } else {
                CHECK(std::abs(spectrum[m]) < 1e-9 * double(n));
            }
        }
    }

    TEST_CASE("pilot amplitude from SNR") {
        CHECK(pilot_amplitude_for_snr(0.0, 0.5) == doctest::Approx(1.0));
        CHECK(pilot_amplitude_for_snr(20.0, 0.5) == doctest::Approx(10.0));
        CHECK(pilot_amplitude_for_snr(10.0, 1.0) == doctest::Approx(std::sqrt(20.0)));
        CHECK_THROWS_AS(pilot_amplitude_for_snr(10.0, 0.0), std::domain_error);
    }

    TEST_CASE("transmit chain is linear in the symbols") {
        const std::size_t sps = 20;
        auto symbols = generate_symbols(15, 512, 2.0, 50e6);
        SymbolFrame scaled = symbols;
        for (auto& v : scaled.i) v *= 3.0;
        for (auto& v : scaled.q) v *= 3.0;

        auto chain = [&](const SymbolFrame& s) {
            return upconvert(rrc_filter(upsample(s, sps), 0.001, sps), 250e6);
        };
        auto a = chain(symbols);
        auto b = chain(scaled);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
            worst = std::max(worst, std::abs(b.samples[k] - 3.0 * a.samples[k]));
        CHECK(worst < 1e-9);
    }

    TEST_CASE("signal band leaves the pilot band dark when the pilot is off") {
        const std::size_t sps = 20, n_symbols = 4096;
        auto symbols = generate_symbols(21, n_symbols, 2.0, 50e6);
        auto wave = upconvert(rrc_filter(upsample(symbols, sps), 0.001, sps), 250e6);
        auto spectrum = fft::forward(wave.samples);
        const std::size_t n = wave.size();
        double total = 0.0, pilot_band = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double bin = (m <= n / 2) ? double(m) : double(m) - double(n);
            const double f = bin * 1e9 / double(n);
            const double p = std::norm(spectrum[m]);
            total += p;
            if (f > 295e6 && f < 305e6) pilot_band += p;
        }
        CHECK(pilot_band < 1e-4 * total);  // -40 dB required, mask gives much less
    }

    TEST_CASE("noiseless tx/rx loopback recovers the symbols") {
        const std::size_t sps = 20;
        auto symbols = generate_symbols(33, 2048, 2.0, 50e6);
        auto wave = upconvert(rrc_filter(upsample(symbols, sps), 0.001, sps), 250e6);
        auto back = matched_filter(downconvert(wave, 250e6), 0.001, sps);
        auto recovered = decimate(back, sps, 0);

        double err = 0.0, ref = 0.0;
        for (std::size_t k = 0; k < symbols.size(); ++k) {
            const double di = recovered.i[k] - symbols.i[k];
            const double dq = recovered.q[k] - symbols.q[k];
            err += di * di + dq * dq;
            ref += symbols.i[k] * symbols.i[k] + symbols.q[k] * symbols.q[k];
        }
        CHECK(std::sqrt(err / ref) < 1e-3);
    }
}
