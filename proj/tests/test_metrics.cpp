#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvqkd/channel_model.hpp"
#include "cvqkd/metrics.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/rx_dsp.hpp"
#include "doctest.h"

using namespace cvqkd;

namespace {

ExperimentConfig small_config(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.n_symbols = 2048;
    cfg.calibration_frames = 4;
    cfg.rng_seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("metrics") {

    TEST_CASE("calibration rescales its own run to exactly one") {
        auto cal = snu_calibrate(small_config(100));
        CHECK(cal.variance_scale * cal.measured_variance == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cal.noise_floor_snu == 1.0);
        CHECK(cal.amplitude_scale ==
              doctest::Approx(std::sqrt(cal.variance_scale)).epsilon(1e-12));
    }

    TEST_CASE("doubling the injected noise halves the power scale") {
        auto cfg = small_config(101);
        auto cal1 = snu_calibrate(cfg);
        cfg.shot_noise_variance = 2.0;
        auto cal2 = snu_calibrate(cfg);
        // Same seed stream scaled by sqrt(2), so the ratio is exact.
        CHECK(cal2.variance_scale == doctest::Approx(cal1.variance_scale / 2.0).epsilon(1e-9));
    }

    TEST_CASE("calibration is insensitive to the seed at the percent level") {
        auto cfg_a = small_config(200);
        cfg_a.n_symbols = 1u << 15;
        cfg_a.calibration_frames = 16;
        auto cfg_b = cfg_a;
        cfg_b.rng_seed = 201;
        auto cal_a = snu_calibrate(cfg_a);
        auto cal_b = snu_calibrate(cfg_b);
        CHECK(std::abs(cal_a.variance_scale / cal_b.variance_scale - 1.0) < 0.01);
    }

    TEST_CASE("zero shot noise calibrates to unit scale with a zero floor") {
        auto cfg = small_config(102);
        cfg.shot_noise_variance = 0.0;
        auto cal = snu_calibrate(cfg);
        CHECK(cal.variance_scale == 1.0);
        CHECK(cal.noise_floor_snu == 0.0);
    }

    TEST_CASE("shot-noise-only frames measure one SNU after calibration") {
        ExperimentConfig cfg;
        cfg.rng_seed = 300;
        cfg.calibration_frames = 8;
        auto cal = snu_calibrate(cfg);

        ComplexFrame noise;
        noise.sample_rate_hz = cfg.sample_rate_hz;
        noise.samples.assign(cfg.n_samples(), cplx{0.0, 0.0});
        noise = add_shot_noise(derive_seed(cfg.rng_seed, 9999, "shot"), noise,
                               cfg.shot_noise_variance);
        PhaseEstimate zeros;
        zeros.theta_hat.assign(noise.size(), 0.0);
        auto bob = receive(noise, cfg, zeros, cal.amplitude_scale);

        double var = 0.0;
        for (std::size_t k = 0; k < bob.size(); ++k)
            var += bob.i[k] * bob.i[k] + bob.q[k] * bob.q[k];
        var /= 2.0 * double(bob.size());
        CHECK(std::abs(var - 1.0) < 0.01);
    }

    TEST_CASE("second moments on hand-computable frames") {
        SymbolFrame a{{1.0, 1.0}, {1.0, 1.0}, 50e6};
        auto [x, y, z] = second_moments(a, a);
        CHECK(x == doctest::Approx(1.0));
        CHECK(y == doctest::Approx(1.0));
        CHECK(z == doctest::Approx(1.0));

        SymbolFrame b = a;
        for (auto& v : b.i) v *= 2.0;
        for (auto& v : b.q) v *= 2.0;
        auto [x2, y2, z2] = second_moments(a, b);
        CHECK(z2 == doctest::Approx(2.0 * x2));
        CHECK(y2 == doctest::Approx(4.0 * x2));

        SymbolFrame bad{{1.0}, {1.0}, 50e6};
        CHECK_THROWS_AS(second_moments(a, bad), std::invalid_argument);
    }

    TEST_CASE("cross moment of independent frames vanishes") {
        const std::size_t n = 1'000'000;
        auto da = gaussian_stream(51, 2 * n, 1.0);
        auto db = gaussian_stream(52, 2 * n, 1.0);
        SymbolFrame a, b;
        a.symbol_rate_hz = b.symbol_rate_hz = 50e6;
        a.i.resize(n);
        a.q.resize(n);
        b.i.resize(n);
        b.q.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            a.i[k] = da[2 * k];
            a.q[k] = da[2 * k + 1];
            b.i[k] = db[2 * k];
            b.q[k] = db[2 * k + 1];
        }
        auto [x, y, z] = second_moments(a, b);
        CHECK(std::abs(z) < 0.004);
        CHECK(x == doctest::Approx(1.0).epsilon(0.01));
        CHECK(y == doctest::Approx(1.0).epsilon(0.01));
    }

    TEST_CASE("excess noise closed-form cases") {
        auto [t1, xi1] = excess_noise(2.0, 3.0, 2.0);
        CHECK(t1 == doctest::Approx(1.0));
        CHECK(xi1 == doctest::Approx(0.0));

        auto [t2, xi2] = excess_noise(2.0, 2.05, std::sqrt(0.5) * 2.0);
        CHECK(t2 == doctest::Approx(0.5));
        CHECK(xi2 == doctest::Approx(0.05));

        CHECK_THROWS_AS(excess_noise(0.0, 1.0, 0.0), std::domain_error);
        CHECK_THROWS_AS(excess_noise(-1.0, 1.0, 0.0), std::domain_error);
    }

    TEST_CASE("estimator recovers a synthetic channel's T and xi") {
        // Ground-truth channel: B = sqrt(T0) A + N(0, 1 + xi0) per quadrature.
        const double t0 = 0.5, xi0 = 0.05, va = 2.0;
        const std::size_t n = 1'000'000;
        auto alice_draws = gaussian_stream(71, 2 * n, va);
        auto noise_draws = gaussian_stream(72, 2 * n, 1.0 + xi0);
        SymbolFrame alice, bob;
        alice.symbol_rate_hz = bob.symbol_rate_hz = 50e6;
        alice.i.resize(n);
        alice.q.resize(n);
        bob.i.resize(n);
        bob.q.resize(n);
        const double g = std::sqrt(t0);
        for (std::size_t k = 0; k < n; ++k) {
            alice.i[k] = alice_draws[2 * k];
            alice.q[k] = alice_draws[2 * k + 1];
            bob.i[k] = g * alice.i[k] + noise_draws[2 * k];
            bob.q[k] = g * alice.q[k] + noise_draws[2 * k + 1];
        }
        auto [x, y, z] = second_moments(alice, bob);
        auto [t, xi] = excess_noise(x, y, z);
        CHECK(std::abs(t / t0 - 1.0) < 0.01);
        CHECK(std::abs(xi - xi0) < 0.005);
    }

    TEST_CASE("identity channel estimates vanishing excess noise") {
        const double va = 2.0;
        const std::size_t n = 200'000;
        auto alice_draws = gaussian_stream(81, 2 * n, va);
        auto noise_draws = gaussian_stream(82, 2 * n, 1.0);
        SymbolFrame alice, bob;
        alice.symbol_rate_hz = bob.symbol_rate_hz = 50e6;
        alice.i.resize(n);
        alice.q.resize(n);
        bob.i.resize(n);
        bob.q.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            alice.i[k] = alice_draws[2 * k];
            alice.q[k] = alice_draws[2 * k + 1];
            bob.i[k] = alice.i[k] + noise_draws[2 * k];
            bob.q[k] = alice.q[k] + noise_draws[2 * k + 1];
        }
        auto [x, y, z] = second_moments(alice, bob);
        auto [t, xi] = excess_noise(x, y, z);
        const double bound = 3.0 * (x + 1.0) * std::sqrt(2.0 / double(n));
        CHECK(std::abs(xi) < bound);
        CHECK(t == doctest::Approx(1.0).epsilon(0.02));
    }

    TEST_CASE("phase mse basics and wrap behavior") {
        PhaseTrajectory truth{std::vector<double>(100, 0.5), 1e9};
        PhaseEstimate est;
        est.theta_hat.assign(100, 0.5);
        CHECK(phase_mse(truth, est, 0) == doctest::Approx(0.0));

        est.theta_hat.assign(100, 0.5 - std::numbers::pi / 2.0);
        CHECK(phase_mse(truth, est, 0) ==
              doctest::Approx(std::numbers::pi * std::numbers::pi / 4.0).epsilon(1e-12));

        est.theta_hat.assign(100, 0.5 - 2.0 * std::numbers::pi);
        CHECK(phase_mse(truth, est, 0) == doctest::Approx(0.0).epsilon(1e-20));

        est.theta_hat.assign(99, 0.5);
        CHECK_THROWS_AS(phase_mse(truth, est, 0), std::invalid_argument);
    }

    TEST_CASE("phase mse ignores the guard region") {
        PhaseTrajectory truth{std::vector<double>(100, 0.0), 1e9};
        PhaseEstimate est;
        est.theta_hat.assign(100, 0.0);
        est.theta_hat[0] = 3.0;
        est.theta_hat[99] = 3.0;
        CHECK(phase_mse(truth, est, 1) == doctest::Approx(0.0));
        CHECK(phase_mse(truth, est, 0) > 0.0);
    }

    TEST_CASE("phase mse is invariant to full-turn offsets on either argument") {
        const std::size_t n = 256;
        auto truth = wiener_phase(91, n, 1e6, 1e9);
        PhaseEstimate est;
        est.theta_hat = wiener_phase(92, n, 1e6, 1e9).theta;
        const double base = phase_mse(truth, est, 4);

        PhaseTrajectory shifted = truth;
        for (auto& t : shifted.theta) t += 6.0 * std::numbers::pi;
        CHECK(phase_mse(shifted, est, 4) == doctest::Approx(base).epsilon(1e-9));

        PhaseEstimate est_shift = est;
        for (auto& t : est_shift.theta_hat) t -= 2.0 * std::numbers::pi;
        CHECK(phase_mse(truth, est_shift, 4) == doctest::Approx(base).epsilon(1e-9));
    }

    TEST_CASE("second moments are symmetric under swapping I and Q in both frames") {
        const std::size_t n = 1024;
        auto da = gaussian_stream(95, 2 * n, 2.0);
        auto db = gaussian_stream(96, 2 * n, 3.0);
        SymbolFrame a, b, a_swap, b_swap;
        a.symbol_rate_hz = b.symbol_rate_hz = a_swap.symbol_rate_hz = b_swap.symbol_rate_hz = 50e6;
        for (std::size_t k = 0; k < n; ++k) {
            a.i.push_back(da[2 * k]);
            a.q.push_back(da[2 * k + 1]);
            b.i.push_back(db[2 * k]);
            b.q.push_back(db[2 * k + 1]);
            a_swap.i.push_back(da[2 * k + 1]);
            a_swap.q.push_back(da[2 * k]);
            b_swap.i.push_back(db[2 * k + 1]);
            b_swap.q.push_back(db[2 * k]);
        }
        auto [x1, y1, z1] = second_moments(a, b);
        auto [x2, y2, z2] = second_moments(a_swap, b_swap);
        CHECK(x1 == doctest::Approx(x2).epsilon(1e-12));
        CHECK(y1 == doctest::Approx(y2).epsilon(1e-12));
        CHECK(z1 == doctest::Approx(z2).epsilon(1e-12));
    }
}
