#include <chrono>
#include <cmath>
#include <sstream>

#include "cvqkd/channel_model.hpp"
#include "cvqkd/cpe.hpp"
#include "cvqkd/harness.hpp"
#include "cvqkd/metrics.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/rx_dsp.hpp"
#include "cvqkd/tx_frontend.hpp"

namespace cvqkd {

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.n_symbols = 2048;
    cfg.calibration_frames = 4;
    cfg.rng_seed = 424242;
    return cfg;
}

bool check_unscented_exactness(std::string& detail) {
    UkfParams params;
    Xoshiro256pp rng(99);
    for (int n : {1, 2}) {
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXd mean(n);
            for (int i = 0; i < n; ++i) mean(i) = 4.0 * rng.next_double() - 2.0;
            Eigen::MatrixXd a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = 2.0 * rng.next_double() - 1.0;
            Eigen::MatrixXd cov = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);

            auto set = sigma_points(mean, cov, params);
            const double weight_sum = set.weights_mean.sum();
            Eigen::VectorXd rec_mean = set.points * set.weights_mean;
            Eigen::MatrixXd rec_cov = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < set.points.cols(); ++i) {
                Eigen::VectorXd d = set.points.col(i) - rec_mean;
                rec_cov += set.weights_cov(i) * d * d.transpose();
            }
            if (std::abs(weight_sum - 1.0) > 1e-12 ||
                (rec_mean - mean).lpNorm<Eigen::Infinity>() > 1e-12 ||
                (rec_cov - cov).lpNorm<Eigen::Infinity>() > 1e-12) {
                std::ostringstream msg;
                msg << "reconstruction off at n=" << n << " trial=" << trial;
                detail = msg.str();
                return false;
            }
        }
    }
    return true;
}

bool check_rrc_cascade_isi(std::string& detail) {
    const std::size_t sps = 8, n_symbols = 512;
    ComplexFrame impulse;
    impulse.sample_rate_hz = 8e6;
    impulse.samples.assign(sps * n_symbols, cplx{0.0, 0.0});
    impulse.samples[0] = 1.0;
    auto cascade = rrc_filter(rrc_filter(impulse, 0.2, sps), 0.2, sps);

    const double center = std::abs(cascade.samples[0]);
    double worst = 0.0;
    for (std::size_t k = 1; k < n_symbols; ++k)
        worst = std::max(worst, std::abs(cascade.samples[k * sps]));
    if (std::abs(center - 1.0) > 1e-6 || worst / center > 1e-3) {
        std::ostringstream msg;
        msg << "center=" << center << " worst symbol-spaced tap=" << worst;
        detail = msg.str();
        return false;
    }
    return true;
}

bool check_wiener_variance(std::string& detail) {
    const double linewidth = 2e3, fs = 1e9;
    const std::size_t n = 1'000'000;
    auto traj = wiener_phase(7, n, linewidth, fs);
    double acc = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double d = traj.theta[k] - traj.theta[k - 1];
        acc += d * d;
    }
    const double measured = acc / static_cast<double>(n - 1);
    const double expected = 2.0 * M_PI * linewidth / fs;
    if (std::abs(measured / expected - 1.0) > 0.01) {
        std::ostringstream msg;
        msg << "step variance " << measured << " vs expected " << expected;
        detail = msg.str();
        return false;
    }
    return true;
}

bool check_calibration(std::string& detail) {
    auto cfg = small_config();
    const Calibration cal = snu_calibrate(cfg);
    const double rescaled = cal.variance_scale * cal.measured_variance;
    if (std::abs(rescaled - 1.0) > 1e-12 || cal.noise_floor_snu != 1.0) {
        std::ostringstream msg;
        msg << "scale*variance=" << rescaled;
        detail = msg.str();
        return false;
    }
    return true;
}

bool check_noiseless_loopback(std::string& detail) {
    auto cfg = small_config();
    cfg.linewidth_hz = 0.0;
    cfg.shot_noise_variance = 0.0;
    auto result = run_single(cfg, 0, {Estimator::perfect});
    const auto& mr = result.methods.at(0);
    if (mr.failed || std::abs(mr.record.excess_noise_xi) > 1e-6 ||
        std::abs(mr.record.transmittance_t - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "xi=" << mr.record.excess_noise_xi << " T=" << mr.record.transmittance_t;
        detail = msg.str();
        return false;
    }
    return true;
}

bool check_param_validation(std::string& detail) {
    bool threw_config = false;
    try {
        auto cfg = small_config();
        cfg.ukf.measurement_noise_r = 0.0;  // must be rejected, not auto-resolved
        cfg.validate();
    } catch (const std::invalid_argument&) {
        threw_config = true;
    }
    bool threw_predict = false;
    try {
        ukf_predict(UkfState{0.0, 0.01}, -1.0);
    } catch (const std::domain_error&) {
        threw_predict = true;
    }
    if (!threw_config || !threw_predict) {
        detail = "invalid filter parameters were not rejected";
        return false;
    }
    return true;
}

}  // namespace

SelftestReport selftest() {
    using Clock = std::chrono::steady_clock;
    SelftestReport report;

    const std::pair<std::string, bool (*)(std::string&)> checks[] = {
        {"unscented_transform_exactness", &check_unscented_exactness},
        {"rrc_cascade_isi", &check_rrc_cascade_isi},
        {"wiener_increment_variance", &check_wiener_variance},
        {"snu_calibration_consistency", &check_calibration},
        {"noiseless_loopback", &check_noiseless_loopback},
        {"filter_parameter_validation", &check_param_validation},
    };

    for (const auto& [name, fn] : checks) {
        SelftestCheck entry;
        entry.name = name;
        const auto start = Clock::now();
        try {
            entry.passed = fn(entry.detail);
        } catch (const std::exception& e) {
            entry.passed = false;
            entry.detail = e.what();
        }
        entry.wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        report.checks.push_back(std::move(entry));
    }
    return report;
}

}  // namespace cvqkd
