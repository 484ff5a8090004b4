#include "cvqkd/cpe.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "cvqkd/fft.hpp"

namespace cvqkd {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCovarianceJitter = 1e-12;
constexpr double kCovarianceFloor = 1e-18;
}  // namespace

ComplexFrame bandpass_pilot(const ComplexFrame& frame, double center_hz, double bandwidth_hz) {
    const double nyquist = frame.sample_rate_hz / 2.0;
    const double lo = center_hz - bandwidth_hz / 2.0;
    const double hi = center_hz + bandwidth_hz / 2.0;
    if (bandwidth_hz <= 0.0 || lo <= -nyquist || hi >= nyquist)
        throw std::domain_error("bandpass_pilot: band outside Nyquist");

    const std::size_t n = frame.size();
    auto spectrum = fft::forward(frame.samples);
    for (std::size_t m = 0; m < n; ++m) {
        const double signed_bin =
            (m <= n / 2) ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
        const double f = signed_bin * frame.sample_rate_hz / static_cast<double>(n);
        if (f < lo || f > hi) spectrum[m] = cplx{0.0, 0.0};
    }
    ComplexFrame out;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples = fft::inverse(spectrum);
    return out;
}

std::vector<double> unwrap(const std::vector<double>& wrapped) {
    std::vector<double> out(wrapped.size());
    if (wrapped.empty()) return out;
    out[0] = wrapped[0];
    for (std::size_t k = 1; k < wrapped.size(); ++k) {
        double d = wrapped[k] - wrapped[k - 1];
        // Map the difference into (-pi, pi].
        d -= kTwoPi * std::floor((d + std::numbers::pi) / kTwoPi);
        out[k] = out[k - 1] + d;
    }
    return out;
}

PhaseEstimate argument_cpe(const ComplexFrame& pilot_frame, double pilot_freq_hz) {
    const std::size_t n = pilot_frame.size();
    PhaseEstimate est;
    est.method = Estimator::argument;
    std::vector<double> raw(n, 0.0);
    double prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx v = pilot_frame.samples[k];
        if (v == cplx{0.0, 0.0}) {
            raw[k] = prev;
            ++est.degenerate_samples;
        } else {
            raw[k] = std::arg(v);
            prev = raw[k];
        }
    }
    est.theta_hat = unwrap(raw);
    const double w = kTwoPi * pilot_freq_hz / pilot_frame.sample_rate_hz;
    for (std::size_t k = 0; k < n; ++k) est.theta_hat[k] -= w * static_cast<double>(k);
    return est;
}

SigmaPointSet sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           const UkfParams& params) {
    const auto n = mean.size();
    const double lambda =
        params.alpha * params.alpha * (static_cast<double>(n) + params.kappa) - static_cast<double>(n);
    const double c = static_cast<double>(n) + lambda;
    if (!(c > 0.0)) throw EstimatorError("sigma_points: n + lambda must be positive");

    Eigen::MatrixXd scaled = c * covariance;
    Eigen::LLT<Eigen::MatrixXd> llt(scaled);
    if (llt.info() != Eigen::Success) {
        scaled += kCovarianceJitter * Eigen::MatrixXd::Identity(n, n);
        llt.compute(scaled);
        if (llt.info() != Eigen::Success)
            throw EstimatorError("sigma_points: covariance factorization failed after jitter");
    }
    const Eigen::MatrixXd root = llt.matrixL();

    SigmaPointSet set;
    set.points.resize(n, 2 * n + 1);
    set.points.col(0) = mean;
    for (Eigen::Index i = 0; i < n; ++i) {
        set.points.col(1 + i) = mean + root.col(i);
        set.points.col(1 + n + i) = mean - root.col(i);
    }
    set.weights_mean.resize(2 * n + 1);
    set.weights_cov.resize(2 * n + 1);
    set.weights_mean(0) = lambda / c;
    set.weights_cov(0) = lambda / c + (1.0 - params.alpha * params.alpha + params.beta);
    for (Eigen::Index i = 1; i < 2 * n + 1; ++i) {
        set.weights_mean(i) = 1.0 / (2.0 * c);
        set.weights_cov(i) = set.weights_mean(i);
    }
    return set;
}

UkfState ukf_predict(const UkfState& state, double process_noise_q) {
    if (process_noise_q < 0.0) throw std::domain_error("ukf_predict: negative process noise");
    return UkfState{state.mean, state.covariance + process_noise_q};
}

// Scalar-state unscented update. The three sigma points and weights below are
// the n = 1 case of sigma_points(); the unit test pins the equivalence.
UkfState ukf_update(const UkfState& state, const std::array<double, 2>& measurement,
                    std::size_t sample_index, double pilot_freq_hz, double sample_rate_hz,
                    double amplitude, double r, const UkfParams& params) {
    if (!(r > 0.0)) throw std::domain_error("ukf_update: measurement noise must be positive");

    const double lambda = params.alpha * params.alpha * (1.0 + params.kappa) - 1.0;
    const double c = 1.0 + lambda;
    if (!(c > 0.0)) throw EstimatorError("ukf_update: alpha^2 (1 + kappa) must be positive");

    double p_prior = state.covariance;
    if (!(p_prior > 0.0)) p_prior = kCovarianceJitter;
    const double spread = std::sqrt(c * p_prior);

    const double w_m0 = lambda / c;
    const double w_c0 = w_m0 + (1.0 - params.alpha * params.alpha + params.beta);
    const double w_i = 1.0 / (2.0 * c);

    const std::array<double, 3> chi = {state.mean, state.mean + spread, state.mean - spread};
    const double carrier = kTwoPi * pilot_freq_hz / sample_rate_hz * static_cast<double>(sample_index);

    std::array<double, 3> hx{}, hy{};
    for (int i = 0; i < 3; ++i) {
        const double psi = carrier + chi[i];
        hx[i] = amplitude * std::cos(psi);
        hy[i] = amplitude * std::sin(psi);
    }

    const double zx = w_m0 * hx[0] + w_i * (hx[1] + hx[2]);
    const double zy = w_m0 * hy[0] + w_i * (hy[1] + hy[2]);

    double s_xx = r, s_xy = 0.0, s_yy = r;
    double c_x = 0.0, c_y = 0.0;
    const std::array<double, 3> wc = {w_c0, w_i, w_i};
    for (int i = 0; i < 3; ++i) {
        const double dx = hx[i] - zx;
        const double dy = hy[i] - zy;
        const double dt = chi[i] - state.mean;
        s_xx += wc[i] * dx * dx;
        s_xy += wc[i] * dx * dy;
        s_yy += wc[i] * dy * dy;
        c_x += wc[i] * dt * dx;
        c_y += wc[i] * dt * dy;
    }

    const double det = s_xx * s_yy - s_xy * s_xy;
    if (!std::isfinite(det) || det <= 0.0)
        throw EstimatorError("ukf_update: innovation covariance singular");

    // K = C S^-1 (1x2 row vector).
    const double k_x = (c_x * s_yy - c_y * s_xy) / det;
    const double k_y = (c_y * s_xx - c_x * s_xy) / det;

    const double innov_x = measurement[0] - zx;
    const double innov_y = measurement[1] - zy;

    UkfState next;
    next.mean = state.mean + k_x * innov_x + k_y * innov_y;
    const double ksk = k_x * (k_x * s_xx + k_y * s_xy) + k_y * (k_x * s_xy + k_y * s_yy);
    next.covariance = p_prior - ksk;
    if (!(next.covariance > 0.0)) next.covariance = kCovarianceFloor;
    return next;
}

PhaseEstimate ukf_cpe(const ComplexFrame& pilot_frame, double pilot_freq_hz,
                      const UkfParams& params, double amplitude) {
    const std::size_t n = pilot_frame.size();
    PhaseEstimate est;
    est.method = Estimator::ukf;
    est.theta_hat.resize(n);
    if (n == 0) return est;

    double a = amplitude;
    if (params.amplitude_from_rms || !(a > 0.0)) {
        double acc = 0.0;
        for (const auto& v : pilot_frame.samples) acc += v.real() * v.real();
        a = std::sqrt(2.0 * acc / static_cast<double>(n));
        if (!(a > 0.0)) throw EstimatorError("ukf_cpe: cannot infer pilot amplitude");
    }

    UkfState state;
    state.covariance = params.initial_variance_p0;
    if (params.initial_phase_auto) {
        const cplx v0 = pilot_frame.samples[0];
        state.mean = (v0 == cplx{0.0, 0.0}) ? 0.0 : std::arg(v0);
    } else {
        state.mean = params.initial_phase;
    }

    const double q = params.process_noise_q;
    const double r = params.measurement_noise_r;
    for (std::size_t k = 0; k < n; ++k) {
        state = ukf_predict(state, q);
        const cplx z = pilot_frame.samples[k];
        state = ukf_update(state, {z.real(), z.imag()}, k, pilot_freq_hz,
                           pilot_frame.sample_rate_hz, a, r, params);
        est.theta_hat[k] = state.mean;
    }
    return est;
}

}  // namespace cvqkd
