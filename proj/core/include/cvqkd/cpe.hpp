#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cvqkd/config.hpp"
#include "cvqkd/frame.hpp"

namespace cvqkd {

/// Thrown when the filter's covariance machinery breaks down (failed
/// factorization after jitter, singular innovation covariance). The harness
/// records such runs as flagged rows instead of crashing.
class EstimatorError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Full-rate phase estimate produced by one CPE method.
struct PhaseEstimate {
    std::vector<double> theta_hat;
    Estimator method = Estimator::argument;
    /// Zero-magnitude input samples where the argument had to be carried over
    /// from the previous sample.
    std::size_t degenerate_samples = 0;
};

/// Phase-tracking filter state. The state is one-dimensional (the pilot
/// frequency is known exactly here, so no frequency state is carried).
struct UkfState {
    double mean = 0.0;        // rad
    double covariance = 0.0;  // rad^2, positive
};

/// Brick-wall mask keeping [center - bw/2, center + bw/2]; length unchanged.
ComplexFrame bandpass_pilot(const ComplexFrame& frame, double center_hz, double bandwidth_hz);

/// out[0] = in[0]; consecutive differences mapped into (-pi, pi].
std::vector<double> unwrap(const std::vector<double>& wrapped);

/// theta_hat[k] = unwrap(arg(frame[k])) - 2 pi f_p k / f_s.
PhaseEstimate argument_cpe(const ComplexFrame& pilot_frame, double pilot_freq_hz);

struct SigmaPointSet {
    Eigen::MatrixXd points;         // n x (2n+1), column i is point i
    Eigen::VectorXd weights_mean;   // 2n+1
    Eigen::VectorXd weights_cov;    // 2n+1
};

/// Standard unscented transform points: chi_0 = mean,
/// chi_{+-i} = mean +- column i of chol((n+lambda) covariance),
/// lambda = alpha^2 (n+kappa) - n. On factorization failure a 1e-12 jitter is
/// added once; a second failure throws EstimatorError.
SigmaPointSet sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           const UkfParams& params);

/// Identity dynamics random-walk predict: mean unchanged, covariance += q.
UkfState ukf_predict(const UkfState& state, double process_noise_q);

/// Unscented measurement update against h(theta) = A [cos psi, sin psi],
/// psi = 2 pi f_p k / f_s + theta. measurement = (Re, Im) of the band-passed
/// pilot at sample k, r the per-quadrature measurement noise variance.
UkfState ukf_update(const UkfState& state, const std::array<double, 2>& measurement,
                    std::size_t sample_index, double pilot_freq_hz, double sample_rate_hz,
                    double amplitude, double r, const UkfParams& params);

/// Runs predict/update over the frame in temporal order; theta_hat[k] is the
/// posterior mean at sample k. amplitude <= 0 or params.amplitude_from_rms
/// switches to the sqrt(2)*RMS estimate from the frame itself.
PhaseEstimate ukf_cpe(const ComplexFrame& pilot_frame, double pilot_freq_hz,
                      const UkfParams& params, double amplitude);

}  // namespace cvqkd
