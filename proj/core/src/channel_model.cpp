#include "cvqkd/channel_model.hpp"

#include <cmath>
#include <stdexcept>

#include "cvqkd/random.hpp"

namespace cvqkd {

PhaseTrajectory wiener_phase(std::uint64_t seed, std::size_t n_samples, double linewidth_hz,
                             double sample_rate_hz) {
    if (linewidth_hz < 0.0) throw std::domain_error("wiener_phase: negative linewidth");
    PhaseTrajectory out;
    out.sample_rate_hz = sample_rate_hz;
    out.theta.assign(n_samples, 0.0);
    if (n_samples <= 1 || linewidth_hz == 0.0) return out;

    const double step_var = 2.0 * M_PI * linewidth_hz / sample_rate_hz;
    auto steps = gaussian_stream(seed, n_samples - 1, step_var);
    for (std::size_t k = 1; k < n_samples; ++k) out.theta[k] = out.theta[k - 1] + steps[k - 1];
    return out;
}

ComplexFrame apply_phase(const ComplexFrame& frame, const PhaseTrajectory& phase) {
    if (frame.size() != phase.size())
        throw std::invalid_argument("apply_phase: frame/trajectory length mismatch");
    ComplexFrame out;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples.resize(frame.size());
    for (std::size_t k = 0; k < frame.size(); ++k)
        out.samples[k] = frame.samples[k] * std::polar(1.0, phase.theta[k]);
    return out;
}

ComplexFrame apply_loss(const ComplexFrame& frame, double transmittance) {
    if (transmittance < 0.0 || transmittance > 1.0)
        throw std::domain_error("apply_loss: transmittance must be in [0, 1]");
    ComplexFrame out = frame;
    const double g = std::sqrt(transmittance);
    for (auto& v : out.samples) v *= g;
    return out;
}

ComplexFrame add_shot_noise(std::uint64_t seed, const ComplexFrame& frame,
                            double sigma2_per_quadrature) {
    if (sigma2_per_quadrature < 0.0) throw std::domain_error("add_shot_noise: negative variance");
    ComplexFrame out = frame;
    if (sigma2_per_quadrature == 0.0) return out;
    auto draws = gaussian_stream(seed, 2 * frame.size(), sigma2_per_quadrature);
    for (std::size_t k = 0; k < out.size(); ++k)
        out.samples[k] += cplx{draws[2 * k], draws[2 * k + 1]};
    return out;
}

}  // namespace cvqkd
