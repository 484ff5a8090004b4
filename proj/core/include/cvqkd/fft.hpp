#pragma once

#include <complex>
#include <vector>

namespace cvqkd::fft {

/// Forward DFT, no normalization.
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);

/// Inverse DFT including the 1/N factor, so inverse(forward(x)) == x.
std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in);

}  // namespace cvqkd::fft
