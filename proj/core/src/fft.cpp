#include "cvqkd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace cvqkd::fft {

namespace {

// One plan per (size, direction), created with FFTW_ESTIMATE so planning is
// deterministic, executed through the new-array interface on fftw_malloc'd
// buffers. Plan creation is serialized; execution is thread-safe.
class Planner {
  public:
    static Planner& instance() {
        static Planner p;
        return p;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        fftw_complex* in = fftw_alloc_complex(n);
        fftw_complex* out = fftw_alloc_complex(n);
        if (!in || !out) throw std::bad_alloc();
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        if (!plan) throw std::runtime_error("fftw planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    Planner() = default;
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

std::vector<std::complex<double>> transform(const std::vector<std::complex<double>>& in,
                                            int sign) {
    const std::size_t n = in.size();
    if (n == 0) return {};
    fftw_plan plan = Planner::instance().get(n, sign);

    FftwBuffer src(n), dst(n);
    for (std::size_t k = 0; k < n; ++k) {
        src.data[k][0] = in[k].real();
        src.data[k][1] = in[k].imag();
    }
    fftw_execute_dft(plan, src.data, dst.data);

    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = {dst.data[k][0], dst.data[k][1]};
    return out;
}

}  // namespace

std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in) {
    return transform(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in) {
    auto out = transform(in, FFTW_BACKWARD);
    const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

}  // namespace cvqkd::fft
