#include "cvqkd/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvqkd {

namespace {

constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += kSplitmixGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Xoshiro256pp::next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256pp::next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t repetition_index,
                          std::string_view stream_label) {
    std::uint64_t state = master_seed;
    splitmix64(state);
    state ^= fnv1a64(stream_label);
    splitmix64(state);
    state += repetition_index * kSplitmixGamma;
    return splitmix64(state);
}

std::vector<double> gaussian_stream(std::uint64_t seed, std::size_t n, double variance) {
    if (variance < 0.0) throw std::domain_error("gaussian_stream: negative variance");
    std::vector<double> out(n, 0.0);
    if (variance == 0.0 || n == 0) return out;

    const double sigma = std::sqrt(variance);
    Xoshiro256pp rng(seed);
    // Box-Muller on (0,1] x [0,1); the second draw of the last pair is
    // discarded for odd n.
    for (std::size_t k = 0; k < n; k += 2) {
        const double u1 = static_cast<double>((rng.next() >> 11) + 1) * 0x1.0p-53;
        const double u2 = rng.next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[k] = sigma * radius * std::cos(angle);
        if (k + 1 < n) out[k + 1] = sigma * radius * std::sin(angle);
    }
    return out;
}

}  // namespace cvqkd
