#pragma once

// Splittable 64-bit generator (splitmix64 update + finalizer).  Every consumer
// owns its own stream, derived from (master seed, stream id), so replicate r
// is reproducible independently of thread count and evaluation order.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hypbool {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Independent stream for a given id; id 0 is not the same as the raw seed.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
        return SplitMix64(mix64(seed ^ mix64(stream_id * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL)));
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform on (0,1], 53-bit resolution; never returns 0 so log() is safe.
    double uniform01() { return double((next() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    double normal() {
        if (have_spare_) { have_spare_ = false; return spare_; }
        double u = uniform01(), v = uniform01();
        double r = std::sqrt(-2.0 * std::log(u)), t = 2.0 * pi_ * v;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Exact Poisson sampling: product-of-uniforms inversion for small means,
    // recursive halving above (a sum of independent Poissons is Poisson).
    long poisson(double mean) {
        if (mean < 0 || !std::isfinite(mean)) throw std::invalid_argument("poisson: mean >= 0");
        long n = 0;
        while (mean > 30.0) {
            double half = 0.5 * mean;
            n += poisson_small(half);
            mean -= half;
        }
        return n + poisson_small(mean);
    }

private:
    long poisson_small(double mean) {
        double limit = std::exp(-mean), prod = uniform01();
        long k = 0;
        while (prod > limit) { prod *= uniform01(); ++k; }
        return k;
    }

    static constexpr double pi_ = 3.14159265358979323846;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace hypbool
