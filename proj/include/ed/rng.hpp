#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace ed {

// Counter-based Philox4x32-10 generator. Every (seed, purpose, point,
// trial) tuple owns an independent stream, so simulation trials can be
// sharded across threads in any partition and still consume exactly the
// same random values: results are bit-identical for any thread count.
class PhiloxStream {
public:
    PhiloxStream(uint64_t seed, uint32_t purpose, uint32_t point, uint32_t trial)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)),
          ctr1_(trial),
          ctr2_(point),
          ctr3_(purpose) {}

    uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on (0, 1] with 53-bit resolution; never returns 0, so it is
    // safe under log().
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the radial draw uses the full 53-bit
    // uniform, the angle 32 bits.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform()));
        double theta = 6.2831853071795864769 * (next_u32() * 0x1.0p-32);
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Circularly symmetric complex normal with the given total variance.
    std::complex<double> cnormal(double total_variance) {
        double sd = std::sqrt(0.5 * total_variance);
        double re = normal();
        double im = normal();
        return {sd * re, sd * im};
    }

private:
    void refill() {
        uint32_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = static_cast<uint64_t>(0xD2511F53u) * c0;
            uint64_t p1 = static_cast<uint64_t>(0xCD9E8D57u) * c2;
            uint32_t n0 = static_cast<uint32_t>(p1 >> 32) ^ c1 ^ k0;
            uint32_t n1 = static_cast<uint32_t>(p1);
            uint32_t n2 = static_cast<uint32_t>(p0 >> 32) ^ c3 ^ k1;
            uint32_t n3 = static_cast<uint32_t>(p0);
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_[0] = c0;
        buf_[1] = c1;
        buf_[2] = c2;
        buf_[3] = c3;
        ++ctr0_;
        pos_ = 0;
    }

    uint32_t key0_, key1_;
    uint32_t ctr0_ = 0, ctr1_, ctr2_, ctr3_;
    uint32_t buf_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ed
