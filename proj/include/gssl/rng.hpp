#pragma once
#include <cstdint>
#include <cmath>

namespace gssl {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
 * numbers: as easy as 1, 2, 3").
 *
 * One instance is one stream.  The 64-bit seed forms the key; the 64-bit
 * stream index occupies the upper two counter words while the lower two
 * words count blocks within the stream, so distinct (seed, stream) pairs
 * produce non-overlapping sequences.  Monte Carlo trial i uses stream i,
 * which makes trial results independent of scheduling order.
 */
class PhiloxRng {
public:
    explicit PhiloxRng(uint64_t seed, uint64_t stream = 0)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)),
          ctr2_(static_cast<uint32_t>(stream)),
          ctr3_(static_cast<uint32_t>(stream >> 32)) {}

    uint32_t next_u32() {
        if (idx_ == 4) {
            generate_block();
            idx_ = 0;
        }
        return out_[idx_++];
    }

    uint64_t next_u64() {
        uint64_t lo = next_u32();
        uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on {0, 1, ..., bound-1} by rejection (no modulo bias).
    uint64_t uniform_below(uint64_t bound) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    /// Standard normal via Box-Muller on the generator's own uniforms
    /// (keeps output identical across standard libraries).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform();  // (0,1], safe under log
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    void generate_block() {
        uint32_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = static_cast<uint64_t>(0xD2511F53u) * c0;
            const uint64_t p1 = static_cast<uint64_t>(0xCD9E8D57u) * c2;
            const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
            const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
            const uint32_t n0 = hi1 ^ c1 ^ k0;
            const uint32_t n1 = lo1;
            const uint32_t n2 = hi0 ^ c3 ^ k1;
            const uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
        if (++ctr0_ == 0) ++ctr1_;
    }

    uint32_t key0_, key1_;
    uint32_t ctr0_ = 0, ctr1_ = 0, ctr2_, ctr3_;
    uint32_t out_[4] = {0, 0, 0, 0};
    int idx_ = 4;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace gssl
