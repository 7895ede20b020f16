#ifndef REPID_RNG_HPP
#define REPID_RNG_HPP

#include <array>
#include <cstdint>

namespace repid {

// splitmix64 (Steele, Lea, Flood 2014); used to expand seeds and to derive
// substream keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic key mixing: substreams are keyed by (seed, tag, a, b) so a
// column/rep/pair stream never moves when unrelated streams are added.
inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t tag,
                             std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= tag * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= (a + 1) * 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    s ^= (b + 1) * 0x8cb92ba72f3d8dd7ULL;
    h ^= splitmix64(s);
    return h;
}

// xoshiro256++ 1.0 (Blackman, Vigna 2019). Small, fast, 64-bit output,
// state seeded via splitmix64 per the authors' recommendation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1); safe input for quantile functions.
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform over [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

// Stream tags. Distinct tags keep unrelated draws independent under a
// shared base seed.
namespace rng_tag {
inline constexpr std::uint64_t column = 0x636f6c756d6eULL;    // marginal column
inline constexpr std::uint64_t noise = 0x6e6f697365ULL;       // target noise
inline constexpr std::uint64_t rep = 0x726570ULL;             // experiment rep
inline constexpr std::uint64_t h_points = 0x68706f696e74ULL;  // H eval subsample
inline constexpr std::uint64_t shap_rows = 0x73686170724fULL; // SHAP row sample
inline constexpr std::uint64_t shap_perm = 0x7368617050ULL;   // SHAP permutations
inline constexpr std::uint64_t shap_bg = 0x736861704247ULL;   // SHAP background
}  // namespace rng_tag

}  // namespace repid

#endif  // REPID_RNG_HPP
