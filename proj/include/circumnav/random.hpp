#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace circumnav {

// One seeded stream per consumer (target, satellite, measurement, ...), so a
// change in one consumer's draw count never perturbs another's sequence.
// Streams are derived from the master seed and the consumer name.
class SeededRng {
public:
    SeededRng(std::uint64_t master_seed, std::string_view stream_name)
        : engine_(mix(master_seed, fnv1a(stream_name))) {}

    double normal() { return normal_(engine_); }
    double normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::uint64_t raw() { return engine_(); }

private:
    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 14695981039346656037ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return h;
    }

    // splitmix64 finalizer on the combined words
    static constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a + 0x9e3779b97f4a7c15ull + (b << 1 | 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace circumnav
