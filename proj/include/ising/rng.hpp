#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ising {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 with portable derived draws. std::shuffle and the standard
// distributions are implementation-defined, so all sampling goes through
// the methods below to keep seeded runs byte-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(mix(seed)) {}

    // Independent substream for replica/trial `index` of a master seed.
    static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = splitmix64(s);
        s = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on {0, ..., n-1}, unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    int spin() { return (eng_() >> 63) ? 1 : -1; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t seed) {
        std::uint64_t s = seed;
        return splitmix64(s);
    }
    std::mt19937_64 eng_;
};

}  // namespace ising
