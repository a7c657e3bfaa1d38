#pragma once

#include "coral/types.hpp"

#include <cstdint>
#include <random>

namespace coral {

// splitmix64; used to derive independent per-trial seeds from a master seed
// so parallel trials reproduce independently of scheduling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: mixes (master, stream...) words.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = master;
    std::uint64_t out = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    out ^= splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    out ^= splitmix64(s);
    s ^= c * 0x165667b19e3779f9ULL;
    out ^= splitmix64(s);
    return out;
}

// mt19937_64 with hand-rolled draw routines. std:: distributions are
// implementation-defined, which would break the byte-identical-rerun
// contract, so the few primitives we need are spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform on [0,1) with 53-bit resolution
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // index sampled from an unnormalized nonnegative weight vector
    int categorical(const Vec& w) {
        const double total = w.sum();
        double u = uniform01() * total;
        for (int i = 0; i + 1 < w.size(); ++i) {
            u -= w[i];
            if (u < 0.0) return i;
        }
        return static_cast<int>(w.size()) - 1;
    }

    int uniform_int(int n) {  // 0..n-1
        return static_cast<int>(eng_() % static_cast<std::uint64_t>(n));
    }

    double normal() {
        // Box-Muller; only used by test utilities and random instance builders.
        double u1 = uniform01(), u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace coral
