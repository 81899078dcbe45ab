#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace linksim {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ull)); }
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b), c); }

// Deterministic RNG with hand-rolled gaussians so results do not depend on
// library distribution internals.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    double uniform() {  // (0, 1]
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    int uniform_int(int n) {  // [0, n)
        return static_cast<int>(engine_() % static_cast<uint64_t>(n));
    }

    bool bit() { return (engine_() >> 62) & 1u; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // CN(0, 1): unit total variance split across real/imag.
    std::complex<double> cgaussian() {
        constexpr double s = 0.70710678118654752440;
        return {s * gaussian(), s * gaussian()};
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace linksim
