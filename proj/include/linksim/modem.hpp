#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace linksim {

using cd = std::complex<double>;

struct SoftSymbol {
    cd mean;
    double variance;
};

// Gray-labeled unit-energy constellation. Point index = bit pattern,
// bit 0 in the MSB: QPSK (b0,b1) -> ((1-2*b0) + i*(1-2*b1))/sqrt(2).
struct Constellation {
    std::vector<cd> points;
    int bits_per_symbol = 0;

    static const Constellation& qpsk();

    int size() const { return static_cast<int>(points.size()); }
    int bit_of(int point, int bit) const { return (point >> (bits_per_symbol - 1 - bit)) & 1; }
};

std::vector<cd> map_bits(const Constellation& c, const std::vector<uint8_t>& bits);
int hard_demap(const Constellation& c, cd symbol);

// Bit LLR convention throughout: l = ln P(b=0)/P(b=1).
SoftSymbol soft_symbol(const Constellation& c, const std::vector<double>& prior_llrs);

// Extrinsic bit LLRs for the Gaussian model u = V x + eps, eps ~ CN(0, sigma_eps2).
// Point priors come from the *other* bits only; bit j's own prior is excluded.
std::vector<double> demap_llr(const Constellation& c, cd u, double v_amp, double sigma_eps2,
                              const std::vector<double>& prior_llrs, bool max_log = false);

}  // namespace linksim
