#pragma once

#include <span>
#include <vector>

namespace linksim {

// Parity-shift compensation of a detector a-posteriori LLR vector: parity
// magnitudes are lifted by gamma = alpha - beta so they leave the low-
// reliability region; signs and systematic entries are untouched.
struct CompensationResult {
    double alpha = 0.0;  // max |llr| over systematic positions
    double beta = 0.0;   // max |llr| over parity positions
    double gamma = 0.0;  // alpha - beta
    bool applied = false;
    bool gamma_negative = false;
};

// sign(0) := +1 by convention.
double sign_of(double x);

// In-place, arbitrary position masks.
CompensationResult compensate(std::span<double> llr, std::span<const int> systematic_cols,
                              std::span<const int> parity_cols);
CompensationResult compensate_wcnc(std::span<double> llr, std::span<const int> systematic_cols,
                                   std::span<const int> parity_cols);

// Contiguous split: positions [0, k) systematic, [k, n) parity.
std::vector<double> compensate(const std::vector<double>& llr, int k, CompensationResult* info = nullptr);
std::vector<double> compensate_wcnc(const std::vector<double>& llr, int k, CompensationResult* info = nullptr);

}  // namespace linksim
