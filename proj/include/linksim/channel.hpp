#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "linksim/rng.hpp"

namespace linksim {

using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

enum class FadingMode { Block, Fast };

struct SystemConfig {
    int n_tx = 2;
    int n_rx = 2;
    int fading_blocks = 2;           // F (Fast mode: F = L)
    int symbols_per_codeword = 512;  // L = N/m
    FadingMode fading = FadingMode::Block;
    bool fading_index_ntx = false;   // override: use n_tx in the fading-index formula

    void validate() const;
};

// f = ceil(F * n_rx * t / L), clamped to [1, F]. 1-based t.
int fading_index(int t, const SystemConfig& cfg);

// Fading block (0-based) of a frame instant s in [0, L): each instant carries
// one symbol per antenna, so instant s maps through t = ceil((s+1)/n_tx).
int block_of_instant(int s, const SystemConfig& cfg);

// sigma_v^2 = n_tx / (R * m * 10^(snr/10)) with E_s = sigma_s^2 = 1.
double noise_variance(double snr_db, int n_tx, double rate, int bits_per_symbol);

struct ChannelRealization {
    std::vector<MatrixC> h;  // per fading block (Block) or per instant (Fast)
    double sigma_v2 = 0.0;

    const MatrixC& at_instant(int s, const SystemConfig& cfg) const {
        return cfg.fading == FadingMode::Fast ? h[s] : h[block_of_instant(s, cfg)];
    }
};

ChannelRealization draw_realization(const SystemConfig& cfg, double sigma_v2, Rng& rng);

VectorC transmit(const VectorC& x, const MatrixC& h, double sigma_v2, Rng& rng);

}  // namespace linksim
