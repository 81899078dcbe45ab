#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "linksim/channel.hpp"
#include "linksim/modem.hpp"

namespace linksim {

// MMSE filter for the first column of the remaining-layer submatrix:
// w = (H Hᴴ + (sigma_v²/sigma_s²) I)⁻¹ h₀.
VectorC mmse_filter(const MatrixC& h_remaining, double sigma_v2, double sigma_s2 = 1.0);

// r̂ = r − Σ_j h_j x̂_j over the already-detected layers.
VectorC sic_cancel(const VectorC& r, const MatrixC& h, const std::vector<int>& detected_layers,
                   const std::vector<cd>& soft_symbols);

// Time averages over the packet: V̂ = Re(mean x̂* u), σ̂² = mean |u − V̂ x̂|².
struct LayerStats {
    double v_amp = 0.0;
    double sigma_eps2 = 0.0;
};
LayerStats estimate_stats(const std::vector<cd>& filter_out, const std::vector<cd>& symbols);

// Index (0-based) of the fading block with the largest |det H_f|.
int best_fading(const std::vector<MatrixC>& h_blocks);

// Greedy descending post-MMSE SINR detection order.
std::vector<int> sic_order(const MatrixC& h, double sigma_v2);

constexpr double kSigmaEpsFloor = 1e-12;

struct DetectorConfig {
    SystemConfig system;
    bool max_log = false;
    // Demap every block with the delta_f-block statistics instead of its own
    // (the literal single-statistics variant; kills the fading diversity).
    bool delta_f_stats_only = false;
};

struct DetectorOutput {
    // a-posteriori LLRs (prior + demapper extrinsic), one length-N vector per antenna
    std::vector<std::vector<double>> app;
    std::vector<double> v_amp;       // per antenna, stats used for demapping
    std::vector<double> sigma_eps2;  // per antenna
    int delta_f = 0;                 // best fading block (block mode)
};

// One detection pass over a frame. rx[s] is the n_rx vector at instant s;
// priors are per-antenna length-N LLRs from the decoder (zeros on the first
// outer iteration).
DetectorOutput detect_frame(const std::vector<VectorC>& rx, const ChannelRealization& chan,
                            const std::vector<std::vector<double>>& priors, const DetectorConfig& cfg,
                            const Constellation& constellation = Constellation::qpsk());

}  // namespace linksim
