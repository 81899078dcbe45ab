#include "linksim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace linksim {

void SystemConfig::validate() const {
    if (n_tx <= 0 || n_rx <= 0) throw std::invalid_argument("SystemConfig: antenna counts must be positive");
    if (n_tx < n_rx) throw std::invalid_argument("SystemConfig: n_tx >= n_rx required");
    if (symbols_per_codeword <= 0) throw std::invalid_argument("SystemConfig: L must be positive");
    if (fading == FadingMode::Fast) {
        if (fading_blocks != symbols_per_codeword)
            throw std::invalid_argument("SystemConfig: fast fading requires F = L");
    } else if (fading_blocks < 1 || symbols_per_codeword % fading_blocks != 0) {
        throw std::invalid_argument("SystemConfig: F must divide L");
    }
}

int fading_index(int t, const SystemConfig& cfg) {
    const int n = cfg.fading_index_ntx ? cfg.n_tx : cfg.n_rx;
    const long long num = static_cast<long long>(cfg.fading_blocks) * n * t;
    int f = static_cast<int>((num + cfg.symbols_per_codeword - 1) / cfg.symbols_per_codeword);
    return std::min(std::max(f, 1), cfg.fading_blocks);
}

int block_of_instant(int s, const SystemConfig& cfg) {
    const int t = (s + cfg.n_tx) / cfg.n_tx;  // ceil((s+1)/n_tx)
    return fading_index(t, cfg) - 1;
}

double noise_variance(double snr_db, int n_tx, double rate, int bits_per_symbol) {
    return n_tx / (rate * bits_per_symbol * std::pow(10.0, snr_db / 10.0));
}

ChannelRealization draw_realization(const SystemConfig& cfg, double sigma_v2, Rng& rng) {
    ChannelRealization r;
    r.sigma_v2 = sigma_v2;
    const int count = cfg.fading == FadingMode::Fast ? cfg.symbols_per_codeword : cfg.fading_blocks;
    r.h.reserve(count);
    for (int f = 0; f < count; ++f) {
        MatrixC h(cfg.n_rx, cfg.n_tx);
        for (int i = 0; i < cfg.n_rx; ++i)
            for (int j = 0; j < cfg.n_tx; ++j) h(i, j) = rng.cgaussian();
        r.h.push_back(std::move(h));
    }
    return r;
}

VectorC transmit(const VectorC& x, const MatrixC& h, double sigma_v2, Rng& rng) {
    if (h.cols() != x.size()) throw std::invalid_argument("transmit: dimension mismatch");
    VectorC r = h * x;
    if (sigma_v2 > 0.0) {
        const double s = std::sqrt(sigma_v2);
        for (int i = 0; i < r.size(); ++i) r(i) += s * rng.cgaussian();
    }
    return r;
}

}  // namespace linksim
