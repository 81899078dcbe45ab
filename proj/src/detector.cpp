#include "linksim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linksim {

namespace {

Eigen::MatrixXcd columns(const MatrixC& h, const std::vector<int>& idx, int from) {
    MatrixC sub(h.rows(), static_cast<int>(idx.size()) - from);
    for (int i = from; i < static_cast<int>(idx.size()); ++i) sub.col(i - from) = h.col(idx[i]);
    return sub;
}

struct StagePlan {
    std::vector<int> order;                 // detection order (layer indices)
    std::vector<VectorC> w;                 // filter per stage
    std::vector<double> v_analytic;         // per layer
    std::vector<double> sigma_analytic;     // per layer
};

// Filters and fallback statistics for one channel matrix. On the first
// activation no soft replicas exist, so every layer gets the full MMSE
// filter (interference nulled, nothing cancelled); once the decoder feeds
// back priors, stage k keeps only the still-undetected columns and relies
// on soft cancellation for the rest. The loading is floored so the
// noiseless limit stays a well-posed solve.
StagePlan plan_for_channel(const MatrixC& h, double sigma_v2, bool sic_active) {
    const double rho = std::max(sigma_v2, 1e-9);
    StagePlan plan;
    plan.order = sic_order(h, rho);
    const int n_tx = static_cast<int>(h.cols());
    const int n_rx = static_cast<int>(h.rows());
    plan.w.resize(n_tx);
    plan.v_analytic.assign(n_tx, 0.0);
    plan.sigma_analytic.assign(n_tx, 0.0);
    const MatrixC eye = MatrixC::Identity(n_rx, n_rx);
    const MatrixC cov_full = h * h.adjoint() + sigma_v2 * eye;
    Eigen::FullPivLU<MatrixC> full_lu(h * h.adjoint() + rho * eye);
    for (int k = 0; k < n_tx; ++k) {
        const int layer = plan.order[k];
        MatrixC cov_k;
        if (sic_active) {
            MatrixC h_rem = columns(h, plan.order, k);
            plan.w[k] = mmse_filter(h_rem, rho);
            cov_k = h_rem * h_rem.adjoint() + sigma_v2 * eye;
        } else {
            plan.w[k] = full_lu.solve(h.col(layer));
            cov_k = cov_full;
        }
        const double v = (plan.w[k].adjoint() * h.col(layer))(0).real();
        const double pw = (plan.w[k].adjoint() * cov_k * plan.w[k])(0).real();
        plan.v_analytic[layer] = v;
        plan.sigma_analytic[layer] = std::max(pw - v * v, kSigmaEpsFloor);
    }
    return plan;
}

}  // namespace

VectorC mmse_filter(const MatrixC& h_remaining, double sigma_v2, double sigma_s2) {
    const int n_rx = static_cast<int>(h_remaining.rows());
    MatrixC a = h_remaining * h_remaining.adjoint() + (sigma_v2 / sigma_s2) * MatrixC::Identity(n_rx, n_rx);
    Eigen::FullPivLU<MatrixC> lu(a);
    if (!lu.isInvertible()) throw std::runtime_error("mmse_filter: singular system (sigma_v2 = 0, rank-deficient H)");
    return lu.solve(h_remaining.col(0));
}

VectorC sic_cancel(const VectorC& r, const MatrixC& h, const std::vector<int>& detected_layers,
                   const std::vector<cd>& soft_symbols) {
    VectorC out = r;
    for (size_t i = 0; i < detected_layers.size(); ++i) out -= h.col(detected_layers[i]) * soft_symbols[i];
    return out;
}

LayerStats estimate_stats(const std::vector<cd>& filter_out, const std::vector<cd>& symbols) {
    if (filter_out.empty() || filter_out.size() != symbols.size())
        throw std::invalid_argument("estimate_stats: need matching non-empty sample sets");
    cd acc(0.0, 0.0);
    for (size_t t = 0; t < filter_out.size(); ++t) acc += std::conj(symbols[t]) * filter_out[t];
    LayerStats s;
    s.v_amp = acc.real() / static_cast<double>(filter_out.size());
    double err = 0.0;
    for (size_t t = 0; t < filter_out.size(); ++t) err += std::norm(filter_out[t] - s.v_amp * symbols[t]);
    s.sigma_eps2 = std::max(err / static_cast<double>(filter_out.size()), kSigmaEpsFloor);
    return s;
}

int best_fading(const std::vector<MatrixC>& h_blocks) {
    if (h_blocks.empty()) throw std::invalid_argument("best_fading: no blocks");
    int best = 0;
    double best_det = -1.0;
    for (size_t f = 0; f < h_blocks.size(); ++f) {
        const MatrixC& h = h_blocks[f];
        double d = h.rows() == h.cols() ? std::abs(h.determinant())
                                        : std::sqrt(std::abs((h * h.adjoint()).determinant()));
        if (d > best_det) {
            best_det = d;
            best = static_cast<int>(f);
        }
    }
    return best;
}

std::vector<int> sic_order(const MatrixC& h, double sigma_v2) {
    const int n_tx = static_cast<int>(h.cols());
    std::vector<int> remaining(n_tx);
    for (int i = 0; i < n_tx; ++i) remaining[i] = i;
    std::vector<int> order;
    order.reserve(n_tx);
    while (!remaining.empty()) {
        MatrixC h_rem = columns(h, remaining, 0);
        MatrixC a = h_rem * h_rem.adjoint() + sigma_v2 * MatrixC::Identity(h.rows(), h.rows());
        Eigen::FullPivLU<MatrixC> lu(a);
        int best = remaining[0];
        double best_sinr = -1.0;
        for (int layer : remaining) {
            VectorC w = lu.solve(h.col(layer));
            double v = (w.adjoint() * h.col(layer))(0).real();
            v = std::clamp(v, 0.0, 1.0 - 1e-15);
            double sinr = v / (1.0 - v);
            if (sinr > best_sinr + 1e-12) {
                best_sinr = sinr;
                best = layer;
            }
        }
        order.push_back(best);
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    }
    return order;
}

DetectorOutput detect_frame(const std::vector<VectorC>& rx, const ChannelRealization& chan,
                            const std::vector<std::vector<double>>& priors, const DetectorConfig& cfg,
                            const Constellation& constellation) {
    const SystemConfig& sys = cfg.system;
    const int n_tx = sys.n_tx;
    const int m = constellation.bits_per_symbol;
    const int num_instants = sys.symbols_per_codeword;
    const int n_bits = num_instants * m;
    if (static_cast<int>(rx.size()) != num_instants) throw std::invalid_argument("detect_frame: frame length != L");
    if (static_cast<int>(priors.size()) != n_tx) throw std::invalid_argument("detect_frame: need priors per antenna");
    for (const auto& p : priors)
        if (static_cast<int>(p.size()) != n_bits) throw std::invalid_argument("detect_frame: prior length != N");

    // soft replicas from the decoder feedback; SIC engages once any exist
    std::vector<std::vector<cd>> xhat(n_tx, std::vector<cd>(num_instants));
    std::vector<double> prior_pair(m);
    double soft_power = 0.0;
    for (int k = 0; k < n_tx; ++k)
        for (int s = 0; s < num_instants; ++s) {
            for (int j = 0; j < m; ++j) prior_pair[j] = priors[k][s * m + j];
            xhat[k][s] = soft_symbol(constellation, prior_pair).mean;
            soft_power += std::norm(xhat[k][s]);
        }
    soft_power /= static_cast<double>(n_tx) * num_instants;
    const bool sic_active = soft_power > 1e-9;

    DetectorOutput out;
    out.app.assign(n_tx, std::vector<double>(n_bits, 0.0));
    out.v_amp.assign(n_tx, 0.0);
    out.sigma_eps2.assign(n_tx, 0.0);

    std::vector<std::vector<cd>> u(n_tx, std::vector<cd>(num_instants));

    if (sys.fading == FadingMode::Block) {
        std::vector<StagePlan> plans;
        plans.reserve(chan.h.size());
        for (const auto& h : chan.h) plans.push_back(plan_for_channel(h, chan.sigma_v2, sic_active));

        for (int s = 0; s < num_instants; ++s) {
            const int f = block_of_instant(s, sys);
            const MatrixC& h = chan.h[f];
            const StagePlan& plan = plans[f];
            VectorC r_work = rx[s];
            for (int k = 0; k < n_tx; ++k) {
                const int layer = plan.order[k];
                u[layer][s] = (plan.w[k].adjoint() * r_work)(0);
                r_work -= h.col(layer) * xhat[layer][s];
            }
        }

        out.delta_f = best_fading(chan.h);
        const int nblocks = static_cast<int>(chan.h.size());
        std::vector<std::vector<int>> block_instants(nblocks);
        for (int s = 0; s < num_instants; ++s) block_instants[block_of_instant(s, sys)].push_back(s);

        // per-block Gaussian-model statistics: time averages once feedback
        // exists, analytic filter values otherwise
        std::vector<std::vector<LayerStats>> stats(nblocks, std::vector<LayerStats>(n_tx));
        for (int f = 0; f < nblocks; ++f) {
            for (int k = 0; k < n_tx; ++k) {
                double soft_power = 0.0;
                for (int s : block_instants[f]) soft_power += std::norm(xhat[k][s]);
                soft_power /= std::max<size_t>(block_instants[f].size(), 1);
                if (soft_power > 1e-9) {
                    std::vector<cd> us, xs;
                    us.reserve(block_instants[f].size());
                    xs.reserve(block_instants[f].size());
                    for (int s : block_instants[f]) {
                        us.push_back(u[k][s]);
                        xs.push_back(xhat[k][s]);
                    }
                    stats[f][k] = estimate_stats(us, xs);
                } else {
                    stats[f][k] = {plans[f].v_analytic[k], plans[f].sigma_analytic[k]};
                }
                stats[f][k].sigma_eps2 = std::max(stats[f][k].sigma_eps2, kSigmaEpsFloor);
            }
        }
        for (int k = 0; k < n_tx; ++k) {
            out.v_amp[k] = stats[out.delta_f][k].v_amp;
            out.sigma_eps2[k] = stats[out.delta_f][k].sigma_eps2;
        }

        for (int k = 0; k < n_tx; ++k)
            for (int s = 0; s < num_instants; ++s) {
                const LayerStats& st = cfg.delta_f_stats_only ? stats[out.delta_f][k] : stats[block_of_instant(s, sys)][k];
                for (int j = 0; j < m; ++j) prior_pair[j] = priors[k][s * m + j];
                auto ext = demap_llr(constellation, u[k][s], st.v_amp, st.sigma_eps2, prior_pair, cfg.max_log);
                for (int j = 0; j < m; ++j) out.app[k][s * m + j] = prior_pair[j] + ext[j];
            }
    } else {
        // fast fading: fresh channel per instant, per-instant analytic statistics
        for (int s = 0; s < num_instants; ++s) {
            const MatrixC& h = chan.h[s];
            StagePlan plan = plan_for_channel(h, chan.sigma_v2, sic_active);
            VectorC r_work = rx[s];
            for (int k = 0; k < n_tx; ++k) {
                const int layer = plan.order[k];
                cd us = (plan.w[k].adjoint() * r_work)(0);
                r_work -= h.col(layer) * xhat[layer][s];
                u[layer][s] = us;
                for (int j = 0; j < m; ++j) prior_pair[j] = priors[layer][s * m + j];
                auto ext = demap_llr(constellation, us, plan.v_analytic[layer],
                                     std::max(plan.sigma_analytic[layer], kSigmaEpsFloor), prior_pair, cfg.max_log);
                for (int j = 0; j < m; ++j) out.app[layer][s * m + j] = prior_pair[j] + ext[j];
            }
            if (s == 0) {
                for (int k = 0; k < n_tx; ++k) {
                    out.v_amp[k] = plan.v_analytic[k];
                    out.sigma_eps2[k] = plan.sigma_analytic[k];
                }
            }
        }
    }
    return out;
}

}  // namespace linksim
