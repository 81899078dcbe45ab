#include "linksim/idd.hpp"

#include <algorithm>
#include <stdexcept>

namespace linksim {

namespace {
// Exchanged LLRs are bounded at the decoder clip level; the compensation
// shift feeds back through the extrinsic exchange and must not run away.
inline double clip_exchange(double x) { return std::clamp(x, -kLlrMax, kLlrMax); }
}  // namespace

Compensation compensation_from_string(const std::string& name) {
    if (name == "off") return Compensation::Off;
    if (name == "on") return Compensation::On;
    if (name == "wcnc") return Compensation::Wcnc;
    throw std::invalid_argument("unknown compensation mode: " + name);
}

void IddConfig::validate() const {
    if (turbo_iters < 1) throw std::invalid_argument("IddConfig: TI must be >= 1");
    if (inner_iters < 1) throw std::invalid_argument("IddConfig: inner iterations must be >= 1");
    detector.system.validate();
}

IddResult run_idd(const std::vector<VectorC>& rx, const ChannelRealization& chan, const TannerGraph& graph,
                  const IddConfig& cfg) {
    cfg.validate();
    const int n_tx = cfg.detector.system.n_tx;
    const int n = graph.num_vars;
    const bool rootcheck = graph.spec.kind == CodeKind::RootCheck;

    std::vector<std::vector<double>> priors(n_tx, std::vector<double>(n, 0.0));
    std::vector<Decoder> decoders;
    decoders.reserve(n_tx);
    for (int k = 0; k < n_tx; ++k) decoders.emplace_back(graph);

    DecodeOptions dopts;
    dopts.schedule = cfg.schedule;
    dopts.max_iters = cfg.inner_iters;
    dopts.reset_state = !cfg.persist_messages;

    IddResult res;
    res.streams.resize(n_tx);

    for (int outer = 1; outer <= cfg.turbo_iters; ++outer) {
        DetectorOutput det = detect_frame(rx, chan, priors, cfg.detector);
        res.outer_iters = outer;

        bool all_converged = true;
        for (int k = 0; k < n_tx; ++k) {
            std::vector<double>& app = det.app[k];
            auto apply_comp = [&](std::span<double> vec) {
                CompensationResult cr = cfg.comp == Compensation::On
                                            ? compensate(vec, graph.systematic_cols, graph.parity_cols)
                                            : compensate_wcnc(vec, graph.systematic_cols, graph.parity_cols);
                if (cr.gamma_negative) ++res.gamma_negative_events;
                if (cr.applied) ++res.compensation_applications;
            };
            const bool comp_active = rootcheck && cfg.comp != Compensation::Off;
            if (comp_active && cfg.comp_placement == CompPlacement::DecoderInput) apply_comp(app);

            // detector extrinsic becomes the decoder channel input; clip the
            // exchanged quantity only (a clipped posterior minus a saturated
            // prior would cancel to nothing)
            std::vector<double> extrinsic(n);
            for (int j = 0; j < n; ++j) extrinsic[j] = clip_exchange(app[j] - priors[k][j]);

            res.streams[k] = decoders[k].decode(extrinsic, dopts);
            res.total_inner_iters += res.streams[k].inner_iters;
            ++res.decoder_activations;

            // decoder extrinsic feeds the next detection pass; the parity
            // shift lifts the slowly-converging parity beliefs that the soft
            // cancellation and demapping priors rely on
            for (int j = 0; j < n; ++j) priors[k][j] = clip_exchange(res.streams[k].posterior[j] - extrinsic[j]);
            if (comp_active && cfg.comp_placement == CompPlacement::DetectorPrior)
                apply_comp(std::span<double>(priors[k]));
            all_converged = all_converged && res.streams[k].converged;
        }
        if (all_converged) break;
    }

    for (const Decoder& d : decoders) {
        res.decoder_counters.c2v_propagated += d.counters().c2v_propagated;
        res.decoder_counters.candidate_evals += d.counters().candidate_evals;
        res.decoder_counters.v2c_propagated += d.counters().v2c_propagated;
        res.decoder_counters.iterations += d.counters().iterations;
    }
    return res;
}

}  // namespace linksim
