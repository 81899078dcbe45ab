// Diagnostic: per-outer-iteration compensation statistics on sample frames.
#include <cstdio>
#include <span>

#include "linksim/harness.hpp"

using namespace linksim;

int main(int argc, char** argv) {
    double snr_db = argc > 1 ? std::atof(argv[1]) : 12.0;
    int frames = argc > 2 ? std::atoi(argv[2]) : 12;
    bool comp_on = argc > 3 ? std::atoi(argv[3]) != 0 : true;

    Scenario sc;
    sc.code = {1024, 512, 2, CodeKind::RootCheck};
    sc.idd.turbo_iters = 5;
    sc.idd.inner_iters = 20;
    sc.idd.schedule = Schedule::ROLBP;
    sc.idd.comp = comp_on ? Compensation::On : Compensation::Off;
    sc.idd.detector.system = {2, 2, 2, 512, FadingMode::Block, false};
    sc.seed = 7;
    TannerGraph g = build_scenario_graph(sc);
    const SystemConfig& sys = sc.idd.detector.system;
    const double sigma_v2 = noise_variance(snr_db, 2, 0.5, 2);
    const Constellation& q = Constellation::qpsk();

    int shown = 0;
    for (int fi = 0; fi < frames && shown < 12; ++fi) {
        Rng rng(mix_seed(sc.seed, 1, fi));
        std::vector<std::vector<uint8_t>> msg(2, std::vector<uint8_t>(512));
        std::vector<std::vector<uint8_t>> cw(2);
        std::vector<std::vector<cd>> sym(2);
        for (int a = 0; a < 2; ++a) {
            for (auto& b : msg[a]) b = rng.bit();
            cw[a] = encode(g, msg[a]);
            sym[a] = map_bits(q, cw[a]);
        }
        ChannelRealization chan = draw_realization(sys, sigma_v2, rng);
        std::vector<VectorC> rx(512);
        for (int s = 0; s < 512; ++s) {
            VectorC x(2);
            x << sym[0][s], sym[1][s];
            rx[s] = transmit(x, chan.at_instant(s, sys), sigma_v2, rng);
        }

        // quiet pre-pass: skip frames that decode cleanly
        {
            IddResult pre = run_idd(rx, chan, g, sc.idd);
            int errs = 0;
            for (int a = 0; a < 2; ++a)
                for (int j = 0; j < 512; ++j) errs += pre.streams[a].hard_bits[g.systematic_cols[j]] != msg[a][j];
            if (errs == 0) continue;
            ++shown;
        }
        // hand-rolled IDD loop with probes
        std::vector<std::vector<double>> priors(2, std::vector<double>(1024, 0.0));
        std::vector<Decoder> decs(2, Decoder(g));
        std::printf("frame %d  |det H1|=%.2f |det H2|=%.2f\n", fi, std::abs(chan.h[0].determinant()),
                    std::abs(chan.h[1].determinant()));
        for (int outer = 1; outer <= sc.idd.turbo_iters; ++outer) {
            DetectorOutput det = detect_frame(rx, chan, priors, sc.idd.detector);
            bool all_ok = true;
            for (int a = 0; a < 2; ++a) {
                auto& app = det.app[a];
                for (double& x : app) x = std::clamp(x, -kLlrMax, kLlrMax);
                // parity sign error rate before compensation
                int par_err = 0, sys_err = 0;
                for (int j : g.parity_cols) par_err += (app[j] < 0) != (cw[a][j] == 1);
                for (int j : g.systematic_cols) sys_err += (app[j] < 0) != (cw[a][j] == 1);
                CompensationResult cr{};
                if (sc.idd.comp == Compensation::On)
                    cr = compensate(std::span<double>(app), g.systematic_cols, g.parity_cols);
                std::vector<double> ext(1024);
                for (int j = 0; j < 1024; ++j) ext[j] = app[j] - priors[a][j];
                DecodeOptions opts{sc.idd.schedule, sc.idd.inner_iters, true, false, true};
                DecodeResult dr = decs[a].decode(ext, opts);
                int info_err = 0;
                for (int j = 0; j < 512; ++j) info_err += dr.hard_bits[g.systematic_cols[j]] != msg[a][j];
                for (int j = 0; j < 1024; ++j) priors[a][j] = std::clamp(dr.posterior[j] - ext[j], -kLlrMax, kLlrMax);
                std::printf(
                    "  outer %d ant %d: appErr sys %3d par %3d | alpha %6.1f beta %6.1f gamma %+6.1f | dec iters %2d "
                    "conv %d infoErr %3d\n",
                    outer, a, sys_err, par_err, cr.alpha, cr.beta, cr.gamma, dr.inner_iters, dr.converged, info_err);
                all_ok = all_ok && dr.converged;
            }
            if (all_ok) break;
        }
    }
    return 0;
}
