#pragma once

#include <vector>

#include "linksim/decoder.hpp"
#include "linksim/detector.hpp"
#include "linksim/ldpc.hpp"
#include "linksim/llrcomp.hpp"

namespace linksim {

enum class Compensation { Off, On, Wcnc };
enum class CompPlacement { DetectorPrior, DecoderInput };

Compensation compensation_from_string(const std::string& name);

struct IddConfig {
    int turbo_iters = 5;   // outer iterations
    int inner_iters = 20;  // decoder iterations per activation
    Schedule schedule = Schedule::BP;
    Compensation comp = Compensation::On;
    CompPlacement comp_placement = CompPlacement::DetectorPrior;
    bool persist_messages = false;  // keep decoder state across outer iterations
    DetectorConfig detector;

    void validate() const;
};

struct IddResult {
    std::vector<DecodeResult> streams;  // one per antenna
    int outer_iters = 0;
    int gamma_negative_events = 0;
    int compensation_applications = 0;
    uint64_t total_inner_iters = 0;
    uint64_t decoder_activations = 0;
    DecodeCounters decoder_counters;
};

// Turbo loop: detect -> (compensate) -> extrinsic -> decode -> priors back,
// with early exit once every stream satisfies its syndrome.
IddResult run_idd(const std::vector<VectorC>& rx, const ChannelRealization& chan, const TannerGraph& graph,
                  const IddConfig& cfg);

}  // namespace linksim
