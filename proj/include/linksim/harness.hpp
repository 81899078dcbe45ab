#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/idd.hpp"

namespace linksim {

struct Scenario {
    CodeSpec code;
    int standard_var_degree = 3;
    IddConfig idd;
    uint64_t seed = 1;

    void validate() const;
};

struct StopRule {
    uint64_t target_bit_errors = 200;
    uint64_t max_frames = 100000;
    uint64_t fixed_frames = 0;  // nonzero: simulate exactly this many frames
};

struct SimRecord {
    double snr_db = 0.0;
    double ber = 0.0;
    double fer = 0.0;
    uint64_t frames = 0;
    uint64_t bit_errors = 0;
    double mean_inner_iters = 0.0;
    double mean_outer_iters = 0.0;
    double complex_mults = 0.0;  // measured, per frame
    double wall_time_s = 0.0;
    uint64_t gamma_neg_events = 0;

    // extra instrumentation (not part of the CSV contract)
    uint64_t frame_errors = 0;
    uint64_t total_inner_iters = 0;
    uint64_t decoder_activations = 0;
    uint64_t decoder_messages = 0;
    uint64_t decoder_iterations = 0;
};

SimRecord run_point(const Scenario& scenario, const TannerGraph& graph, double snr_db, const StopRule& stop,
                    int workers = 1);
std::vector<SimRecord> run_sweep(const Scenario& scenario, const std::vector<double>& snr_list, const StopRule& stop,
                                 int workers = 1);

std::string emit_csv(const std::vector<SimRecord>& records);
std::vector<SimRecord> parse_csv(const std::string& text);

// Helpers shared by the CLI and tests.
std::vector<double> parse_snr_range(const std::string& spec);  // "start:step:stop"
TannerGraph build_scenario_graph(const Scenario& scenario);

}  // namespace linksim
