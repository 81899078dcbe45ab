#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/ldpc.hpp"

namespace linksim {

enum class Schedule { BP, LBP, RBP, NWBP, RLBP, ROLBP };

Schedule schedule_from_string(const std::string& name);
const char* schedule_name(Schedule s);

constexpr double kLlrMax = 50.0;
constexpr double kTanhClamp = 1.0 - 1e-12;

struct DecodeOptions {
    Schedule schedule = Schedule::BP;
    int max_iters = 20;
    bool early_stop = true;    // syndrome check after each iteration
    bool trace_updates = false;
    bool reset_state = true;   // false: keep c->v messages from the previous activation
};

struct DecodeResult {
    std::vector<double> posterior;
    std::vector<uint8_t> hard_bits;
    int inner_iters = 0;
    bool converged = false;
};

// One unit = one computed check-to-variable message, whether propagated or
// evaluated as a residual candidate. Complex multiplications follow the
// one-message = 1/4 accounting.
struct DecodeCounters {
    uint64_t c2v_propagated = 0;
    uint64_t candidate_evals = 0;
    uint64_t v2c_propagated = 0;
    uint64_t iterations = 0;

    uint64_t messages() const { return c2v_propagated + candidate_evals; }
    double complex_mults() const { return messages() / 4.0; }
    void reset() { *this = DecodeCounters{}; }
};

double residual(double old_msg, double new_msg);

// Closed-form per-iteration complex-multiplication model (mean degrees).
double edge_update_cost(Schedule s, const TannerGraph& graph);

class Decoder {
  public:
    explicit Decoder(const TannerGraph& graph);

    DecodeResult decode(const std::vector<double>& llr_in, const DecodeOptions& opts);

    const DecodeCounters& counters() const { return counters_; }
    void reset_counters() { counters_.reset(); }

    // (iteration, check) pairs, filled when opts.trace_updates is set.
    const std::vector<std::pair<int, int>>& update_trace() const { return trace_; }
    // Queue snapshots taken at each regeneration (RLBP/ROLBP).
    const std::vector<std::vector<int>>& queue_history() const { return queue_history_; }

    // --- message-passing primitives, exposed for tests ---
    void init_state(const std::vector<double>& llr_in);
    void check_update(int c);                      // c -> v messages for one check
    void variable_update(int v, int exclude = -1); // v -> c messages (all, or all but one)
    void refresh_check_inputs(int c);              // v -> c messages into one check
    double check_metric(int c);                    // phi: max candidate residual
    double v2c_message(int v, int c) const;

    int edge_id(int check, int var) const;
    double to_var_msg(int e) const { return to_var_[e]; }
    double to_check_msg(int e) const { return to_check_[e]; }
    void set_to_check_msg(int e, double m) { to_check_[e] = m; }
    void set_to_var_msg(int e, double m) { to_var_[e] = m; }
    double channel_llr(int v) const { return channel_[v]; }
    const std::vector<double>& posterior() const { return posterior_; }
    int num_vars() const { return nv_; }
    int num_checks() const { return nc_; }
    int num_edges() const { return ne_; }

  private:
    void layered_sweep(const std::vector<int>& order, int iteration);
    void compute_all_metrics();
    void regenerate_queue();
    void refresh_posterior(int v);
    void candidates_for_check(int c, double* out);
    std::vector<uint8_t> hard_decision() const;
    bool syndrome_ok(const std::vector<uint8_t>& bits) const;

    void iteration_bp();
    void iteration_lbp(int iteration);
    void iteration_rlbp(int iteration);
    void iteration_rolbp(int iteration);
    void iteration_nwbp(int iteration);
    void iteration_rbp(int iteration);

    const TannerGraph& graph_;
    int nv_, nc_, ne_;
    // CSR: edges grouped by check
    std::vector<int> check_ptr_, edge_var_, edge_check_;
    std::vector<int> var_ptr_, var_edges_;

    std::vector<double> channel_, to_check_, to_var_, posterior_;
    std::vector<double> edge_residual_;  // RBP / NWBP bookkeeping
    std::vector<double> phi_;
    std::vector<int> queue_;
    std::vector<double> scratch_;

    DecodeCounters counters_;
    bool state_valid_ = false;
    bool trace_enabled_ = false;
    std::vector<std::pair<int, int>> trace_;
    std::vector<std::vector<int>> queue_history_;
};

// Convenience wrapper.
DecodeResult decode(const TannerGraph& graph, const std::vector<double>& llr_in, const DecodeOptions& opts);

}  // namespace linksim
