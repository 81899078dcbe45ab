#include "linksim/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace linksim {

namespace {

inline double clip_llr(double x) { return std::clamp(x, -kLlrMax, kLlrMax); }

// 2*atanh of a tanh-domain product. Saturated products are treated as
// certainty and map to the clip level.
inline double c2v_from_product(double prod) {
    if (prod >= kTanhClamp) return kLlrMax;
    if (prod <= -kTanhClamp) return -kLlrMax;
    return 2.0 * std::atanh(prod);
}

}  // namespace

Schedule schedule_from_string(const std::string& name) {
    if (name == "bp") return Schedule::BP;
    if (name == "lbp") return Schedule::LBP;
    if (name == "rbp") return Schedule::RBP;
    if (name == "nwbp") return Schedule::NWBP;
    if (name == "rlbp") return Schedule::RLBP;
    if (name == "rolbp") return Schedule::ROLBP;
    throw std::invalid_argument("unknown schedule: " + name);
}

const char* schedule_name(Schedule s) {
    switch (s) {
        case Schedule::BP: return "bp";
        case Schedule::LBP: return "lbp";
        case Schedule::RBP: return "rbp";
        case Schedule::NWBP: return "nwbp";
        case Schedule::RLBP: return "rlbp";
        case Schedule::ROLBP: return "rolbp";
    }
    return "?";
}

double residual(double old_msg, double new_msg) { return std::abs(new_msg - old_msg); }

double edge_update_cost(Schedule s, const TannerGraph& graph) {
    const double eps = graph.num_edges();
    const double ncn = graph.num_checks;
    const double nvn = graph.num_vars;
    const double dc = eps / ncn;
    const double dv = eps / nvn;
    const double base = dc * ncn;
    switch (s) {
        case Schedule::BP:
        case Schedule::LBP: return base / 4.0;
        case Schedule::NWBP:
        case Schedule::RBP: return base * (1.0 + (dv - 1.0) * (dc - 1.0)) / 4.0;
        case Schedule::RLBP: return base / 2.0;
        case Schedule::ROLBP: return 1.5 * base / 2.0;
    }
    return 0.0;
}

Decoder::Decoder(const TannerGraph& graph) : graph_(graph) {
    nv_ = graph.num_vars;
    nc_ = graph.num_checks;
    ne_ = graph.num_edges();

    check_ptr_.assign(nc_ + 1, 0);
    for (int c = 0; c < nc_; ++c) check_ptr_[c + 1] = check_ptr_[c] + static_cast<int>(graph.check_adj[c].size());
    edge_var_.resize(ne_);
    edge_check_.resize(ne_);
    {
        int e = 0;
        for (int c = 0; c < nc_; ++c)
            for (int v : graph.check_adj[c]) {
                edge_var_[e] = v;
                edge_check_[e] = c;
                ++e;
            }
    }
    var_ptr_.assign(nv_ + 1, 0);
    for (int e = 0; e < ne_; ++e) ++var_ptr_[edge_var_[e] + 1];
    for (int v = 0; v < nv_; ++v) var_ptr_[v + 1] += var_ptr_[v];
    var_edges_.resize(ne_);
    {
        std::vector<int> cursor(var_ptr_.begin(), var_ptr_.end() - 1);
        for (int e = 0; e < ne_; ++e) var_edges_[cursor[edge_var_[e]]++] = e;
    }

    channel_.resize(nv_);
    to_check_.resize(ne_);
    to_var_.resize(ne_);
    posterior_.resize(nv_);
    edge_residual_.resize(ne_);
    phi_.resize(nc_);
    int max_deg = 0;
    for (int c = 0; c < nc_; ++c) max_deg = std::max(max_deg, check_ptr_[c + 1] - check_ptr_[c]);
    scratch_.resize(static_cast<size_t>(3 * std::max(1, max_deg)));
}

int Decoder::edge_id(int check, int var) const {
    for (int e = check_ptr_[check]; e < check_ptr_[check + 1]; ++e)
        if (edge_var_[e] == var) return e;
    return -1;
}

void Decoder::init_state(const std::vector<double>& llr_in) {
    if (static_cast<int>(llr_in.size()) != nv_) throw std::invalid_argument("decode: LLR length != N");
    for (int v = 0; v < nv_; ++v) channel_[v] = clip_llr(llr_in[v]);
    for (int e = 0; e < ne_; ++e) to_check_[e] = channel_[edge_var_[e]];
    std::fill(to_var_.begin(), to_var_.end(), 0.0);
    posterior_ = channel_;
}

void Decoder::refresh_posterior(int v) {
    double s = channel_[v];
    for (int i = var_ptr_[v]; i < var_ptr_[v + 1]; ++i) s += to_var_[var_edges_[i]];
    posterior_[v] = s;
}

void Decoder::candidates_for_check(int c, double* out) {
    const int lo = check_ptr_[c], hi = check_ptr_[c + 1];
    const int deg = hi - lo;
    double* t = scratch_.data();
    double* fwd = t + deg;
    // forward/backward tanh partial products; exact exclusion without division
    for (int i = 0; i < deg; ++i) t[i] = std::tanh(0.5 * to_check_[lo + i]);
    double acc = 1.0;
    for (int i = 0; i < deg; ++i) {
        fwd[i] = acc;
        acc *= t[i];
    }
    double bwd = 1.0;
    for (int i = deg - 1; i >= 0; --i) {
        out[i] = c2v_from_product(fwd[i] * bwd);
        bwd *= t[i];
    }
}

void Decoder::check_update(int c) {
    const int lo = check_ptr_[c], hi = check_ptr_[c + 1];
    const int deg = hi - lo;
    double* out = scratch_.data() + 2 * deg;
    candidates_for_check(c, out);
    for (int i = 0; i < deg; ++i) to_var_[lo + i] = out[i];
    counters_.c2v_propagated += deg;
    for (int i = lo; i < hi; ++i) refresh_posterior(edge_var_[i]);
}

double Decoder::v2c_message(int v, int c) const {
    double s = channel_[v];
    for (int i = var_ptr_[v]; i < var_ptr_[v + 1]; ++i) {
        int e = var_edges_[i];
        if (edge_check_[e] != c) s += to_var_[e];
    }
    return s;
}

void Decoder::variable_update(int v, int exclude) {
    for (int i = var_ptr_[v]; i < var_ptr_[v + 1]; ++i) {
        int e = var_edges_[i];
        int c = edge_check_[e];
        if (c == exclude) continue;
        to_check_[e] = v2c_message(v, c);
        ++counters_.v2c_propagated;
    }
    refresh_posterior(v);
}

void Decoder::refresh_check_inputs(int c) {
    for (int e = check_ptr_[c]; e < check_ptr_[c + 1]; ++e) {
        to_check_[e] = v2c_message(edge_var_[e], c);
        ++counters_.v2c_propagated;
    }
}

double Decoder::check_metric(int c) {
    const int lo = check_ptr_[c];
    const int deg = check_ptr_[c + 1] - lo;
    double* cand = scratch_.data() + 2 * deg;
    candidates_for_check(c, cand);
    counters_.candidate_evals += deg;
    double phi = 0.0;
    for (int i = 0; i < deg; ++i) phi = std::max(phi, residual(to_var_[lo + i], cand[i]));
    return phi;
}

std::vector<uint8_t> Decoder::hard_decision() const {
    std::vector<uint8_t> bits(nv_);
    for (int v = 0; v < nv_; ++v) bits[v] = posterior_[v] >= 0.0 ? 0 : 1;
    return bits;
}

bool Decoder::syndrome_ok(const std::vector<uint8_t>& bits) const {
    for (int c = 0; c < nc_; ++c) {
        uint8_t acc = 0;
        for (int e = check_ptr_[c]; e < check_ptr_[c + 1]; ++e) acc ^= bits[edge_var_[e]];
        if (acc) return false;
    }
    return true;
}

void Decoder::compute_all_metrics() {
    for (int c = 0; c < nc_; ++c) phi_[c] = check_metric(c);
}

void Decoder::regenerate_queue() {
    queue_.resize(nc_);
    std::iota(queue_.begin(), queue_.end(), 0);
    std::stable_sort(queue_.begin(), queue_.end(), [this](int a, int b) { return phi_[a] > phi_[b]; });
    if (trace_enabled_) queue_history_.push_back(queue_);
}

void Decoder::layered_sweep(const std::vector<int>& order, int iteration) {
    for (int c : order) {
        refresh_check_inputs(c);
        check_update(c);
        if (trace_enabled_) trace_.emplace_back(iteration, c);
    }
}

void Decoder::iteration_bp() {
    for (int c = 0; c < nc_; ++c) check_update(c);
    for (int v = 0; v < nv_; ++v) variable_update(v);
}

void Decoder::iteration_lbp(int iteration) {
    static thread_local std::vector<int> natural;
    natural.resize(nc_);
    std::iota(natural.begin(), natural.end(), 0);
    layered_sweep(natural, iteration);
}

void Decoder::iteration_rlbp(int iteration) {
    compute_all_metrics();
    regenerate_queue();
    layered_sweep(queue_, iteration);
}

void Decoder::iteration_rolbp(int iteration) {
    if (iteration % 2 == 1) {
        compute_all_metrics();
        regenerate_queue();
        layered_sweep(queue_, iteration);
    } else {
        iteration_lbp(iteration);
    }
}

void Decoder::iteration_nwbp(int iteration) {
    for (int step = 0; step < nc_; ++step) {
        int best = 0;
        for (int c = 1; c < nc_; ++c)
            if (phi_[c] > phi_[best]) best = c;
        check_update(best);
        if (trace_enabled_) trace_.emplace_back(iteration, best);
        const int lo = check_ptr_[best], hi = check_ptr_[best + 1];
        for (int e = lo; e < hi; ++e) edge_residual_[e] = 0.0;
        phi_[best] = 0.0;
        for (int i = lo; i < hi; ++i) {
            const int v = edge_var_[i];
            for (int j = var_ptr_[v]; j < var_ptr_[v + 1]; ++j) {
                const int ea = var_edges_[j];
                const int ca = edge_check_[ea];
                if (ca == best) continue;
                to_check_[ea] = v2c_message(v, ca);
                ++counters_.v2c_propagated;
                // residuals of ca's other outgoing messages change
                const int clo = check_ptr_[ca], chi = check_ptr_[ca + 1];
                const int deg = chi - clo;
                double* cand = scratch_.data() + 2 * deg;
                candidates_for_check(ca, cand);
                counters_.candidate_evals += deg - 1;
                double phi = 0.0;
                for (int x = 0; x < deg; ++x) {
                    if (edge_var_[clo + x] != v) edge_residual_[clo + x] = residual(to_var_[clo + x], cand[x]);
                    phi = std::max(phi, edge_residual_[clo + x]);
                }
                phi_[ca] = phi;
            }
        }
    }
}

void Decoder::iteration_rbp(int iteration) {
    for (int step = 0; step < ne_; ++step) {
        int best = 0;
        for (int e = 1; e < ne_; ++e)
            if (edge_residual_[e] > edge_residual_[best]) best = e;
        const int c = edge_check_[best];
        const int v = edge_var_[best];
        const int lo = check_ptr_[c];
        const int deg = check_ptr_[c + 1] - lo;
        double* cand = scratch_.data() + 2 * deg;
        candidates_for_check(c, cand);
        to_var_[best] = cand[best - lo];
        ++counters_.c2v_propagated;
        refresh_posterior(v);
        edge_residual_[best] = 0.0;
        if (trace_enabled_) trace_.emplace_back(iteration, c);
        for (int j = var_ptr_[v]; j < var_ptr_[v + 1]; ++j) {
            const int ea = var_edges_[j];
            const int ca = edge_check_[ea];
            if (ca == c) continue;
            to_check_[ea] = v2c_message(v, ca);
            ++counters_.v2c_propagated;
            const int clo = check_ptr_[ca];
            const int cdeg = check_ptr_[ca + 1] - clo;
            double* cc = scratch_.data() + 2 * cdeg;
            candidates_for_check(ca, cc);
            counters_.candidate_evals += cdeg - 1;
            for (int x = 0; x < cdeg; ++x)
                if (edge_var_[clo + x] != v) edge_residual_[clo + x] = residual(to_var_[clo + x], cc[x]);
        }
    }
}

DecodeResult Decoder::decode(const std::vector<double>& llr_in, const DecodeOptions& opts) {
    if (opts.max_iters < 1) throw std::invalid_argument("decode: max_iters must be >= 1");
    if (opts.reset_state || !state_valid_) {
        init_state(llr_in);
        state_valid_ = true;
    } else {
        // keep c->v messages, refresh channel terms and v->c messages
        if (static_cast<int>(llr_in.size()) != nv_) throw std::invalid_argument("decode: LLR length != N");
        for (int v = 0; v < nv_; ++v) channel_[v] = clip_llr(llr_in[v]);
        for (int v = 0; v < nv_; ++v) variable_update(v);
    }
    trace_enabled_ = opts.trace_updates;
    trace_.clear();
    queue_history_.clear();

    if (opts.schedule == Schedule::NWBP || opts.schedule == Schedule::RBP) {
        // initial residuals against the all-zero c->v state
        for (int c = 0; c < nc_; ++c) {
            const int lo = check_ptr_[c];
            const int deg = check_ptr_[c + 1] - lo;
            double* cand = scratch_.data() + 2 * deg;
            candidates_for_check(c, cand);
            counters_.candidate_evals += deg;
            double phi = 0.0;
            for (int i = 0; i < deg; ++i) {
                edge_residual_[lo + i] = residual(to_var_[lo + i], cand[i]);
                phi = std::max(phi, edge_residual_[lo + i]);
            }
            phi_[c] = phi;
        }
    }

    DecodeResult res;
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        switch (opts.schedule) {
            case Schedule::BP: iteration_bp(); break;
            case Schedule::LBP: iteration_lbp(iter); break;
            case Schedule::RBP: iteration_rbp(iter); break;
            case Schedule::NWBP: iteration_nwbp(iter); break;
            case Schedule::RLBP: iteration_rlbp(iter); break;
            case Schedule::ROLBP: iteration_rolbp(iter); break;
        }
        ++counters_.iterations;
        res.inner_iters = iter;
        if (opts.early_stop) {
            auto bits = hard_decision();
            if (syndrome_ok(bits)) {
                res.converged = true;
                res.hard_bits = std::move(bits);
                break;
            }
        }
    }
    if (res.hard_bits.empty()) {
        res.hard_bits = hard_decision();
        if (!opts.early_stop) res.converged = syndrome_ok(res.hard_bits);
    }
    res.posterior = posterior_;
    return res;
}

DecodeResult decode(const TannerGraph& graph, const std::vector<double>& llr_in, const DecodeOptions& opts) {
    Decoder d(graph);
    return d.decode(llr_in, opts);
}

}  // namespace linksim
