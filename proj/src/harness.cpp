#include "linksim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace linksim {

namespace {

constexpr uint64_t kBatchFrames = 64;  // stop rule evaluated on batch boundaries

struct FrameTally {
    uint64_t bit_errors = 0;
    uint64_t frame_errors = 0;
    uint64_t outer_iters = 0;
    uint64_t inner_iters = 0;
    uint64_t activations = 0;
    uint64_t messages = 0;
    uint64_t decoder_iterations = 0;
    uint64_t gamma_neg = 0;

    void add(const FrameTally& o) {
        bit_errors += o.bit_errors;
        frame_errors += o.frame_errors;
        outer_iters += o.outer_iters;
        inner_iters += o.inner_iters;
        activations += o.activations;
        messages += o.messages;
        decoder_iterations += o.decoder_iterations;
        gamma_neg += o.gamma_neg;
    }
};

FrameTally simulate_frame(const Scenario& sc, const TannerGraph& graph, double sigma_v2, uint64_t frame_seed) {
    const SystemConfig& sys = sc.idd.detector.system;
    const Constellation& constellation = Constellation::qpsk();
    const int k = graph.spec.k;
    const int n_tx = sys.n_tx;
    const int num_instants = sys.symbols_per_codeword;

    Rng rng(frame_seed);

    std::vector<std::vector<uint8_t>> messages(n_tx, std::vector<uint8_t>(k));
    std::vector<std::vector<cd>> symbols(n_tx);
    for (int a = 0; a < n_tx; ++a) {
        for (int j = 0; j < k; ++j) messages[a][j] = rng.bit();
        symbols[a] = map_bits(constellation, encode(graph, messages[a]));
    }

    ChannelRealization chan = draw_realization(sys, sigma_v2, rng);
    std::vector<VectorC> rx(num_instants);
    VectorC x(n_tx);
    for (int s = 0; s < num_instants; ++s) {
        for (int a = 0; a < n_tx; ++a) x(a) = symbols[a][s];
        rx[s] = transmit(x, chan.at_instant(s, sys), sigma_v2, rng);
    }

    IddResult res = run_idd(rx, chan, graph, sc.idd);

    FrameTally t;
    for (int a = 0; a < n_tx; ++a) {
        uint64_t errs = 0;
        for (int j = 0; j < k; ++j)
            if (res.streams[a].hard_bits[graph.systematic_cols[j]] != messages[a][j]) ++errs;
        t.bit_errors += errs;
        if (errs) t.frame_errors = 1;
    }
    t.outer_iters = res.outer_iters;
    t.inner_iters = res.total_inner_iters;
    t.activations = res.decoder_activations;
    t.messages = res.decoder_counters.messages();
    t.decoder_iterations = res.decoder_counters.iterations;
    t.gamma_neg = res.gamma_negative_events;
    return t;
}

}  // namespace

void Scenario::validate() const {
    code.validate();
    idd.validate();
    const SystemConfig& sys = idd.detector.system;
    const int m = Constellation::qpsk().bits_per_symbol;
    if (sys.symbols_per_codeword * m != code.n)
        throw std::invalid_argument("Scenario: L*m must equal the codeword length");
    if (code.kind == CodeKind::Standard && idd.comp != Compensation::Off)
        throw std::invalid_argument("Scenario: compensation applies to Root-Check codes only");
}

TannerGraph build_scenario_graph(const Scenario& sc) {
    return build_code(sc.code, sc.seed, sc.standard_var_degree);
}

SimRecord run_point(const Scenario& sc, const TannerGraph& graph, double snr_db, const StopRule& stop, int workers) {
    sc.validate();
    const SystemConfig& sys = sc.idd.detector.system;
    const int m = Constellation::qpsk().bits_per_symbol;
    const double sigma_v2 = noise_variance(snr_db, sys.n_tx, graph.spec.rate(), m);
    const uint64_t point_tag = splitmix64(static_cast<uint64_t>(std::llround(snr_db * 1000.0)) + 0x51ABu);

    workers = std::max(1, workers);
    const auto t0 = std::chrono::steady_clock::now();

    FrameTally total;
    uint64_t frames_done = 0;
    const uint64_t frame_limit = stop.fixed_frames ? stop.fixed_frames : stop.max_frames;

    while (frames_done < frame_limit) {
        const uint64_t batch = std::min<uint64_t>(kBatchFrames, frame_limit - frames_done);
        std::vector<FrameTally> partial(workers);
        auto work = [&](int w) {
            for (uint64_t i = w; i < batch; i += workers) {
                uint64_t frame_seed = mix_seed(sc.seed, point_tag, frames_done + i);
                partial[w].add(simulate_frame(sc, graph, sigma_v2, frame_seed));
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }
        for (const auto& p : partial) total.add(p);
        frames_done += batch;
        if (!stop.fixed_frames && total.bit_errors >= stop.target_bit_errors) break;
    }

    const auto t1 = std::chrono::steady_clock::now();

    SimRecord r;
    r.snr_db = snr_db;
    r.frames = frames_done;
    r.bit_errors = total.bit_errors;
    r.frame_errors = total.frame_errors;
    const double denom = static_cast<double>(frames_done) * graph.spec.k * sys.n_tx;
    r.ber = denom > 0 ? total.bit_errors / denom : 0.0;
    r.fer = frames_done > 0 ? static_cast<double>(total.frame_errors) / frames_done : 0.0;
    r.mean_inner_iters = total.activations ? static_cast<double>(total.inner_iters) / total.activations : 0.0;
    r.mean_outer_iters = frames_done ? static_cast<double>(total.outer_iters) / frames_done : 0.0;
    r.complex_mults = frames_done ? static_cast<double>(total.messages) / 4.0 / frames_done : 0.0;
    r.gamma_neg_events = total.gamma_neg;
    r.total_inner_iters = total.inner_iters;
    r.decoder_activations = total.activations;
    r.decoder_messages = total.messages;
    r.decoder_iterations = total.decoder_iterations;
    r.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return r;
}

std::vector<SimRecord> run_sweep(const Scenario& sc, const std::vector<double>& snr_list, const StopRule& stop,
                                 int workers) {
    TannerGraph graph = build_scenario_graph(sc);
    std::vector<SimRecord> records;
    records.reserve(snr_list.size());
    for (double snr : snr_list) records.push_back(run_point(sc, graph, snr, stop, workers));
    std::sort(records.begin(), records.end(), [](const SimRecord& a, const SimRecord& b) { return a.snr_db < b.snr_db; });
    return records;
}

namespace {

std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5e", x);
    return buf;
}

}  // namespace

std::string emit_csv(const std::vector<SimRecord>& records) {
    std::vector<SimRecord> sorted(records);
    std::sort(sorted.begin(), sorted.end(), [](const SimRecord& a, const SimRecord& b) { return a.snr_db < b.snr_db; });
    std::ostringstream out;
    out << "snr_db,ber,fer,frames,bit_errors,mean_inner_iters,mean_outer_iters,complex_mults,wall_time_s,"
           "gamma_neg_events\n";
    for (const SimRecord& r : sorted) {
        out << fmt_sci(r.snr_db) << ',' << fmt_sci(r.ber) << ',' << fmt_sci(r.fer) << ',' << r.frames << ','
            << r.bit_errors << ',' << fmt_sci(r.mean_inner_iters) << ',' << fmt_sci(r.mean_outer_iters) << ','
            << fmt_sci(r.complex_mults) << ',' << fmt_sci(r.wall_time_s) << ',' << r.gamma_neg_events << '\n';
    }
    return out.str();
}

std::vector<SimRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_csv: empty input");
    std::vector<SimRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 10) throw std::runtime_error("parse_csv: bad row: " + line);
        SimRecord r;
        r.snr_db = std::stod(fields[0]);
        r.ber = std::stod(fields[1]);
        r.fer = std::stod(fields[2]);
        r.frames = std::stoull(fields[3]);
        r.bit_errors = std::stoull(fields[4]);
        r.mean_inner_iters = std::stod(fields[5]);
        r.mean_outer_iters = std::stod(fields[6]);
        r.complex_mults = std::stod(fields[7]);
        r.wall_time_s = std::stod(fields[8]);
        r.gamma_neg_events = std::stoull(fields[9]);
        records.push_back(r);
    }
    return records;
}

std::vector<double> parse_snr_range(const std::string& spec) {
    double start, step, stop;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':')
        throw std::invalid_argument("bad SNR range (expected start:step:stop): " + spec);
    if (step <= 0) throw std::invalid_argument("SNR step must be positive");
    std::vector<double> out;
    for (double s = start; s <= stop + 1e-9; s += step) out.push_back(s);
    return out;
}

}  // namespace linksim
